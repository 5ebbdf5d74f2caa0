import random

import pytest

from fixtrace import catalog
from fixtrace.chains import ChainMap, lefschetz_trace, reidemeister_trace
from fixtrace.groupring import (AbelianGroup, FiniteGroup, GroupHom, GRMatrix, all_homomorphisms, augment,
                                push_classes, small_groups, twisted_classes)
from fixtrace.reidemeister import (BaseChangeData, PermBimodule, ReidemeisterError, RelativeTraceInput,
                                   base_change_dual, basepoint_input, circle_map, compatible_triples, induce_endo,
                                   induce_up, random_relative_input, relative_reidemeister, tensor_bimodules,
                                   torus_circle_input, verify_reidemeister_additivity)


def test_base_change_on_all_small_homomorphisms():
    groups = small_groups(6)
    bad = [(gn, hn) for gn, g in groups.items() for hn, h in groups.items()
           for i in all_homomorphisms(g, h) if not base_change_dual(i).verified]
    assert bad == []


@pytest.mark.parametrize("n", range(1, 7))
def test_base_change_from_integers(n):
    z = AbelianGroup.free(1)
    dual = base_change_dual(GroupHom(z, FiniteGroup.cyclic(n), [1 % n]))
    assert dual.verified, dual.checks


def test_base_change_needs_finite_target():
    z = AbelianGroup.free(1)
    with pytest.raises(ReidemeisterError, match="finite"):
        BaseChangeData(GroupHom.identity(z))


@pytest.mark.parametrize("sub", [[0], [0, 3], [0, 2, 4], [0, 1, 2, 3, 4, 5]])
def test_tensor_over_subgroup_has_orbit_many_generators(sub):
    # Z[H] (x)_K Z[H] is free on H x H / K, which has |H|^2 / |K| elements
    h = FiniteGroup.cyclic(6)
    hs = list(h.elements())
    m = PermBimodule(hs, h.mul, h.mul)
    mod, canon = tensor_bimodules(m, m, sub, h)
    assert len(mod.basis) == 36 // len(sub)
    for a in hs:
        for b in hs:
            for k in sub:
                assert canon(h.mul(a, h.inv(k)), h.mul(k, b)) == canon(a, b)


def test_induce_up_is_functorial():
    c3, c6 = FiniteGroup.cyclic(3), FiniteGroup.cyclic(6)
    inp = random_relative_input(random.Random(4))
    c = inp.g_a.complex
    g = inp.i.source
    for i in all_homomorphisms(g, c3):
        for j in all_homomorphisms(c3, c6):
            assert induce_up(j.compose(i), c) == induce_up(j, induce_up(i, c))


@pytest.mark.parametrize("seed", range(25))
def test_reidemeister_trace_is_natural_under_base_change(seed):
    # R(i_! g) = i_*(R(g)) in the twisted classes of the target
    inp = random_relative_input(random.Random(seed))
    g, i, psi = inp.g_a, inp.i, inp.f_x.twist
    lhs = reidemeister_trace(induce_endo(i, g, psi))
    assert lhs == push_classes(i, g.twist, psi, reidemeister_trace(g))


def test_induce_endo_requires_intertwining():
    f = circle_map(2)
    z2 = AbelianGroup.free(2)
    i = GroupHom.from_matrix(f.group, z2, [[1], [0]])
    with pytest.raises(ReidemeisterError, match="intertwine"):
        induce_endo(i, f, GroupHom.identity(z2))


@pytest.mark.parametrize("d", [2, 3, 5])
def test_basepoint_additivity(d):
    rep = verify_reidemeister_additivity(basepoint_input(d))
    assert rep.passed and rep.ferrario is True
    # the basepoint is a fixed point of index 1 in the class of 0
    assert rep.i_r_g.to_labels() == {"[0]": 1}
    assert rep.lefschetz == {"L_f": 1 - d, "L_g": 1, "L_rel": -d}
    want = {f"[{k}]": -1 for k in range(d - 1)}
    want["[0]"] = -2
    assert rep.relative.to_labels() == want


def test_torus_relative_to_circle():
    inp = catalog.load("torus_hyperbolic.json")
    rep = verify_reidemeister_additivity(inp)
    assert rep.passed and rep.ferrario is None
    m = catalog.TORUS_MATRIX
    assert augment(rep.r_f) == (1 - m[0][0]) * (1 - m[1][1]) - m[0][1] * m[1][0]
    assert augment(rep.i_r_g) == 1 - m[0][0]
    assert rep.as_dict() == verify_reidemeister_additivity(torus_circle_input(m)).as_dict()


def test_torus_input_needs_invariant_circle():
    with pytest.raises(ReidemeisterError, match="circle"):
        torus_circle_input([[2, 0], [1, 3]])


@pytest.mark.parametrize("seed", range(40))
def test_random_relative_additivity(seed):
    inp = random_relative_input(random.Random(seed))
    rep = verify_reidemeister_additivity(inp)
    assert rep.passed, rep.as_dict()
    # augmentation oracle: the ordinary Lefschetz numbers of the augmented maps
    assert rep.lefschetz["L_rel"] == lefschetz_trace(inp.f_x.augment()) - lefschetz_trace(inp.g_a.augment())


def test_relative_input_rejects_non_commuting_j():
    inp = basepoint_input(3)
    z = inp.f_x.group
    t = GRMatrix(z, 1, 1, [[{(1,): 1}]])
    bad = RelativeTraceInput(inp.f_x, inp.g_a, inp.i, ChainMap(inp.j.source, inp.j.target, {0: t}))
    with pytest.raises(ReidemeisterError, match="commute"):
        relative_reidemeister(bad)


def test_relative_input_rejects_wrong_groups():
    inp = basepoint_input(2)
    c2 = FiniteGroup.cyclic(2)
    with pytest.raises(ReidemeisterError, match="coefficient groups"):
        RelativeTraceInput(inp.f_x, inp.g_a, GroupHom.trivial(inp.g_a.group, c2), inp.j).check()


def test_compatible_triples_intertwine():
    triples = compatible_triples(3)
    assert triples
    for g, h, i, pg, ph in triples:
        assert all(i(pg(x)) == ph(i(x)) for x in g.elements())


def test_twisted_class_push_is_well_defined_on_classes():
    # pushing every element of a source class lands in one target class
    for g, h, i, pg, ph in compatible_triples(4)[::7]:
        src, dst = twisted_classes(g, pg), twisted_classes(h, ph)
        for x in g.elements():
            assert dst.key(i(x)) == dst.key(i(src.lift(src.key(x))))
