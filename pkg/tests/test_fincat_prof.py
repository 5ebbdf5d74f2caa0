import random

import pytest

from fixtrace import catalog
from fixtrace.chains import ChainComplex, ChainMap, lefschetz_trace, random_chain_map, random_complex
from fixtrace.duality import (DualityError, canned_weights, coefficient_vector, colimit_map, pointwise_dual,
                              profunctor_trace, verify_dual_pair, verify_linearity, weighted_colimit)
from fixtrace.fincat import CategoryError, FinCategory, conjugacy_classes
from fixtrace.groupring import FiniteGroup, small_groups
from fixtrace.linalg import IntMatrix
from fixtrace.profunctor import (NatMap, Profunctor, ProfunctorError, coend, cyclic_swap, random_diagram,
                                 random_natural_endomorphism, random_profunctor, shadow)


def retract() -> FinCategory:
    """``s: a -> b``, ``r: b -> a`` with ``r s = id_a``; ``e = s r`` is an idempotent on ``b``."""
    mor = [("id_a", 0, 0), ("id_b", 1, 1), ("s", 0, 1), ("r", 1, 0), ("e", 1, 1)]
    ida, idb, s, r, e = range(5)
    comp = {(ida, ida): ida, (s, ida): s, (idb, s): s, (r, s): ida, (e, s): s, (ida, r): r, (s, r): e,
            (idb, idb): idb, (r, idb): r, (e, idb): e, (idb, e): e, (r, e): r, (e, e): e}
    return FinCategory(["a", "b"], mor, comp, [ida, idb])


def sphere_map(src, dst, k):
    return ChainMap(src, dst, {0: IntMatrix.from_rows([[k]])})


# ---------------------------------------------------------------------------
# finite categories


def test_category_validation():
    with pytest.raises(CategoryError, match="missing"):
        FinCategory(["x"], [("id", 0, 0), ("e", 0, 0)], {(0, 0): 0, (0, 1): 1, (1, 0): 1}, [0])
    with pytest.raises(CategoryError, match="associative"):
        # p p = q, q q = q, p q = p, q p = q: (p q) p = q but p (q p) = p
        FinCategory(["x"], [("id", 0, 0), ("p", 0, 0), ("q", 0, 0)],
                    {(0, 0): 0, (0, 1): 1, (1, 0): 1, (0, 2): 2, (2, 0): 2,
                     (1, 1): 2, (2, 2): 2, (1, 2): 1, (2, 1): 2}, [0])
    with pytest.raises(CategoryError, match="identity"):
        FinCategory(["x", "y"], [("id", 0, 0), ("f", 0, 1)], {(0, 0): 0, (1, 0): 1}, [0, 1])


def test_retract_category():
    c = retract()
    assert not c.is_loop_free()
    cs = conjugacy_classes(c)
    # r s = id_a is conjugate to s r = e
    assert cs.labels() == ["[id_a]", "[id_b]"]
    assert cs.classes == ((0, 4), (1,))


def test_conjugacy_classes_of_groups_match_class_counts():
    # number of conjugacy classes: abelian groups have |G|, S3 has 3
    for name, g in small_groups(6).items():
        cs = conjugacy_classes(FinCategory.from_group(g))
        assert cs.count == (3 if name == "S3" else g.order)
    assert conjugacy_classes(FinCategory.from_group(FiniteGroup.symmetric(3))).labels() == ["[012]", "[021]", "[120]"]


def test_loop_free_categories():
    assert FinCategory.arrow().is_loop_free()
    assert FinCategory.discrete(["x", "y"]).is_loop_free()
    assert FinCategory.empty().is_loop_free()
    assert not FinCategory.from_group(FiniteGroup.cyclic(2)).is_loop_free()
    square = FinCategory.poset(["0", "1", "2", "3"], [(0, 1), (0, 2), (1, 3), (2, 3)])
    assert square.is_loop_free()
    assert conjugacy_classes(square).count == 4
    # 0 -> 3 is the transitive closure; one morphism per related pair
    assert square.num_morphisms == 4 + 4 + 1


def test_strings_of_arrow():
    a = FinCategory.arrow()
    assert len(a.strings(0)) == 2 and len(a.strings(1)) == 1 and a.strings(2) == []
    chain3 = FinCategory.poset(["0", "1", "2"], [(0, 1), (1, 2)])
    # non-degenerate strings in the nerve of a 3-chain: 3, 3, 1
    assert [len(chain3.strings(k)) for k in range(4)] == [3, 3, 1, 0]


def test_op_and_product():
    a = FinCategory.arrow()
    ao = a.op()
    al = a.morphism_index("alpha")
    assert (ao.src[al], ao.tgt[al]) == (a.tgt[al], a.src[al])
    p = a.product(a)
    assert p.num_objects == 4 and p.num_morphisms == 9


# ---------------------------------------------------------------------------
# profunctors


def test_build_reports_missing_action():
    a = FinCategory.arrow()
    z = ChainComplex.sphere(0)
    with pytest.raises(ProfunctorError, match="no action"):
        Profunctor.diagram(a, {0: z, 1: z})


def test_functoriality_checked():
    c = retract()
    z = ChainComplex.sphere(0)
    s, r = c.morphism_index("s"), c.morphism_index("r")
    # r s must act as the identity of X(a); 2 * 2 = 4 is not 1
    with pytest.raises(ProfunctorError, match="functoriality"):
        Profunctor.diagram(c, {0: z, 1: z}, {s: sphere_map(z, z, 2), r: sphere_map(z, z, 2)})


@pytest.mark.parametrize("cat", [FinCategory.arrow(), FinCategory.discrete(["x", "y", "z"]),
                                 FinCategory.poset(["0", "1", "2"], [(0, 1), (1, 2)]),
                                 FinCategory.poset(["0", "1", "2", "3"], [(0, 1), (0, 2), (1, 3), (2, 3)])],
                         ids=["arrow", "discrete3", "chain3", "square"])
def test_shadow_of_unit_counts_objects(cat):
    # for a loop-free category the shadow of the unit has homology Z^objects in degree 0
    h = catalog.homology_labels(shadow(Profunctor.unit(cat)).complex)
    assert h == {"0": "Z" if cat.num_objects == 1 else f"Z^{cat.num_objects}"}


def test_shadow_refuses_loops():
    with pytest.raises(CategoryError, match="loop-free"):
        shadow(Profunctor.unit(FinCategory.from_group(FiniteGroup.cyclic(2))))


def arrow_diagram(k: int):
    a = FinCategory.arrow()
    z = ChainComplex.sphere(0)
    return Profunctor.diagram(a, {0: z, 1: z}, {a.morphism_index("alpha"): sphere_map(z, z, k)})


@pytest.mark.parametrize("k", [0, 1, 2, 3, -4])
def test_cofiber_colimit_is_mapping_cone(k):
    phi, _ = canned_weights()["cofiber"]
    h = catalog.homology_labels(weighted_colimit(phi, arrow_diagram(k)))
    # cone of multiplication by k on Z
    want = {0: {"0": "Z", "1": "Z"}, 1: {}}.get(abs(k), {"0": f"Z/{abs(k)}"})
    assert h == want


def test_coproduct_colimit_is_direct_sum():
    phi, _ = canned_weights()["coproduct"]
    b = FinCategory.discrete(["a", "b"])
    m = Profunctor.diagram(b, {0: ChainComplex.sphere(0), 1: ChainComplex.sphere(1, 2)})
    assert catalog.homology_labels(weighted_colimit(phi, m)) == {"0": "Z", "1": "Z^2"}


def test_empty_colimit_is_zero():
    phi, _ = canned_weights()["empty"]
    assert weighted_colimit(phi, Profunctor.diagram(FinCategory.empty(), {})).is_zero()


# ---------------------------------------------------------------------------
# duality


def test_canned_certificates_verify():
    for name, (_, cert) in canned_weights().items():
        rep = verify_dual_pair(cert)
        assert rep.passed, (name, rep.failures())


def test_broken_certificate_fails():
    phi, cert = canned_weights()["cofiber"]
    doubled = [ChainMap(c.source, c.target, {n: m.scale(2) for n, m in c.components.items()})
               for c in cert.coev.components]
    cert.coev = NatMap(cert.coev.source, cert.coev.target, doubled)
    rep = verify_dual_pair(cert)
    assert not rep.passed
    assert "triangle_1" in rep.failures()
    with pytest.raises(DualityError, match="does not verify"):
        coefficient_vector(phi, cert, rep)


def test_coefficient_vectors():
    got = {name: coefficient_vector(phi, cert) for name, (phi, cert) in canned_weights().items()}
    assert got == {"empty": {}, "coproduct": {"[id_a]": 1, "[id_b]": 1}, "cofiber": {"[id_a]": -1, "[id_b]": 1}}


@pytest.mark.parametrize("seed", range(6))
@pytest.mark.parametrize("name", ["empty", "coproduct", "cofiber"])
def test_linearity_on_random_diagrams(name, seed):
    rng = random.Random(seed)
    phi, cert = canned_weights()[name]
    m = random_diagram(rng, phi.target)
    f = random_natural_endomorphism(rng, m)
    rep = verify_linearity(phi, cert, m, f)
    assert rep.passed
    # independent oracle: L of a coproduct is the sum, L of a cone is the difference
    locals_ = [lefschetz_trace(f.component(o, 0)) for o in range(phi.target.num_objects)]
    want = {"empty": 0, "coproduct": sum(locals_), "cofiber": locals_[1] - locals_[0] if locals_ else 0}[name]
    assert rep.lhs == want == lefschetz_trace(colimit_map(phi, m, f))


def test_circle_in_disk_linearity():
    disk = catalog.load("circle_in_disk.json")
    phi, cert = canned_weights()["cofiber"]
    rep = verify_linearity(phi, cert, disk, disk.identity())
    # identity on the cone of S^1 -> D^2: chi(D^2) - chi(S^1) = 1 - 0
    assert rep.passed
    assert rep.lhs == 1


def test_linearity_rejects_wrong_index_category():
    phi, cert = canned_weights()["cofiber"]
    m = Profunctor.diagram(FinCategory.discrete(["x"]), {0: ChainComplex.sphere(0)})
    with pytest.raises(DualityError):
        verify_linearity(phi, cert, m, m.identity())


@pytest.mark.parametrize("seed", range(4))
@pytest.mark.parametrize("cat", [FinCategory.arrow(), FinCategory.discrete(["x", "y", "z"])], ids=["arrow", "discrete"])
def test_pointwise_trace_is_objectwise_lefschetz(cat, seed):
    rng = random.Random(seed)
    m = random_diagram(rng, cat)
    f = random_natural_endomorphism(rng, m)
    cert = pointwise_dual(m)
    rep = verify_dual_pair(cert)
    assert rep.passed, rep.failures()
    t = profunctor_trace(f, cert, rep)
    assert t.target_labels == ["[id_*]"]
    assert t.matrix.tolist() == [[lefschetz_trace(f.component(o, 0)) for o in range(cat.num_objects)]]


def test_profunctor_trace_rejects_foreign_maps():
    m = arrow_diagram(2)
    cert = pointwise_dual(m)
    other = arrow_diagram(3)
    with pytest.raises(DualityError):
        profunctor_trace(other.identity(), cert)


# ---------------------------------------------------------------------------
# shadows


@pytest.mark.parametrize("seed", range(5))
def test_shadow_cyclicity(seed):
    rng = random.Random(seed)
    a, d = FinCategory.arrow(), FinCategory.discrete(["x", "y"])
    x, y = random_profunctor(rng, a, d), random_profunctor(rng, d, a)
    sxy, syx = shadow(coend(x, y)), shadow(coend(y, x))
    assert catalog.homology_labels(sxy.complex) == catalog.homology_labels(syx.complex)
    assert cyclic_swap(sxy, syx).is_chain_map()


def test_random_profunctor_is_functorial():
    rng = random.Random(11)
    x = random_profunctor(rng, FinCategory.arrow(), FinCategory.arrow())
    x.check()
    assert x.entries and all(isinstance(c, ChainComplex) for c in x.entries)


def test_coend_with_unit_preserves_homology():
    rng = random.Random(5)
    a = FinCategory.arrow()
    m = random_diagram(rng, a)
    um = coend(Profunctor.unit(a), m)
    for o in range(a.num_objects):
        assert catalog.homology_labels(um.entry(o, 0)) == catalog.homology_labels(m.entry(o, 0))


def test_random_chain_map_is_chain_map():
    rng = random.Random(2)
    c, e = random_complex(rng), random_complex(rng)
    assert random_chain_map(rng, c, e).is_chain_map()
