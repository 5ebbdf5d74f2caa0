import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fixtrace.acceptance import random_group_matrix, twisted_pairs
from fixtrace.groupring import (AbelianGroup, FiniteGroup, GroupError, GroupHom, GroupRingElement, GRMatrix,
                                agree_on_generators, all_homomorphisms, augment, hs_trace, push_classes,
                                small_groups, twisted_classes)

S3 = FiniteGroup.symmetric(3)


def brute_classes(g, phi):
    """Union-find over x ~ h x phi(h)^-1, independent of the library's orbit code."""
    parent = {x: x for x in g.elements()}

    def find(x):
        while parent[x] != x:
            x = parent[x]
        return x

    for x in g.elements():
        for h in g.elements():
            y = g.mul(g.mul(h, x), g.inv(phi(h)))
            parent[find(y)] = find(x)
    return len({find(x) for x in g.elements()})


def test_table_validation():
    with pytest.raises(GroupError, match="square"):
        FiniteGroup([[0, 1]])
    with pytest.raises(GroupError, match="identity"):
        FiniteGroup([[1, 0], [1, 0]])
    with pytest.raises(GroupError):
        GroupHom(FiniteGroup.cyclic(2), FiniteGroup.cyclic(3), [0, 1])


def test_homomorphism_counts():
    # |Hom(C_m, C_n)| = gcd(m, n); |Hom(S3, S3)| = 6 automorphisms + 3 onto C2 + trivial
    for m in range(1, 7):
        for n in range(1, 7):
            assert len(all_homomorphisms(FiniteGroup.cyclic(m), FiniteGroup.cyclic(n))) == math.gcd(m, n)
    assert len(all_homomorphisms(S3, S3)) == 10
    assert len(all_homomorphisms(FiniteGroup.cyclic(6), S3)) == 6


def test_small_groups():
    groups = small_groups(6)
    assert sorted(groups) == ["C1", "C2", "C2xC2", "C3", "C4", "C5", "C6", "S3"]
    assert [n for n, g in groups.items() if not g.is_abelian()] == ["S3"]


def test_conjugacy_classes_of_s3():
    cs = twisted_classes(S3, GroupHom.identity(S3))
    assert cs.count == 3
    assert [S3.name(r) for r in cs.representatives] == ["012", "021", "120"]


@pytest.mark.parametrize("n", range(1, 9))
@pytest.mark.parametrize("k", range(0, 5))
def test_cyclic_twisted_count(n, k):
    # x ~ x + (1 - k) h on Z/n, so there are gcd(1 - k, n) classes
    g = FiniteGroup.cyclic(n)
    phi = GroupHom(g, g, [(k * x) % n for x in range(n)])
    assert twisted_classes(g, phi).count == math.gcd(1 - k, n) == brute_classes(g, phi)


@pytest.mark.parametrize("name", sorted(small_groups(6)))
def test_finite_twisted_count_matches_union_find(name):
    g = small_groups(6)[name]
    for phi in all_homomorphisms(g, g):
        cs = twisted_classes(g, phi)
        assert cs.count == brute_classes(g, phi)
        for x in g.elements():
            h = (x * 7 + 1) % g.order
            assert cs.key(g.mul(g.mul(h, x), g.inv(phi(h)))) == cs.key(x)


def test_abelian_twisted_classes():
    z = AbelianGroup.free(1)
    for d in (-2, 0, 2, 3, 5):
        cs = twisted_classes(z, GroupHom(z, z, [(d,)]))
        assert cs.count == abs(1 - d)
    assert twisted_classes(z, GroupHom.identity(z)).count is None
    z2 = AbelianGroup.free(2)
    phi = GroupHom.from_matrix(z2, z2, [[2, 1], [0, 3]])
    cs = twisted_classes(z2, phi)
    assert cs.count == abs((1 - 2) * (1 - 3) - 0) == 2
    assert len({cs.key((a, b)) for a in range(-3, 4) for b in range(-3, 4)}) == 2
    # lift is a section of key
    for a in range(-2, 3):
        k = cs.key((a, 1))
        assert cs.key(cs.lift(k)) == k


def test_abelian_with_torsion():
    g = AbelianGroup(free_rank=1, torsion=(4,))
    phi = GroupHom(g, g, [(3, 0), (0, 3)])
    # Z/2 from Z (1 - 3 = -2), Z/gcd(1 - 3, 4) = Z/2 from the torsion
    assert twisted_classes(g, phi).count == 4


def test_group_ring_arithmetic():
    c3 = FiniteGroup.cyclic(3)
    t = GroupRingElement.basis(c3, 1)
    one = GroupRingElement.scalar(c3, 1)
    assert (one + t) * (one - t) == one - t * t
    assert t * t * t == 1
    assert (one + t).augment() == 2
    assert GroupRingElement(c3, [(1, 2), (1, -2)]).is_zero()
    assert repr(3 * t - one) == "-1*[0] + 3*[1]"


def test_grmatrix_shapes():
    m = GRMatrix.identity(S3, 2)
    with pytest.raises(ValueError):
        m @ GRMatrix.zeros(S3, 3, 1)
    with pytest.raises(ValueError):
        GRMatrix(S3, 2, 2, [[0, 1]])
    assert GRMatrix.block_diag(S3, [m, GRMatrix.identity(S3, 1)]) == GRMatrix.identity(S3, 3)


def test_hs_trace_of_one_plus_t():
    z = AbelianGroup.free(1)
    a = GRMatrix(z, 1, 1, [[{(0,): 1, (1,): 1}]])
    v = hs_trace(a, GroupHom.identity(z))
    assert v.to_labels() == {"[0]": 1, "[1]": 1}
    assert augment(v) == 2


def test_hs_trace_rejects_non_square():
    with pytest.raises(ValueError):
        hs_trace(GRMatrix.zeros(S3, 1, 2), GroupHom.identity(S3))


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_augmented_trace_is_trace_of_augmentation(seed):
    rng = random.Random(seed)
    name, g = rng.choice(list(small_groups(6).items()))
    phi = rng.choice(all_homomorphisms(g, g))
    a = random_group_matrix(rng, g, rng.randint(1, 3))
    assert augment(hs_trace(a, phi)) == a.augment().trace()


@pytest.mark.parametrize("seed", range(5))
def test_twisted_cyclicity_over_abelian_groups(seed):
    # for abelian G the stated form tr(a phi(b)) = tr(b phi(a)) does hold
    checked = 0
    for name, g, phi, a, b in twisted_pairs(seed, 60):
        if not g.is_abelian():
            continue
        cs = twisted_classes(g, phi)
        assert hs_trace(a @ b.map(phi), phi, cs) == hs_trace(b @ a.map(phi), phi, cs)
        checked += 1
    assert checked


@pytest.mark.parametrize("seed", range(5))
def test_twisted_cyclicity_corrected_form(seed):
    # tr(a phi(b)) = tr(b a) in the twisted classes, for every group and endomorphism
    for name, g, phi, a, b in twisted_pairs(seed, 60):
        cs = twisted_classes(g, phi)
        assert hs_trace(a @ b.map(phi), phi, cs) == hs_trace(b @ a, phi, cs)


def test_stated_cyclicity_counterexample_in_s3():
    # frozen counterexample for the decisions ledger
    elems = {S3.name(x): x for x in S3.elements()}
    phi = GroupHom(S3, S3, [elems[n] for n in ["012", "021", "210", "201", "120", "102"]])
    a = GRMatrix(S3, 1, 1, [[{elems["102"]: 1}]])
    b = GRMatrix(S3, 1, 1, [[{elems["120"]: 1}]])
    cs = twisted_classes(S3, phi)
    assert cs.count == 3
    lhs = hs_trace(a @ b.map(phi), phi, cs)
    assert lhs != hs_trace(b @ a.map(phi), phi, cs)
    assert lhs == hs_trace(b @ a, phi, cs)


def test_push_classes_commutes_with_trace():
    rng = random.Random(3)
    groups = small_groups(6)
    done = 0
    for g in groups.values():
        for h in groups.values():
            for i in all_homomorphisms(g, h):
                phi_g, phi_h = GroupHom.identity(g), GroupHom.identity(h)
                a = random_group_matrix(rng, g, 2)
                assert push_classes(i, phi_g, phi_h, hs_trace(a, phi_g)) == hs_trace(a.map(i), phi_h)
                done += 1
    assert done > 100


def test_push_classes_requires_intertwining():
    c3 = FiniteGroup.cyclic(3)
    inv = GroupHom(c3, c3, [0, 2, 1])
    i = GroupHom(c3, S3, [0, 3, 4])  # onto the rotations
    assert i.images[1] != i.images[2]
    v = hs_trace(GRMatrix.identity(c3, 1), inv)
    with pytest.raises(GroupError):
        push_classes(i, inv, GroupHom.trivial(S3, S3), v)


def test_compose_and_agree():
    z = AbelianGroup.free(1)
    two = GroupHom(z, z, [(2,)])
    assert two.compose(two)((1,)) == (4,)
    assert agree_on_generators(two.compose(GroupHom.identity(z)), two)
