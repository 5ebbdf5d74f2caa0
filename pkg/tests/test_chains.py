import random

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from fixtrace.chains import (ChainComplex, ChainError, ChainMap, TwistedEndo, TwistedHomotopy, cone_map, dual,
                             dual_pair, duality_trace, inclusion_into_cone, lefschetz_trace, mapping_cone,
                             random_chain_map, random_complex, random_endomorphism, reidemeister_trace,
                             triangle_identities, verify_homotopic)
from fixtrace.groupring import AbelianGroup, FiniteGroup, GroupHom, GroupRingElement, GRMatrix, augment
from fixtrace.linalg import IntMatrix
from fixtrace.reidemeister import circle_complex, circle_map, torus_map


def rational_hopf_trace(f: ChainMap) -> int:
    """sum (-1)^n tr(H_n(f) (x) Q), computed with sympy from a basis of Z_n extending one of B_n."""
    c = f.source
    total = sympy.Integer(0)
    for n in c.degrees:
        r = c.rank(n)
        if not r:
            continue
        d = sympy.Matrix(c.d(n).tolist()) if c.rank(n - 1) else sympy.zeros(0, r)
        dn1 = sympy.Matrix(c.d(n + 1).tolist()) if c.rank(n + 1) else sympy.zeros(r, 0)
        z = d.nullspace() if d.rows else [sympy.eye(r)[:, i] for i in range(r)]
        b = dn1.columnspace()
        basis = list(b)
        comp = []
        for v in z:
            if sympy.Matrix.hstack(*(basis + [v])).rank() > len(basis):
                basis.append(v)
                comp.append(v)
        if not comp:
            continue
        m = sympy.Matrix.hstack(*basis)
        fn = sympy.Matrix(f.component(n).tolist())
        k = len(b)
        for idx, v in enumerate(comp):
            coords = (m.T * m).solve(m.T * (fn * v))
            total += (-1 if n % 2 else 1) * coords[k + idx]
    assert total.is_integer
    return int(total)


def test_euler_examples():
    c = ChainComplex({0: 3, 1: 3}, {1: IntMatrix.from_rows([[-1, -1, 0], [1, 0, -1], [0, 1, 1]])})
    assert c.euler_characteristic() == 0 == lefschetz_trace(c.identity())
    assert ChainComplex.sphere(2).euler_characteristic() == 1
    assert ChainComplex.sphere(1, rank=3).euler_characteristic() == -3
    assert c.shift(1).euler_characteristic() == 0
    assert ChainComplex.sphere(0).shift(1).euler_characteristic() == -1


def test_rejects_non_complex():
    with pytest.raises(ChainError, match="not a complex"):
        ChainComplex({0: 1, 1: 1, 2: 1}, {1: IntMatrix.from_rows([[1]]), 2: IntMatrix.from_rows([[1]])})
    with pytest.raises(ChainError, match="shape"):
        ChainComplex({0: 1, 1: 2}, {1: IntMatrix.from_rows([[1]])})


def test_rejects_non_chain_map():
    c = ChainComplex({0: 1, 1: 1}, {1: IntMatrix.from_rows([[2]])})
    with pytest.raises(ChainError):
        ChainMap(c, c, {0: IntMatrix.from_rows([[1]])})


@pytest.mark.parametrize("seed", range(40))
def test_lefschetz_equals_rational_hopf_trace(seed):
    rng = random.Random(seed)
    c = random_complex(rng)
    f = random_chain_map(rng, c, c) if seed % 2 else random_endomorphism(rng, c)
    assert lefschetz_trace(f) == rational_hopf_trace(f)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_duality_trace_is_lefschetz_trace(seed):
    rng = random.Random(seed)
    c = random_complex(rng, max_total_rank=5)
    f = random_chain_map(rng, c, c)
    assert duality_trace(f, dual_pair(c)) == lefschetz_trace(f)


@pytest.mark.parametrize("seed", range(15))
def test_triangle_identities(seed):
    c = random_complex(random.Random(seed), max_total_rank=5)
    assert triangle_identities(dual_pair(c)) == (True, True)


def test_double_dual_negates_the_differential():
    # (-1)^n d^T applied twice gives (-1)^n (-1)^(1-n) d = -d
    c = random_complex(random.Random(7))
    cvv = dual(dual(c))
    assert cvv.ranks == c.ranks
    assert all(cvv.d(n) == -c.d(n) for n in c.degrees)


@pytest.mark.parametrize("seed", range(20))
def test_lefschetz_homotopy_invariance(seed):
    rng = random.Random(seed)
    c = random_complex(rng)
    f = random_chain_map(rng, c, c)
    h = {n: IntMatrix(c.rank(n + 1), c.rank(n), [[rng.randint(-3, 3) for _ in range(c.rank(n))]
                                                 for _ in range(c.rank(n + 1))]) for n in c.degrees}
    zero = {n: IntMatrix.zeros(c.rank(n), c.rank(n - 1)) for n in c.degrees}
    g = ChainMap(c, c, {n: f.component(n) + c.d(n + 1) @ h[n] + h.get(n - 1, zero[n]) @ c.d(n)
                        for n in c.degrees})
    assert lefschetz_trace(g) == lefschetz_trace(f)
    cert = verify_homotopic(f, g)
    assert cert is not None and cert.verify()


def test_verify_homotopic_examples():
    acyclic = ChainComplex({0: 1, 1: 1}, {1: IntMatrix.from_rows([[1]])})
    cert = verify_homotopic(acyclic.identity(), acyclic.zero_map())
    assert cert is not None and cert.h[0] == IntMatrix.from_rows([[1]])
    # Z --2--> Z has homology Z/2, so id is not null-homotopic over Z
    two = ChainComplex({0: 1, 1: 1}, {1: IntMatrix.from_rows([[2]])})
    assert verify_homotopic(two.identity(), two.zero_map()) is None
    assert verify_homotopic(two.identity(), two.identity()) is not None


def test_verify_homotopic_over_finite_group_ring():
    c2 = FiniteGroup.cyclic(2)
    t = GroupRingElement.basis(c2, 1)
    unit = ChainComplex({0: 1, 1: 1}, {1: GRMatrix(c2, 1, 1, [[t]])}, c2)
    cert = verify_homotopic(unit.identity(), unit.zero_map())
    assert cert is not None and cert.h[0] == GRMatrix(c2, 1, 1, [[t]])  # t is its own inverse
    one_minus_t = ChainComplex({0: 1, 1: 1}, {1: GRMatrix(c2, 1, 1, [[1 - t]])}, c2)
    assert verify_homotopic(one_minus_t.identity(), one_minus_t.zero_map()) is None


def test_verify_homotopic_refuses_infinite_groups():
    c = circle_complex()
    with pytest.raises(ChainError, match="infinite"):
        verify_homotopic(c.identity(), c.identity())


@pytest.mark.parametrize("d", [-1, 0, 2, 3, 5])
def test_circle_reidemeister_traces(d):
    r = reidemeister_trace(circle_map(d))
    # z -> z^d has |1 - d| essential classes; for d >= 2 each has index -1
    assert augment(r) == 1 - d
    assert r.nonzero_classes == abs(1 - d)
    if d >= 2:
        assert set(r.coefficients.values()) == {-1}
    assert augment(r) == lefschetz_trace(circle_map(d).augment())


def test_circle_degree_two_labels():
    assert reidemeister_trace(circle_map(2)).to_labels() == {"[0]": -1}
    assert reidemeister_trace(circle_map(3)).to_labels() == {"[0]": -1, "[1]": -1}


def test_torus_reidemeister_trace():
    m = [[2, 1], [0, 3]]
    r = reidemeister_trace(torus_map(m))
    det = (1 - 2) * (1 - 3) - 1 * 0
    assert augment(r) == det == lefschetz_trace(torus_map(m).augment())
    assert r.nonzero_classes == abs(det)


def test_twisted_law_enforced():
    c = circle_complex()
    z = c.group
    with pytest.raises(ChainError, match="law"):
        TwistedEndo(c, GroupHom.from_matrix(z, z, [[2]]), {0: GRMatrix.identity(z, 1), 1: GRMatrix.identity(z, 1)})


@pytest.mark.parametrize("d", [2, 3, 4])
@pytest.mark.parametrize("seed", range(4))
def test_reidemeister_twisted_homotopy_invariance(d, seed):
    rng = random.Random(seed)
    f = circle_map(d)
    c, z, phi = f.complex, f.group, f.twist
    h0 = GRMatrix(z, 1, 1, [[{(rng.randint(-3, 3),): rng.randint(-2, 2) for _ in range(3)}]])
    g = TwistedEndo(c, phi, {0: f.component(0) + c.d(1) @ h0, 1: f.component(1) + h0 @ c.d(1).map(phi)})
    assert TwistedHomotopy(g, f, {0: h0}).verify()
    assert reidemeister_trace(g) == reidemeister_trace(f)


def test_cone_shape_and_inclusion():
    a = ChainComplex.sphere(0)
    x = ChainComplex({0: 1, 1: 1}, {})
    i = ChainMap(a, x, {0: IntMatrix.from_rows([[1]])})
    cone = mapping_cone(i)
    assert cone.ranks == {0: 1, 1: 2}
    assert cone.d(1) == IntMatrix.from_rows([[0, 1]])  # target summand first
    assert inclusion_into_cone(i).is_chain_map()
    assert cone.euler_characteristic() == x.euler_characteristic() - a.euler_characteristic()


@pytest.mark.parametrize("seed", range(20))
def test_cone_additivity(seed):
    rng = random.Random(seed)
    a = random_complex(rng, max_total_rank=4)
    x = random_complex(rng, max_total_rank=4)
    i = random_chain_map(rng, a, x)
    fa = random_chain_map(rng, a, a)
    # X' = X + A with i' = (i, id)
    xs = x.direct_sum(a)
    ip = ChainMap(a, xs, {n: IntMatrix.block([[i.component(n)], [IntMatrix.identity(a.rank(n))]])
                          for n in a.degrees})
    fx = random_chain_map(rng, x, x)
    # upper triangular with corner i fa - fx i makes the square commute
    fxs = ChainMap(xs, xs, {n: IntMatrix.block([[fx.component(n), i.component(n) @ fa.component(n)
                                                 - fx.component(n) @ i.component(n)],
                                                [IntMatrix.zeros(a.rank(n), x.rank(n)), fa.component(n)]])
                            for n in xs.degrees})
    cm = cone_map(ip, fa, fxs)
    assert lefschetz_trace(cm) == lefschetz_trace(fxs) - lefschetz_trace(fa)
    assert lefschetz_trace(cm) == rational_hopf_trace(cm)


def test_cone_map_requires_commuting_square():
    a = ChainComplex.sphere(0)
    i = ChainMap(a, a, {0: IntMatrix.from_rows([[1]])})
    two = ChainMap(a, a, {0: IntMatrix.from_rows([[2]])})
    with pytest.raises(ChainError, match="commute"):
        cone_map(i, a.identity(), two)


def test_augment_commutes_with_trace_on_finite_group():
    c3 = FiniteGroup.cyclic(3)
    t = GroupRingElement.basis(c3, 1)
    c = ChainComplex({0: 1, 1: 1}, {1: GRMatrix(c3, 1, 1, [[t - 1]])}, c3)
    for k in range(3):
        phi = GroupHom(c3, c3, [(k * x) % 3 for x in range(3)])
        a0 = GRMatrix(c3, 1, 1, [[t]])
        # d A_1 = A_0 phi(d): (t - 1) A_1 = t (t^k - 1)
        a1 = GRMatrix(c3, 1, 1, [[GroupRingElement(c3, [(1 + j, 1) for j in range(k)])]])
        f = TwistedEndo(c, phi, {0: a0, 1: a1})
        assert augment(reidemeister_trace(f)) == lefschetz_trace(f.augment()) == 1 - k


def test_abelian_free_group_ring_traces_are_exact():
    z = AbelianGroup.free(1)
    big = 10 ** 30
    c = ChainComplex({0: 1}, {}, z)
    f = TwistedEndo(c, GroupHom.identity(z), {0: GRMatrix(z, 1, 1, [[{(5,): big}]])})
    assert reidemeister_trace(f).to_labels() == {"[5]": big}
