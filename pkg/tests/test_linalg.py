import itertools
import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fixtrace.linalg import (DimensionError, FgAbelianGroup, IntMatrix, NotAComplexError, SparseSystem, homology,
                             nullspace, smith, solve)


def cofactor_det(rows):
    if not rows:
        return 1
    return sum((-1) ** j * rows[0][j] * cofactor_det([r[:j] + r[j + 1:] for r in rows[1:]])
               for j in range(len(rows)) if rows[0][j])


def matrices(max_rows=4, max_cols=4, bound=6):
    return st.integers(0, max_rows).flatmap(lambda r: st.integers(0, max_cols).flatmap(
        lambda c: st.lists(st.lists(st.integers(-bound, bound), min_size=c, max_size=c), min_size=r, max_size=r)
        .map(lambda rows: IntMatrix(r, c, rows))))


def test_smith_identity_and_zero():
    assert smith(IntMatrix.identity(2)).d == IntMatrix.identity(2)
    assert smith(IntMatrix.zeros(2, 2)).d == IntMatrix.zeros(2, 2)


def test_smith_2x2_example():
    a = IntMatrix.from_rows([[2, 4], [6, 8]])
    s = smith(a)
    assert s.diagonal == [2, 4]
    # oracle: d1 = gcd of entries, d1 * d2 = |det|
    assert s.diagonal[0] == math.gcd(2, 4, 6, 8)
    assert s.diagonal[0] * s.diagonal[1] == abs(cofactor_det([[2, 4], [6, 8]]))
    assert s.u @ a @ s.v == s.d


def test_smith_empty_matrices():
    for shape in [(0, 0), (0, 3), (2, 0)]:
        s = smith(IntMatrix.zeros(*shape))
        assert s.d.shape == shape
        assert s.diagonal == []


@settings(max_examples=150, deadline=None)
@given(matrices())
def test_smith_invariants(a):
    s = smith(a)
    assert s.u @ a @ s.v == s.d
    assert abs(cofactor_det(s.u.tolist())) == 1
    assert abs(cofactor_det(s.v.tolist())) == 1
    d = s.d.tolist()
    for i in range(a.rows):
        for j in range(a.cols):
            if i != j:
                assert d[i][j] == 0
    diag = s.diagonal
    nz = [x for x in diag if x]
    assert all(x > 0 for x in nz)
    assert diag[:len(nz)] == nz  # zeros come last
    assert all(nz[i + 1] % nz[i] == 0 for i in range(len(nz) - 1))
    assert smith(a) == s


def test_solve_examples():
    assert solve(IntMatrix.from_rows([[2]]), IntMatrix.from_rows([[4]])) == IntMatrix.from_rows([[2]])
    assert solve(IntMatrix.from_rows([[2]]), IntMatrix.from_rows([[3]])) is None
    a = IntMatrix.from_rows([[2, 4], [6, 8]])
    b = IntMatrix.from_rows([[2], [6]])
    x = solve(a, b)
    assert x is not None and a @ x == b


def test_solve_dimension_mismatch():
    with pytest.raises(DimensionError):
        solve(IntMatrix.zeros(2, 2), IntMatrix.zeros(3, 1))


@settings(max_examples=150, deadline=None)
@given(matrices(3, 3, 4), st.lists(st.integers(-8, 8), min_size=3, max_size=3))
def test_solve_sound_and_complete(a, rhs):
    b = IntMatrix.column(rhs[:a.rows]) if a.rows else IntMatrix.zeros(0, 1)
    x = solve(a, b)
    if x is not None:
        assert a @ x == b
        return
    # no solution: brute force over a box, and the Smith obstruction names a coordinate
    for cand in itertools.product(range(-6, 7), repeat=a.cols):
        assert a @ IntMatrix.column(list(cand)) != b
    s = smith(a)
    c = (s.u @ b).col(0)
    diag, r = s.diagonal, s.rank
    assert any((i < r and c[i] % diag[i]) or (i >= r and c[i]) for i in range(a.rows))


def test_homology_examples():
    z = IntMatrix.zeros(1, 1)
    assert homology(z, z) == FgAbelianGroup(1, ())
    assert homology(IntMatrix.from_rows([[2]]), z) == FgAbelianGroup(0, (2,))
    # triangle boundary: d1 is the 3x3 vertex/edge incidence, d2 is empty
    d1 = IntMatrix.from_rows([[-1, -1, 0], [1, 0, -1], [0, 1, 1]])
    assert homology(IntMatrix.zeros(3, 0), d1) == FgAbelianGroup(1, ())
    assert homology(d1, IntMatrix.zeros(0, 3)) == FgAbelianGroup(1, ())


def test_homology_rejects_non_complex():
    with pytest.raises(NotAComplexError, match="not a complex"):
        homology(IntMatrix.from_rows([[1]]), IntMatrix.from_rows([[1]]))


def random_unimodular(rng, n):
    m = IntMatrix.identity(n)
    for _ in range(3 * n):
        i, j = rng.sample(range(n), 2) if n > 1 else (0, 0)
        if i == j:
            continue
        rows = m.tolist()
        k = rng.choice([-2, -1, 1, 2])
        rows[i] = [x + k * y for x, y in zip(rows[i], rows[j])]
        m = IntMatrix.from_rows(rows, n)
    return m


def inverse_unimodular(m):
    n = m.rows
    cols = [solve(m, IntMatrix.column([int(i == j) for i in range(n)])).col(0) for j in range(n)]
    return IntMatrix(n, n, [[cols[j][i] for j in range(n)] for i in range(n)])


@pytest.mark.parametrize("seed", range(20))
def test_homology_invariant_under_change_of_basis(seed):
    rng = random.Random(seed)
    r0, r1, r2 = rng.randint(1, 3), rng.randint(1, 3), rng.randint(1, 3)
    d1 = IntMatrix(r0, r1, [[rng.randint(-3, 3) for _ in range(r1)] for _ in range(r0)])
    ker = nullspace(d1)
    coef = IntMatrix(ker.cols, r2, [[rng.randint(-2, 2) for _ in range(r2)] for _ in range(ker.cols)])
    d2 = ker @ coef  # columns lie in ker d1
    p0, p1, p2 = (random_unimodular(rng, r) for r in (r0, r1, r2))
    e1 = p0 @ d1 @ inverse_unimodular(p1)
    e2 = p1 @ d2 @ inverse_unimodular(p2)
    assert homology(d2, d1) == homology(e2, e1)


def test_fg_abelian_canonical_form():
    assert FgAbelianGroup.from_diagonal(0, [1, 2, 3, 0]) == FgAbelianGroup(1, (6,))
    with pytest.raises(ValueError):
        FgAbelianGroup(0, (1,))
    with pytest.raises(ValueError):
        FgAbelianGroup(0, (2, 3))
    assert str(FgAbelianGroup(2, (2,))) == "Z^2 + Z/2"


def test_big_integers_are_exact():
    big = 10 ** 40
    a = IntMatrix.from_rows([[big, 1], [0, big]])
    assert (a @ a)[0, 0] == big * big
    assert smith(a).diagonal == [1, big * big]


@settings(max_examples=80, deadline=None)
@given(matrices(4, 4, 3), st.lists(st.integers(-5, 5), min_size=4, max_size=4))
def test_sparse_system_agrees_with_dense_solve(a, rhs):
    sys = SparseSystem()
    for i in range(a.rows):
        sys.equation(i)
        sys.add_rhs(i, rhs[i])
    for j in range(a.cols):
        sys.add_unknown(("x", j), {i: a[i, j] for i in range(a.rows)})
    sol = sys.solve()
    dense = solve(a, IntMatrix.column(rhs[:a.rows])) if a.rows else IntMatrix.zeros(a.cols, 1)
    assert (sol is None) == (dense is None)
    if sol is not None:
        x = [sol[("x", j)] for j in range(a.cols)]
        assert sys.satisfied(sol)
        assert all(sum(a[i, j] * x[j] for j in range(a.cols)) == rhs[i] for i in range(a.rows))
