"""Exact integer linear algebra.

Everything here works over Python's arbitrary-precision ints.  Matrices are
immutable; the Smith normal form uses a fixed pivoting rule (smallest nonzero
absolute value, ties broken in row-major order) so that all downstream
results are deterministic.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence


class DimensionError(ValueError):
    pass


class NotAComplexError(ValueError):
    pass


class IntMatrix:
    """Dense immutable integer matrix, stored row-major."""

    __slots__ = ("rows", "cols", "_data", "_hash")

    def __init__(self, rows: int, cols: int, data: Iterable[Iterable[int]] | None = None):
        if rows < 0 or cols < 0:
            raise DimensionError("negative dimension")
        self.rows = rows
        self.cols = cols
        if data is None:
            self._data = tuple((0,) * cols for _ in range(rows))
        else:
            body = tuple(tuple(map(int, r)) for r in data)
            if len(body) != rows or any(len(r) != cols for r in body):
                raise DimensionError(f"data does not match shape {rows}x{cols}")
            self._data = body
        self._hash = None

    @classmethod
    def _trusted(cls, rows: int, cols: int, body: tuple) -> "IntMatrix":
        # body is already a tuple of int tuples of the right shape
        m = object.__new__(cls)
        m.rows, m.cols, m._data, m._hash = rows, cols, body, None
        return m

    # construction -------------------------------------------------------
    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], cols: int | None = None) -> "IntMatrix":
        rows = [list(r) for r in rows]
        if cols is None:
            cols = len(rows[0]) if rows else 0
        return cls(len(rows), cols, rows)

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "IntMatrix":
        return cls(rows, cols)

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        return cls(n, n, [[int(i == j) for j in range(n)] for i in range(n)])

    @classmethod
    def diag(cls, entries: Sequence[int], rows: int | None = None, cols: int | None = None) -> "IntMatrix":
        rows = len(entries) if rows is None else rows
        cols = len(entries) if cols is None else cols
        out = [[0] * cols for _ in range(rows)]
        for i, e in enumerate(entries):
            out[i][i] = e
        return cls(rows, cols, out)

    @classmethod
    def column(cls, values: Sequence[int]) -> "IntMatrix":
        return cls(len(values), 1, [[v] for v in values])

    @classmethod
    def block(cls, blocks: Sequence[Sequence["IntMatrix"]]) -> "IntMatrix":
        """Assemble a block matrix; every block row must agree in height."""
        out: list[list[int]] = []
        cols = None
        for brow in blocks:
            height = brow[0].rows
            if any(b.rows != height for b in brow):
                raise DimensionError("block row heights differ")
            width = sum(b.cols for b in brow)
            if cols is None:
                cols = width
            elif cols != width:
                raise DimensionError("block column widths differ")
            for i in range(height):
                line: list[int] = []
                for b in brow:
                    line.extend(b._data[i])
                out.append(line)
        return cls(len(out), cols or 0, out)

    @classmethod
    def block_diag(cls, mats: Sequence["IntMatrix"]) -> "IntMatrix":
        rows = sum(m.rows for m in mats)
        cols = sum(m.cols for m in mats)
        out = [[0] * cols for _ in range(rows)]
        r0 = c0 = 0
        for m in mats:
            for i, line in enumerate(m._data):
                out[r0 + i][c0:c0 + m.cols] = line
            r0 += m.rows
            c0 += m.cols
        return cls(rows, cols, out)

    # access ------------------------------------------------------------
    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    def __getitem__(self, idx: tuple[int, int]) -> int:
        i, j = idx
        return self._data[i][j]

    def tolist(self) -> list[list[int]]:
        return [list(r) for r in self._data]

    def row(self, i: int) -> tuple[int, ...]:
        return self._data[i]

    def col(self, j: int) -> tuple[int, ...]:
        return tuple(r[j] for r in self._data)

    def nonzero(self) -> Iterator[tuple[int, int, int]]:
        """``(row, col, value)`` for every nonzero entry."""
        for i, r in enumerate(self._data):
            for j, x in enumerate(r):
                if x:
                    yield i, j, x

    def entries(self) -> list[int]:
        return [x for r in self._data for x in r]

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> "IntMatrix":
        return IntMatrix(len(rows), len(cols), [[self._data[i][j] for j in cols] for i in rows])

    def is_zero(self) -> bool:
        return all(x == 0 for r in self._data for x in r)

    def trace(self) -> int:
        if self.rows != self.cols:
            raise DimensionError("trace of non-square matrix")
        return sum(self._data[i][i] for i in range(self.rows))

    # arithmetic --------------------------------------------------------
    @property
    def T(self) -> "IntMatrix":
        return IntMatrix._trusted(self.cols, self.rows, tuple(zip(*self._data)) if self.rows else ((),) * self.cols)

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        if self.cols != other.rows:
            raise DimensionError(f"cannot multiply {self.shape} by {other.shape}")
        n = other.cols
        zero = (0,) * n
        orows = other._data
        out = []
        for r in self._data:
            acc = None
            for k, x in enumerate(r):
                if x:
                    row = orows[k]
                    if acc is None:
                        acc = [x * y for y in row] if x != 1 else list(row)
                    else:
                        for j, y in enumerate(row):
                            if y:
                                acc[j] += x * y
            out.append(zero if acc is None else tuple(acc))
        return IntMatrix._trusted(self.rows, n, tuple(out))

    def _check_same(self, other: "IntMatrix") -> None:
        if self.shape != other.shape:
            raise DimensionError(f"shape mismatch {self.shape} vs {other.shape}")

    def __add__(self, other: "IntMatrix") -> "IntMatrix":
        self._check_same(other)
        return IntMatrix._trusted(self.rows, self.cols,
                                  tuple(tuple(x + y for x, y in zip(r, s)) for r, s in zip(self._data, other._data)))

    def __sub__(self, other: "IntMatrix") -> "IntMatrix":
        self._check_same(other)
        return IntMatrix._trusted(self.rows, self.cols,
                                  tuple(tuple(x - y for x, y in zip(r, s)) for r, s in zip(self._data, other._data)))

    def __neg__(self) -> "IntMatrix":
        return IntMatrix._trusted(self.rows, self.cols, tuple(tuple(-x for x in r) for r in self._data))

    def scale(self, k: int) -> "IntMatrix":
        return IntMatrix(self.rows, self.cols, [[k * x for x in r] for r in self._data])

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, IntMatrix):
            return NotImplemented
        return self.shape == other.shape and self._data == other._data

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.rows, self.cols, self._data))
        return self._hash

    def __repr__(self) -> str:
        return f"IntMatrix({self.rows}, {self.cols}, {self.tolist()})"

    def det(self) -> int:
        """Determinant by fraction-free (Bareiss) elimination."""
        if self.rows != self.cols:
            raise DimensionError("determinant of non-square matrix")
        n = self.rows
        if n == 0:
            return 1
        a = self.tolist()
        sign = 1
        prev = 1
        for k in range(n - 1):
            if a[k][k] == 0:
                for i in range(k + 1, n):
                    if a[i][k] != 0:
                        a[k], a[i] = a[i], a[k]
                        sign = -sign
                        break
                else:
                    return 0
            for i in range(k + 1, n):
                for j in range(k + 1, n):
                    a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
            prev = a[k][k]
        return sign * a[n - 1][n - 1]


def hstack(mats: Sequence[IntMatrix], rows: int | None = None) -> IntMatrix:
    if not mats:
        return IntMatrix.zeros(rows or 0, 0)
    return IntMatrix.block([list(mats)])


def vstack(mats: Sequence[IntMatrix], cols: int | None = None) -> IntMatrix:
    if not mats:
        return IntMatrix.zeros(0, cols or 0)
    return IntMatrix.block([[m] for m in mats])


# ---------------------------------------------------------------------------
# Smith normal form


@dataclass(frozen=True)
class SmithDecomposition:
    """``u @ a @ v == d`` with ``u``, ``v`` unimodular and ``d`` in Smith form."""

    u: IntMatrix
    d: IntMatrix
    v: IntMatrix

    @property
    def diagonal(self) -> list[int]:
        return [self.d[i, i] for i in range(min(self.d.shape))]

    @property
    def rank(self) -> int:
        return sum(1 for x in self.diagonal if x != 0)


def smith(a: IntMatrix) -> SmithDecomposition:
    m, n = a.shape
    A = a.tolist()
    U = [[int(i == j) for j in range(m)] for i in range(m)]
    V = [[int(i == j) for j in range(n)] for i in range(n)]

    def swap_rows(i: int, j: int) -> None:
        if i != j:
            A[i], A[j] = A[j], A[i]
            U[i], U[j] = U[j], U[i]

    def swap_cols(i: int, j: int) -> None:
        if i != j:
            for r in A:
                r[i], r[j] = r[j], r[i]
            for r in V:
                r[i], r[j] = r[j], r[i]

    def add_row(dst: int, src: int, k: int) -> None:
        # row_dst += k * row_src
        rs, rd = A[src], A[dst]
        for j in range(n):
            if rs[j]:
                rd[j] += k * rs[j]
        us, ud = U[src], U[dst]
        for j in range(m):
            if us[j]:
                ud[j] += k * us[j]

    def add_col(dst: int, src: int, k: int) -> None:
        for r in A:
            if r[src]:
                r[dst] += k * r[src]
        for r in V:
            if r[src]:
                r[dst] += k * r[src]

    def pivot_in(s: int) -> tuple[int, int] | None:
        best = None
        best_val = 0
        for i in range(s, m):
            row = A[i]
            for j in range(s, n):
                x = row[j]
                if x and (best is None or abs(x) < best_val):
                    best, best_val = (i, j), abs(x)
                    if best_val == 1:
                        return best
        return best

    for s in range(min(m, n)):
        p = pivot_in(s)
        if p is None:
            break
        while True:
            swap_rows(s, p[0])
            swap_cols(s, p[1])
            piv = A[s][s]
            dirty = False
            for i in range(s + 1, m):
                if A[i][s]:
                    add_row(i, s, -(A[i][s] // piv))
                    dirty = dirty or A[i][s] != 0
            for j in range(s + 1, n):
                if A[s][j]:
                    add_col(j, s, -(A[s][j] // piv))
                    dirty = dirty or A[s][j] != 0
            if dirty:
                p = pivot_in(s)
                continue
            bad = None
            for i in range(s + 1, m):
                for j in range(s + 1, n):
                    if A[i][j] % piv:
                        bad = i
                        break
                if bad is not None:
                    break
            if bad is None:
                break
            add_row(s, bad, 1)
            p = pivot_in(s)
        if A[s][s] < 0:
            A[s] = [-x for x in A[s]]
            U[s] = [-x for x in U[s]]
    return SmithDecomposition(IntMatrix(m, m, U), IntMatrix(m, n, A), IntMatrix(n, n, V))


def solve(a: IntMatrix, b: IntMatrix) -> IntMatrix | None:
    """Integer solution ``x`` of ``a @ x == b``, or None when none exists.

    Free coordinates in the Smith basis are set to zero, so the answer is a
    deterministic function of the input.
    """
    if a.rows != b.rows:
        raise DimensionError(f"solve: a has {a.rows} rows, b has {b.rows}")
    snf = smith(a)
    c = (snf.u @ b).tolist()
    diag = snf.diagonal
    r = snf.rank
    y = [[0] * b.cols for _ in range(a.cols)]
    for i in range(a.rows):
        for k in range(b.cols):
            ci = c[i][k]
            if i < r:
                if ci % diag[i]:
                    return None
                y[i][k] = ci // diag[i]
            elif ci:
                return None
    return snf.v @ IntMatrix(a.cols, b.cols, y)


def nullspace(a: IntMatrix) -> IntMatrix:
    """Matrix whose columns form a Z-basis of ``{x : a @ x == 0}``."""
    snf = smith(a)
    r = snf.rank
    return snf.v.submatrix(range(a.cols), range(r, a.cols))


def rank(a: IntMatrix) -> int:
    return smith(a).rank


# ---------------------------------------------------------------------------
# finitely generated abelian groups and homology


@dataclass(frozen=True)
class FgAbelianGroup:
    """``Z^free_rank`` plus cyclic torsion in invariant-factor form."""

    free_rank: int = 0
    torsion: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        t = tuple(int(x) for x in self.torsion)
        if any(x < 2 for x in t):
            raise ValueError("invariant factors must be >= 2")
        if any(t[i + 1] % t[i] for i in range(len(t) - 1)):
            raise ValueError("invariant factors must divide each other")
        object.__setattr__(self, "torsion", t)

    @classmethod
    def from_diagonal(cls, free_rank: int, entries: Iterable[int]) -> "FgAbelianGroup":
        """Group ``Z^free_rank + sum Z/e`` for arbitrary positive ``entries``."""
        entries = [abs(e) for e in entries if abs(e) != 1]
        free_rank += sum(1 for e in entries if e == 0)
        entries = [e for e in entries if e]
        if not entries:
            return cls(free_rank, ())
        d = smith(IntMatrix.diag(entries)).diagonal
        return cls(free_rank, tuple(x for x in d if x > 1))

    @property
    def is_trivial(self) -> bool:
        return self.free_rank == 0 and not self.torsion

    @property
    def order(self) -> int | None:
        """Cardinality, or None when infinite."""
        if self.free_rank:
            return None
        out = 1
        for t in self.torsion:
            out *= t
        return out

    def __str__(self) -> str:
        parts = []
        if self.free_rank:
            parts.append("Z" if self.free_rank == 1 else f"Z^{self.free_rank}")
        parts.extend(f"Z/{t}" for t in self.torsion)
        return " + ".join(parts) if parts else "0"


def homology(d_next: IntMatrix, d_this: IntMatrix) -> FgAbelianGroup:
    """``ker d_this / im d_next`` where ``d_next: C_{n+1} -> C_n``, ``d_this: C_n -> C_{n-1}``."""
    if d_this.cols != d_next.rows:
        raise DimensionError(f"incompatible differentials {d_this.shape} and {d_next.shape}")
    if not (d_this @ d_next).is_zero():
        raise NotAComplexError("not a complex: composite of differentials is nonzero")
    kernel_rank = d_this.cols - rank(d_this)
    diag = smith(d_next).diagonal
    image = [x for x in diag if x]
    return FgAbelianGroup(kernel_rank - len(image), tuple(x for x in image if x > 1))


class SparseSystem:
    """Incrementally assembled integer linear system ``A x = b``.

    Unknowns and equations are addressed by arbitrary hashable keys; columns
    are accumulated sparsely and only densified for the final solve.
    """

    def __init__(self) -> None:
        self._eq: dict = {}
        self._unknowns: list = []
        self._cols: list[dict[int, int]] = []
        self._rhs: dict[int, int] = {}

    def equation(self, key) -> int:
        idx = self._eq.get(key)
        if idx is None:
            idx = self._eq[key] = len(self._eq)
        return idx

    def add_unknown(self, key, column: dict) -> None:
        col: dict[int, int] = {}
        for ek, c in column.items():
            if c:
                i = self.equation(ek)
                col[i] = col.get(i, 0) + c
        self._unknowns.append(key)
        self._cols.append(col)

    def add_rhs(self, key, value: int) -> None:
        if value:
            i = self.equation(key)
            self._rhs[i] = self._rhs.get(i, 0) + value

    @property
    def size(self) -> tuple[int, int]:
        return (len(self._eq), len(self._unknowns))

    def solve(self) -> dict | None:
        """Map unknown key -> integer value, or None if no integer solution.

        Unit pivots are eliminated sparsely first (rows and columns scanned
        in index order); what remains goes through the dense Smith solver.
        """
        m, n = self.size
        if n == 0:
            return {} if not any(self._rhs.values()) else None
        rows: list[dict[int, int]] = [{} for _ in range(m)]
        where: list[set[int]] = [set() for _ in range(n)]
        for j, col in enumerate(self._cols):
            for i, c in col.items():
                rows[i][j] = c
                where[j].add(i)
        rhs = [self._rhs.get(i, 0) for i in range(m)]
        alive = set(range(m))
        steps = []
        for i in range(m):
            row = rows[i]
            piv = next((j for j in sorted(row) if abs(row[j]) == 1), None)
            if piv is None:
                continue
            a = row[piv]
            alive.discard(i)
            for j in row:
                where[j].discard(i)
            steps.append((piv, a, dict(row), rhs[i]))
            for r in sorted(where[piv]):
                other = rows[r]
                k = other[piv] * a  # other -= k * row
                for j, c in row.items():
                    v = other.get(j, 0) - k * c
                    if v:
                        other[j] = v
                        where[j].add(r)
                    else:
                        other.pop(j, None)
                        where[j].discard(r)
                rhs[r] -= k * rhs[i]
            where[piv] = set()
        values = [0] * n
        rest = sorted(r for r in alive if rows[r] or rhs[r])
        if rest:
            if any(not rows[r] for r in rest):
                return None
            cols = sorted({j for r in rest for j in rows[r]})
            pos = {j: c for c, j in enumerate(cols)}
            dense = [[0] * len(cols) for _ in rest]
            for k, r in enumerate(rest):
                for j, c in rows[r].items():
                    dense[k][pos[j]] = c
            x = solve(IntMatrix(len(rest), len(cols), dense), IntMatrix.column([rhs[r] for r in rest]))
            if x is None:
                return None
            for j, c in pos.items():
                values[j] = x[c, 0]
        for piv, a, row, b in reversed(steps):
            values[piv] = a * (b - sum(c * values[j] for j, c in row.items() if j != piv))
        return {k: values[j] for j, k in enumerate(self._unknowns)}

    def satisfied(self, values: dict) -> bool:
        """Whether the assignment (missing unknowns read as 0) solves every equation."""
        lhs = [0] * len(self._eq)
        for key, col in zip(self._unknowns, self._cols):
            v = values.get(key, 0)
            if v:
                for i, c in col.items():
                    lhs[i] += c * v
        return all(lhs[i] == self._rhs.get(i, 0) for i in range(len(self._eq)))


def random_kernel_element(rng, residual, size: int, bound: int = 2) -> list[int]:
    """Random integer combination of a kernel basis of the linear map ``residual``.

    ``residual`` takes a length-``size`` list and returns the list of
    constraint values; it is sampled on unit vectors to build the matrix.
    """
    if size == 0:
        return []
    cols = []
    for j in range(size):
        e = [0] * size
        e[j] = 1
        cols.append(list(residual(e)))
    nrows = len(cols[0])
    if nrows == 0:
        return [rng.randint(-bound, bound) for _ in range(size)]
    a = IntMatrix(nrows, size, [[cols[j][i] for j in range(size)] for i in range(nrows)])
    k = nullspace(a)
    coeffs = [rng.randint(-bound, bound) for _ in range(k.cols)]
    return [sum(k[i, j] * coeffs[j] for j in range(k.cols)) for i in range(size)]
