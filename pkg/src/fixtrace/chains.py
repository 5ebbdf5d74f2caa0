"""Bounded chain complexes of finitely generated free modules.

A complex lives over Z (``group is None``, differentials are
:class:`IntMatrix`) or over a group ring Z[G] (differentials are
:class:`GRMatrix` acting on column vectors of a free right module).  The
differential ``d(n)`` maps degree ``n`` to degree ``n - 1``.

Sign conventions, fixed once here:

* tensor product: ``d(x (x) y) = dx (x) y + (-1)^|x| x (x) dy``;
* shift: ``C[k]_n = C_{n-k}`` with differential ``(-1)^k d``;
* mapping cone of ``i: A -> X``: ``X_n + A_{n-1}`` with
  ``d(x, a) = (dx + i a, -da)``;
* dual: ``(C^v)_n = Hom(C_{-n}, Z)`` with differential ``(-1)^n d^T``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Union

from .groupring import Group, GroupHom, GRMatrix, TwistedClassVector, hs_trace, twisted_classes
from .linalg import FgAbelianGroup, IntMatrix, SparseSystem, homology, nullspace, random_kernel_element

Matrix = Union[IntMatrix, GRMatrix]


def sign(n: int) -> int:
    """``(-1)^n`` as an int, also for negative ``n``."""
    return -1 if n % 2 else 1


class ChainError(ValueError):
    pass


def zeros(group: Group | None, rows: int, cols: int) -> Matrix:
    return IntMatrix.zeros(rows, cols) if group is None else GRMatrix.zeros(group, rows, cols)


def eye(group: Group | None, n: int) -> Matrix:
    return IntMatrix.identity(n) if group is None else GRMatrix.identity(group, n)


def block(group: Group | None, blocks) -> Matrix:
    return IntMatrix.block(blocks) if group is None else GRMatrix.block(group, blocks)


def block_diag(group: Group | None, mats) -> Matrix:
    return IntMatrix.block_diag(mats) if group is None else GRMatrix.block_diag(group, mats)


def kron(a: IntMatrix, b: IntMatrix) -> IntMatrix:
    out = [[0] * (a.cols * b.cols) for _ in range(a.rows * b.rows)]
    for i in range(a.rows):
        for j in range(a.cols):
            x = a[i, j]
            if not x:
                continue
            for k in range(b.rows):
                row = out[i * b.rows + k]
                brow = b.row(k)
                for l in range(b.cols):
                    if brow[l]:
                        row[j * b.cols + l] = x * brow[l]
    return IntMatrix(a.rows * b.rows, a.cols * b.cols, out)


class ChainComplex:
    """Finitely supported complex ``... -> C_n --d(n)--> C_{n-1} -> ...``."""

    def __init__(self, ranks: Mapping[int, int], differentials: Mapping[int, Matrix] | None = None,
                 group: Group | None = None, check: bool = True):
        self.group = group
        self.ranks = {int(n): int(r) for n, r in ranks.items() if r}
        if any(r < 0 for r in self.ranks.values()):
            raise ChainError("ranks must be nonnegative")
        self._d: dict[int, Matrix] = {}
        for n, m in (differentials or {}).items():
            n = int(n)
            if m.shape != (self.rank(n - 1), self.rank(n)):
                raise ChainError(f"differential d({n}) has shape {m.shape}, expected "
                                 f"{(self.rank(n - 1), self.rank(n))}")
            if (group is None) != isinstance(m, IntMatrix):
                raise ChainError("differential entries do not match the ring")
            if not m.is_zero():
                self._d[n] = m
        if check:
            for n in self._d:
                if (n - 1) in self._d and not (self._d[n - 1] @ self._d[n]).is_zero():
                    raise ChainError(f"not a complex: d({n - 1}) o d({n}) != 0")

    # basic access ------------------------------------------------------
    def rank(self, n: int) -> int:
        return self.ranks.get(n, 0)

    def d(self, n: int) -> Matrix:
        m = self._d.get(n)
        return m if m is not None else zeros(self.group, self.rank(n - 1), self.rank(n))

    @property
    def degrees(self) -> list[int]:
        """Contiguous degree range covering the support (empty if zero)."""
        if not self.ranks:
            return []
        return list(range(min(self.ranks), max(self.ranks) + 1))

    @property
    def total_rank(self) -> int:
        return sum(self.ranks.values())

    @property
    def differentials(self) -> dict[int, Matrix]:
        return dict(self._d)

    def is_zero(self) -> bool:
        return not self.ranks

    def euler_characteristic(self) -> int:
        return sum(sign(n) * r for n, r in self.ranks.items())

    def homology(self, n: int) -> FgAbelianGroup:
        if self.group is not None:
            raise ChainError("homology is only computed over Z")
        return homology(self.d(n + 1), self.d(n))

    def homology_all(self) -> dict[int, FgAbelianGroup]:
        return {n: self.homology(n) for n in self.degrees}

    def is_acyclic(self) -> bool:
        return all(h.is_trivial for h in self.homology_all().values())

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ChainComplex):
            return NotImplemented
        return self.group == other.group and self.ranks == other.ranks and self._d == other._d

    def __hash__(self) -> int:
        return hash((tuple(sorted(self.ranks.items())), tuple(sorted(self._d.items(), key=lambda kv: kv[0]))))

    def __repr__(self) -> str:
        ring = "Z" if self.group is None else f"Z[{self.group!r}]"
        return f"ChainComplex(over {ring}, ranks={dict(sorted(self.ranks.items()))})"

    # constructions -----------------------------------------------------
    @classmethod
    def zero(cls, group: Group | None = None) -> "ChainComplex":
        return cls({}, {}, group)

    @classmethod
    def sphere(cls, n: int = 0, rank: int = 1, group: Group | None = None) -> "ChainComplex":
        """Free module of the given rank concentrated in degree ``n``."""
        return cls({n: rank}, {}, group)

    def shift(self, k: int) -> "ChainComplex":
        s = -1 if k % 2 else 1
        return ChainComplex({n + k: r for n, r in self.ranks.items()},
                            {n + k: (m.scale(s) if s < 0 else m) for n, m in self._d.items()},
                            self.group, check=False)

    def direct_sum(self, other: "ChainComplex") -> "ChainComplex":
        _same_ring(self, other)
        degs = set(self.ranks) | set(other.ranks)
        ranks = {n: self.rank(n) + other.rank(n) for n in degs}
        diffs = {n: block_diag(self.group, [self.d(n), other.d(n)]) for n in degs if
                 self.rank(n) + other.rank(n) and self.rank(n - 1) + other.rank(n - 1)}
        return ChainComplex(ranks, diffs, self.group, check=False)

    def identity(self) -> "ChainMap":
        return ChainMap(self, self, {n: eye(self.group, r) for n, r in self.ranks.items()}, check=False)

    def zero_map(self, target: "ChainComplex | None" = None) -> "ChainMap":
        return ChainMap(self, target or self, {}, check=False)


def _same_ring(a: ChainComplex, b: ChainComplex) -> None:
    if a.group != b.group:
        raise ChainError("complexes live over different rings")


class ChainMap:
    """Degree-0 map of complexes; ``component(n)`` is ``rank_n(target) x rank_n(source)``."""

    def __init__(self, source: ChainComplex, target: ChainComplex, components: Mapping[int, Matrix],
                 check: bool = True):
        _same_ring(source, target)
        self.source = source
        self.target = target
        self._c: dict[int, Matrix] = {}
        for n, m in components.items():
            n = int(n)
            if m.shape != (target.rank(n), source.rank(n)):
                raise ChainError(f"component {n} has shape {m.shape}, expected {(target.rank(n), source.rank(n))}")
            if not m.is_zero():
                self._c[n] = m
        if check and not self.is_chain_map():
            raise ChainError("map does not commute with the differentials")

    @property
    def group(self) -> Group | None:
        return self.source.group

    def component(self, n: int) -> Matrix:
        m = self._c.get(n)
        return m if m is not None else zeros(self.group, self.target.rank(n), self.source.rank(n))

    @property
    def components(self) -> dict[int, Matrix]:
        return dict(self._c)

    def degrees(self) -> list[int]:
        return sorted(set(self.source.ranks) | set(self.target.ranks))

    def is_chain_map(self) -> bool:
        for n in self.degrees():
            n1 = n
            lhs = self.target.d(n1) @ self.component(n1)
            rhs = self.component(n1 - 1) @ self.source.d(n1)
            if lhs != rhs:
                return False
        return True

    def is_endomorphism(self) -> bool:
        return self.source == self.target

    def __matmul__(self, other: "ChainMap") -> "ChainMap":
        """``self o other``."""
        if other.target.ranks != self.source.ranks:
            raise ChainError("maps are not composable")
        degs = set(self._c) & set(other._c)
        return ChainMap(other.source, self.target, {n: self._c[n] @ other._c[n] for n in degs}, check=False)

    def __add__(self, other: "ChainMap") -> "ChainMap":
        degs = set(self._c) | set(other._c)
        return ChainMap(self.source, self.target, {n: self.component(n) + other.component(n) for n in degs},
                        check=False)

    def __neg__(self) -> "ChainMap":
        return ChainMap(self.source, self.target, {n: -m for n, m in self._c.items()}, check=False)

    def __sub__(self, other: "ChainMap") -> "ChainMap":
        return self + (-other)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ChainMap):
            return NotImplemented
        return self.source == other.source and self.target == other.target and self._c == other._c

    def __hash__(self) -> int:
        return hash(tuple(sorted(self._c.items(), key=lambda kv: kv[0])))

    def __repr__(self) -> str:
        return f"ChainMap({self.source!r} -> {self.target!r})"

    def shift(self, k: int) -> "ChainMap":
        return ChainMap(self.source.shift(k), self.target.shift(k), {n + k: m for n, m in self._c.items()},
                        check=False)

    def augment(self) -> "ChainMap":
        """Push a map over Z[G] down to Z along the augmentation."""
        if self.group is None:
            return self
        return ChainMap(augment_complex(self.source), augment_complex(self.target),
                        {n: m.augment() for n, m in self._c.items()}, check=False)


def augment_complex(c: ChainComplex) -> ChainComplex:
    if c.group is None:
        return c
    return ChainComplex(c.ranks, {n: m.augment() for n, m in c.differentials.items()}, None, check=False)


def induced_map(c: ChainComplex, hom: GroupHom) -> ChainComplex:
    """Change rings along ``Z[G] -> Z[H]``: same ranks, entries mapped through ``hom``."""
    if c.group != hom.source:
        raise ChainError("complex is not over the source group of the homomorphism")
    return ChainComplex(c.ranks, {n: m.map(hom) for n, m in c.differentials.items()}, hom.target)


# ---------------------------------------------------------------------------
# twisted endomorphisms


class TwistedEndo:
    """Map ``x -> A_n phi(x)`` on a complex over Z[G].

    The twisted chain-map law reads ``d(n) A_n == A_{n-1} phi(d(n))``.
    """

    def __init__(self, complex: ChainComplex, twist: GroupHom, components: Mapping[int, GRMatrix],
                 check: bool = True):
        if complex.group is None:
            raise ChainError("twisted endomorphisms need a complex over a group ring")
        if twist.source != complex.group or twist.target != complex.group:
            raise ChainError("twist must be an endomorphism of the coefficient group")
        self.complex = complex
        self.twist = twist
        self._c: dict[int, GRMatrix] = {}
        for n, m in components.items():
            n = int(n)
            if m.shape != (complex.rank(n), complex.rank(n)):
                raise ChainError(f"component {n} has shape {m.shape}, expected square of size {complex.rank(n)}")
            if not m.is_zero():
                self._c[n] = m
        if check and not self.satisfies_law():
            raise ChainError("twisted chain-map law d A = A phi(d) fails")

    @property
    def group(self) -> Group:
        return self.complex.group

    def component(self, n: int) -> GRMatrix:
        m = self._c.get(n)
        return m if m is not None else GRMatrix.zeros(self.group, self.complex.rank(n), self.complex.rank(n))

    @property
    def components(self) -> dict[int, GRMatrix]:
        return dict(self._c)

    def satisfies_law(self) -> bool:
        c = self.complex
        for n in c.degrees:
            if c.d(n) @ self.component(n) != self.component(n - 1) @ c.d(n).map(self.twist):
                return False
        return True

    def augment(self) -> ChainMap:
        """The induced endomorphism of the augmented complex over Z."""
        c = augment_complex(self.complex)
        return ChainMap(c, c, {n: m.augment() for n, m in self._c.items()})

    def __repr__(self) -> str:
        return f"TwistedEndo({self.complex!r})"


@dataclass
class TwistedHomotopy:
    """``A - B == d H + H phi(d)`` in every degree; ``H_n`` maps degree n to n+1."""

    f: TwistedEndo
    g: TwistedEndo
    h: dict[int, GRMatrix] = field(default_factory=dict)

    def verify(self) -> bool:
        c = self.f.complex
        G = c.group
        for n in c.degrees:
            hn = self.h.get(n, GRMatrix.zeros(G, c.rank(n + 1), c.rank(n)))
            hprev = self.h.get(n - 1, GRMatrix.zeros(G, c.rank(n), c.rank(n - 1)))
            lhs = c.d(n + 1) @ hn + hprev @ c.d(n).map(self.f.twist)
            if lhs != self.f.component(n) - self.g.component(n):
                return False
        return True


# ---------------------------------------------------------------------------
# traces


def lefschetz_trace(f: ChainMap) -> int:
    """Alternating sum of the traces of the components."""
    if not f.is_endomorphism():
        raise ChainError("Lefschetz trace needs an endomorphism")
    if f.group is not None:
        raise ChainError("Lefschetz trace is computed over Z; augment first")
    return sum(sign(n) * m.trace() for n, m in f.components.items())


def reidemeister_trace(f: TwistedEndo) -> TwistedClassVector:
    """Alternating sum of Hattori-Stallings traces in twisted conjugacy classes."""
    if not f.satisfies_law():
        raise ChainError("twisted chain-map law d A = A phi(d) fails")
    classes = twisted_classes(f.group, f.twist)
    total = TwistedClassVector(classes)
    for n, m in f.components.items():
        t = hs_trace(m, f.twist, classes)
        total = total + (t if n % 2 == 0 else -t)
    return total


# ---------------------------------------------------------------------------
# mapping cones


def mapping_cone(i: ChainMap) -> ChainComplex:
    """Cone of ``i: A -> X``; degree n is ``X_n + A_{n-1}`` (target first)."""
    a, x = i.source, i.target
    g = i.group
    degs = set(x.ranks) | {n + 1 for n in a.ranks}
    ranks = {n: x.rank(n) + a.rank(n - 1) for n in degs}
    diffs = {}
    for n in degs:
        if not x.rank(n - 1) + a.rank(n - 2):
            continue
        diffs[n] = block(g, [[x.d(n), i.component(n - 1)],
                             [zeros(g, a.rank(n - 2), x.rank(n)), -a.d(n - 1)]])
    return ChainComplex(ranks, diffs, g, check=False)


def cone_map(i: ChainMap, f_src, f_dst):
    """Endomorphism of ``mapping_cone(i)`` induced by a strictly commuting square.

    ``f_src`` acts on the source of ``i`` and ``f_dst`` on its target.  Both
    must be :class:`ChainMap` endomorphisms, or both :class:`TwistedEndo` with
    the same twist.
    """
    cone = mapping_cone(i)
    if isinstance(f_src, TwistedEndo) or isinstance(f_dst, TwistedEndo):
        if not (isinstance(f_src, TwistedEndo) and isinstance(f_dst, TwistedEndo)):
            raise ChainError("cannot mix twisted and untwisted endomorphisms")
        if not (f_src.twist == f_dst.twist):
            raise ChainError("endomorphisms have different twists")
        if f_src.complex != i.source or f_dst.complex != i.target:
            raise ChainError("endomorphisms do not act on the ends of the map")
        phi = f_src.twist
        for n in i.degrees():
            if i.component(n) @ f_src.component(n) != f_dst.component(n) @ i.component(n).map(phi):
                raise ChainError(f"square fails to commute in degree {n}")
        comps = {n: GRMatrix.block_diag(cone.group, [f_dst.component(n), f_src.component(n - 1)])
                 for n in cone.ranks}
        return TwistedEndo(cone, phi, comps)
    if f_src.source != i.source or f_dst.source != i.target:
        raise ChainError("endomorphisms do not act on the ends of the map")
    if (i @ f_src) != (f_dst @ i):
        raise ChainError("square fails to commute")
    comps = {n: block_diag(cone.group, [f_dst.component(n), f_src.component(n - 1)]) for n in cone.ranks}
    return ChainMap(cone, cone, comps)


def inclusion_into_cone(i: ChainMap) -> ChainMap:
    """The canonical map ``X -> cone(i)``."""
    cone = mapping_cone(i)
    x, a = i.target, i.source
    comps = {n: block(i.group, [[eye(i.group, x.rank(n))], [zeros(i.group, a.rank(n - 1), x.rank(n))]])
             for n in x.ranks}
    return ChainMap(x, cone, comps)


# ---------------------------------------------------------------------------
# tensor products and duality over Z


@dataclass(frozen=True)
class Tensor:
    """``left (x) right`` together with its basis bookkeeping.

    ``offset[(p, q)]`` is where the block ``left_p (x) right_q`` starts inside
    degree ``p + q``; within a block the left index is major.
    """

    complex: ChainComplex
    left: ChainComplex
    right: ChainComplex
    offset: dict

    def index(self, p: int, i: int, q: int, j: int) -> int:
        return self.offset[(p, q)] + i * self.right.rank(q) + j


def tensor(c: ChainComplex, e: ChainComplex) -> Tensor:
    if c.group is not None or e.group is not None:
        raise ChainError("tensor products are formed over Z")
    ranks: dict[int, int] = {}
    offset: dict = {}
    for p in sorted(c.ranks):
        for q in sorted(e.ranks):
            n = p + q
            offset[(p, q)] = ranks.get(n, 0)
            ranks[n] = ranks.get(n, 0) + c.rank(p) * e.rank(q)
    diffs = {}
    for n in ranks:
        rows = [[0] * ranks[n] for _ in range(ranks.get(n - 1, 0))]
        if not rows:
            continue
        for (p, q), off in offset.items():
            if p + q != n:
                continue
            # d_C (x) 1 into block (p-1, q)
            if (p - 1, q) in offset:
                m = kron(c.d(p), IntMatrix.identity(e.rank(q)))
                _paste(rows, offset[(p - 1, q)], off, m)
            if (p, q - 1) in offset:
                m = kron(IntMatrix.identity(c.rank(p)), e.d(q))
                _paste(rows, offset[(p, q - 1)], off, m.scale(-1) if p % 2 else m)
        diffs[n] = IntMatrix(len(rows), ranks[n], rows)
    return Tensor(ChainComplex(ranks, diffs, None, check=False), c, e, offset)


def _paste(rows: list[list[int]], r0: int, c0: int, m: IntMatrix) -> None:
    for i in range(m.rows):
        line = rows[r0 + i]
        for j, x in enumerate(m.row(i)):
            if x:
                line[c0 + j] += x


def tensor_maps(t_src: Tensor, t_dst: Tensor, f: ChainMap, g: ChainMap) -> ChainMap:
    """``f (x) g`` between the two tensor products (degree-0 maps, no signs)."""
    comps = {}
    for n, r in t_src.complex.ranks.items():
        rows = [[0] * r for _ in range(t_dst.complex.rank(n))]
        for (p, q), off in t_src.offset.items():
            if p + q != n or (p, q) not in t_dst.offset:
                continue
            _paste(rows, t_dst.offset[(p, q)], off, kron(f.component(p), g.component(q)))
        comps[n] = IntMatrix(t_dst.complex.rank(n), r, rows)
    return ChainMap(t_src.complex, t_dst.complex, comps, check=False)


def swap(t: Tensor, t_rev: Tensor) -> ChainMap:
    """Koszul symmetry ``x (x) y -> (-1)^{|x||y|} y (x) x``."""
    comps = {}
    for n, r in t.complex.ranks.items():
        rows = [[0] * r for _ in range(t_rev.complex.rank(n))]
        for (p, q), off in t.offset.items():
            if p + q != n:
                continue
            s = -1 if (p * q) % 2 else 1
            for i in range(t.left.rank(p)):
                for j in range(t.right.rank(q)):
                    rows[t_rev.index(q, j, p, i)][off + i * t.right.rank(q) + j] = s
        comps[n] = IntMatrix(len(rows), r, rows)
    return ChainMap(t.complex, t_rev.complex, comps, check=False)


def dual(c: ChainComplex) -> ChainComplex:
    if c.group is not None:
        raise ChainError("duals are formed over Z")
    ranks = {-n: r for n, r in c.ranks.items()}
    diffs = {}
    for n in ranks:
        m = c.d(-n + 1).T
        diffs[n] = m.scale(-1) if n % 2 else m
    return ChainComplex(ranks, {n: m for n, m in diffs.items() if m.shape == (ranks.get(n - 1, 0), ranks[n])},
                        None)


@dataclass(frozen=True)
class DualPair:
    """A complex with its dual, coevaluation ``Z -> C (x) C^v`` and evaluation ``C^v (x) C -> Z``."""

    complex: ChainComplex
    dual: ChainComplex
    unit: ChainComplex
    c_cv: Tensor
    cv_c: Tensor
    coev: ChainMap
    ev: ChainMap


def dual_pair(c: ChainComplex) -> DualPair:
    cv = dual(c)
    unit = ChainComplex.sphere(0)
    c_cv = tensor(c, cv)
    cv_c = tensor(cv, c)
    col = [0] * c_cv.complex.rank(0)
    row = [0] * cv_c.complex.rank(0)
    for p, r in c.ranks.items():
        s = -1 if p % 2 else 1
        for i in range(r):
            col[c_cv.index(p, i, -p, i)] = s
            row[cv_c.index(-p, i, p, i)] = s
    coev = ChainMap(unit, c_cv.complex, {0: IntMatrix.column(col)} if col else {})
    ev = ChainMap(cv_c.complex, unit, {0: IntMatrix(1, len(row), [row])} if row else {})
    return DualPair(c, cv, unit, c_cv, cv_c, coev, ev)


def triangle_identities(pair: DualPair) -> tuple[bool, bool]:
    """Check both triangle composites equal the identity on the nose."""
    c, cv, unit = pair.complex, pair.dual, pair.unit
    # C = Z(x)C -> (C(x)C^v)(x)C -> C(x)(C^v(x)C) -> C(x)Z = C
    u_c, c_u = tensor(unit, c), tensor(c, unit)
    left = tensor(pair.c_cv.complex, c)
    right = tensor(c, pair.cv_c.complex)
    t1 = (_unitor(c_u, right_unit=True) @ tensor_maps(right, c_u, c.identity(), pair.ev)
          @ associator(c, cv, c) @ tensor_maps(u_c, left, pair.coev, c.identity())
          @ _unitor_inv(u_c, right_unit=False))
    # C^v = C^v(x)Z -> C^v(x)(C(x)C^v) -> (C^v(x)C)(x)C^v -> Z(x)C^v = C^v
    cv_u, u_cv = tensor(cv, unit), tensor(unit, cv)
    left2 = tensor(cv, pair.c_cv.complex)
    right2 = tensor(pair.cv_c.complex, cv)
    t2 = (_unitor(u_cv, right_unit=False) @ tensor_maps(right2, u_cv, pair.ev, cv.identity())
          @ associator(cv, c, cv, inverse=True) @ tensor_maps(cv_u, left2, cv.identity(), pair.coev)
          @ _unitor_inv(cv_u, right_unit=True))
    return t1 == c.identity(), t2 == cv.identity()


def _unitor(t: Tensor, right_unit: bool) -> ChainMap:
    c = t.left if right_unit else t.right
    comps = {}
    for n, r in c.ranks.items():
        rows = [[0] * t.complex.rank(n) for _ in range(r)]
        for i in range(r):
            rows[i][t.index(n, i, 0, 0) if right_unit else t.index(0, 0, n, i)] = 1
        comps[n] = IntMatrix(r, t.complex.rank(n), rows)
    return ChainMap(t.complex, c, comps, check=False)


def _unitor_inv(t: Tensor, right_unit: bool) -> ChainMap:
    iso = _unitor(t, right_unit)
    return ChainMap(iso.target, t.complex, {n: m.T for n, m in iso.components.items()}, check=False)


def associator(a: ChainComplex, b: ChainComplex, c: ChainComplex, inverse: bool = False) -> ChainMap:
    """``(A(x)B)(x)C -> A(x)(B(x)C)`` (or its inverse); a permutation, no signs."""
    ab, bc = tensor(a, b), tensor(b, c)
    ab_c, a_bc = tensor(ab.complex, c), tensor(a, bc.complex)
    comps = {}
    for n, r in ab_c.complex.ranks.items():
        rows = [[0] * r for _ in range(r)]
        for p, ra in a.ranks.items():
            for q, rb in b.ranks.items():
                for s, rc in c.ranks.items():
                    if p + q + s != n:
                        continue
                    for i in range(ra):
                        for j in range(rb):
                            for k in range(rc):
                                src = ab_c.index(p + q, ab.index(p, i, q, j), s, k)
                                dst = a_bc.index(p, i, q + s, bc.index(q, j, s, k))
                                rows[dst][src] = 1
        m = IntMatrix(r, r, rows)
        comps[n] = m.T if inverse else m
    if inverse:
        return ChainMap(a_bc.complex, ab_c.complex, comps, check=False)
    return ChainMap(ab_c.complex, a_bc.complex, comps, check=False)


def duality_trace(f: ChainMap, pair: DualPair | None = None) -> int:
    """Trace of ``f`` as the composite ``Z -> C(x)C^v -> C(x)C^v -> C^v(x)C -> Z``."""
    if not f.is_endomorphism():
        raise ChainError("trace needs an endomorphism")
    pair = pair or dual_pair(f.source)
    cv = pair.dual
    mid = tensor_maps(pair.c_cv, pair.c_cv, f, cv.identity())
    tw = swap(pair.c_cv, pair.cv_c)
    total = pair.ev @ tw @ mid @ pair.coev
    return total.component(0)[0, 0] if total.components else 0


# ---------------------------------------------------------------------------
# chain homotopies


@dataclass
class HomotopyCertificate:
    """``d h + h d == f - g``; ``h[n]`` maps ``source_n -> target_{n+1}``."""

    f: ChainMap
    g: ChainMap
    h: dict[int, Matrix] = field(default_factory=dict)

    def component(self, n: int) -> Matrix:
        m = self.h.get(n)
        if m is not None:
            return m
        return zeros(self.f.group, self.f.target.rank(n + 1), self.f.source.rank(n))

    def verify(self) -> bool:
        s, t = self.f.source, self.f.target
        for n in sorted(set(s.ranks) | set(t.ranks)):
            lhs = t.d(n + 1) @ self.component(n) + self.component(n - 1) @ s.d(n)
            if lhs != self.f.component(n) - self.g.component(n):
                return False
        return True


def homotopy_system(source: ChainComplex, target: ChainComplex, group: Group | None,
                    sys: SparseSystem, tag) -> None:
    """Register unknowns of a degree +1 map ``h`` and their ``d h + h d`` contributions.

    Equation keys are ``(tag, n, row, col, g)`` for the entry of
    ``(d h + h d)_n``; ``g`` is the group element (``None`` over Z).
    """
    degrees = sorted(set(source.ranks) | {n - 1 for n in target.ranks})
    elems = [None] if group is None else list(group.elements())
    for n in degrees:
        rs, rt = source.rank(n), target.rank(n + 1)
        if not rs or not rt:
            continue
        dt = target.d(n + 1)
        ds = source.d(n + 1)
        for i in range(rt):
            for j in range(rs):
                for g in elems:
                    col: dict = {}
                    # (d_T(n+1) h_n)[r, j] picks up d_T[r, i] * g
                    for r in range(dt.rows):
                        _acc(col, (tag, n, r, j), dt[r, i], g, group, left=True)
                    # (h_n d_S(n+1))[i, c] picks up g * d_S[j, c]
                    for c in range(ds.cols):
                        _acc(col, (tag, n + 1, i, c), ds[j, c], g, group, left=False)
                    sys.add_unknown((tag, n, i, j, g), col)


def _acc(col: dict, key, entry, g, group, left: bool) -> None:
    if group is None:
        if entry:
            col[key + (None,)] = col.get(key + (None,), 0) + entry
        return
    for x, c in entry.terms:
        y = group.mul(x, g) if left else group.mul(g, x)
        k = key + (y,)
        col[k] = col.get(k, 0) + c


def add_map_rhs(sys: SparseSystem, f: ChainMap, tag, sign: int = 1) -> None:
    group = f.group
    for n, m in f.components.items():
        for r in range(m.rows):
            for c in range(m.cols):
                e = m[r, c]
                if group is None:
                    sys.add_rhs((tag, n, r, c, None), sign * e)
                else:
                    for x, v in e.terms:
                        sys.add_rhs((tag, n, r, c, x), sign * v)


def read_homotopy(sol: dict, source: ChainComplex, target: ChainComplex, group: Group | None, tag) -> dict:
    h = {}
    degrees = sorted(set(source.ranks) | {n - 1 for n in target.ranks})
    elems = [None] if group is None else list(group.elements())
    for n in degrees:
        rs, rt = source.rank(n), target.rank(n + 1)
        if not rs or not rt:
            continue
        if group is None:
            h[n] = IntMatrix(rt, rs, [[sol[(tag, n, i, j, None)] for j in range(rs)] for i in range(rt)])
        else:
            h[n] = GRMatrix(group, rt, rs, [[{g: sol[(tag, n, i, j, g)] for g in elems} for j in range(rs)]
                                            for i in range(rt)])
    return h


def verify_homotopic(f: ChainMap, g: ChainMap) -> HomotopyCertificate | None:
    """Search for a chain homotopy ``f ~ g``; None if no integral one exists."""
    if f.source != g.source or f.target != g.target:
        raise ChainError("maps must share source and target")
    group = f.group
    if group is not None and not group.is_finite:
        raise ChainError("homotopy search over an infinite group ring is unsupported; supply explicit certificate")
    sys = SparseSystem()
    homotopy_system(f.source, f.target, group, sys, "h")
    add_map_rhs(sys, f, "h")
    add_map_rhs(sys, g, "h", -1)
    sol = sys.solve()
    if sol is None:
        return None
    cert = HomotopyCertificate(f, g, read_homotopy(sol, f.source, f.target, group, "h"))
    if not cert.verify():
        raise ChainError("internal error: solved homotopy does not verify")
    return cert


# ---------------------------------------------------------------------------
# random instances for property tests


def random_complex(rng, max_total_rank: int = 6, degrees: tuple[int, int] = (-1, 2),
                   entry_bound: int = 2) -> ChainComplex:
    """Random complex over Z; each differential is a random combination of kernel vectors."""
    lo, hi = degrees
    ranks: dict[int, int] = {}
    budget = max_total_rank
    for n in range(lo, hi + 1):
        r = rng.randint(0, min(3, budget))
        ranks[n] = r
        budget -= r
    diffs: dict[int, IntMatrix] = {}
    for n in range(lo + 1, hi + 1):
        prev = diffs.get(n - 1)
        k = nullspace(prev) if prev is not None else IntMatrix.identity(ranks[n - 1])
        coeffs = IntMatrix(k.cols, ranks[n], [[rng.randint(-entry_bound, entry_bound) for _ in range(ranks[n])]
                                              for _ in range(k.cols)])
        diffs[n] = k @ coeffs
    return ChainComplex(ranks, diffs)


def random_endomorphism(rng, c: ChainComplex, entry_bound: int = 2) -> ChainMap:
    """``k * id + d h + h d``, plus an arbitrary block wherever both adjacent differentials vanish."""
    h = {n: IntMatrix(c.rank(n + 1), c.rank(n), [[rng.randint(-entry_bound, entry_bound)
                                                   for _ in range(c.rank(n))] for _ in range(c.rank(n + 1))])
         for n in c.degrees}
    k = rng.randint(-2, 2)
    comps = {}
    for n in c.degrees:
        hn = h[n]
        hp = h.get(n - 1, IntMatrix.zeros(c.rank(n), c.rank(n - 1)))
        comps[n] = IntMatrix.identity(c.rank(n)).scale(k) + c.d(n + 1) @ hn + hp @ c.d(n)
    for n in c.degrees:
        if c.d(n).is_zero() and c.d(n + 1).is_zero() and c.rank(n):
            comps[n] = comps[n] + IntMatrix(c.rank(n), c.rank(n), [[rng.randint(-entry_bound, entry_bound)
                                                                   for _ in range(c.rank(n))]
                                                                  for _ in range(c.rank(n))])
    return ChainMap(c, c, comps)


def direct_sum_maps(f: ChainMap, g: ChainMap) -> ChainMap:
    src, dst = f.source.direct_sum(g.source), f.target.direct_sum(g.target)
    degs = set(src.ranks) | set(dst.ranks)
    return ChainMap(src, dst, {n: IntMatrix.block_diag([f.component(n), g.component(n)]) for n in degs},
                    check=False)


def _unpack_maps(x: list[int], shapes: list[tuple]) -> list[dict[int, IntMatrix]]:
    """Slice a flat vector into per-slot ``{degree: matrix}`` dicts; ``shapes`` lists ``(slot, n, rows, cols)``."""
    out: dict = {}
    pos = 0
    for slot, n, r, c in shapes:
        out.setdefault(slot, {})[n] = IntMatrix(r, c, [x[pos + i * c:pos + (i + 1) * c] for i in range(r)])
        pos += r * c
    return [out.get(s, {}) for s in range(max((s for s, *_ in shapes), default=-1) + 1)]


def random_chain_map(rng, c: ChainComplex, e: ChainComplex, entry_bound: int = 2) -> ChainMap:
    """A random chain map ``c -> e`` drawn from the lattice of all chain maps."""
    degs = sorted(set(c.ranks) | set(e.ranks))
    shapes = [(0, n, e.rank(n), c.rank(n)) for n in degs]
    size = sum(r * k for *_, r, k in shapes)

    def residual(x):
        f = _unpack_maps(x, shapes)[0] if shapes else {}
        out = []
        for n in degs:
            fn = f.get(n, IntMatrix.zeros(e.rank(n), c.rank(n)))
            fm = f.get(n - 1, IntMatrix.zeros(e.rank(n - 1), c.rank(n - 1)))
            out += (e.d(n) @ fn - fm @ c.d(n)).entries()
        return out

    x = random_kernel_element(rng, residual, size, entry_bound)
    comps = _unpack_maps(x, shapes)[0] if shapes else {}
    return ChainMap(c, e, comps)
