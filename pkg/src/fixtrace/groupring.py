"""Groups, group rings over Z, and twisted conjugacy classes.

Two kinds of group are supported: finite groups given by a multiplication
table (elements are the indices ``0..n-1``) and finitely generated abelian
groups ``Z^r + Z/t_1 + ...`` (elements are integer tuples, torsion
coordinates reduced into ``[0, t)``).  In both cases twisted conjugacy
``x ~ h x phi(h)^-1`` is decidable and has canonical class representatives.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import permutations, product
from typing import Any, Callable, Hashable, Iterable, Iterator, Mapping, Sequence

from .linalg import FgAbelianGroup, IntMatrix, smith, solve

Element = Hashable


class GroupError(ValueError):
    pass


class Group:
    """Common interface of :class:`FiniteGroup` and :class:`AbelianGroup`."""

    is_finite: bool = False

    @property
    def identity(self) -> Element:
        raise NotImplementedError

    def mul(self, x: Element, y: Element) -> Element:
        raise NotImplementedError

    def inv(self, x: Element) -> Element:
        raise NotImplementedError

    def canonical(self, x: Any) -> Element:
        raise NotImplementedError

    def pow(self, x: Element, k: int) -> Element:
        if k < 0:
            x, k = self.inv(x), -k
        out = self.identity
        base = x
        while k:
            if k & 1:
                out = self.mul(out, base)
            base = self.mul(base, base)
            k >>= 1
        return out

    def name(self, x: Element) -> str:
        return str(x)


class FiniteGroup(Group):
    """Finite group given by its Cayley table."""

    is_finite = True

    def __init__(self, table: Sequence[Sequence[int]], names: Sequence[str] | None = None, check: bool = True):
        n = len(table)
        self.table = tuple(tuple(int(x) for x in row) for row in table)
        if any(len(r) != n for r in self.table):
            raise GroupError("multiplication table must be square")
        if any(not 0 <= x < n for r in self.table for x in r):
            raise GroupError("table entry out of range")
        ids = [e for e in range(n) if all(self.table[e][x] == x and self.table[x][e] == x for x in range(n))]
        if not ids:
            raise GroupError("no identity element")
        self._id = ids[0]
        inv = []
        for x in range(n):
            ys = [y for y in range(n) if self.table[x][y] == self._id]
            if len(ys) != 1 or self.table[ys[0]][x] != self._id:
                raise GroupError(f"element {x} has no two-sided inverse")
            inv.append(ys[0])
        self._inv = tuple(inv)
        if check:
            t = self.table
            for x in range(n):
                for y in range(n):
                    xy = t[x][y]
                    for z in range(n):
                        if t[xy][z] != t[x][t[y][z]]:
                            raise GroupError("multiplication is not associative")
        self.names = tuple(names) if names is not None else tuple(str(i) for i in range(n))
        if len(self.names) != n:
            raise GroupError("wrong number of element names")

    # constructors ------------------------------------------------------
    @classmethod
    def cyclic(cls, n: int) -> "FiniteGroup":
        if n < 1:
            raise GroupError("cyclic group order must be positive")
        return cls([[(i + j) % n for j in range(n)] for i in range(n)], check=False)

    @classmethod
    def trivial(cls) -> "FiniteGroup":
        return cls.cyclic(1)

    @classmethod
    def from_permutations(cls, perms: Sequence[Sequence[int]]) -> "FiniteGroup":
        """Group of the given permutations (list must be closed under composition)."""
        perms = [tuple(p) for p in perms]
        index = {p: i for i, p in enumerate(perms)}
        # (p*q)(i) = p(q(i)): apply q first
        table = [[index[tuple(p[q[i]] for i in range(len(q)))] for q in perms] for p in perms]
        names = ["".join(str(x) for x in p) for p in perms]
        return cls(table, names, check=False)

    @classmethod
    def symmetric(cls, k: int) -> "FiniteGroup":
        return cls.from_permutations(sorted(permutations(range(k))))

    @classmethod
    def product(cls, g: "FiniteGroup", h: "FiniteGroup") -> "FiniteGroup":
        m = h.order
        pairs = [(a, b) for a in range(g.order) for b in range(m)]
        table = [[g.table[a][c] * m + h.table[b][d] for (c, d) in pairs] for (a, b) in pairs]
        names = [f"({g.names[a]},{h.names[b]})" for a, b in pairs]
        return cls(table, names, check=False)

    # group interface ---------------------------------------------------
    @property
    def order(self) -> int:
        return len(self.table)

    @property
    def identity(self) -> int:
        return self._id

    def elements(self) -> range:
        return range(len(self.table))

    def mul(self, x: int, y: int) -> int:
        return self.table[x][y]

    def inv(self, x: int) -> int:
        return self._inv[x]

    def canonical(self, x: Any) -> int:
        x = int(x)
        if not 0 <= x < self.order:
            raise GroupError(f"{x} is not an element of a group of order {self.order}")
        return x

    def name(self, x: int) -> str:
        return self.names[x]

    def is_abelian(self) -> bool:
        t = self.table
        return all(t[x][y] == t[y][x] for x in self.elements() for y in self.elements())

    def generators(self) -> list[int]:
        """A small generating set, chosen greedily by element index."""
        gens: list[int] = []
        span = {self._id}
        for x in self.elements():
            if x in span:
                continue
            gens.append(x)
            span = self._closure(gens)
            if len(span) == self.order:
                break
        return gens

    def _closure(self, gens: Sequence[int]) -> set[int]:
        seen = {self._id}
        frontier = [self._id]
        while frontier:
            nxt = []
            for x in frontier:
                for s in gens:
                    y = self.table[x][s]
                    if y not in seen:
                        seen.add(y)
                        nxt.append(y)
            frontier = nxt
        return seen

    def __eq__(self, other: object) -> bool:
        return isinstance(other, FiniteGroup) and self.table == other.table

    def __hash__(self) -> int:
        return hash(("finite", self.table))

    def __repr__(self) -> str:
        return f"FiniteGroup(order={self.order})"


class AbelianGroup(Group):
    """``Z^free_rank + Z/t_1 + ... + Z/t_k`` with elements as integer tuples."""

    def __init__(self, structure: FgAbelianGroup | None = None, *, free_rank: int = 0, torsion: Sequence[int] = ()):
        if structure is None:
            structure = FgAbelianGroup(free_rank, tuple(torsion))
        self.structure = structure
        self.is_finite = structure.free_rank == 0

    @classmethod
    def free(cls, rank: int) -> "AbelianGroup":
        return cls(free_rank=rank)

    @property
    def free_rank(self) -> int:
        return self.structure.free_rank

    @property
    def torsion(self) -> tuple[int, ...]:
        return self.structure.torsion

    @property
    def ngens(self) -> int:
        return self.structure.free_rank + len(self.structure.torsion)

    @property
    def order(self) -> int | None:
        return self.structure.order

    @property
    def identity(self) -> tuple[int, ...]:
        return (0,) * self.ngens

    def canonical(self, x: Any) -> tuple[int, ...]:
        if isinstance(x, int) and self.ngens == 1:
            x = (x,)
        x = tuple(int(v) for v in x)
        if len(x) != self.ngens:
            raise GroupError(f"element {x} has wrong length for {self}")
        r = self.free_rank
        return x[:r] + tuple(v % t for v, t in zip(x[r:], self.torsion))

    def mul(self, x, y):
        return self.canonical(tuple(a + b for a, b in zip(x, y)))

    def inv(self, x):
        return self.canonical(tuple(-a for a in x))

    def pow(self, x, k):
        return self.canonical(tuple(k * a for a in x))

    def generator(self, k: int) -> tuple[int, ...]:
        return tuple(int(i == k) for i in range(self.ngens))

    def generators(self) -> list[tuple[int, ...]]:
        return [self.generator(k) for k in range(self.ngens)]

    def gen_order(self, k: int) -> int:
        """0 for a free generator, otherwise its torsion order."""
        r = self.free_rank
        return 0 if k < r else self.torsion[k - r]

    def elements(self) -> Iterator[tuple[int, ...]]:
        if not self.is_finite:
            raise GroupError("cannot enumerate an infinite group")
        return iter(product(*[range(t) for t in self.torsion]))

    def name(self, x) -> str:
        return ",".join(str(v) for v in x) if len(x) != 1 else str(x[0])

    def __eq__(self, other: object) -> bool:
        return isinstance(other, AbelianGroup) and self.structure == other.structure

    def __hash__(self) -> int:
        return hash(("abelian", self.structure))

    def __repr__(self) -> str:
        return f"AbelianGroup({self.structure})"


def elements_of(g: Group) -> list:
    if not g.is_finite:
        raise GroupError("group is infinite")
    return list(g.elements())


# ---------------------------------------------------------------------------
# homomorphisms


class GroupHom:
    """Homomorphism between supported groups.

    A finite-table source is described by the image of every element; an
    abelian source by the images of its standard generators.
    """

    def __init__(self, source: Group, target: Group, images: Sequence[Any], check: bool = True):
        self.source = source
        self.target = target
        imgs = tuple(target.canonical(y) for y in images)
        if isinstance(source, FiniteGroup):
            if len(imgs) != source.order:
                raise GroupError("need one image per source element")
        elif len(imgs) != source.ngens:
            raise GroupError("need one image per source generator")
        self.images = imgs
        if check:
            self._check()

    def _check(self) -> None:
        s, t = self.source, self.target
        if isinstance(s, FiniteGroup):
            im = self.images
            for x in s.elements():
                for y in s.elements():
                    if im[s.mul(x, y)] != t.mul(im[x], im[y]):
                        raise GroupError("map is not a homomorphism")
            return
        im = self.images
        for a in im:
            for b in im:
                if t.mul(a, b) != t.mul(b, a):
                    raise GroupError("generator images do not commute")
        for k in range(s.ngens):
            n = s.gen_order(k)
            if n and t.pow(im[k], n) != t.identity:
                raise GroupError(f"image of generator {k} does not have order dividing {n}")

    @classmethod
    def identity(cls, g: Group) -> "GroupHom":
        if isinstance(g, FiniteGroup):
            return cls(g, g, list(g.elements()), check=False)
        return cls(g, g, g.generators(), check=False)

    @classmethod
    def from_function(cls, source: Group, target: Group, fn: Callable[[Any], Any]) -> "GroupHom":
        if isinstance(source, FiniteGroup):
            return cls(source, target, [fn(x) for x in source.elements()])
        return cls(source, target, [fn(x) for x in source.generators()])

    @classmethod
    def from_matrix(cls, source: AbelianGroup, target: AbelianGroup, m: Sequence[Sequence[int]]) -> "GroupHom":
        """Column ``k`` of ``m`` is the image of generator ``k``."""
        cols = list(zip(*m)) if m else [()] * source.ngens
        return cls(source, target, [tuple(c) for c in cols])

    @classmethod
    def trivial(cls, source: Group, target: Group) -> "GroupHom":
        if isinstance(source, FiniteGroup):
            return cls(source, target, [target.identity] * source.order, check=False)
        return cls(source, target, [target.identity] * source.ngens, check=False)

    def __call__(self, x: Any) -> Element:
        s, t = self.source, self.target
        if isinstance(s, FiniteGroup):
            return self.images[s.canonical(x)]
        x = s.canonical(x)
        out = t.identity
        for k, e in enumerate(x):
            if e:
                out = t.mul(out, t.pow(self.images[k], e))
        return out

    def compose(self, other: "GroupHom") -> "GroupHom":
        """``self o other`` (apply ``other`` first)."""
        if other.target != self.source:
            raise GroupError("homomorphisms are not composable")
        s = other.source
        if isinstance(s, FiniteGroup):
            return GroupHom(s, self.target, [self(other(x)) for x in s.elements()], check=False)
        return GroupHom(s, self.target, [self(other(x)) for x in s.generators()], check=False)

    @property
    def is_endo(self) -> bool:
        return self.source == self.target

    def matrix(self) -> IntMatrix:
        """Integer matrix of an abelian-to-abelian map (columns are generator images)."""
        if not isinstance(self.source, AbelianGroup) or not isinstance(self.target, AbelianGroup):
            raise GroupError("matrix form needs abelian source and target")
        cols = [self(g) for g in self.source.generators()]
        return IntMatrix(self.target.ngens, self.source.ngens,
                         [[c[i] for c in cols] for i in range(self.target.ngens)])

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, GroupHom):
            return NotImplemented
        return self.source == other.source and self.target == other.target and self.images == other.images

    def __hash__(self) -> int:
        return hash((self.source, self.target, self.images))

    def __repr__(self) -> str:
        return f"GroupHom({self.source!r} -> {self.target!r}, {list(self.images)})"


GroupEndo = GroupHom


def agree_on_generators(a: GroupHom, b: GroupHom) -> bool:
    """Equality test that only needs a generating set of the common source."""
    if a.source != b.source or a.target != b.target:
        return False
    return all(a(x) == b(x) for x in a.source.generators())


def all_homomorphisms(g: FiniteGroup, h: Group) -> list[GroupHom]:
    """Every homomorphism from a finite group into a finite group, by brute force."""
    gens = g.generators()
    targets = list(h.elements())
    out = []
    for imgs in product(targets, repeat=len(gens)):
        m = {g.identity: h.identity}
        frontier = [g.identity]
        ok = True
        while frontier and ok:
            nxt = []
            for x in frontier:
                for s, y in zip(gens, imgs):
                    xs = g.mul(x, s)
                    val = h.mul(m[x], y)
                    if xs in m:
                        if m[xs] != val:
                            ok = False
                            break
                    else:
                        m[xs] = val
                        nxt.append(xs)
                if not ok:
                    break
            frontier = nxt
        if not ok:
            continue
        try:
            out.append(GroupHom(g, h, [m[x] for x in g.elements()]))
        except GroupError:
            continue
    return out


def small_groups(max_order: int = 6) -> dict[str, FiniteGroup]:
    """All groups of order at most 6, up to isomorphism."""
    out: dict[str, FiniteGroup] = {}
    for n in range(1, max_order + 1):
        out[f"C{n}"] = FiniteGroup.cyclic(n)
    if max_order >= 4:
        out["C2xC2"] = FiniteGroup.product(FiniteGroup.cyclic(2), FiniteGroup.cyclic(2))
    if max_order >= 6:
        out["S3"] = FiniteGroup.symmetric(3)
    return out


# ---------------------------------------------------------------------------
# group ring


class GroupRingElement:
    """Finite formal sum ``sum c_g g`` with integer coefficients."""

    __slots__ = ("group", "terms", "_hash")

    def __init__(self, group: Group, terms: Mapping[Any, int] | Iterable[tuple[Any, int]] = ()):
        self.group = group
        acc: dict = {}
        items = terms.items() if isinstance(terms, Mapping) else terms
        for g, c in items:
            if c:
                g = group.canonical(g)
                acc[g] = acc.get(g, 0) + int(c)
        self.terms = tuple(sorted((g, c) for g, c in acc.items() if c))
        self._hash = None

    @classmethod
    def zero(cls, group: Group) -> "GroupRingElement":
        return cls(group)

    @classmethod
    def scalar(cls, group: Group, n: int) -> "GroupRingElement":
        return cls(group, {group.identity: n})

    @classmethod
    def basis(cls, group: Group, g: Any, coef: int = 1) -> "GroupRingElement":
        return cls(group, {g: coef})

    def as_dict(self) -> dict:
        return dict(self.terms)

    def coefficient(self, g: Any) -> int:
        return self.as_dict().get(self.group.canonical(g), 0)

    def is_zero(self) -> bool:
        return not self.terms

    def augment(self) -> int:
        return sum(c for _, c in self.terms)

    def __add__(self, other: "GroupRingElement | int") -> "GroupRingElement":
        if isinstance(other, int):
            other = GroupRingElement.scalar(self.group, other)
        return GroupRingElement(self.group, self.terms + other.terms)

    __radd__ = __add__

    def __neg__(self) -> "GroupRingElement":
        return GroupRingElement(self.group, [(g, -c) for g, c in self.terms])

    def __sub__(self, other: "GroupRingElement | int") -> "GroupRingElement":
        return self + (-other)

    def __rsub__(self, other: int) -> "GroupRingElement":
        return (-self) + other

    def __mul__(self, other: "GroupRingElement | int") -> "GroupRingElement":
        if isinstance(other, int):
            return GroupRingElement(self.group, [(g, c * other) for g, c in self.terms])
        mul = self.group.mul
        return GroupRingElement(self.group, [(mul(g, h), c * d) for g, c in self.terms for h, d in other.terms])

    __rmul__ = __mul__

    def map(self, hom: GroupHom) -> "GroupRingElement":
        return GroupRingElement(hom.target, [(hom(g), c) for g, c in self.terms])

    def __eq__(self, other: object) -> bool:
        if isinstance(other, int):
            return self.terms == GroupRingElement.scalar(self.group, other).terms
        if not isinstance(other, GroupRingElement):
            return NotImplemented
        return self.group == other.group and self.terms == other.terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(self.terms)
        return self._hash

    def __repr__(self) -> str:
        if not self.terms:
            return "0"
        return " + ".join(f"{c}*[{self.group.name(g)}]" for g, c in self.terms)


class GRMatrix:
    """Matrix over Z[G]; acts on column vectors of a free right module."""

    __slots__ = ("group", "rows", "cols", "_data", "_hash")

    def __init__(self, group: Group, rows: int, cols: int, data: Iterable[Iterable[Any]] | None = None):
        self.group = group
        self.rows = rows
        self.cols = cols
        zero = GroupRingElement.zero(group)
        if data is None:
            self._data = tuple((zero,) * cols for _ in range(rows))
        else:
            body = tuple(tuple(_coerce(group, x) for x in r) for r in data)
            if len(body) != rows or any(len(r) != cols for r in body):
                raise ValueError(f"data does not match shape {rows}x{cols}")
            self._data = body
        self._hash = None

    @classmethod
    def zeros(cls, group: Group, rows: int, cols: int) -> "GRMatrix":
        return cls(group, rows, cols)

    @classmethod
    def identity(cls, group: Group, n: int) -> "GRMatrix":
        return cls.from_int(group, IntMatrix.identity(n))

    @classmethod
    def from_int(cls, group: Group, m: IntMatrix) -> "GRMatrix":
        return cls(group, m.rows, m.cols, [[GroupRingElement.scalar(group, x) for x in r] for r in m.tolist()])

    @classmethod
    def from_rows(cls, group: Group, rows: Sequence[Sequence[Any]], cols: int | None = None) -> "GRMatrix":
        if cols is None:
            cols = len(rows[0]) if rows else 0
        return cls(group, len(rows), cols, rows)

    @classmethod
    def block(cls, group: Group, blocks: Sequence[Sequence["GRMatrix"]]) -> "GRMatrix":
        out = []
        cols = None
        for brow in blocks:
            height = brow[0].rows
            width = sum(b.cols for b in brow)
            if any(b.rows != height for b in brow) or (cols is not None and cols != width):
                raise ValueError("inconsistent block shapes")
            cols = width
            for i in range(height):
                line = []
                for b in brow:
                    line.extend(b._data[i])
                out.append(line)
        return cls(group, len(out), cols or 0, out)

    @classmethod
    def block_diag(cls, group: Group, mats: Sequence["GRMatrix"]) -> "GRMatrix":
        rows = sum(m.rows for m in mats)
        cols = sum(m.cols for m in mats)
        zero = GroupRingElement.zero(group)
        out = [[zero] * cols for _ in range(rows)]
        r0 = c0 = 0
        for m in mats:
            for i, line in enumerate(m._data):
                out[r0 + i][c0:c0 + m.cols] = line
            r0 += m.rows
            c0 += m.cols
        return cls(group, rows, cols, out)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    def __getitem__(self, idx: tuple[int, int]) -> GroupRingElement:
        return self._data[idx[0]][idx[1]]

    def tolist(self) -> list[list[GroupRingElement]]:
        return [list(r) for r in self._data]

    def is_zero(self) -> bool:
        return all(x.is_zero() for r in self._data for x in r)

    def __matmul__(self, other: "GRMatrix") -> "GRMatrix":
        if self.cols != other.rows:
            raise ValueError(f"cannot multiply {self.shape} by {other.shape}")
        mul = self.group.mul
        out = []
        for r in self._data:
            line = []
            for j in range(other.cols):
                acc: dict = {}
                for k, a in enumerate(r):
                    if not a.terms:
                        continue
                    b = other._data[k][j]
                    for g, c in a.terms:
                        for h, d in b.terms:
                            gh = mul(g, h)
                            acc[gh] = acc.get(gh, 0) + c * d
                line.append(GroupRingElement(self.group, acc))
            out.append(line)
        return GRMatrix(self.group, self.rows, other.cols, out)

    def __add__(self, other: "GRMatrix") -> "GRMatrix":
        if self.shape != other.shape:
            raise ValueError("shape mismatch")
        return GRMatrix(self.group, self.rows, self.cols,
                        [[x + y for x, y in zip(r, s)] for r, s in zip(self._data, other._data)])

    def __sub__(self, other: "GRMatrix") -> "GRMatrix":
        return self + (-other)

    def __neg__(self) -> "GRMatrix":
        return GRMatrix(self.group, self.rows, self.cols, [[-x for x in r] for r in self._data])

    def scale(self, k: int) -> "GRMatrix":
        return GRMatrix(self.group, self.rows, self.cols, [[x * k for x in r] for r in self._data])

    def map(self, hom: GroupHom) -> "GRMatrix":
        """Apply a group homomorphism entrywise."""
        return GRMatrix(hom.target, self.rows, self.cols, [[x.map(hom) for x in r] for r in self._data])

    def augment(self) -> IntMatrix:
        return IntMatrix(self.rows, self.cols, [[x.augment() for x in r] for r in self._data])

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> "GRMatrix":
        return GRMatrix(self.group, len(rows), len(cols), [[self._data[i][j] for j in cols] for i in rows])

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, GRMatrix):
            return NotImplemented
        return self.group == other.group and self.shape == other.shape and self._data == other._data

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.rows, self.cols, self._data))
        return self._hash

    def __repr__(self) -> str:
        return f"GRMatrix({self.rows}x{self.cols}, {self.tolist()})"


def _coerce(group: Group, x: Any) -> GroupRingElement:
    if isinstance(x, GroupRingElement):
        if x.group != group:
            raise ValueError("group ring element over a different group")
        return x
    if isinstance(x, int):
        return GroupRingElement.scalar(group, x)
    if isinstance(x, Mapping):
        return GroupRingElement(group, x)
    return GroupRingElement(group, x)


# ---------------------------------------------------------------------------
# twisted conjugacy


@dataclass(frozen=True, eq=False)
class TwistedClassSet:
    """Classes of ``x ~ h x phi(h)^-1`` on a group.

    For a finite group ``class_of`` maps every element to the least element
    of its class.  For an abelian group the classes are the cokernel of
    ``1 - phi``, represented by ``quotient`` and a canonical projection.
    """

    group: Group
    twist: GroupHom
    representatives: tuple = ()
    class_of: Mapping = field(default_factory=dict)
    quotient: FgAbelianGroup | None = None
    _u: IntMatrix | None = None
    _diag: tuple[int, ...] = ()

    @property
    def is_finite_group(self) -> bool:
        return self.quotient is None

    @property
    def count(self) -> int | None:
        """Number of classes; None when infinite."""
        if self.quotient is None:
            return len(self.representatives)
        return self.quotient.order

    def key(self, x: Any) -> Hashable:
        """Canonical class label of a group element."""
        x = self.group.canonical(x)
        if self.quotient is None:
            return self.class_of[x]
        y = (self._u @ IntMatrix.column(list(x))).col(0)
        out = []
        for i, d in enumerate(self._diag):
            if d == 1:
                continue
            out.append(y[i] % d if d else y[i])
        return tuple(out)

    def lift(self, key: Hashable) -> Element:
        """Some group element in the class ``key``."""
        if self.quotient is None:
            return key
        it = iter(key)
        y = [0 if d == 1 else next(it) for d in self._diag]
        x = solve(self._u, IntMatrix.column(y))
        return self.group.canonical(x.col(0))

    def label(self, key: Hashable) -> str:
        if self.quotient is None:
            return f"[{self.group.name(key)}]"
        if not key:
            return "[0]"
        return "[" + ",".join(str(v) for v in key) + "]"

    def same_as(self, other: "TwistedClassSet") -> bool:
        return self.group == other.group and agree_on_generators(self.twist, other.twist)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, TwistedClassSet) and self.same_as(other)

    def __hash__(self) -> int:
        return hash(self.group)


def twisted_classes(g: Group, phi: GroupHom) -> TwistedClassSet:
    if phi.source != g or phi.target != g:
        raise GroupError("twist must be an endomorphism of the group")
    if isinstance(g, FiniteGroup):
        class_of: dict[int, int] = {}
        reps = []
        for x in g.elements():
            if x in class_of:
                continue
            orbit = {g.mul(g.mul(h, x), g.inv(phi(h))) for h in g.elements()}
            rep = min(orbit)
            reps.append(rep)
            for y in orbit:
                class_of[y] = rep
        return TwistedClassSet(g, phi, tuple(reps), class_of)
    n = g.ngens
    m = phi.matrix()
    cols = []
    for k in range(n):
        cols.append([int(i == k) - m[i, k] for i in range(n)])
    r = g.free_rank
    for j, t in enumerate(g.torsion):
        cols.append([t if i == r + j else 0 for i in range(n)])
    pres = IntMatrix(n, len(cols), [[c[i] for c in cols] for i in range(n)])
    snf = smith(pres)
    diag = snf.diagonal + [0] * (n - len(snf.diagonal))
    quotient = FgAbelianGroup.from_diagonal(0, diag)
    return TwistedClassSet(g, phi, quotient=quotient, _u=snf.u, _diag=tuple(diag))


class TwistedClassVector:
    """Element of the free abelian group on twisted conjugacy classes."""

    __slots__ = ("class_set", "coefficients")

    def __init__(self, class_set: TwistedClassSet, coefficients: Mapping[Hashable, int] | None = None):
        self.class_set = class_set
        self.coefficients = {k: int(c) for k, c in (coefficients or {}).items() if c}

    def _check(self, other: "TwistedClassVector") -> None:
        if not self.class_set.same_as(other.class_set):
            raise GroupError("class vectors live over different twisted class sets")

    def __add__(self, other: "TwistedClassVector") -> "TwistedClassVector":
        self._check(other)
        out = dict(self.coefficients)
        for k, c in other.coefficients.items():
            out[k] = out.get(k, 0) + c
        return TwistedClassVector(self.class_set, out)

    def __neg__(self) -> "TwistedClassVector":
        return TwistedClassVector(self.class_set, {k: -c for k, c in self.coefficients.items()})

    def __sub__(self, other: "TwistedClassVector") -> "TwistedClassVector":
        return self + (-other)

    def scale(self, k: int) -> "TwistedClassVector":
        return TwistedClassVector(self.class_set, {c: k * v for c, v in self.coefficients.items()})

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TwistedClassVector):
            return NotImplemented
        return self.class_set.same_as(other.class_set) and self.coefficients == other.coefficients

    def __hash__(self) -> int:
        return hash(frozenset(self.coefficients.items()))

    def is_zero(self) -> bool:
        return not self.coefficients

    @property
    def nonzero_classes(self) -> int:
        """Number of classes with nonzero coefficient (the Nielsen number of a trace)."""
        return len(self.coefficients)

    def items(self) -> list[tuple[Hashable, int]]:
        return sorted(self.coefficients.items())

    def to_labels(self) -> dict[str, int]:
        return {self.class_set.label(k): c for k, c in self.items()}

    def __repr__(self) -> str:
        if not self.coefficients:
            return "0"
        return " + ".join(f"{c}{self.class_set.label(k)}" for k, c in self.items())


def hs_trace(a: GRMatrix, phi: GroupHom, classes: TwistedClassSet | None = None) -> TwistedClassVector:
    """Hattori-Stallings trace of a square matrix, valued in twisted classes."""
    if a.rows != a.cols:
        raise ValueError("trace of a non-square matrix")
    cs = classes if classes is not None else twisted_classes(a.group, phi)
    out: dict = {}
    for i in range(a.rows):
        for g, c in a[i, i].terms:
            k = cs.key(g)
            out[k] = out.get(k, 0) + c
    return TwistedClassVector(cs, out)


def push_classes(i: GroupHom, phi_src: GroupHom, phi_dst: GroupHom, v: TwistedClassVector,
                 target: TwistedClassSet | None = None) -> TwistedClassVector:
    """Image of a class vector under the map of twisted classes induced by ``i``."""
    if not agree_on_generators(i.compose(phi_src), phi_dst.compose(i)):
        raise GroupError("homomorphism does not intertwine the twists")
    if v.class_set.group != i.source or not agree_on_generators(v.class_set.twist, phi_src):
        raise GroupError("vector is not over the source classes")
    tgt = target if target is not None else twisted_classes(i.target, phi_dst)
    out: dict = {}
    for k, c in v.coefficients.items():
        y = i(v.class_set.lift(k))
        kk = tgt.key(y)
        out[kk] = out.get(kk, 0) + c
    return TwistedClassVector(tgt, out)


def augment(v: TwistedClassVector) -> int:
    return sum(v.coefficients.values())
