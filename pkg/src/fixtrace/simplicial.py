"""Finite simplicial complexes, simplicial maps and their chains."""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Mapping

from .chains import ChainComplex, ChainMap, cone_map, lefschetz_trace, mapping_cone
from .linalg import IntMatrix


class SimplicialError(ValueError):
    pass


Simplex = tuple[int, ...]


class SimplicialComplex:
    """Simplices are sorted vertex tuples; the set must be closed under faces."""

    def __init__(self, vertices: Iterable[int], simplices: Iterable[Iterable[int]], check: bool = True):
        self.vertices = tuple(sorted(set(int(v) for v in vertices)))
        simp = {tuple(sorted(int(v) for v in s)) for s in simplices}
        simp.discard(())
        for v in self.vertices:
            simp.add((v,))
        by_dim: dict[int, list[Simplex]] = {}
        for s in simp:
            by_dim.setdefault(len(s) - 1, []).append(s)
        self.simplices = {k: tuple(sorted(v)) for k, v in sorted(by_dim.items())}
        self._index = {k: {s: i for i, s in enumerate(v)} for k, v in self.simplices.items()}
        if check:
            self._check()

    def _check(self) -> None:
        verts = set(self.vertices)
        for k, level in self.simplices.items():
            for s in level:
                if len(set(s)) != len(s):
                    raise SimplicialError(f"simplex {s} repeats a vertex")
                if not set(s) <= verts:
                    raise SimplicialError(f"simplex {s} uses an unknown vertex")
                if k > 0:
                    for face in combinations(s, k):
                        if face not in self._index.get(k - 1, ()):
                            raise SimplicialError(f"face {face} of {s} is missing")

    @classmethod
    def from_facets(cls, facets: Iterable[Iterable[int]], vertices: Iterable[int] = ()) -> "SimplicialComplex":
        simp: set[Simplex] = set()
        verts = set(vertices)
        for f in facets:
            f = tuple(sorted(set(f)))
            verts.update(f)
            for k in range(1, len(f) + 1):
                simp.update(combinations(f, k))
        return cls(verts, simp, check=False)

    @classmethod
    def circle(cls, n: int) -> "SimplicialComplex":
        """Boundary of an ``n``-gon on vertices ``0..n-1``."""
        if n < 3:
            raise SimplicialError("a simplicial circle needs at least 3 vertices")
        return cls.from_facets([(k, (k + 1) % n) for k in range(n)])

    @classmethod
    def simplex_boundary(cls, dim: int) -> "SimplicialComplex":
        """Boundary of the ``(dim + 1)``-simplex, a ``dim``-sphere."""
        return cls.from_facets(combinations(range(dim + 2), dim + 1))

    @classmethod
    def point(cls) -> "SimplicialComplex":
        return cls([0], [])

    @property
    def dim(self) -> int:
        return max(self.simplices, default=-1)

    def count(self, k: int) -> int:
        return len(self.simplices.get(k, ()))

    def index(self, s: Simplex) -> int:
        return self._index[len(s) - 1][s]

    def __contains__(self, s) -> bool:
        s = tuple(sorted(s))
        return bool(s) and s in self._index.get(len(s) - 1, {})

    def all_simplices(self) -> list[Simplex]:
        return [s for k in sorted(self.simplices) for s in self.simplices[k]]

    def is_subcomplex_of(self, other: "SimplicialComplex") -> bool:
        return all(s in other for s in self.all_simplices())

    def euler_characteristic(self) -> int:
        return sum((-1) ** k * len(v) for k, v in self.simplices.items())

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SimplicialComplex):
            return NotImplemented
        return self.vertices == other.vertices and self.simplices == other.simplices

    def __hash__(self) -> int:
        return hash((self.vertices, tuple(self.simplices.items())))

    def __repr__(self) -> str:
        return f"SimplicialComplex(vertices={len(self.vertices)}, f={[self.count(k) for k in range(self.dim + 1)]})"


@dataclass(frozen=True)
class SimplicialMap:
    source: SimplicialComplex
    target: SimplicialComplex
    vertex_map: Mapping[int, int]

    def __post_init__(self) -> None:
        object.__setattr__(self, "vertex_map", {int(k): int(v) for k, v in self.vertex_map.items()})
        missing = [v for v in self.source.vertices if v not in self.vertex_map]
        if missing:
            raise SimplicialError(f"vertex {missing[0]} has no image")
        for s in self.source.all_simplices():
            if self.image(s) not in self.target:
                raise SimplicialError(f"image of simplex {s} is not a simplex of the target")

    def image(self, s: Simplex) -> Simplex:
        return tuple(sorted({self.vertex_map[v] for v in s}))

    @classmethod
    def identity(cls, k: SimplicialComplex) -> "SimplicialMap":
        return cls(k, k, {v: v for v in k.vertices})

    @classmethod
    def constant(cls, k: SimplicialComplex, v: int) -> "SimplicialMap":
        return cls(k, k, {w: v for w in k.vertices})

    def compose(self, other: "SimplicialMap") -> "SimplicialMap":
        """``self o other``."""
        return SimplicialMap(other.source, self.target, {v: self.vertex_map[w] for v, w in other.vertex_map.items()})

    def restrict(self, sub: SimplicialComplex, target: SimplicialComplex | None = None) -> "SimplicialMap":
        target = target if target is not None else sub
        return SimplicialMap(sub, target, {v: self.vertex_map[v] for v in sub.vertices})

    def preserves(self, sub: SimplicialComplex) -> bool:
        return all(self.image(s) in sub for s in sub.all_simplices())

    @property
    def is_endomorphism(self) -> bool:
        return self.source == self.target


def chains(k: SimplicialComplex) -> ChainComplex:
    """Oriented simplicial chains; ``d[v_0..v_n] = sum_i (-1)^i [.. v_i omitted ..]``."""
    ranks = {n: k.count(n) for n in k.simplices}
    diffs = {}
    for n in range(1, k.dim + 1):
        rows = [[0] * k.count(n) for _ in range(k.count(n - 1))]
        for j, s in enumerate(k.simplices[n]):
            for i in range(n + 1):
                rows[k.index(s[:i] + s[i + 1:])][j] += -1 if i % 2 else 1
        diffs[n] = IntMatrix(k.count(n - 1), k.count(n), rows)
    return ChainComplex(ranks, diffs)


def _perm_sign(seq: list[int]) -> int:
    sign = 1
    seq = list(seq)
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                sign = -sign
    return sign


def chain_map(f: SimplicialMap) -> ChainMap:
    """Degenerate images go to 0; otherwise the sign sorts the image vertices."""
    src, dst = f.source, f.target
    comps = {}
    for n in src.simplices:
        rows = [[0] * src.count(n) for _ in range(dst.count(n))]
        for j, s in enumerate(src.simplices[n]):
            img = [f.vertex_map[v] for v in s]
            if len(set(img)) < len(img):
                continue
            rows[dst.index(tuple(sorted(img)))][j] += _perm_sign(img)
        comps[n] = IntMatrix(dst.count(n), src.count(n), rows)
    return ChainMap(chains(src), chains(dst), comps)


def inclusion(sub: SimplicialComplex, k: SimplicialComplex) -> ChainMap:
    if not sub.is_subcomplex_of(k):
        raise SimplicialError("not a subcomplex")
    return chain_map(SimplicialMap(sub, k, {v: v for v in sub.vertices}))


def lefschetz(f: SimplicialMap) -> int:
    if not f.is_endomorphism:
        raise SimplicialError("the Lefschetz number needs a self-map")
    return lefschetz_trace(chain_map(f))


@dataclass
class AdditivityReport:
    L_f: int
    L_fA: int
    L_cone: int

    @property
    def passed(self) -> bool:
        # both the difference form and the sum form
        return self.L_f - self.L_fA == self.L_cone and self.L_f == self.L_fA + self.L_cone

    def breakdown(self) -> dict[str, int]:
        return {"L_f": self.L_f, "L_fA": self.L_fA, "L_cone": self.L_cone}


def verify_additivity(x: SimplicialComplex, a: SimplicialComplex, f: SimplicialMap) -> AdditivityReport:
    """``L(f) - L(f|A)`` against the trace of the induced map on the cone of ``A -> X``."""
    if f.source != x or f.target != x:
        raise SimplicialError("f must be a self-map of X")
    if not a.is_subcomplex_of(x):
        raise SimplicialError("A is not a subcomplex of X")
    if not f.preserves(a):
        raise SimplicialError("f does not map A into A")
    i = inclusion(a, x)
    fx = chain_map(f)
    fa = chain_map(f.restrict(a))
    cone = cone_map(i, fa, fx)
    return AdditivityReport(lefschetz_trace(fx), lefschetz_trace(fa), lefschetz_trace(cone))


def quotient_homology(x: SimplicialComplex, a: SimplicialComplex) -> dict:
    """Homology of the cone of ``A -> X``, the chain model of ``X/A`` (reduced when A is nonempty)."""
    return mapping_cone(inclusion(a, x)).homology_all()


# ---------------------------------------------------------------------------
# Hopf trace oracle


def homology_trace(f: SimplicialMap) -> dict[int, int]:
    """Trace of ``f_*`` on ``H_n(X; Q)`` per degree, by rational linear algebra (sympy).

    Independent of the Smith normal form code: a basis of cycles is split
    into boundaries plus a complement, and ``f`` is expressed in it.
    """
    import sympy

    x = f.source
    c = chains(x)
    fm = chain_map(f)
    out = {}
    for n in range(x.dim + 1):
        r = x.count(n)
        dn = sympy.Matrix(c.d(n).tolist()) if n > 0 else sympy.zeros(0, r)
        dn1 = sympy.Matrix(c.d(n + 1).tolist()) if n < x.dim else sympy.zeros(r, 0)
        z = dn.nullspace() if dn.rows else [sympy.eye(r)[:, j] for j in range(r)]
        b = dn1.columnspace() if dn1.cols else []
        basis = list(b)
        comp = []
        for v in z:
            trial = sympy.Matrix.hstack(*(basis + [v]))
            if trial.rank() > len(basis):
                basis.append(v)
                comp.append(v)
        if not comp:
            out[n] = 0
            continue
        m = sympy.Matrix.hstack(*basis)
        fn = sympy.Matrix(fm.component(n).tolist())
        tr = 0
        nb = len(basis) - len(comp)
        for k, v in enumerate(comp):
            coords = m.solve_least_squares(fn * v) if m.rows != m.cols else m.solve(fn * v)
            tr += coords[nb + k]
        if tr != int(tr):
            raise SimplicialError("non-integral homology trace")
        out[n] = int(tr)
    return out


def hopf_lefschetz(f: SimplicialMap) -> int:
    return sum((-1) ** n * t for n, t in homology_trace(f).items())


# ---------------------------------------------------------------------------
# random data


def random_complex(rng, max_vertices: int = 8, max_dim: int = 3, max_facets: int = 6) -> SimplicialComplex:
    nv = rng.randint(1, max_vertices)
    verts = list(range(nv))
    facets = []
    for _ in range(rng.randint(1, max_facets)):
        k = rng.randint(1, min(max_dim + 1, nv))
        facets.append(rng.sample(verts, k))
    return SimplicialComplex.from_facets(facets, verts)


def random_subcomplex(rng, x: SimplicialComplex) -> SimplicialComplex:
    chosen = [s for s in x.all_simplices() if rng.random() < 0.3]
    verts = {v for s in chosen for v in s}
    return SimplicialComplex.from_facets(chosen, verts)


def random_self_map(rng, x: SimplicialComplex, preserve: SimplicialComplex | None = None,
                    tries: int = 60) -> SimplicialMap:
    """Random simplicial self-map of ``x`` (mapping ``preserve`` into itself when given).

    Perturbations of the identity are tried first; the fallback maps
    everything into one simplex, which is always simplicial.
    """
    verts = list(x.vertices)
    for _ in range(tries):
        p = rng.random()
        vm = {v: (v if rng.random() < p else rng.choice(verts)) for v in verts}
        try:
            f = SimplicialMap(x, x, vm)
        except SimplicialError:
            continue
        if preserve is None or f.preserves(preserve):
            return f
    pool = preserve.all_simplices() if preserve is not None and preserve.vertices else x.all_simplices()
    sigma = rng.choice(pool)
    return SimplicialMap(x, x, {v: rng.choice(sigma) for v in verts})
