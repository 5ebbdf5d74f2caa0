"""Profunctors between finite categories, valued in chain complexes over Z.

A profunctor ``X: A -|-> B`` is a diagram over ``A x B^op``: covariant in the
source variable, contravariant in the target variable.  Composites and
shadows are computed by the normalized bar construction, which is finite
when the category being integrated over is loop-free.

Conventions.  A bar string is a composable tuple ``(b_1, ..., b_k)`` of
non-identity morphisms, read ``d_0 <- d_1 <- ... <- d_k``.  The composite
``(X . Y)(a, c)`` is the sum over strings of ``X(a, d_0) (x) Y(d_k, c)``
shifted up by ``k``; the bar coordinate is placed in front of the tensor
factors so every reordering carries its Koszul sign.  The total differential
is ``sum_i (-1)^i d_i + (-1)^k d_internal``, where ``d_0`` acts on the left
factor through ``b_1``, inner faces compose adjacent morphisms and ``d_k``
acts on the right factor through ``b_k``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

from .chains import (ChainComplex, ChainError, ChainMap, Tensor, _unpack_maps, direct_sum_maps, mapping_cone,
                     random_chain_map, random_complex, tensor, tensor_maps)
from .fincat import CategoryError, FinCategory
from .linalg import IntMatrix, SparseSystem, random_kernel_element


class ProfunctorError(ValueError):
    pass


_TERMINAL = FinCategory.terminal()


def terminal() -> FinCategory:
    return _TERMINAL


def _mv(m: IntMatrix, v: Sequence[int]) -> list[int]:
    return [sum(x * y for x, y in zip(m.row(i), v) if x and y) for i in range(m.rows)]


class Profunctor:
    """Functor ``A x B^op -> Ch(Z)`` stored on the flattened product category.

    ``entries[a * |B| + b]`` is ``X(a, b)`` and ``actions[f * |mor B| + g]``
    is ``X(f, g): X(src f, tgt g) -> X(tgt f, src g)``.
    """

    def __init__(self, source: FinCategory, target: FinCategory, entries: Sequence[ChainComplex],
                 actions: Sequence[ChainMap], check: bool = True):
        self.source = source
        self.target = target
        self.cat = source.product(target.op())
        self.entries = tuple(entries)
        self.actions = tuple(actions)
        self.composite: CompositeData | None = None
        if len(self.entries) != self.cat.num_objects or len(self.actions) != self.cat.num_morphisms:
            raise ProfunctorError("entries/actions do not match the index category")
        if check:
            self.check()

    # construction ------------------------------------------------------
    @classmethod
    def build(cls, source: FinCategory, target: FinCategory, entries: Mapping[tuple[int, int], ChainComplex],
              actions: Mapping[tuple[int, int], ChainMap] | None = None, check: bool = True) -> "Profunctor":
        """Complete partial action data by identities, zero maps and composition.

        ``actions`` is keyed by ``(f, g)`` with ``f`` a morphism of the source
        and ``g`` a morphism of the target; giving the generating morphisms
        in each variable is enough.
        """
        cat = source.product(target.op())
        nb, mb = target.num_objects, target.num_morphisms
        ent = [entries.get((o // nb, o % nb)) or ChainComplex.zero() for o in range(cat.num_objects)]
        act: dict[int, ChainMap] = {}
        for (f, g), m in (actions or {}).items():
            act[f * mb + g] = m
        for o in range(cat.num_objects):
            act.setdefault(cat.identity(o), ent[o].identity())
        for m in range(cat.num_morphisms):
            if m not in act and (ent[cat.src[m]].is_zero() or ent[cat.tgt[m]].is_zero()):
                act[m] = ChainMap(ent[cat.src[m]], ent[cat.tgt[m]], {}, check=False)
        changed = True
        while changed and len(act) < cat.num_morphisms:
            changed = False
            for (g, f), h in cat.composition_table().items():
                if h not in act and g in act and f in act:
                    act[h] = act[g] @ act[f]
                    changed = True
        missing = [cat.names[m] for m in range(cat.num_morphisms) if m not in act]
        if missing:
            raise ProfunctorError(f"no action given for {missing[0]}")
        return cls(source, target, ent, [act[m] for m in range(cat.num_morphisms)], check)

    @classmethod
    def diagram(cls, a: FinCategory, entries: Mapping[int, ChainComplex],
                maps: Mapping[int, ChainMap] | None = None) -> "Profunctor":
        """Covariant diagram ``A -> Ch``, read as a profunctor ``A -|-> *``."""
        return cls.build(a, terminal(), {(k, 0): v for k, v in entries.items()},
                         {(f, 0): m for f, m in (maps or {}).items()})

    @classmethod
    def weight(cls, b: FinCategory, entries: Mapping[int, ChainComplex],
               maps: Mapping[int, ChainMap] | None = None) -> "Profunctor":
        """Contravariant diagram on ``B``, read as a profunctor ``* -|-> B``.

        ``maps[g]`` goes from the entry at ``tgt g`` to the entry at ``src g``.
        """
        return cls.build(terminal(), b, {(0, k): v for k, v in entries.items()},
                         {(0, g): m for g, m in (maps or {}).items()})

    @classmethod
    def unit(cls, a: FinCategory) -> "Profunctor":
        """``U(x, y) = Z[hom(y, x)]`` in degree 0."""
        n, m = a.num_objects, a.num_morphisms
        cat = a.product(a.op())
        ent = [ChainComplex.sphere(0, len(a.hom(o % n, o // n))) for o in range(cat.num_objects)]
        acts = []
        for idx in range(cat.num_morphisms):
            f, g = divmod(idx, m)
            x, y = a.src[f], a.tgt[g]
            x2, y2 = a.tgt[f], a.src[g]
            src_basis, dst_basis = a.hom(y, x), a.hom(y2, x2)
            pos = {u: i for i, u in enumerate(dst_basis)}
            rows = [[0] * len(src_basis) for _ in dst_basis]
            for j, u in enumerate(src_basis):
                rows[pos[a.compose(a.compose(f, u), g)]][j] = 1
            src_c, dst_c = ent[x * n + y], ent[x2 * n + y2]
            acts.append(ChainMap(src_c, dst_c, {0: IntMatrix(len(dst_basis), len(src_basis), rows)}
                                 if src_basis and dst_basis else {}, check=False))
        return cls(a, a, ent, acts, check=False)

    def shift(self, k: int) -> "Profunctor":
        return Profunctor(self.source, self.target, [c.shift(k) for c in self.entries],
                          [f.shift(k) for f in self.actions], check=False)

    def as_diagram(self) -> "Profunctor":
        """The same data as a covariant diagram on ``A x B^op``."""
        return Profunctor(self.cat, terminal(), self.entries, self.actions, check=False)

    # access ------------------------------------------------------------
    def obj(self, a: int, b: int) -> int:
        return a * self.target.num_objects + b

    def entry(self, a: int, b: int) -> ChainComplex:
        return self.entries[self.obj(a, b)]

    def action(self, f: int, g: int) -> ChainMap:
        return self.actions[f * self.target.num_morphisms + g]

    def left(self, f: int, b: int) -> ChainMap:
        return self.action(f, self.target.identity(b))

    def right(self, a: int, g: int) -> ChainMap:
        return self.action(self.source.identity(a), g)

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.entries)

    def identity(self) -> "NatMap":
        return NatMap(self, self, [c.identity() for c in self.entries], check=False)

    def zero_map(self, target: "Profunctor | None" = None) -> "NatMap":
        target = target or self
        return NatMap(self, target, [ChainMap(s, t, {}, check=False)
                                     for s, t in zip(self.entries, target.entries)], check=False)

    def check(self) -> None:
        cat = self.cat
        for m, f in enumerate(self.actions):
            if f.source != self.entries[cat.src[m]] or f.target != self.entries[cat.tgt[m]]:
                raise ProfunctorError(f"action of {cat.names[m]} has the wrong endpoints")
            if not f.is_chain_map():
                raise ProfunctorError(f"action of {cat.names[m]} is not a chain map")
        for o in range(cat.num_objects):
            if self.actions[cat.identity(o)] != self.entries[o].identity():
                raise ProfunctorError(f"identity at {cat.objects[o]} does not act as the identity")
        for (g, f), h in cat.composition_table().items():
            if self.actions[h] != self.actions[g] @ self.actions[f]:
                raise ProfunctorError(f"functoriality fails: {cat.names[g]} o {cat.names[f]}")

    def same_shape(self, other: "Profunctor") -> bool:
        return self.source == other.source and self.target == other.target

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Profunctor):
            return NotImplemented
        return self.same_shape(other) and self.entries == other.entries and self.actions == other.actions

    def __hash__(self) -> int:
        return hash(self.entries)

    def __repr__(self) -> str:
        return f"Profunctor({self.source!r} -|-> {self.target!r})"


class NatMap:
    """Natural chain map between profunctors of the same shape."""

    def __init__(self, source: Profunctor, target: Profunctor, components: Sequence[ChainMap], check: bool = True):
        if not source.same_shape(target):
            raise ProfunctorError("natural map between profunctors of different shapes")
        self.source = source
        self.target = target
        self.components = tuple(components)
        if len(self.components) != len(source.entries):
            raise ProfunctorError("one component per object required")
        if check:
            self.check()

    def check(self) -> None:
        cat = self.source.cat
        for o, c in enumerate(self.components):
            if c.source != self.source.entries[o] or c.target != self.target.entries[o]:
                raise ProfunctorError(f"component at {cat.objects[o]} has the wrong endpoints")
            if not c.is_chain_map():
                raise ProfunctorError(f"component at {cat.objects[o]} is not a chain map")
        for m in range(cat.num_morphisms):
            lhs = self.target.actions[m] @ self.components[cat.src[m]]
            rhs = self.components[cat.tgt[m]] @ self.source.actions[m]
            if lhs.components != rhs.components:
                raise ProfunctorError(f"naturality fails at {cat.names[m]}")

    def component(self, a: int, b: int) -> ChainMap:
        return self.components[self.source.obj(a, b)]

    def __matmul__(self, other: "NatMap") -> "NatMap":
        return NatMap(other.source, self.target, [f @ g for f, g in zip(self.components, other.components)],
                      check=False)

    def is_objectwise_quasi_iso(self) -> bool:
        return all(mapping_cone(c).is_acyclic() for c in self.components)

    def shift(self, k: int) -> "NatMap":
        return NatMap(self.source.shift(k), self.target.shift(k), [c.shift(k) for c in self.components],
                      check=False)


# ---------------------------------------------------------------------------
# block bookkeeping


class BlockSum:
    """Direct sum of shifted complexes, ``C_key[k_key]``, with explicit offsets."""

    def __init__(self, items: Sequence[tuple]):
        self.keys: list = []
        self.k: dict = {}
        self.inner: dict = {}
        self.tensor: dict = {}
        self.ranks: dict[int, int] = {}
        self.offset: dict = {}
        for key, k, c, t in items:
            self.keys.append(key)
            self.k[key], self.inner[key], self.tensor[key] = k, c, t
            for m, r in sorted(c.ranks.items()):
                n = m + k
                self.offset[(key, m)] = self.ranks.get(n, 0)
                self.ranks[n] = self.ranks.get(n, 0) + r

    def pos(self, key, m: int, idx: int) -> int:
        return self.offset[(key, m)] + idx

    def assemble(self, faces: Sequence[tuple]) -> ChainComplex:
        """Total complex; ``faces`` are ``(src_key, dst_key, coef, inner ChainMap)`` lowering ``k`` by one."""
        rows = {n: [[0] * r for _ in range(self.ranks.get(n - 1, 0))] for n, r in self.ranks.items()}
        for key in self.keys:
            c, s = self.inner[key], (-1 if self.k[key] % 2 else 1)
            for m in c.ranks:
                if c.rank(m - 1):
                    _paste(rows[m + self.k[key]], self.offset[(key, m - 1)], self.offset[(key, m)], c.d(m), s)
        for src, dst, coef, fmap in faces:
            if self.k[dst] != self.k[src] - 1:
                raise ProfunctorError("face map must lower the bar degree by one")
            for m, comp in fmap.components.items():
                _paste(rows[m + self.k[src]], self.offset[(dst, m)], self.offset[(src, m)], comp, coef)
        diffs = {n: IntMatrix(len(r), self.ranks[n], r) for n, r in rows.items() if r}
        return ChainComplex(self.ranks, diffs)

    def map_to(self, other: "BlockSum", pieces: Sequence[tuple], src_c: ChainComplex,
               dst_c: ChainComplex) -> ChainMap:
        """Degree-0 map assembled from ``(src_key, dst_key, coef, inner ChainMap)`` pieces."""
        rows = {n: [[0] * r for _ in range(other.ranks.get(n, 0))] for n, r in self.ranks.items()}
        for src, dst, coef, fmap in pieces:
            if self.k[src] != other.k[dst]:
                raise ProfunctorError("block map must preserve the bar degree")
            for m, comp in fmap.components.items():
                _paste(rows[m + self.k[src]], other.offset[(dst, m)], self.offset[(src, m)], comp, coef)
        return ChainMap(src_c, dst_c, {n: IntMatrix(len(r), self.ranks[n], r) for n, r in rows.items() if r},
                        check=False)


def _paste(rows: list[list[int]], r0: int, c0: int, m: IntMatrix, coef: int = 1) -> None:
    for i in range(m.rows):
        line = rows[r0 + i]
        for j, x in enumerate(m.row(i)):
            if x:
                line[c0 + j] += coef * x


def _faces(c: FinCategory, k: int, s: tuple[int, ...]):
    """Yield ``(i, new_key, kind)`` for the faces of a string; kind is 'left', 'inner' or 'right'."""
    if k == 1:
        yield 0, (0, (c.src[s[0]],)), "left"
        yield 1, (0, (c.tgt[s[0]],)), "right"
        return
    yield 0, (k - 1, s[1:]), "left"
    for i in range(1, k):
        h = c.compose(s[i - 1], s[i])
        if c.is_identity(h):
            raise CategoryError("composite of non-identity morphisms is an identity; category is not loop-free")
        yield i, (k - 1, s[:i - 1] + (h,) + s[i + 1:]), "inner"
    yield k, (k - 1, s[:-1]), "right"


# ---------------------------------------------------------------------------
# composites


@dataclass
class CompositeData:
    left: Profunctor
    right: Profunctor
    blocks: list  # BlockSum per object of the result


def coend(x: Profunctor, y: Profunctor) -> Profunctor:
    """Bar-construction composite ``x . y`` for ``x: A -|-> B``, ``y: B -|-> C``."""
    if x.target != y.source:
        raise ProfunctorError("profunctors are not composable")
    a, b, c = x.source, x.target, y.target
    if not b.is_loop_free():
        raise CategoryError("category is not loop-free; the normalized bar complex would be infinite")
    strings = list(b.all_strings())
    nc, mc = c.num_objects, c.num_morphisms
    cat = a.product(c.op())
    blocks, entries = [], []
    for o in range(cat.num_objects):
        ai, ci = divmod(o, nc)
        items = []
        for k, s in strings:
            d0, dk = b.string_ends(k, s)
            t = tensor(x.entry(ai, d0), y.entry(dk, ci))
            items.append(((k, s), k, t.complex, t))
        bs = BlockSum(items)
        faces = []
        for k, s in strings:
            if k == 0:
                continue
            d0, dk = b.string_ends(k, s)
            src_t = bs.tensor[(k, s)]
            for i, key, kind in _faces(b, k, s):
                dst_t = bs.tensor[key]
                sign = -1 if i % 2 else 1
                if kind == "left":
                    fm = tensor_maps(src_t, dst_t, x.right(ai, s[0]), y.entry(dk, ci).identity())
                elif kind == "right":
                    fm = tensor_maps(src_t, dst_t, x.entry(ai, d0).identity(), y.left(s[-1], ci))
                else:
                    fm = src_t.complex.identity()
                faces.append(((k, s), key, sign, fm))
        blocks.append(bs)
        entries.append(bs.assemble(faces))
    actions = []
    for idx in range(cat.num_morphisms):
        f, g = divmod(idx, mc)
        so = cat.src[idx]
        to = cat.tgt[idx]
        bs_src, bs_dst = blocks[so], blocks[to]
        pieces = []
        for k, s in strings:
            d0, dk = b.string_ends(k, s)
            fm = tensor_maps(bs_src.tensor[(k, s)], bs_dst.tensor[(k, s)],
                             x.left(f, d0), y.right(dk, g))
            pieces.append(((k, s), (k, s), 1, fm))
        actions.append(bs_src.map_to(bs_dst, pieces, entries[so], entries[to]))
    out = Profunctor(a, c, entries, actions, check=False)
    out.composite = CompositeData(x, y, blocks)
    return out


def compose_maps(f: NatMap, g: NatMap, src: Profunctor, dst: Profunctor) -> NatMap:
    """``f . g`` between the composites ``src = f.source . g.source`` and ``dst``."""
    cs, cd = src.composite, dst.composite
    if cs is None or cd is None:
        raise ProfunctorError("composite data missing")
    b = cs.left.target
    comps = []
    for o in range(src.cat.num_objects):
        ai, ci = divmod(o, src.target.num_objects)
        bs, bd = cs.blocks[o], cd.blocks[o]
        pieces = []
        for key in bs.keys:
            k, s = key
            d0, dk = b.string_ends(k, s)
            fm = tensor_maps(bs.tensor[key], bd.tensor[key], f.component(ai, d0), g.component(dk, ci))
            pieces.append((key, key, 1, fm))
        comps.append(bs.map_to(bd, pieces, src.entries[o], dst.entries[o]))
    return NatMap(src, dst, comps, check=False)


def left_unitor(ux: Profunctor, n: int = 0) -> NatMap:
    """``U_A[n] . X -> X[n]``, acting by ``X`` on bar degree 0 and by zero above it."""
    data = ux.composite
    x = data.right
    xs = x.shift(n)
    a = x.source
    comps = []
    for o in range(ux.cat.num_objects):
        ai, bi = divmod(o, ux.target.num_objects)
        bs = data.blocks[o]
        tgt = xs.entries[o]
        rows = {d: [[0] * r for _ in range(tgt.rank(d))] for d, r in bs.ranks.items()}
        for a0 in range(a.num_objects):
            key = (0, (a0,))
            t = bs.tensor[key]
            for i, mu in enumerate(a.hom(a0, ai)):
                act = x.left(mu, bi)
                for p, r in x.entry(a0, bi).ranks.items():
                    comp = act.component(p)
                    for j in range(r):
                        col = bs.pos(key, n + p, t.index(n, i, p, j))
                        for row in range(comp.rows):
                            if comp[row, j]:
                                rows[n + p][row][col] += comp[row, j]
        comps.append(ChainMap(ux.entries[o], tgt, {d: IntMatrix(len(r), bs.ranks[d], r)
                                                    for d, r in rows.items() if r}, check=False))
    return NatMap(ux, xs, comps, check=False)


def right_unitor(xu: Profunctor, n: int = 0) -> NatMap:
    """``X . U_B[n] -> X[n]``; the shift passes ``X`` with its Koszul sign."""
    data = xu.composite
    x = data.left
    xs = x.shift(n)
    b = x.target
    comps = []
    for o in range(xu.cat.num_objects):
        ai, bi = divmod(o, xu.target.num_objects)
        bs = data.blocks[o]
        tgt = xs.entries[o]
        rows = {d: [[0] * r for _ in range(tgt.rank(d))] for d, r in bs.ranks.items()}
        for b0 in range(b.num_objects):
            key = (0, (b0,))
            t = bs.tensor[key]
            for i, mu in enumerate(b.hom(bi, b0)):
                act = x.right(ai, mu)
                for p, r in x.entry(ai, b0).ranks.items():
                    comp = act.component(p)
                    sign = -1 if (n * p) % 2 else 1
                    for j in range(r):
                        col = bs.pos(key, p + n, t.index(p, j, n, i))
                        for row in range(comp.rows):
                            if comp[row, j]:
                                rows[n + p][row][col] += sign * comp[row, j]
        comps.append(ChainMap(xu.entries[o], tgt, {d: IntMatrix(len(r), bs.ranks[d], r)
                                                    for d, r in rows.items() if r}, check=False))
    return NatMap(xu, xs, comps, check=False)


def associator(lhs: Profunctor, rhs: Profunctor, inverse: bool = False) -> NatMap:
    """``(X . Y) . Z -> X . (Y . Z)`` as a signed permutation (or its inverse)."""
    xy, z = lhs.composite.left, lhs.composite.right
    x, yz = rhs.composite.left, rhs.composite.right
    y = xy.composite.right
    b, c = x.target, y.target
    comps = []
    for o in range(lhs.cat.num_objects):
        ai, di = divmod(o, lhs.target.num_objects)
        lb, rb = lhs.composite.blocks[o], rhs.composite.blocks[o]
        size = {n: r for n, r in lb.ranks.items()}
        perm = {n: [[0] * r for _ in range(r)] for n, r in size.items()}
        for (l, sig) in lb.keys:
            c0, cl = c.string_ends(l, sig)
            xyb = xy.composite.blocks[xy.obj(ai, c0)]
            t_o = lb.tensor[(l, sig)]
            for (k, tau) in xyb.keys:
                b0, bk = b.string_ends(k, tau)
                t_i = xyb.tensor[(k, tau)]
                yzb = yz.composite.blocks[yz.obj(bk, di)]
                t_yz = yzb.tensor[(l, sig)]
                t_o2 = rb.tensor[(k, tau)]
                xe, ye, ze = x.entry(ai, b0), y.entry(bk, c0), z.entry(cl, di)
                for p, rx in xe.ranks.items():
                    for q, ry in ye.ranks.items():
                        for r, rz in ze.ranks.items():
                            sign = -1 if (l * (k + p)) % 2 else 1
                            n = p + q + r + k + l
                            for i in range(rx):
                                for j in range(ry):
                                    inner = xyb.pos((k, tau), p + q, t_i.index(p, i, q, j))
                                    m = p + q + k
                                    for w in range(rz):
                                        src = lb.pos((l, sig), m + r, t_o.index(m, inner, r, w))
                                        inner2 = yzb.pos((l, sig), q + r, t_yz.index(q, j, r, w))
                                        m2 = q + r + l
                                        dst = rb.pos((k, tau), p + m2, t_o2.index(p, i, m2, inner2))
                                        perm[n][dst][src] = sign
        mats = {n: IntMatrix(size[n], size[n], rows) for n, rows in perm.items()}
        if inverse:
            comps.append(ChainMap(rhs.entries[o], lhs.entries[o], {n: m.T for n, m in mats.items()}, check=False))
        else:
            comps.append(ChainMap(lhs.entries[o], rhs.entries[o], mats, check=False))
    if inverse:
        return NatMap(rhs, lhs, comps, check=False)
    return NatMap(lhs, rhs, comps, check=False)


# ---------------------------------------------------------------------------
# shadows


@dataclass
class Shadow:
    profunctor: Profunctor
    blocks: BlockSum
    complex: ChainComplex


def shadow(q: Profunctor) -> Shadow:
    """Homotopy coend of an endo-profunctor by the normalized cyclic bar construction."""
    a = q.source
    if q.target != a:
        raise ProfunctorError("shadow needs a profunctor from a category to itself")
    if not a.is_loop_free():
        raise CategoryError("category is not loop-free; the normalized bar complex would be infinite")
    strings = list(a.all_strings())
    items = []
    for k, s in strings:
        d0, dk = a.string_ends(k, s)
        items.append(((k, s), k, q.entry(dk, d0), None))
    bs = BlockSum(items)
    faces = []
    for k, s in strings:
        if k == 0:
            continue
        d0, dk = a.string_ends(k, s)
        for i, key, kind in _faces(a, k, s):
            sign = -1 if i % 2 else 1
            if kind == "left":
                fm = q.right(dk, s[0])
            elif kind == "right":
                fm = q.left(s[-1], d0)
            else:
                fm = q.entry(dk, d0).identity()
            faces.append(((k, s), key, sign, fm))
    return Shadow(q, bs, bs.assemble(faces))


def shadow_map(f: NatMap, src: Shadow, dst: Shadow) -> ChainMap:
    a = f.source.source
    pieces = []
    for key in src.blocks.keys:
        d0, dk = a.string_ends(*key)
        pieces.append((key, key, 1, f.component(dk, d0)))
    return src.blocks.map_to(dst.blocks, pieces, src.complex, dst.complex)


def cyclic_swap(src: Shadow, dst: Shadow) -> ChainMap:
    """``<<X . Y>>_A -> <<Y . X>>_B``, swapping tensor factors and bar coordinates with Koszul signs."""
    xy, yx = src.profunctor, dst.profunctor
    x, y = xy.composite.left, xy.composite.right
    a, b = x.source, x.target
    out_rows = {n: [[0] * r for _ in range(dst.complex.rank(n))] for n, r in src.complex.ranks.items()}
    for (l, sig) in src.blocks.keys:
        a0, al = a.string_ends(l, sig)
        inner_s = xy.composite.blocks[xy.obj(al, a0)]
        for (k, tau) in inner_s.keys:
            b0, bk = b.string_ends(k, tau)
            inner_d = yx.composite.blocks[yx.obj(bk, b0)]
            t_s, t_d = inner_s.tensor[(k, tau)], inner_d.tensor[(l, sig)]
            xe, ye = x.entry(al, b0), y.entry(bk, a0)
            for p, rx in xe.ranks.items():
                for q, ry in ye.ranks.items():
                    sign = -1 if (k * l + p * q) % 2 else 1
                    n = p + q + k + l
                    for i in range(rx):
                        for j in range(ry):
                            s_pos = src.blocks.pos((l, sig), p + q + k,
                                                   inner_s.pos((k, tau), p + q, t_s.index(p, i, q, j)))
                            d_pos = dst.blocks.pos((k, tau), p + q + l,
                                                   inner_d.pos((l, sig), p + q, t_d.index(q, j, p, i)))
                            out_rows[n][d_pos][s_pos] = sign
    return ChainMap(src.complex, dst.complex,
                    {n: IntMatrix(len(r), src.complex.rank(n), r) for n, r in out_rows.items() if r},
                    check=False)


# ---------------------------------------------------------------------------
# derived comparison through zigzags


@dataclass
class Generator:
    obj: int
    key: tuple
    degree: int
    inner_degree: int
    basis: int
    position: int


@dataclass
class BarResolution:
    """Free resolution ``P = U . S`` of a diagram together with its generators."""

    diagram: Profunctor
    resolution: Profunctor
    generators: list
    boundary: list  # per generator: list of (morphism, generator index, coefficient)

    def augmentation(self, g: Generator) -> list[int]:
        r = self.diagram.entries[g.obj].rank(g.degree)
        vec = [0] * r
        if g.key[0] == 0:
            vec[g.basis] = 1
        return vec


def bar_resolution(s: Profunctor) -> BarResolution:
    d = s.as_diagram()
    cat = d.source
    p = coend(Profunctor.unit(cat), d)
    gens: list[Generator] = []
    index: dict = {}
    decode: list[dict] = []
    for o in range(cat.num_objects):
        bs = p.composite.blocks[o]
        table = {}
        for key in bs.keys:
            k, st = key
            d0, dk = cat.string_ends(k, st)
            t = bs.tensor[key]
            homs = cat.hom(d0, o)
            for m, r in s.entries[dk].ranks.items():
                for i, mu in enumerate(homs):
                    for j in range(r):
                        pos = bs.pos(key, m, t.index(0, i, m, j))
                        table[(m + k, pos)] = (mu, (key, m, j))
                        if mu == cat.identity(d0):
                            index[(key, m, j)] = len(gens)
                            gens.append(Generator(o, key, m + k, m, j, pos))
        decode.append(table)
    boundary = []
    for g in gens:
        dmat = p.entries[g.obj].d(g.degree)
        terms = []
        for row in range(dmat.rows):
            c = dmat[row, g.position]
            if c:
                mu, gid = decode[g.obj][(g.degree - 1, row)]
                terms.append((mu, index[gid], c))
        boundary.append(terms)
    return BarResolution(s, p, gens, boundary)


@dataclass
class LiftWitness:
    """Generator values of the lifts and homotopies produced along a zigzag."""

    lifts: list = field(default_factory=list)       # per backward step: {gen: vector}
    homotopies: list = field(default_factory=list)  # per backward step, then the final one


def _lift_system(res: BarResolution, y: Profunctor | None, q: NatMap | None, x: Profunctor,
                 rhs: Callable[[Generator], list[int]]) -> SparseSystem:
    """Equations for ``s`` (natural, chain) and ``h`` with ``q s - d h - h d = rhs``.

    With ``y is None`` there is no ``s``; the system then asks for
    ``-(d h + h d) = rhs``.
    """
    sys = SparseSystem()
    cols: dict = {}

    def add(unknown, eq, val):
        if val:
            col = cols.setdefault(unknown, {})
            col[eq] = col.get(eq, 0) + val

    for gi, g in enumerate(res.generators):
        o, n = g.obj, g.degree
        xo = x.entries[o]
        if y is not None:
            yo = y.entries[o]
            dy = yo.d(n)
            for r, c, v in dy.nonzero():
                add(("s", gi, c), ("c", gi, r), v)
            for mu, g2, coef in res.boundary[gi]:
                act = y.actions[mu].component(n - 1)
                for r, c, v in act.nonzero():
                    add(("s", g2, c), ("c", gi, r), -coef * v)
            qc = q.components[o].component(n)
            for r, c, v in qc.nonzero():
                add(("s", gi, c), ("t", gi, r), v)
        dx = xo.d(n + 1)
        for r, c, v in dx.nonzero():
            add(("h", gi, c), ("t", gi, r), -v)
        for mu, g2, coef in res.boundary[gi]:
            act = x.actions[mu].component(n)
            for r, c, v in act.nonzero():
                add(("h", g2, c), ("t", gi, r), -coef * v)
        for r, v in enumerate(rhs(g)):
            sys.add_rhs(("t", gi, r), v)
        for r in range(xo.rank(n)):
            sys.equation(("t", gi, r))
        if y is not None:
            for r in range(y.entries[o].rank(n - 1)):
                sys.equation(("c", gi, r))
    # unknowns in a deterministic order, including ones no equation touches
    for gi, g in enumerate(res.generators):
        if y is not None:
            for c in range(y.entries[g.obj].rank(g.degree)):
                sys.add_unknown(("s", gi, c), cols.get(("s", gi, c), {}))
        for c in range(x.entries[g.obj].rank(g.degree + 1)):
            sys.add_unknown(("h", gi, c), cols.get(("h", gi, c), {}))
    return sys


def _read(sol: dict, tag: str, res: BarResolution, space: Profunctor, shift: int) -> dict:
    out = {}
    for gi, g in enumerate(res.generators):
        r = space.entries[g.obj].rank(g.degree + shift)
        out[gi] = [sol[(tag, gi, c)] for c in range(r)]
    return out


def _values(vals: dict, tag: str) -> dict:
    return {(tag, gi, c): v for gi, vec in vals.items() for c, v in enumerate(vec)}


def zigzag_is_identity(start: Profunctor, steps: Sequence[tuple[str, NatMap]],
                       witness: LiftWitness | None = None) -> tuple[bool, LiftWitness | None]:
    """Decide whether a zigzag from ``start`` back to ``start`` is the identity in the derived category.

    ``steps`` are ``("fwd", f)`` for a map pointing along the zigzag and
    ``("bwd", q)`` for a quasi-isomorphism pointing against it.  The bar
    resolution of ``start`` is lifted step by step; a supplied witness is
    checked instead of solved for.
    """
    res = bar_resolution(start)
    current = {gi: res.augmentation(g) for gi, g in enumerate(res.generators)}
    space = start
    found = LiftWitness()
    b = 0
    for kind, f in steps:
        if kind == "fwd":
            if f.source.entries != space.entries:
                raise ProfunctorError("zigzag step does not start where the previous one ended")
            current = {gi: _mv(f.components[g.obj].component(g.degree), current[gi])
                       for gi, g in enumerate(res.generators)}
            space = f.target
            continue
        if f.target.entries != space.entries:
            raise ProfunctorError("zigzag step does not end where the previous one ended")
        t = current
        sys = _lift_system(res, f.source, f, space, _lookup(res, t))
        if witness is not None:
            vals = {**_values(witness.lifts[b], "s"), **_values(witness.homotopies[b], "h")}
            if not sys.satisfied(vals):
                return False, None
            current = witness.lifts[b]
            found.lifts.append(witness.lifts[b])
            found.homotopies.append(witness.homotopies[b])
        else:
            sol = sys.solve()
            if sol is None:
                return False, None
            current = _read(sol, "s", res, f.source, 0)
            found.lifts.append(current)
            found.homotopies.append(_read(sol, "h", res, space, 1))
        space = f.source
        b += 1
    if space.entries != start.entries:
        raise ProfunctorError("zigzag does not return to its start")
    diff = {gi: [u - v for u, v in zip(current[gi], res.augmentation(g))] for gi, g in enumerate(res.generators)}
    # want d h + h d == current - aug, i.e. -(d h + h d) == aug - current
    sys = _lift_system(res, None, None, start, _lookup(res, {gi: [-v for v in vec] for gi, vec in diff.items()}))
    if witness is not None:
        if not sys.satisfied(_values(witness.homotopies[b], "h")):
            return False, None
        found.homotopies.append(witness.homotopies[b])
        return True, found
    sol = sys.solve()
    if sol is None:
        return False, None
    found.homotopies.append(_read(sol, "h", res, start, 1))
    return True, found


def _lookup(res: BarResolution, vals: dict) -> Callable[[Generator], list[int]]:
    pos = {id(g): gi for gi, g in enumerate(res.generators)}
    return lambda g: vals[pos[id(g)]]


# ---------------------------------------------------------------------------
# random data


def direct_sum(x: Profunctor, y: Profunctor) -> Profunctor:
    if not x.same_shape(y):
        raise ProfunctorError("direct sum of profunctors of different shapes")
    return Profunctor(x.source, x.target, [a.direct_sum(b) for a, b in zip(x.entries, y.entries)],
                      [direct_sum_maps(f, g) for f, g in zip(x.actions, y.actions)], check=False)


def random_natural_endomorphism(rng, m: Profunctor, entry_bound: int = 2) -> NatMap:
    """Random element of the lattice of natural chain endomorphisms of ``m``."""
    cat = m.cat
    shapes = [(o, n, c.rank(n), c.rank(n)) for o, c in enumerate(m.entries) for n in c.degrees if c.rank(n)]
    size = sum(r * r for *_, r, _ in shapes)

    def comp(f, o, n):
        r = m.entries[o].rank(n)
        return f[o].get(n, IntMatrix.zeros(r, r)) if o < len(f) else IntMatrix.zeros(r, r)

    def residual(x):
        f = _unpack_maps(x, shapes)
        out = []
        for o, c in enumerate(m.entries):
            for n in c.degrees:
                out += (c.d(n) @ comp(f, o, n) - comp(f, o, n - 1) @ c.d(n)).entries()
        for mu in range(cat.num_morphisms):
            if cat.is_identity(mu):
                continue
            act, s, t = m.actions[mu], cat.src[mu], cat.tgt[mu]
            for n in set(m.entries[s].degrees) | set(m.entries[t].degrees):
                out += (act.component(n) @ comp(f, s, n) - comp(f, t, n) @ act.component(n)).entries()
        return out

    f = _unpack_maps(random_kernel_element(rng, residual, size, entry_bound), shapes)
    return NatMap(m, m, [ChainMap(c, c, {n: comp(f, o, n) for n in c.degrees})
                         for o, c in enumerate(m.entries)])


def random_diagram(rng, a: FinCategory, max_total_rank: int = 4) -> Profunctor:
    """Random diagram ``A -|-> *`` for categories with no composable pair of non-identities."""
    for f in range(a.num_morphisms):
        for g in range(a.num_morphisms):
            if not (a.is_identity(f) or a.is_identity(g)) and a.tgt[f] == a.src[g]:
                raise ProfunctorError("random diagrams need a category without composable non-identities")
    ent = {o: random_complex(rng, max_total_rank=max_total_rank, degrees=(-1, 1)) for o in range(a.num_objects)}
    maps = {f: random_chain_map(rng, ent[a.src[f]], ent[a.tgt[f]])
            for f in range(a.num_morphisms) if not a.is_identity(f)}
    return Profunctor.diagram(a, ent, maps)


def random_profunctor(rng, a: FinCategory, b: FinCategory, terms: int = 2, max_total_rank: int = 2) -> Profunctor:
    """Sum of external tensors ``P(a) (x) Q(b)`` of random diagrams on ``A`` and ``B^op``."""
    out = None
    for _ in range(terms):
        p = random_diagram(rng, a, max_total_rank)
        q = random_diagram(rng, b.op(), max_total_rank)
        qw = Profunctor(terminal(), b, q.entries, q.actions, check=False)
        x = coend(p, qw)
        x = Profunctor(a, b, x.entries, x.actions, check=False)
        out = x if out is None else direct_sum(out, x)
    return out
