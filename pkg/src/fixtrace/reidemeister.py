"""Group rings and bimodules: base change, induced complexes and relative Reidemeister traces."""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Hashable, Sequence

from .chains import (ChainComplex, ChainError, ChainMap, TwistedEndo, cone_map, induced_map, lefschetz_trace,
                     mapping_cone, random_chain_map, random_complex, reidemeister_trace)
from .fincat import FinCategory
from .groupring import (AbelianGroup, FiniteGroup, Group, GroupError, GroupHom, GroupRingElement, GRMatrix,
                        TwistedClassVector, agree_on_generators, all_homomorphisms, augment, push_classes,
                        small_groups, twisted_classes)
from .linalg import IntMatrix
from .profunctor import Profunctor, random_natural_endomorphism


class ReidemeisterError(ValueError):
    pass


# ---------------------------------------------------------------------------
# base change objects


@dataclass(frozen=True)
class BaseChangeData:
    """A homomorphism ``i: G -> H`` with ``H`` finite; ``left`` is ``_iZ[H]``, ``right`` is ``Z[H]_i``."""

    hom: GroupHom
    left: str = "Z[G]-Z[H]"
    right: str = "Z[H]-Z[G]"

    def __post_init__(self) -> None:
        if not isinstance(self.hom.target, FiniteGroup):
            raise ReidemeisterError("base change is modelled for finite target groups")


class PermBimodule:
    """Free abelian group on a finite set with commuting left and right actions.

    Actions are by elements of the finite group ``H``; a ``G``-action that
    factors through ``i`` is given by the subgroup ``i(G)``.
    """

    def __init__(self, basis: Sequence[Hashable], left: Callable, right: Callable):
        self.basis = tuple(basis)
        self.left = left
        self.right = right
        self.index = {b: k for k, b in enumerate(self.basis)}


def _orbit_min(x, y, xb: PermBimodule, yb: PermBimodule, sub: Sequence[int], h: FiniteGroup):
    return min((xb.right(x, h.inv(k)), yb.left(k, y)) for k in sub)


def tensor_bimodules(x: PermBimodule, y: PermBimodule, sub: Sequence[int], h: FiniteGroup) -> tuple:
    """``x (x)_K y`` for the subgroup ``K``; returns the module and the canonical-pair function."""
    canon = lambda a, b: _orbit_min(a, b, x, y, sub, h)  # noqa: E731
    basis = sorted({canon(a, b) for a in x.basis for b in y.basis})
    mod = PermBimodule(basis, lambda k, p: canon(x.left(k, p[0]), p[1]), lambda p, k: canon(p[0], y.right(p[1], k)))
    return mod, canon


def _subgroup(i: GroupHom) -> list[int]:
    h = i.target
    gens = [i(g) for g in i.source.generators()]
    seen = {h.identity}
    frontier = [h.identity]
    while frontier:
        nxt = []
        for a in frontier:
            for g in gens:
                b = h.mul(a, g)
                if b not in seen:
                    seen.add(b)
                    nxt.append(b)
        frontier = nxt
    return sorted(seen)


@dataclass
class BaseChangeDual:
    data: BaseChangeData
    left: PermBimodule
    right: PermBimodule
    checks: dict = field(default_factory=dict)

    @property
    def verified(self) -> bool:
        return all(self.checks.values())


def base_change_dual(data: BaseChangeData | GroupHom) -> BaseChangeDual:
    """The pair ``_iZ[H]`` and ``Z[H]_i`` with coevaluation ``g |-> i(g) (x) 1`` and evaluation by multiplication.

    Both triangle composites are evaluated on every basis element and must
    be the identity on the nose; the structure maps are checked to be
    well defined and bimodule maps.
    """
    if isinstance(data, GroupHom):
        data = BaseChangeData(data)
    i = data.hom
    g, h = i.source, i.target
    hs = list(h.elements())
    k = _subgroup(i)
    act_g = lambda a: i(a)  # noqa: E731
    m = PermBimodule(hs, lambda t, x: h.mul(t, x), lambda x, t: h.mul(x, t))   # left action through i
    ms = PermBimodule(hs, lambda t, x: h.mul(t, x), lambda x, t: h.mul(x, t))  # right action through i
    m_ms, c1 = tensor_bimodules(m, ms, hs, h)        # over H
    ms_m, c2 = tensor_bimodules(ms, m, k, h)         # over G
    e = h.identity

    def coev(a) -> tuple:
        return c1(act_g(a), e)

    def ev(p) -> int:
        return h.mul(p[0], p[1])

    checks: dict[str, bool] = {}
    gens = list(g.generators()) or [g.identity]
    checks["coev_bimodule"] = all(coev(a) == m_ms.left(act_g(a), coev(g.identity)) ==
                                  m_ms.right(coev(g.identity), act_g(a)) for a in gens)
    checks["eval_well_defined"] = all(ev((ms.right(a, h.inv(t)), m.left(t, b))) == ev((a, b))
                                      for a in hs for b in hs for t in k)
    checks["eval_bimodule"] = all(ev(ms_m.left(t, p)) == h.mul(t, ev(p)) and ev(ms_m.right(p, t)) == h.mul(ev(p), t)
                                  for p in ms_m.basis for t in hs)
    (mm_m, c3) = tensor_bimodules(m_ms, m, k, h)
    (m_msm, c4) = tensor_bimodules(m, ms_m, hs, h)

    def assoc(p):  # ((a, b), c) -> (a, (b, c))
        (a, b), c = p
        return c4(a, c2(b, c))

    checks["assoc_well_defined"] = all(
        assoc(c3(m_ms.right(p, h.inv(t)), m.left(t, c))) == assoc(c3(p, c))
        for p in m_ms.basis for c in hs for t in k)

    def triangle_left(x: int) -> int:
        p = c3(coev(g.identity), x)          # (coev (x) 1)(1 (x) x)
        a, (b, c) = assoc(p)
        return h.mul(a, ev((b, c)))          # (1 (x) ev), then the right unitor

    def triangle_right(x: int) -> int:
        a, bc = x, coev(g.identity)          # (1 (x) coev)(x (x) 1)
        inner = c2(a, bc[0])                 # reassociate: (x (x) b) (x) c
        return h.mul(ev(inner), bc[1])       # (ev (x) 1), then the left unitor

    checks["triangle_left"] = all(triangle_left(x) == x for x in hs)
    checks["triangle_right"] = all(triangle_right(x) == x for x in hs)
    return BaseChangeDual(data, m, ms, checks)


# ---------------------------------------------------------------------------
# change of rings


def induce_up(i: GroupHom, c: ChainComplex) -> ChainComplex:
    return induced_map(c, i)


def induce_endo(i: GroupHom, f: TwistedEndo, twist: GroupHom) -> TwistedEndo:
    """``i(f)`` on the induced complex, twisted by ``twist`` on the target group."""
    if not agree_on_generators(i.compose(f.twist), twist.compose(i)):
        raise ReidemeisterError("homomorphism does not intertwine the twists")
    c = induce_up(i, f.complex)
    return TwistedEndo(c, twist, {n: m.map(i) for n, m in f.components.items()})


@dataclass
class RelativeTraceInput:
    """``f_X`` over ``Z[H]``, ``g_A`` over ``Z[G]``, ``i: G -> H`` and ``j: i_!(C_A) -> C_X``."""

    f_x: TwistedEndo
    g_a: TwistedEndo
    i: GroupHom
    j: ChainMap

    def check(self) -> None:
        f, g, i, j = self.f_x, self.g_a, self.i, self.j
        if i.source != g.group or i.target != f.group:
            raise ReidemeisterError("homomorphism does not match the coefficient groups")
        if not agree_on_generators(i.compose(g.twist), f.twist.compose(i)):
            raise ReidemeisterError("i o phi_G != phi_H o i")
        if not f.satisfies_law() or not g.satisfies_law():
            raise ReidemeisterError("twisted chain-map law fails")
        if j.source != induce_up(i, g.complex) or j.target != f.complex:
            raise ReidemeisterError("j must map the induced complex of A to the complex of X")
        if not j.is_chain_map():
            raise ReidemeisterError("j is not a chain map")
        gi = induce_endo(i, g, f.twist)
        for n in j.degrees():
            if j.component(n) @ gi.component(n) != f.component(n) @ j.component(n).map(f.twist):
                raise ReidemeisterError(f"j does not commute with the endomorphisms in degree {n}")

    def induced_g(self) -> TwistedEndo:
        return induce_endo(self.i, self.g_a, self.f_x.twist)


def relative_reidemeister(inp: RelativeTraceInput) -> TwistedClassVector:
    """Reidemeister trace of the endomorphism induced on the cone of ``j``."""
    inp.check()
    try:
        cm = cone_map(inp.j, inp.induced_g(), inp.f_x)
    except ChainError as exc:
        raise ReidemeisterError(str(exc)) from None
    return reidemeister_trace(cm)


@dataclass
class AdditivityCheck:
    r_f: TwistedClassVector
    i_r_g: TwistedClassVector
    relative: TwistedClassVector
    lefschetz: dict
    ferrario: bool | None

    @property
    def passed(self) -> bool:
        ok = self.r_f - self.i_r_g == self.relative
        aug = self.lefschetz["L_f"] - self.lefschetz["L_g"] == self.lefschetz["L_rel"]
        return ok and aug and self.ferrario is not False

    def as_dict(self) -> dict:
        return {"R_f": self.r_f.to_labels(), "i_R_g": self.i_r_g.to_labels(),
                "R_rel": self.relative.to_labels(), "lefschetz": dict(self.lefschetz),
                "ferrario": self.ferrario, "passed": self.passed}


def verify_reidemeister_additivity(inp: RelativeTraceInput) -> AdditivityCheck:
    """``R(f) - i(R(g))`` against the cone trace, plus the augmented and Ferrario forms.

    The Ferrario form ``j(R(f)) - L(f|A) = R(f/A)`` applies when ``G`` is
    trivial; otherwise it is reported as ``None``.
    """
    inp.check()
    classes = twisted_classes(inp.f_x.group, inp.f_x.twist)
    r_f = reidemeister_trace(inp.f_x)
    r_g = reidemeister_trace(inp.g_a)
    i_r_g = push_classes(inp.i, inp.g_a.twist, inp.f_x.twist, r_g, classes)
    rel = relative_reidemeister(inp)
    lf = lefschetz_trace(inp.f_x.augment())
    lg = lefschetz_trace(inp.g_a.augment())
    lrel = augment(rel)
    ferrario = None
    g = inp.g_a.group
    if isinstance(g, FiniteGroup) and g.order == 1:
        base = classes.key(inp.i(g.identity))
        ferrario = r_f - TwistedClassVector(classes, {base: lg}) == rel
    return AdditivityCheck(r_f, i_r_g, rel, {"L_f": lf, "L_g": lg, "L_rel": lrel}, ferrario)


# ---------------------------------------------------------------------------
# canned models


def _gr(group: Group, terms) -> GroupRingElement:
    return GroupRingElement(group, terms)


def _geometric_sum(group: AbelianGroup, gen, p: int) -> GroupRingElement:
    """``(x^p - 1) / (x - 1)`` as a Laurent polynomial in the generator ``x``."""
    if p >= 0:
        return _gr(group, [(group.pow(gen, k), 1) for k in range(p)])
    return _gr(group, [(group.pow(gen, k), -1) for k in range(p, 0)])


def circle_complex() -> ChainComplex:
    """Cells of the universal cover of the circle over Z[Z]: ``d e_1 = t - 1``."""
    z = AbelianGroup.free(1)
    return ChainComplex({0: 1, 1: 1}, {1: GRMatrix(z, 1, 1, [[_gr(z, [((1,), 1), ((0,), -1)])]])}, z)


def circle_map(d: int) -> TwistedEndo:
    """``z |-> z^d``: twist ``t |-> t^d``, ``A_0 = 1``, ``A_1 = 1 + t + ... + t^(d-1)``."""
    c = circle_complex()
    z = c.group
    phi = GroupHom.from_matrix(z, z, [[d]])
    return TwistedEndo(c, phi, {0: GRMatrix(z, 1, 1, [[_gr(z, [((0,), 1)])]]),
                                1: GRMatrix(z, 1, 1, [[_geometric_sum(z, (1,), d)]])})


def basepoint_input(d: int) -> RelativeTraceInput:
    """Degree-``d`` circle map relative to its fixed basepoint 0-cell."""
    f = circle_map(d)
    triv = FiniteGroup.trivial()
    pt = ChainComplex({0: 1}, {}, triv)
    g = TwistedEndo(pt, GroupHom.identity(triv), {0: GRMatrix.identity(triv, 1)})
    i = GroupHom.trivial(triv, f.group)
    j = ChainMap(induce_up(i, pt), f.complex, {0: GRMatrix.identity(f.group, 1)})
    return RelativeTraceInput(f, g, i, j)


def torus_complex() -> ChainComplex:
    """Universal cover of the torus over Z[Z^2]: ``d_1 = (x - 1, y - 1)``, ``d_2 = (1 - y, x - 1)^T``."""
    z2 = AbelianGroup.free(2)
    x, y, e = (1, 0), (0, 1), (0, 0)
    d1 = GRMatrix(z2, 1, 2, [[_gr(z2, [(x, 1), (e, -1)]), _gr(z2, [(y, 1), (e, -1)])]])
    d2 = GRMatrix(z2, 2, 1, [[_gr(z2, [(e, 1), (y, -1)])], [_gr(z2, [(x, 1), (e, -1)])]])
    return ChainComplex({0: 1, 1: 2, 2: 1}, {1: d1, 2: d2}, z2)


def _laurent_divide(num: GroupRingElement, den: GroupRingElement) -> GroupRingElement:
    """Exact quotient in Z[Z^2] by polynomial division (sympy)."""
    import sympy

    x, y = sympy.symbols("x y")

    def to_poly(el: GroupRingElement):
        terms = el.terms
        if not terms:
            return sympy.Integer(0), (0, 0)
        sx = min(g[0] for g, _ in terms)
        sy = min(g[1] for g, _ in terms)
        return sum(c * x ** (g[0] - sx) * y ** (g[1] - sy) for g, c in terms), (sx, sy)

    pn, sn = to_poly(num)
    pd, sd = to_poly(den)
    q, r = sympy.div(sympy.Poly(pn, x, y), sympy.Poly(pd, x, y))
    if not r.is_zero:
        raise ReidemeisterError("twisted chain-map law has no solution in degree 2")
    out = []
    for (a, b), c in q.terms():
        out.append(((a + sn[0] - sd[0], b + sn[1] - sd[1]), int(c)))
    return GroupRingElement(num.group, out)


def torus_map(m: Sequence[Sequence[int]]) -> TwistedEndo:
    """Self-map of the torus inducing ``m`` on ``pi_1 = Z^2`` (columns are generator images).

    ``A_1`` holds Fox derivatives of the images ``x^p y^q`` and ``A_2`` is
    solved from the twisted law by exact division.
    """
    c = torus_complex()
    z2 = c.group
    phi = GroupHom.from_matrix(z2, z2, m)
    x, y = (1, 0), (0, 1)
    cols = []
    for k in range(2):
        p, q = phi(z2.generator(k))
        dx = _geometric_sum(z2, x, p)
        dy = _gr(z2, [((p, 0), 1)]) * _geometric_sum(z2, y, q)
        cols.append((dx, dy))
    a1 = GRMatrix(z2, 2, 2, [[cols[0][0], cols[1][0]], [cols[0][1], cols[1][1]]])
    rhs = a1 @ c.d(2).map(phi)
    a2 = _laurent_divide(rhs[0, 0], c.d(2)[0, 0])
    one = GRMatrix.identity(z2, 1)
    return TwistedEndo(c, phi, {0: one, 1: a1, 2: GRMatrix(z2, 1, 1, [[a2]])})


def torus_circle_input(m: Sequence[Sequence[int]]) -> RelativeTraceInput:
    """Torus map relative to the circle ``x`` of the 1-skeleton; needs ``m`` to fix the first axis."""
    if m[1][0] != 0:
        raise ReidemeisterError("the matrix must preserve the first coordinate circle")
    f = torus_map(m)
    z2 = f.group
    g = circle_map(m[0][0])
    i = GroupHom.from_matrix(g.group, z2, [[1], [0]])
    ca = induce_up(i, g.complex)
    j = ChainMap(ca, f.complex, {0: GRMatrix.identity(z2, 1),
                                 1: GRMatrix(z2, 2, 1, [[_gr(z2, [((0, 0), 1)])], [_gr(z2, [])]])})
    return RelativeTraceInput(f, g, i, j)


# ---------------------------------------------------------------------------
# random instances over finite groups


def _unipotent(rng, group: FiniteGroup, n: int) -> tuple[GRMatrix, GRMatrix]:
    """Random ``I + N`` with ``N`` strictly upper triangular, and its inverse."""
    rows = [[GroupRingElement.scalar(group, int(r == c)) for c in range(n)] for r in range(n)]
    for r in range(n):
        for c in range(r + 1, n):
            if rng.random() < 0.5:
                rows[r][c] = _gr(group, [(rng.randrange(group.order), rng.choice([-1, 1]))])
    p = GRMatrix(group, n, n, rows)
    nil = p - GRMatrix.identity(group, n)
    inv, term = GRMatrix.identity(group, n), GRMatrix.identity(group, n)
    for _ in range(n):
        term = -(term @ nil)
        inv = inv + term
    return p, inv


def _spread(group: FiniteGroup, pieces: dict[int, IntMatrix], rows: int, cols: int) -> GRMatrix:
    data = [[GroupRingElement(group, [(h, m[r, c]) for h, m in pieces.items()]) for c in range(cols)]
            for r in range(rows)]
    return GRMatrix(group, rows, cols, data)


@lru_cache(maxsize=None)
def compatible_triples(max_order: int = 4) -> tuple:
    """All ``(G, H, i, phi_G, phi_H)`` over groups of order ``<= max_order`` with ``i phi_G = phi_H i``."""
    groups = list(small_groups(max_order).values())
    out = []
    for g in groups:
        eg = all_homomorphisms(g, g)
        for h in groups:
            eh = all_homomorphisms(h, h)
            for i in all_homomorphisms(g, h):
                for pg in eg:
                    for ph in eh:
                        if agree_on_generators(i.compose(pg), ph.compose(i)):
                            out.append((g, h, i, pg, ph))
    return tuple(out)


def random_relative_input(rng, max_order: int = 4, max_total_rank: int = 4) -> RelativeTraceInput:
    """Random strictly commuting relative data over finite groups.

    Integer complexes ``A`` and ``X = cone(e: Y -> A)`` carry group-ring
    endomorphisms ``sum_k k G_k`` built from commuting integer pairs, and
    everything is then conjugated by random unipotent group-ring matrices.
    """
    g, h, i, pg, ph = rng.choice(compatible_triples(max_order))

    budget = max(1, max_total_rank // 2)
    a_z = random_complex(rng, max_total_rank=budget, degrees=(0, 1))
    y_z = random_complex(rng, max_total_rank=max_total_rank - a_z.total_rank, degrees=(-1, 0))
    e = random_chain_map(rng, y_z, a_z)
    arrow = FinCategory.arrow()
    diag = Profunctor.diagram(arrow, {0: y_z, 1: a_z}, {arrow.morphism_index("alpha"): e})
    gk, fk = {}, {}
    for k in g.elements():
        if rng.random() < 0.5 and k != g.identity:
            continue
        nat = random_natural_endomorphism(rng, diag, entry_bound=1)
        gk[k] = nat.component(1, 0)
        hk = i(k)
        f_y = nat.component(0, 0)
        fk[hk] = fk[hk] + f_y if hk in fk else f_y
    # X = cone(e) over Z: degree n is A_n + Y_{n-1}
    x_z = mapping_cone(e)
    ga_pieces = {k: m for k, m in gk.items()}
    fx_pieces = {}
    for hk in set(fk) | {i(k) for k in gk}:
        ga = [m for k, m in gk.items() if i(k) == hk]
        gsum = ga[0]
        for m in ga[1:]:
            gsum = gsum + m
        fy = fk.get(hk, ChainMap(y_z, y_z, {}))
        fx_pieces[hk] = cone_map(e, fy, gsum) if ga else cone_map(e, fy, ChainMap(a_z, a_z, {}))

    def lift(cz: ChainComplex, grp: FiniteGroup) -> ChainComplex:
        return ChainComplex(cz.ranks, {n: GRMatrix.from_int(grp, m) for n, m in cz.differentials.items()}, grp)

    ca, cx = lift(a_z, g), lift(x_z, h)
    gmat = {n: _spread(g, {k: m.component(n) for k, m in ga_pieces.items()}, a_z.rank(n), a_z.rank(n))
            for n in a_z.degrees}
    fmat = {n: _spread(h, {k: m.component(n) for k, m in fx_pieces.items()}, x_z.rank(n), x_z.rank(n))
            for n in x_z.degrees}
    jmat = {n: GRMatrix.from_int(h, IntMatrix.block([[IntMatrix.identity(a_z.rank(n))],
                                                     [IntMatrix.zeros(y_z.rank(n - 1), a_z.rank(n))]]))
            for n in a_z.degrees}
    # conjugate
    pa = {n: _unipotent(rng, g, a_z.rank(n)) for n in a_z.degrees}
    px = {n: _unipotent(rng, h, x_z.rank(n)) for n in x_z.degrees}
    da = {n: pa[n - 1][0] @ ca.d(n) @ pa[n][1] for n in ca.differentials}
    dx = {n: px[n - 1][0] @ cx.d(n) @ px[n][1] for n in cx.differentials}
    ca2 = ChainComplex(ca.ranks, da, g)
    cx2 = ChainComplex(cx.ranks, dx, h)
    g2 = TwistedEndo(ca2, pg, {n: pa[n][0] @ gmat[n] @ pa[n][1].map(pg) for n in gmat})
    f2 = TwistedEndo(cx2, ph, {n: px[n][0] @ fmat[n] @ px[n][1].map(ph) for n in fmat})
    j2 = ChainMap(induce_up(i, ca2), cx2, {n: px[n][0] @ jmat[n] @ pa[n][1].map(i) for n in jmat})
    return RelativeTraceInput(f2, g2, i, j2)
