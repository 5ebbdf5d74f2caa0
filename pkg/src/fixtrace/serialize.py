"""JSON documents for every value the command line reads or writes.

Integers are written as decimal strings so that no precision is lost in
other JSON readers.  Each document carries ``kind`` and ``version``.
"""
from __future__ import annotations

import json
from functools import lru_cache
from importlib import resources
from typing import Any

import jsonschema

from .chains import ChainComplex, ChainMap, TwistedEndo
from .duality import DualPairCertificate
from .fincat import FinCategory
from .groupring import AbelianGroup, FiniteGroup, Group, GroupHom, GroupRingElement, GRMatrix
from .linalg import IntMatrix
from .profunctor import LiftWitness, NatMap, Profunctor
from .reidemeister import RelativeTraceInput
from .simplicial import SimplicialComplex, SimplicialMap

VERSION = 1
KINDS = ("simplicial_complex", "simplicial_map", "group", "group_endo", "chain_complex", "twisted_endo",
         "profunctor", "weight_certificate", "relative_input")


class DocumentError(ValueError):
    pass


def _i(x: Any) -> int:
    if isinstance(x, bool):
        raise DocumentError(f"expected an integer, got {x!r}")
    if isinstance(x, int):
        return x
    try:
        return int(str(x), 10)
    except ValueError:
        raise DocumentError(f"expected a decimal integer string, got {x!r}") from None


def _s(x: int) -> str:
    return str(int(x))


@lru_cache(maxsize=None)
def schema(kind: str) -> dict:
    text = resources.files("fixtrace").joinpath("schemas", f"{kind}.json").read_text(encoding="utf-8")
    return json.loads(text)


def validate(doc: Any) -> str:
    if not isinstance(doc, dict) or doc.get("kind") not in KINDS:
        raise DocumentError(f"document must be an object with kind in {list(KINDS)}")
    if doc.get("version") != VERSION:
        raise DocumentError(f"unsupported document version {doc.get('version')!r}")
    try:
        jsonschema.validate(doc, schema(doc["kind"]))
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise DocumentError(f"schema violation at {where}: {exc.message}") from None
    return doc["kind"]


# ---------------------------------------------------------------------------
# groups


def group_payload(g: Group) -> dict:
    if isinstance(g, FiniteGroup):
        return {"type": "finite", "table": [[_s(x) for x in r] for r in g.table], "names": list(g.names)}
    return {"type": "abelian", "free_rank": _s(g.free_rank), "torsion": [_s(t) for t in g.torsion]}


def group_from(p: dict) -> Group:
    if p["type"] == "finite":
        return FiniteGroup([[_i(x) for x in r] for r in p["table"]], p.get("names"))
    return AbelianGroup(free_rank=_i(p["free_rank"]), torsion=[_i(t) for t in p.get("torsion", [])])


def _elem(g: Group, x) -> Any:
    if isinstance(g, FiniteGroup):
        return _s(x)
    return [_s(v) for v in x]


def _elem_from(g: Group, x) -> Any:
    if isinstance(g, FiniteGroup):
        return _i(x)
    return tuple(_i(v) for v in x)


def hom_payload(h: GroupHom) -> dict:
    out = {"source": group_payload(h.source), "images": [_elem(h.target, y) for y in h.images]}
    if h.target != h.source:
        out["target"] = group_payload(h.target)
    return out


def hom_from(p: dict) -> GroupHom:
    src = group_from(p["source"])
    tgt = group_from(p["target"]) if "target" in p else src
    return GroupHom(src, tgt, [_elem_from(tgt, y) for y in p["images"]])


# ---------------------------------------------------------------------------
# matrices, complexes, maps


def matrix_payload(m) -> list:
    if isinstance(m, IntMatrix):
        return [[_s(x) for x in r] for r in m.tolist()]
    return [[[[_elem(m.group, g), _s(c)] for g, c in x.terms] for x in r] for r in m.tolist()]


def matrix_from(rows: list, shape: tuple[int, int], group: Group | None):
    r, c = shape
    if len(rows) != r or any(len(row) != c for row in rows):
        raise DocumentError(f"matrix has the wrong shape; expected {r}x{c}")
    if group is None:
        return IntMatrix(r, c, [[_i(x) for x in row] for row in rows])
    return GRMatrix(group, r, c, [[GroupRingElement(group, [(_elem_from(group, g), _i(k)) for g, k in x])
                                   for x in row] for row in rows])


def complex_payload(c: ChainComplex, with_group: bool = True) -> dict:
    out: dict = {"ranks": {str(n): _s(r) for n, r in sorted(c.ranks.items())},
                 "differentials": {str(n): matrix_payload(m) for n, m in sorted(c.differentials.items())}}
    if with_group and c.group is not None:
        out["group"] = group_payload(c.group)
    return out


def complex_from(p: dict, group: Group | None = None) -> ChainComplex:
    if group is None and "group" in p:
        group = group_from(p["group"])
    ranks = {_i(n): _i(r) for n, r in p["ranks"].items()}
    c = ChainComplex(ranks, {}, group, check=False)
    diffs = {_i(n): matrix_from(m, (c.rank(_i(n) - 1), c.rank(_i(n))), group)
             for n, m in p.get("differentials", {}).items()}
    return ChainComplex(ranks, diffs, group)


def map_payload(f) -> dict:
    return {str(n): matrix_payload(m) for n, m in sorted(f.components.items())}


def _components(p: dict, src: ChainComplex, dst: ChainComplex) -> dict:
    return {_i(n): matrix_from(m, (dst.rank(_i(n)), src.rank(_i(n))), src.group) for n, m in p.items()}


def chain_map_from(p: dict, src: ChainComplex, dst: ChainComplex) -> ChainMap:
    return ChainMap(src, dst, _components(p, src, dst))


def twisted_payload(f: TwistedEndo) -> dict:
    return {"complex": complex_payload(f.complex), "twist": hom_payload(f.twist), "components": map_payload(f)}


def twisted_from(p: dict) -> TwistedEndo:
    c = complex_from(p["complex"])
    phi = hom_from(p["twist"])
    if phi.source != c.group:
        raise DocumentError("twist is not an endomorphism of the complex's group")
    return TwistedEndo(c, GroupHom(c.group, c.group, phi.images), _components(p["components"], c, c))


# ---------------------------------------------------------------------------
# simplicial


def simplicial_payload(k: SimplicialComplex) -> dict:
    return {"vertices": [_s(v) for v in k.vertices], "simplices": [[_s(v) for v in s] for s in k.all_simplices()]}


def simplicial_from(p: dict) -> SimplicialComplex:
    verts = [_i(v) for v in p.get("vertices", [])]
    if "facets" in p:
        return SimplicialComplex.from_facets([[_i(v) for v in s] for s in p["facets"]], verts)
    return SimplicialComplex(verts, [[_i(v) for v in s] for s in p.get("simplices", [])])


def smap_payload(f: SimplicialMap) -> dict:
    return {"vertex_map": {_s(k): _s(v) for k, v in sorted(f.vertex_map.items())}}


def smap_from(p: dict, source: SimplicialComplex, target: SimplicialComplex | None = None) -> SimplicialMap:
    return SimplicialMap(source, target or source, {_i(k): _i(v) for k, v in p["vertex_map"].items()})


# ---------------------------------------------------------------------------
# categories, profunctors, certificates


def category_payload(c: FinCategory) -> dict:
    return {"objects": list(c.objects),
            "morphisms": [[c.names[m], _s(c.src[m]), _s(c.tgt[m])] for m in range(c.num_morphisms)],
            "composition": [[_s(g), _s(f), _s(h)] for (g, f), h in sorted(c.composition_table().items())],
            "identities": [_s(i) for i in c.identities]}


def category_from(p: dict) -> FinCategory:
    return FinCategory(p["objects"], [(m[0], _i(m[1]), _i(m[2])) for m in p["morphisms"]],
                       {(_i(g), _i(f)): _i(h) for g, f, h in p["composition"]}, [_i(i) for i in p["identities"]])


def profunctor_payload(x: Profunctor, endomorphism: NatMap | None = None) -> dict:
    out = {"source": category_payload(x.source), "target": category_payload(x.target),
           "entries": [complex_payload(c) for c in x.entries],
           "actions": [map_payload(f) for f in x.actions]}
    if endomorphism is not None:
        out["endomorphism"] = natmap_payload(endomorphism)
    return out


def profunctor_from(p: dict) -> Profunctor:
    a, b = category_from(p["source"]), category_from(p["target"])
    cat = a.product(b.op())
    if len(p["entries"]) != cat.num_objects or len(p["actions"]) != cat.num_morphisms:
        raise DocumentError("entries/actions do not match the index category")
    ent = [complex_from(c) for c in p["entries"]]
    acts = [chain_map_from(m, ent[cat.src[k]], ent[cat.tgt[k]]) for k, m in enumerate(p["actions"])]
    return Profunctor(a, b, ent, acts)


def natmap_payload(f: NatMap) -> list:
    return [map_payload(c) for c in f.components]


def natmap_from(p: list, src: Profunctor, dst: Profunctor) -> NatMap:
    if len(p) != len(src.entries):
        raise DocumentError("natural map needs one component per object")
    return NatMap(src, dst, [chain_map_from(m, s, t) for m, s, t in zip(p, src.entries, dst.entries)])


def endomorphism_from(p: dict, x: Profunctor) -> NatMap:
    if "endomorphism" not in p:
        return x.identity()
    return natmap_from(p["endomorphism"], x, x)


def _witness_payload(w: LiftWitness | None):
    if w is None:
        return None
    conv = lambda d: {_s(k): [_s(v) for v in vec] for k, vec in d.items()}  # noqa: E731
    return {"lifts": [conv(d) for d in w.lifts], "homotopies": [conv(d) for d in w.homotopies]}


def _witness_from(p) -> LiftWitness | None:
    if p is None:
        return None
    conv = lambda d: {_i(k): [_i(v) for v in vec] for k, vec in d.items()}  # noqa: E731
    return LiftWitness([conv(d) for d in p["lifts"]], [conv(d) for d in p["homotopies"]])


def certificate_payload(c: DualPairCertificate) -> dict:
    return {"name": c.name, "n": _s(c.n), "weight": profunctor_payload(c.left), "dual": profunctor_payload(c.right),
            "coev_replacement": profunctor_payload(c.coev_replacement),
            "coev_quasi": natmap_payload(c.coev_quasi), "coev": natmap_payload(c.coev),
            "eval_replacement": profunctor_payload(c.eval_replacement),
            "eval_quasi": natmap_payload(c.eval_quasi), "eval": natmap_payload(c.eval),
            "triangles": [_witness_payload(w) for w in c.triangles]}


def certificate_from(p: dict) -> DualPairCertificate:
    from .profunctor import coend
    m, ms = profunctor_from(p["weight"]), profunctor_from(p["dual"])
    n = _i(p["n"])
    re, rv = profunctor_from(p["coev_replacement"]), profunctor_from(p["eval_replacement"])
    uan = Profunctor.unit(m.source).shift(n)
    ubn = Profunctor.unit(m.target).shift(n)
    tri = p.get("triangles") or [None, None]
    return DualPairCertificate(m, ms, n, re, natmap_from(p["coev_quasi"], re, uan),
                               natmap_from(p["coev"], re, coend(m, ms)), rv,
                               natmap_from(p["eval_quasi"], rv, coend(ms, m)), natmap_from(p["eval"], rv, ubn),
                               tuple(_witness_from(w) for w in tri), p.get("name", ""))


def relative_payload(r: RelativeTraceInput) -> dict:
    return {"f_x": twisted_payload(r.f_x), "g_a": twisted_payload(r.g_a), "i": hom_payload(r.i),
            "j": map_payload(r.j)}


def relative_from(p: dict) -> RelativeTraceInput:
    from .reidemeister import induce_up
    f, g = twisted_from(p["f_x"]), twisted_from(p["g_a"])
    i = hom_from(p["i"])
    i = GroupHom(g.group, f.group, i.images)
    j = chain_map_from(p["j"], induce_up(i, g.complex), f.complex)
    return RelativeTraceInput(f, g, i, j)


# ---------------------------------------------------------------------------
# documents


def to_document(value: Any, kind: str | None = None, **extra) -> dict:
    """Wrap a value in a versioned document; ``kind`` disambiguates plain complexes and groups."""
    if isinstance(value, SimplicialComplex):
        kind, body = "simplicial_complex", simplicial_payload(value)
    elif isinstance(value, SimplicialMap):
        kind, body = "simplicial_map", smap_payload(value)
    elif isinstance(value, GroupHom):
        kind, body = "group_endo", hom_payload(value)
    elif isinstance(value, (FiniteGroup, AbelianGroup)):
        kind, body = "group", group_payload(value)
    elif isinstance(value, ChainComplex):
        kind, body = "chain_complex", complex_payload(value)
    elif isinstance(value, TwistedEndo):
        kind, body = "twisted_endo", twisted_payload(value)
    elif isinstance(value, Profunctor):
        kind, body = "profunctor", profunctor_payload(value, extra.pop("endomorphism", None))
    elif isinstance(value, DualPairCertificate):
        kind, body = "weight_certificate", certificate_payload(value)
    elif isinstance(value, RelativeTraceInput):
        kind, body = "relative_input", relative_payload(value)
    else:
        raise DocumentError(f"cannot serialize {type(value).__name__}")
    return {"kind": kind, "version": VERSION, **body, **extra}


def from_document(doc: dict, context: Any = None) -> Any:
    """Parse a validated document; simplicial maps need their source complex as ``context``."""
    kind = validate(doc)
    if kind == "simplicial_complex":
        return simplicial_from(doc)
    if kind == "simplicial_map":
        if context is None:
            raise DocumentError("a simplicial map needs its complex")
        return smap_from(doc, context)
    if kind == "group":
        return group_from(doc)
    if kind == "group_endo":
        return hom_from(doc)
    if kind == "chain_complex":
        return complex_from(doc)
    if kind == "twisted_endo":
        return twisted_from(doc)
    if kind == "profunctor":
        return profunctor_from(doc)
    if kind == "weight_certificate":
        return certificate_from(doc)
    return relative_from(doc)


def dumps(doc: dict) -> str:
    return json.dumps(doc, indent=1, sort_keys=False)


def loads(text: str, source: str = "<input>") -> dict:
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentError(f"{source}: malformed JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
