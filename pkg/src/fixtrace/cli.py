"""Command line: each subcommand reads JSON documents and runs one library operation.

Output is ``{"ok": bool, "result": ..., "details": ...}``.  Exit status is
0 on success or a passing verification, 1 on a failing verification and 2
when an input cannot be read or violates an invariant.
"""
from __future__ import annotations

import argparse
import json
import pathlib
import sys
from typing import Any, Callable, Sequence

from . import acceptance, catalog
from . import serialize as S
from .chains import ChainComplex, TwistedEndo, lefschetz_trace, reidemeister_trace
from .duality import DualPairCertificate, coefficient_vector, verify_dual_pair, verify_linearity
from .fincat import FinCategory, conjugacy_classes
from .groupring import FiniteGroup, GroupHom, augment, twisted_classes
from .profunctor import Profunctor
from .reidemeister import RelativeTraceInput, verify_reidemeister_additivity
from .simplicial import SimplicialComplex, SimplicialMap, lefschetz, verify_additivity


class InputError(Exception):
    pass


class Reply:
    def __init__(self, ok: bool, result: Any, details: Any = None):
        self.ok, self.result, self.details = ok, result, details

    def payload(self) -> dict:
        return {"ok": self.ok, "result": self.result, "details": self.details}


def read_document(arg: str) -> dict:
    """Parse a file, falling back to the shipped corpus when no such file exists."""
    path = pathlib.Path(arg)
    if path.is_file():
        text, source = path.read_text(encoding="utf-8"), str(path)
    else:
        name = arg if arg.endswith(".json") else arg + ".json"
        if name not in catalog.corpus_names():
            raise InputError(f"{arg}: no such file or corpus example")
        text, source = catalog.corpus_text(name), f"corpus/{name}"
    doc = S.loads(text, source)
    try:
        S.validate(doc)
    except S.DocumentError as exc:
        raise InputError(f"{source}: {exc}") from None
    return doc


def load(arg: str, kinds: Sequence[type], context: Any = None) -> Any:
    doc = read_document(arg)
    value = S.from_document(doc, context)
    if not isinstance(value, tuple(kinds)):
        want = " or ".join(k.__name__ for k in kinds)
        raise InputError(f"{arg}: expected a {want} document, got kind {doc['kind']!r}")
    return value


def verdict(passed: bool, details: Any) -> Reply:
    return Reply(passed, "pass" if passed else "fail", details)


# ---------------------------------------------------------------------------
# commands


def cmd_euler(a) -> Reply:
    x = load(a.complex, [SimplicialComplex, ChainComplex])
    if isinstance(x, SimplicialComplex):
        return Reply(True, x.euler_characteristic(), {"f_vector": [x.count(k) for k in range(x.dim + 1)]})
    return Reply(True, lefschetz_trace(x.identity()), {"ranks": {str(n): r for n, r in sorted(x.ranks.items())}})


def cmd_lefschetz(a) -> Reply:
    x = load(a.complex, [SimplicialComplex])
    f = load(a.map, [SimplicialMap], x)
    return Reply(True, lefschetz(f), None)


def cmd_reidemeister(a) -> Reply:
    f = load(a.endo, [TwistedEndo])
    r = reidemeister_trace(f)
    return Reply(True, r.to_labels(), {"classes": r.class_set.count, "nonzero_classes": r.nonzero_classes,
                                        "augment": augment(r)})


def cmd_conjugacy_classes(a) -> Reply:
    x = load(a.input, [Profunctor, FiniteGroup])
    cat = FinCategory.from_group(x) if isinstance(x, FiniteGroup) else x.source
    cs = conjugacy_classes(cat)
    return Reply(True, cs.labels(), {"count": cs.count})


def cmd_twisted_classes(a) -> Reply:
    phi = load(a.endo, [GroupHom])
    if phi.source != phi.target:
        raise InputError(f"{a.endo}: twisted classes need an endomorphism")
    cs = twisted_classes(phi.source, phi)
    if cs.is_finite_group:
        details = {"representatives": [cs.label(k) for k in cs.representatives]}
    else:
        details = {"quotient": str(cs.quotient)}
    return Reply(True, cs.count, details)


def _certificate(arg: str) -> DualPairCertificate:
    return load(arg, [DualPairCertificate])


def cmd_coefficient_vector(a) -> Reply:
    cert = _certificate(a.certificate)
    return Reply(True, coefficient_vector(cert.left, cert), None)


def cmd_verify_dual_pair(a) -> Reply:
    rep = verify_dual_pair(_certificate(a.certificate))
    return verdict(rep.passed, {"checks": rep.checks, "failures": rep.failures()})


def cmd_verify_additivity(a) -> Reply:
    x = load(a.complex, [SimplicialComplex])
    sub = load(a.subcomplex, [SimplicialComplex])
    f = load(a.map, [SimplicialMap], x)
    rep = verify_additivity(x, sub, f)
    return verdict(rep.passed, rep.breakdown())


def cmd_verify_linearity(a) -> Reply:
    cert = _certificate(a.certificate)
    doc = read_document(a.diagram)
    if doc["kind"] != "profunctor":
        raise InputError(f"{a.diagram}: expected a profunctor document")
    m = S.profunctor_from(doc)
    f = S.endomorphism_from(doc, m)
    rep = verify_linearity(cert.left, cert, m, f)
    return verdict(rep.passed, {"lhs": rep.lhs, "rhs": rep.rhs, "coefficients": rep.coefficients,
                                "local_traces": rep.local_traces})


def cmd_verify_reidemeister_additivity(a) -> Reply:
    rep = verify_reidemeister_additivity(load(a.input, [RelativeTraceInput]))
    return verdict(rep.passed, rep.as_dict())


def cmd_selftest(a) -> Reply:
    outcomes = acceptance.run(a.seed, a.only)
    a.table = acceptance.table(outcomes)
    return Reply(all(o.ok for o in outcomes), {o.key: "pass" if o.ok else "fail" for o in outcomes},
                 {o.key: {"seconds": o.seconds, **o.detail} for o in outcomes})


COMMANDS: dict[str, tuple[Callable, list[tuple[str, str]], str]] = {
    "euler": (cmd_euler, [("complex", "simplicial_complex or chain_complex")], "Euler characteristic"),
    "lefschetz": (cmd_lefschetz, [("complex", "simplicial_complex"), ("map", "simplicial_map")],
                  "Lefschetz number of a simplicial self-map"),
    "reidemeister": (cmd_reidemeister, [("endo", "twisted_endo")], "Reidemeister trace"),
    "conjugacy-classes": (cmd_conjugacy_classes, [("input", "profunctor (its source category) or group")],
                          "conjugacy classes of a finite category"),
    "twisted-classes": (cmd_twisted_classes, [("endo", "group_endo")], "number of twisted conjugacy classes"),
    "coefficient-vector": (cmd_coefficient_vector, [("certificate", "weight_certificate")],
                           "coefficient vector of a weight"),
    "verify-dual-pair": (cmd_verify_dual_pair, [("certificate", "weight_certificate")], "check a dual pair"),
    "verify-additivity": (cmd_verify_additivity, [("complex", "simplicial_complex"),
                                                  ("subcomplex", "simplicial_complex"), ("map", "simplicial_map")],
                          "check L(f) - L(f|A) = L(cone)"),
    "verify-linearity": (cmd_verify_linearity, [("certificate", "weight_certificate"),
                                                ("diagram", "profunctor, optionally with an endomorphism")],
                         "check the linearity formula for a weighted colimit"),
    "verify-reidemeister-additivity": (cmd_verify_reidemeister_additivity, [("input", "relative_input")],
                                       "check R(f) - i(R(g)) = R(f; X, A)"),
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="fixtrace", description=__doc__.splitlines()[0])
    p.add_argument("--format", choices=("json", "text"), default="json")
    # also accepted after the subcommand; SUPPRESS keeps it from resetting an earlier value
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "text"), default=argparse.SUPPRESS)
    sub = p.add_subparsers(dest="command", required=True)
    for name, (fn, args, help_) in COMMANDS.items():
        sp = sub.add_parser(name, help=help_, parents=[common])
        for arg, what in args:
            sp.add_argument(arg, help=f"{what} document (path, or name of a shipped example)")
        sp.set_defaults(fn=fn)
    sp = sub.add_parser("selftest", help="run the acceptance criteria", parents=[common])
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--only", nargs="*", help="criterion numbers to run")
    sp.set_defaults(fn=cmd_selftest)
    return p


def render_text(reply: Reply) -> str:
    lines = [f"ok: {str(reply.ok).lower()}"]
    res = reply.result
    if isinstance(res, dict):
        lines.append("result:")
        lines += [f"  {k}: {v}" for k, v in res.items()] or ["  (empty)"]
    else:
        lines.append(f"result: {res}")
    if isinstance(reply.details, dict):
        lines.append("details:")
        lines += [f"  {k}: {json.dumps(v)}" for k, v in reply.details.items()]
    return "\n".join(lines)


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    a = parser.parse_args(argv)
    try:
        reply = a.fn(a)
        code = 0 if reply.ok else 1
    except (InputError, ValueError) as exc:
        reply, code = Reply(False, None, {"error": str(exc)}), 2
    if a.format == "text":
        print(getattr(a, "table", None) or render_text(reply))
        if code == 2:
            print(f"error: {reply.details['error']}", file=sys.stderr)
    else:
        print(json.dumps(reply.payload()))
    return code


if __name__ == "__main__":
    sys.exit(main())
