import json
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fixtrace import catalog
from fixtrace import serialize as S
from fixtrace.chains import ChainComplex, ChainError, random_complex
from fixtrace.groupring import AbelianGroup, FiniteGroup, GroupHom
from fixtrace.linalg import IntMatrix
from fixtrace.reidemeister import circle_map, random_relative_input
from fixtrace.simplicial import SimplicialComplex, SimplicialMap


def roundtrip(value, context=None):
    doc = S.to_document(value)
    text = S.dumps(doc)
    back = S.from_document(S.loads(text), context)
    assert S.to_document(back) == doc
    return back


@pytest.mark.parametrize("name", sorted(n for n, d in catalog.documents().items() if d["kind"] != "simplicial_map"))
def test_shipped_documents_roundtrip(name):
    doc = catalog.documents()[name]
    value = S.from_document(doc)
    extra = {"endomorphism": S.endomorphism_from(doc, value)} if "endomorphism" in doc else {}
    assert S.to_document(value, **extra) == doc


def test_simplicial_map_roundtrip():
    c = SimplicialComplex.circle(6)
    f = SimplicialMap(c, c, {v: (-v) % 6 for v in range(6)})
    assert roundtrip(f, c) == f
    with pytest.raises(S.DocumentError, match="needs its complex"):
        S.from_document(S.to_document(f))


def test_groups_and_homs_roundtrip():
    s3 = FiniteGroup.symmetric(3)
    assert roundtrip(s3) == s3
    a = AbelianGroup(free_rank=2, torsion=(2, 4))
    assert roundtrip(a) == a
    z2 = AbelianGroup.free(2)
    phi = GroupHom.from_matrix(z2, z2, [[2, 1], [0, 3]])
    assert roundtrip(phi) == phi


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 10 ** 6), st.integers(0, 80))
def test_chain_complex_roundtrip_keeps_big_integers(seed, exp):
    c = random_complex(random.Random(seed))
    # scale one differential by a huge factor; d d = 0 is preserved
    big = 10 ** exp
    diffs = dict(c.differentials)
    if diffs:
        n = min(diffs)
        diffs[n] = diffs[n].scale(big)
    c = ChainComplex(c.ranks, diffs)
    back = roundtrip(c)
    assert back.ranks == c.ranks
    assert all(back.d(n) == c.d(n) for n in c.degrees)


def test_integers_are_strings():
    doc = S.to_document(ChainComplex({0: 1, 1: 1}, {1: IntMatrix.from_rows([[2 ** 70]])}))
    assert doc["differentials"]["1"] == [[str(2 ** 70)]]
    assert doc["ranks"] == {"0": "1", "1": "1"}


def test_twisted_and_relative_roundtrip():
    roundtrip(circle_map(3))
    roundtrip(random_relative_input(random.Random(2)))


def test_profunctor_and_certificate_roundtrip():
    roundtrip(catalog.load("arrow_circle.json"))
    roundtrip(catalog.load("cofiber_weight.json"))


def test_schema_error_names_the_path():
    doc = catalog.documents()["circle3_chains.json"]
    bad = json.loads(json.dumps(doc))
    bad["ranks"]["0"] = "three"
    with pytest.raises(S.DocumentError, match=r"schema violation at ranks/0"):
        S.validate(bad)


def test_unknown_kind_and_version():
    with pytest.raises(S.DocumentError, match="kind"):
        S.validate({"kind": "banana", "version": 1})
    with pytest.raises(S.DocumentError, match="version"):
        S.validate({"kind": "group", "version": 99})
    with pytest.raises(S.DocumentError, match="kind"):
        S.validate([1, 2])


def test_malformed_json_reports_position():
    with pytest.raises(S.DocumentError, match=r"line 2, column"):
        S.loads('{"kind":\n  nope}', "x.json")


def test_invariant_violations_surface_from_parsing():
    doc = S.to_document(ChainComplex({0: 1, 1: 1, 2: 1}, {1: IntMatrix.from_rows([[0]])}))
    doc["differentials"] = {"1": [["1"]], "2": [["1"]]}
    with pytest.raises(ChainError, match="not a complex"):
        S.from_document(doc)


def test_booleans_are_not_integers():
    with pytest.raises(S.DocumentError):
        S._i(True)
    assert S._i("-12") == -12
