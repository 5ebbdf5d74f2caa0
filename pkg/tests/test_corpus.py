import json

import pytest

from fixtrace import catalog
from fixtrace import serialize as S

OP_ENTRIES = [e for e in catalog.INDEX if "op" in e]


def test_shipped_files_match_generated_documents():
    docs = catalog.documents()
    assert sorted([*docs, "index.json"]) == catalog.corpus_names()
    for name, doc in docs.items():
        assert catalog.corpus_text(name) == S.dumps(doc) + "\n", name


def test_shipped_index_matches():
    assert json.loads(catalog.corpus_text("index.json")) == catalog.INDEX


def test_index_entries_are_well_formed():
    names = [e["name"] for e in catalog.INDEX]
    assert len(names) == len(set(names))
    files = set(catalog.corpus_names())
    for e in catalog.INDEX:
        assert ("op" in e) != ("cli" in e), e["name"]
        assert e["provenance"] in ("PAPER", "DERIVED")
        assert e["oracle"]
        args = e.get("files", []) if "op" in e else e["cli"][1:]
        assert all(a in files for a in args), e["name"]


@pytest.mark.parametrize("entry", OP_ENTRIES, ids=[e["name"] for e in OP_ENTRIES])
def test_op_entry(entry):
    assert catalog.evaluate(entry) == entry["expected"]
