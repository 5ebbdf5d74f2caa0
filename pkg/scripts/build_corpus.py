"""Regenerate src/fixtrace/corpus from the library's canned objects."""
import json
import pathlib

from fixtrace import catalog, serialize

out = pathlib.Path(__file__).resolve().parent.parent / "src" / "fixtrace" / "corpus"
out.mkdir(exist_ok=True)
for name, doc in catalog.documents().items():
    serialize.validate(doc)
    (out / name).write_text(serialize.dumps(doc) + "\n", encoding="utf-8")
(out / "index.json").write_text(json.dumps(catalog.INDEX, indent=1) + "\n", encoding="utf-8")
print(f"wrote {len(catalog.INDEX)} index entries to {out}")
