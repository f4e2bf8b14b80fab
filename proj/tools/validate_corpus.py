#!/usr/bin/env python3
"""Validate every corpus bundle against docs/schemas; exit 1 on any error."""

import json
import pathlib
import sys

import jsonschema

root = pathlib.Path(sys.argv[1] if len(sys.argv) > 1 else pathlib.Path(__file__).resolve().parents[1])
schemas = {p.name.split(".")[0]: json.loads(p.read_text()) for p in (root / "docs/schemas").glob("*.schema.json")}


def check(kind, doc):
    validator = jsonschema.Draft202012Validator(schemas[kind])
    return [e.message for e in validator.iter_errors(doc)]


failures = 0
checked = 0
for manifest_path in sorted((root / "corpus").glob("*/manifest.json")):
    manifest = json.loads(manifest_path.read_text())
    docs = [("manifest", manifest_path, manifest)]
    docs += [(f["kind"], manifest_path.parent / f["path"], None) for f in manifest.get("files", [])]
    for kind, path, doc in docs:
        doc = doc if doc is not None else json.loads(path.read_text())
        errors = check(kind, doc)
        checked += 1
        if errors:
            failures += 1
            print(f"FAIL {path.relative_to(root)}: {errors[0]}")

# The schemas must also reject obviously bad documents.
bad = [
    ("lottery", {"outcomes": {"frame": "O"}}),
    ("bpa", {"frame": "O", "focal": [{"set": [], "mass": 1.0}]}),
    ("bpa", {"frame": "O", "focal": [{"set": ["a"], "mass": 1.5}]}),
    ("assessment", {"singleton_utilities": {}, "model": {"kind": "unknown"}}),
    ("frame", {"id": "X", "labels": ["a", "a"]}),
]
for kind, doc in bad:
    checked += 1
    if not check(kind, doc):
        failures += 1
        print(f"FAIL {kind} schema accepted {json.dumps(doc)}")

print(f"{checked - failures}/{checked} schema checks passed")
sys.exit(1 if failures else 0)
