"""Canonical JSON serialization shared by every artifact this tool writes.

All output files and HTTP responses use the same byte layout: UTF-8,
sorted keys, two-space indent, trailing newline. Two equal documents
therefore always serialize to identical bytes, which makes golden-file
tests and cross-process determinism checks meaningful.
"""

from __future__ import annotations

import json
import os
import tempfile
from pathlib import Path
from typing import Any, Union

SCHEMA_API = "api/1"
SCHEMA_USAGES = "usages/1"
SCHEMA_ANNOTATIONS = "annotations/1"
SCHEMA_MIGRATION = "migration/1"
SCHEMA_EXTRACT_REPORT = "extract-report/1"
SCHEMA_GENERATED = "generated/1"


def canonical_json(data: Any) -> bytes:
    """Serialize to the canonical byte form."""
    text = json.dumps(data, ensure_ascii=False, indent=2, sort_keys=True)
    return (text + "\n").encode("utf-8")


def dump_json(data: Any, path: Union[str, Path]) -> None:
    Path(path).write_bytes(canonical_json(data))


def dump_json_atomic(data: Any, path: Union[str, Path]) -> None:
    """Write via a sibling temp file and rename, so readers never see a torn file."""
    path = Path(path)
    payload = canonical_json(data)
    fd, tmp_name = tempfile.mkstemp(dir=str(path.parent), prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as handle:
            handle.write(payload)
        os.replace(tmp_name, path)
    except BaseException:
        try:
            os.unlink(tmp_name)
        except OSError:
            pass
        raise


def load_json(path: Union[str, Path]) -> Any:
    with open(path, "r", encoding="utf-8") as handle:
        return json.load(handle)


def require_schema(data: Any, expected: str) -> dict:
    """Check the document's schema marker, returning the document."""
    if not isinstance(data, dict):
        raise ValueError(f"expected a JSON object with schema {expected!r}")
    found = data.get("schema")
    if found != expected:
        raise ValueError(f"expected schema {expected!r}, got {found!r}")
    return data
