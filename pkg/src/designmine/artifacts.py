"""Versioned artifact files shared by the pipeline stages.

Every artifact embeds its schema kind/version and a hash of the producing
config; loaders refuse mismatched schemas so stale files fail loudly.
No timestamps: the same inputs must produce byte-identical artifacts.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path

from .errors import SchemaVersionError

CORPUS_SCHEMA = "corpus/v1"
STRUCTURED_SCHEMA = "structured-comments/v1"
TAXONOMY_SCHEMA = "taxonomy/v1"
INDEX_SCHEMA = "knowledge-index/v1"


def config_hash(config: dict) -> str:
    canonical = json.dumps(config, sort_keys=True, separators=(",", ":"), ensure_ascii=False)
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()[:16]


def write_artifact(path: str | Path, schema: str, payload: dict, config: dict) -> None:
    envelope = {
        "schema": schema,
        "config_hash": config_hash(config),
        "config": config,
        "payload": payload,
    }
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_text(
        json.dumps(envelope, sort_keys=True, indent=2, ensure_ascii=False) + "\n",
        encoding="utf-8",
    )
    tmp.replace(path)


def read_artifact(path: str | Path, schema: str) -> dict:
    """Return the payload; SchemaVersionError when the kind/version differs."""
    raw = json.loads(Path(path).read_text(encoding="utf-8"))
    found = raw.get("schema")
    if found != schema:
        raise SchemaVersionError(f"{path}: expected schema {schema!r}, found {found!r}")
    return raw["payload"]


def read_envelope(path: str | Path, schema: str) -> dict:
    raw = json.loads(Path(path).read_text(encoding="utf-8"))
    found = raw.get("schema")
    if found != schema:
        raise SchemaVersionError(f"{path}: expected schema {schema!r}, found {found!r}")
    return raw
