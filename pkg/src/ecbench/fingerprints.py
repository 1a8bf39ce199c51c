"""Canonical JSON serialization and SHA-256 fingerprints for artifact files."""

from __future__ import annotations

import hashlib
import json


def canonical_json(doc) -> str:
    """Deterministic JSON encoding: sorted keys, compact separators."""
    return json.dumps(doc, sort_keys=True, separators=(",", ":"))


def fingerprint(doc) -> str:
    return hashlib.sha256(canonical_json(doc).encode("utf-8")).hexdigest()


def fingerprint_bytes(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()
