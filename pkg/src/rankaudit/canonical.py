"""Canonical JSON encoding and hashing.

Everything persisted or fingerprinted goes through canonical_json so that
identical inputs always produce byte-identical output: compact separators,
sorted-key node maps built by the callers, UTF-8, no NaN/Infinity.
"""

from __future__ import annotations

import hashlib
import json
from typing import Any


def canonical_json(obj: Any) -> str:
    """Serialize to compact JSON, preserving the caller's key order."""
    return json.dumps(obj, ensure_ascii=False, allow_nan=False, separators=(",", ":"))


def canonical_bytes(obj: Any) -> bytes:
    return canonical_json(obj).encode("utf-8")


def sha256_hex(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()
