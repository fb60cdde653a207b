"""Deterministic persistence of a precomputed audit.

The cache file is a single canonical JSON document (gzip when the path
ends in .gz): node-keyed maps sorted, fixed field order, integer deltas
only. Identical inputs therefore produce byte-identical files, which is
what the thread-count determinism contract rides on.

The fingerprint is the SHA-256 of the canonical config descriptor, which
embeds the graph hash; it pins a cache to its (graph, config, mode).
Payload corruption is caught by revalidating the integer identities the
table and deltas must satisfy (read_cache rejects any file where they
do not hold).
"""

from __future__ import annotations

import gzip
import json
from dataclasses import dataclass
from typing import BinaryIO, Mapping

from .canonical import canonical_bytes, sha256_hex
from .diagnosis import PerturbationReport, build_report
from .errors import (
    CacheParseError,
    CorruptCacheError,
    FingerprintMismatchError,
    NodeNotFoundError,
    UnsupportedVersionError,
)
from .graph import DirectedGraph
from .ranking import RankingConfig
from .sensitivity import (
    BaselineMode,
    DeltaVector,
    SensitivityRecord,
    SensitivityTable,
    SweepResult,
    aligned_baseline,
    audit_fingerprint,
    config_descriptor,
    run_sweep,
)

FORMAT_VERSION = 1


@dataclass(frozen=True)
class AuditCache:
    """Everything the interactive phase needs, so it never reruns a ranking."""

    version: int
    fingerprint: str
    config: dict  # canonical descriptor: graph hash, ranking params, mode
    positions: dict[str, int]
    table: SensitivityTable
    deltas: dict[str, DeltaVector]

    @property
    def mode(self) -> BaselineMode:
        return BaselineMode(self.config["mode"])

    def baseline_for(self, removed: str) -> dict[str, int]:
        """Mode-aligned pre-removal ranking over the survivors."""
        return aligned_baseline(self.positions, removed, self.mode)


def build_cache(g: DirectedGraph, cfg: RankingConfig, mode: BaselineMode,
                workers: int = 1) -> tuple[AuditCache, SweepResult]:
    """Run the full audit sweep and package it for persistence."""
    result = run_sweep(g, cfg, mode, workers=workers)
    cache = AuditCache(
        version=FORMAT_VERSION,
        fingerprint=result.table.fingerprint,
        config=config_descriptor(g, cfg, mode),
        positions=result.positions,
        table=result.table,
        deltas=result.deltas,
    )
    return cache, result


def _cache_document(cache: AuditCache) -> dict:
    nodes = sorted(cache.positions)
    return {
        "version": cache.version,
        "fingerprint": cache.fingerprint,
        "config": cache.config,
        "positions": {v: cache.positions[v] for v in nodes},
        "table": [r.to_dict() for r in sorted(cache.table.records, key=lambda r: r.node)],
        "deltas": {
            v: {u: cache.deltas[v].deltas[u] for u in sorted(cache.deltas[v].deltas)}
            for v in nodes
        },
    }


def write_cache(cache: AuditCache, sink: BinaryIO) -> None:
    """Canonical serialization; byte-identical for identical inputs."""
    sink.write(canonical_bytes(_cache_document(cache)))


def read_cache(source: BinaryIO) -> AuditCache:
    """Parse and validate a cache stream.

    Rejects unsupported versions, fingerprints that do not match the
    stored config descriptor, and payloads whose integer identities or
    cross-references do not hold.
    """
    try:
        doc = json.loads(source.read().decode("utf-8"))
    except (json.JSONDecodeError, UnicodeDecodeError, EOFError, OSError) as err:
        raise CacheParseError(f"cache stream is not valid JSON: {err}") from None
    if not isinstance(doc, dict):
        raise CacheParseError("cache document must be a JSON object")
    missing = {"version", "fingerprint", "config", "positions", "table", "deltas"} - set(doc)
    if missing:
        raise CacheParseError(f"cache document missing keys: {sorted(missing)}")
    if doc["version"] != FORMAT_VERSION:
        raise UnsupportedVersionError(
            f"cache format version {doc['version']!r} not supported "
            f"(expected {FORMAT_VERSION})"
        )
    if sha256_hex(canonical_bytes(doc["config"])) != doc["fingerprint"]:
        raise CorruptCacheError("fingerprint does not match the stored config descriptor")

    try:
        cache = AuditCache(
            version=doc["version"],
            fingerprint=doc["fingerprint"],
            config=dict(doc["config"]),
            positions={v: int(p) for v, p in doc["positions"].items()},
            table=SensitivityTable(
                [SensitivityRecord.from_dict(r) for r in doc["table"]],
                doc["fingerprint"],
            ),
            deltas={
                v: DeltaVector(v, {u: int(x) for u, x in m.items()})
                for v, m in doc["deltas"].items()
            },
        )
    except (KeyError, TypeError, ValueError, AttributeError) as err:
        raise CacheParseError(f"malformed cache payload: {err}") from None
    _validate_payload(cache)
    return cache


def _validate_payload(cache: AuditCache) -> None:
    def fail(msg: str):
        raise CorruptCacheError(f"cache payload inconsistent: {msg}")

    nodes = set(cache.positions)
    n = len(nodes)
    if sorted(cache.positions.values()) != list(range(1, n + 1)):
        fail("positions are not a dense 1..n ranking")
    if set(cache.deltas) != nodes:
        fail("delta vectors do not cover the node set")
    records = cache.table.by_node()
    if set(records) != nodes or len(cache.table.records) != n:
        fail("table records do not cover the node set")
    mode = cache.mode
    for v, rec in records.items():
        d = cache.deltas[v].deltas
        if set(d) != nodes - {v}:
            fail(f"delta domain for {v!r} is not the surviving node set")
        if rec.original_rank != cache.positions[v]:
            fail(f"original rank mismatch for {v!r}")
        si_pos = sum(x for x in d.values() if x > 0)
        si_neg = -sum(x for x in d.values() if x < 0)
        if (rec.si, rec.si_pos, rec.si_neg) != (si_pos + si_neg, si_pos, si_neg):
            fail(f"sensitivity indices for {v!r} do not match the stored deltas")
        if sum(rec.per_label_pos.values()) != rec.si_pos:
            fail(f"per-label positive split for {v!r} does not sum to siPos")
        if sum(rec.per_label_neg.values()) != rec.si_neg:
            fail(f"per-label negative split for {v!r} does not sum to siNeg")
        if mode is BaselineMode.COMPACT and si_pos != si_neg:
            fail(f"compact-mode deltas for {v!r} do not sum to zero")
        if mode is BaselineMode.GAP and si_pos - si_neg != n - rec.original_rank:
            fail(f"gap-mode delta sum for {v!r} is off")


def save_cache(cache: AuditCache, path: str) -> None:
    """write_cache to a file; .gz paths are gzip-compressed (still
    deterministic: fixed mtime)."""
    if path.endswith(".gz"):
        # fixed mtime and no embedded filename keep the bytes deterministic
        with open(path, "wb") as raw:
            with gzip.GzipFile(filename="", fileobj=raw, mode="wb", mtime=0) as fh:
                write_cache(cache, fh)
    else:
        with open(path, "wb") as fh:
            write_cache(cache, fh)


def load_cache(path: str) -> AuditCache:
    if path.endswith(".gz"):
        with gzip.open(path, "rb") as fh:
            return read_cache(fh)
    with open(path, "rb") as fh:
        return read_cache(fh)


def check_cache_matches(cache: AuditCache, g: DirectedGraph) -> None:
    """Refuse to serve a cache against a graph/config it was not built for."""
    descriptor = dict(cache.config)
    descriptor["graph"] = g.fingerprint()
    if sha256_hex(canonical_bytes(descriptor)) != cache.fingerprint:
        raise FingerprintMismatchError(
            "cache fingerprint does not match the supplied graph"
        )


def report_from_cache(
    cache: AuditCache, g: DirectedGraph, removed: str, k: int
) -> PerturbationReport:
    """Rebuild the full diagnosis from cached integers; no ranking reruns.

    Produces bit-identical output to the live diagnose() because both
    paths share build_report and the cached deltas are exact.
    """
    if removed not in cache.deltas:
        raise NodeNotFoundError(removed, candidates=_closest(removed, cache.deltas))
    n = len(cache.positions)
    if not 1 <= k <= n - 1:
        raise ValueError(f"k must be in [1, {n - 1}], got {k}")
    baseline = cache.baseline_for(removed)
    return build_report(g, cache.deltas[removed], baseline, k, cache.fingerprint)


def _closest(node: str, population: Mapping[str, object]) -> list[str]:
    import difflib

    return difflib.get_close_matches(node, list(population), n=3)
