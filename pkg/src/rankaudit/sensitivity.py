"""Per-node sensitivity auditing: ranking deltas under node removal and the
full initial-check sweep.

For each candidate removal the pipeline compares ranking positions before
and after the perturbation. The removed node appears in neither vector;
how the remaining baseline positions are aligned is a genuine modeling
choice, so both variants are implemented:

  compact - baseline ranks are re-densified to 1..n-1 after deleting the
            removed node, so deltas measure pure reorderings and sum to 0.
  gap     - baseline keeps the original 1..n values (the removed node's
            position stays vacant), so deltas additionally absorb the
            deterministic shift of everyone ranked below the removed node.

All deltas are exact integers; the per-label splits therefore satisfy
si == si_pos + si_neg and the per-label sums reconstitute si_pos/si_neg
with zero tolerance.
"""

from __future__ import annotations

import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Mapping

from .canonical import canonical_bytes, sha256_hex
from .errors import ConvergenceError, NodeNotFoundError
from .graph import DirectedGraph
from .ranking import RankingConfig, method_key, method_scores, scores_to_positions


class BaselineMode(str, Enum):
    COMPACT = "compact"
    GAP = "gap"


@dataclass(frozen=True)
class DeltaVector:
    """Per-survivor rank changes caused by one removal.

    delta = baseline_rank - perturbed_rank, so positive means the node's
    rank improved. The removed node has no entry.
    """

    removed: str
    deltas: dict[str, int]

    def influenced(self) -> dict[str, int]:
        return {v: d for v, d in self.deltas.items() if d != 0}


@dataclass(frozen=True)
class SensitivityRecord:
    node: str
    original_rank: int
    si: int
    si_pos: int
    si_neg: int
    per_label_pos: dict[str, int]
    per_label_neg: dict[str, int]

    def to_dict(self) -> dict:
        return {
            "node": self.node,
            "originalRank": self.original_rank,
            "si": self.si,
            "siPos": self.si_pos,
            "siNeg": self.si_neg,
            "perLabelPos": {b: self.per_label_pos[b] for b in sorted(self.per_label_pos)},
            "perLabelNeg": {b: self.per_label_neg[b] for b in sorted(self.per_label_neg)},
        }

    @staticmethod
    def from_dict(d: Mapping) -> "SensitivityRecord":
        return SensitivityRecord(
            node=d["node"],
            original_rank=d["originalRank"],
            si=d["si"],
            si_pos=d["siPos"],
            si_neg=d["siNeg"],
            per_label_pos=dict(d["perLabelPos"]),
            per_label_neg=dict(d["perLabelNeg"]),
        )


@dataclass(frozen=True)
class SensitivityTable:
    """One record per graph node, sorted by node id, pinned to its inputs
    by the audit fingerprint."""

    records: list[SensitivityRecord]
    fingerprint: str

    def by_node(self) -> dict[str, SensitivityRecord]:
        return {r.node: r for r in self.records}


@dataclass(frozen=True)
class SweepStats:
    """Operational numbers for the precompute log line."""

    node_count: int
    edge_count: int
    wall_seconds: float
    original_iterations: int
    perturbed_iterations_min: int
    perturbed_iterations_max: int
    perturbed_iterations_total: int


@dataclass(frozen=True)
class SweepResult:
    positions: dict[str, int]
    table: SensitivityTable
    deltas: dict[str, DeltaVector]
    stats: SweepStats


def config_descriptor(g: DirectedGraph, cfg: RankingConfig, mode: BaselineMode) -> dict:
    """Canonical description of the audit inputs; hashing this yields the
    fingerprint that pins caches and tables to (graph, config, mode)."""
    teleport = None
    if cfg.teleport is not None:
        teleport = {v: float(cfg.teleport[v]) for v in sorted(cfg.teleport)}
    return {
        "graph": g.fingerprint(),
        "method": method_key(cfg.method),
        "damping": cfg.damping,
        "tolerance": cfg.tolerance,
        "maxIterations": cfg.max_iterations,
        "hitsScoreKind": method_key(cfg.hits_score_kind),
        "teleport": teleport,
        "mode": mode.value,
    }


def audit_fingerprint(g: DirectedGraph, cfg: RankingConfig, mode: BaselineMode) -> str:
    return sha256_hex(canonical_bytes(config_descriptor(g, cfg, mode)))


def aligned_baseline(
    positions: Mapping[str, int], removed: str, mode: BaselineMode
) -> dict[str, int]:
    """Baseline ranks over the survivors, aligned per mode (see module doc)."""
    if removed not in positions:
        raise NodeNotFoundError(removed)
    survivors = [v for v in positions if v != removed]
    if mode is BaselineMode.GAP:
        return {v: positions[v] for v in survivors}
    survivors.sort(key=lambda v: positions[v])
    return {v: i for i, v in enumerate(survivors, start=1)}


def ranking_deltas(
    g: DirectedGraph,
    cfg: RankingConfig,
    mode: BaselineMode,
    removed: str,
    base_positions: Mapping[str, int] | None = None,
) -> DeltaVector:
    """Rank changes of every survivor when `removed` is deleted.

    `base_positions` lets callers reuse the original ranking across a
    sweep; when omitted it is computed here.
    """
    if removed not in g:
        raise NodeNotFoundError(removed)
    if g.node_count < 2:
        raise ValueError("ranking deltas need at least 2 nodes")
    if base_positions is None:
        try:
            base_positions = rank_with_iterations(g, cfg)[0]
        except ConvergenceError as err:
            raise err.with_context("original graph") from None
    deltas, _ = _deltas_for_node(g, cfg, mode, removed, dict(base_positions))
    return DeltaVector(removed, deltas)


def rank_with_iterations(g: DirectedGraph, cfg: RankingConfig) -> tuple[dict[str, int], int]:
    scores = method_scores(g, cfg)
    return scores_to_positions(scores.scores), scores.iterations


def _deltas_for_node(
    g: DirectedGraph,
    cfg: RankingConfig,
    mode: BaselineMode,
    removed: str,
    base_positions: dict[str, int],
) -> tuple[dict[str, int], int]:
    try:
        perturbed, iterations = rank_with_iterations(g.remove_node(removed), cfg)
    except ConvergenceError as err:
        raise err.with_context(f"perturbed graph (removed {removed!r})") from None
    baseline = aligned_baseline(base_positions, removed, mode)
    deltas = {v: baseline[v] - perturbed[v] for v in sorted(baseline)}
    return deltas, iterations


def fold_record(
    node: str,
    original_rank: int,
    deltas: Mapping[str, int],
    labels: Mapping[str, str],
    label_universe: Iterable[str],
) -> SensitivityRecord:
    """Accumulate the L1 sensitivity index and its signed per-label split."""
    per_pos = {b: 0 for b in label_universe}
    per_neg = {b: 0 for b in label_universe}
    for v, d in deltas.items():
        if d > 0:
            per_pos[labels[v]] += d
        elif d < 0:
            per_neg[labels[v]] += -d
    si_pos = sum(per_pos.values())
    si_neg = sum(per_neg.values())
    return SensitivityRecord(
        node=node,
        original_rank=original_rank,
        si=si_pos + si_neg,
        si_pos=si_pos,
        si_neg=si_neg,
        per_label_pos=per_pos,
        per_label_neg=per_neg,
    )


# Worker-side state for the process pool: sent once per worker via the
# initializer so each removal task only ships a node-id chunk back and forth.
_WORKER_STATE: tuple | None = None


def _init_worker(g, cfg, mode, base_positions) -> None:
    global _WORKER_STATE
    _WORKER_STATE = (g, cfg, mode, base_positions)


def _chunk_task(nodes: list[str]) -> list[tuple[str, "np.ndarray", int]]:
    # deltas come back as one int array per node, aligned to the sorted
    # survivor order; far cheaper to pickle than per-node dicts
    import numpy as np

    g, cfg, mode, base = _WORKER_STATE
    out = []
    for v in nodes:
        deltas, iters = _deltas_for_node(g, cfg, mode, v, base)
        out.append((v, np.fromiter(deltas.values(), dtype=np.int64, count=len(deltas)), iters))
    return out


def _unpack_chunk(g: DirectedGraph, batch) -> dict[str, tuple[dict[str, int], int]]:
    results = {}
    for v, arr, iters in batch:
        survivors = (u for u in g.nodes if u != v)
        results[v] = (dict(zip(survivors, arr.tolist())), iters)
    return results


def _chunks(items: tuple[str, ...], workers: int) -> list[list[str]]:
    # a few chunks per worker amortizes IPC while keeping stragglers short
    size = max(1, -(-len(items) // (workers * 4)))
    return [list(items[i : i + size]) for i in range(0, len(items), size)]


def run_sweep(
    g: DirectedGraph,
    cfg: RankingConfig,
    mode: BaselineMode = BaselineMode.COMPACT,
    workers: int = 1,
) -> SweepResult:
    """The initial sensitivity check over every node of g.

    The original ranking is computed exactly once; per-node removals are
    independent and fan out over `workers` processes. Results are folded
    in node-id order, so the output is identical for any worker count.
    """
    if g.node_count < 2:
        raise ValueError("sensitivity sweep needs at least 2 nodes")
    if workers < 1:
        raise ValueError("workers must be >= 1")
    cfg.validate_teleport(g)

    started = time.perf_counter()
    try:
        base_positions, original_iterations = rank_with_iterations(g, cfg)
    except ConvergenceError as err:
        raise err.with_context("original graph") from None

    results: dict[str, tuple[dict[str, int], int]] = {}
    if workers == 1 or g.node_count <= 2:
        for v in g.nodes:
            deltas, iters = _deltas_for_node(g, cfg, mode, v, base_positions)
            results[v] = (deltas, iters)
    else:
        with ProcessPoolExecutor(
            max_workers=workers,
            initializer=_init_worker,
            initargs=(g, cfg, mode, base_positions),
        ) as pool:
            for batch in pool.map(_chunk_task, _chunks(g.nodes, workers)):
                results.update(_unpack_chunk(g, batch))

    labels = g.labels
    universe = g.label_universe()
    fingerprint = audit_fingerprint(g, cfg, mode)
    records = []
    delta_vectors: dict[str, DeltaVector] = {}
    per_node_iters = []
    for v in g.nodes:  # deterministic fold order
        deltas, iters = results[v]
        records.append(fold_record(v, base_positions[v], deltas, labels, universe))
        delta_vectors[v] = DeltaVector(v, deltas)
        per_node_iters.append(iters)

    stats = SweepStats(
        node_count=g.node_count,
        edge_count=g.edge_count,
        wall_seconds=time.perf_counter() - started,
        original_iterations=original_iterations,
        perturbed_iterations_min=min(per_node_iters),
        perturbed_iterations_max=max(per_node_iters),
        perturbed_iterations_total=sum(per_node_iters),
    )
    return SweepResult(
        positions=dict(base_positions),
        table=SensitivityTable(records, fingerprint),
        deltas=delta_vectors,
        stats=stats,
    )


def sensitivity_initial_check(
    g: DirectedGraph,
    cfg: RankingConfig,
    mode: BaselineMode = BaselineMode.COMPACT,
    workers: int = 1,
) -> SensitivityTable:
    return run_sweep(g, cfg, mode, workers).table
