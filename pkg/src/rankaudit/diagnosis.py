"""What-if diagnosis of a single node removal: overview statistics, the
per-node ranking-change records, top-k label proportions, and the
influence graph.

Influence distance is assigned by a BFS from the removed node that only
enqueues influenced nodes (nonzero rank delta), so a path through an
uninfluenced node does not count. This can exceed plain geodesic
distance; influenced nodes the restricted traversal never reaches are
"hop-inf" and attach directly to the removed node.
"""

from __future__ import annotations

import statistics
from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Mapping

from .errors import NodeNotFoundError
from .graph import DirectedGraph
from .ranking import RankingConfig
from .sensitivity import (
    BaselineMode,
    DeltaVector,
    aligned_baseline,
    audit_fingerprint,
    ranking_deltas,
    rank_with_iterations,
)


class EdgeKind(str, Enum):
    TRAVERSAL = "traversal"
    INF_ATTACH = "inf_attach"


class InfluenceDirection(str, Enum):
    ALL = "all"
    INCREASED = "increased"
    DECREASED = "decreased"


@dataclass(frozen=True)
class PerturbationOverview:
    """The eight summary metrics for one removal."""

    influenced_count: int
    increased_count: int
    decreased_count: int
    max_increase: int
    max_decrease: int
    median_increase: float
    median_decrease: float
    removed_degree: int

    def to_dict(self) -> dict:
        return {
            "influencedCount": self.influenced_count,
            "increasedCount": self.increased_count,
            "decreasedCount": self.decreased_count,
            "maxIncrease": self.max_increase,
            "maxDecrease": self.max_decrease,
            "medianIncrease": self.median_increase,
            "medianDecrease": self.median_decrease,
            "removedDegree": self.removed_degree,
        }


@dataclass(frozen=True)
class RankingChangeRecord:
    node: str
    previous_rank: int
    perturbed_rank: int
    delta: int
    label: str

    def to_dict(self) -> dict:
        return {
            "node": self.node,
            "previousRank": self.previous_rank,
            "perturbedRank": self.perturbed_rank,
            "delta": self.delta,
            "label": self.label,
        }


@dataclass(frozen=True)
class TopKProportions:
    k: int
    before: dict[str, float]
    after: dict[str, float]

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "before": {b: self.before[b] for b in sorted(self.before)},
            "after": {b: self.after[b] for b in sorted(self.after)},
        }


@dataclass(frozen=True)
class InfluenceNode:
    node: str
    hop: int | None  # None = hop-inf (unreachable through influenced nodes)
    delta: int
    label: str

    def to_dict(self) -> dict:
        return {"node": self.node, "hop": self.hop, "delta": self.delta, "label": self.label}


@dataclass(frozen=True)
class InfluenceEdge:
    source: str
    target: str
    kind: EdgeKind

    def to_dict(self) -> dict:
        return {"source": self.source, "target": self.target, "kind": self.kind.value}


@dataclass(frozen=True)
class InfluenceGraph:
    removed: str
    nodes: list[InfluenceNode]
    edges: list[InfluenceEdge]

    def hops(self) -> dict[str, int | None]:
        return {n.node: n.hop for n in self.nodes}

    def to_dict(self) -> dict:
        return {
            "removed": self.removed,
            "nodes": [n.to_dict() for n in self.nodes],
            "edges": [e.to_dict() for e in self.edges],
        }


@dataclass(frozen=True)
class PerturbationReport:
    """Everything the diagnosis views need for one removal, keyed by
    (removed node, audit fingerprint)."""

    removed: str
    fingerprint: str
    k: int
    overview: PerturbationOverview
    records: list[RankingChangeRecord] = field(repr=False)
    topk: TopKProportions
    influence: InfluenceGraph = field(repr=False)

    @property
    def deltas(self) -> DeltaVector:
        return DeltaVector(self.removed, {r.node: r.delta for r in self.records})

    def to_dict(self) -> dict:
        return {
            "removed": self.removed,
            "fingerprint": self.fingerprint,
            "k": self.k,
            "overview": self.overview.to_dict(),
            "records": [r.to_dict() for r in self.records],
            "topk": self.topk.to_dict(),
            "influence": self.influence.to_dict(),
        }


def overview_stats(d: DeltaVector, g: DirectedGraph) -> PerturbationOverview:
    """The eight overview metrics of one delta vector."""
    increases = [x for x in d.deltas.values() if x > 0]
    decreases = [-x for x in d.deltas.values() if x < 0]
    return PerturbationOverview(
        influenced_count=len(increases) + len(decreases),
        increased_count=len(increases),
        decreased_count=len(decreases),
        max_increase=max(increases, default=0),
        max_decrease=max(decreases, default=0),
        median_increase=float(statistics.median(increases)) if increases else 0.0,
        median_decrease=float(statistics.median(decreases)) if decreases else 0.0,
        removed_degree=g.degree(d.removed)[2],
    )


def topk_proportions(
    before: Mapping[str, int],
    after: Mapping[str, int],
    labels: Mapping[str, str],
    k: int,
) -> TopKProportions:
    """Label composition of the k best-ranked nodes in each ranking.

    `before` and `after` must cover the same surviving node set; the label
    universe is every label occurring among the survivors, so both maps
    share keys and each sums to 1.
    """
    if set(before) != set(after):
        raise ValueError("before/after rankings cover different node sets")
    if not 1 <= k <= len(after):
        raise ValueError(f"k must be in [1, {len(after)}], got {k}")
    universe = sorted({labels[v] for v in after})

    def fractions(positions: Mapping[str, int]) -> dict[str, float]:
        top = sorted(positions, key=lambda v: positions[v])[:k]
        counts = {b: 0 for b in universe}
        for v in top:
            counts[labels[v]] += 1
        return {b: counts[b] / k for b in universe}

    return TopKProportions(k=k, before=fractions(before), after=fractions(after))


def build_influence_graph(
    g: DirectedGraph,
    removed: str,
    influenced: Iterable[str],
    deltas: Mapping[str, int] | None = None,
) -> InfluenceGraph:
    """BFS from the removed node through influenced successors.

    Only influenced, unvisited nodes are enqueued; each discovered node
    gets hop = parent hop + 1 and one traversal edge from its parent.
    Influenced nodes the traversal never reaches get hop None and attach
    to the removed node. Neighbor expansion is in node-id order, so the
    construction is deterministic.
    """
    if removed not in g:
        raise NodeNotFoundError(removed)
    influenced_set = set(influenced)
    if removed in influenced_set:
        raise ValueError("removed node cannot be in its own influenced set")
    unknown = influenced_set - set(g.nodes)
    if unknown:
        raise ValueError(f"influenced nodes not in graph: {sorted(unknown)[:5]}")
    deltas = deltas or {}

    hop: dict[str, int] = {removed: 0}
    order: list[str] = [removed]
    edges: list[InfluenceEdge] = []
    queue = deque([removed])
    while queue:
        v = queue.popleft()
        for w in g.successors(v):  # successors() is sorted
            if w in influenced_set and w not in hop:
                hop[w] = hop[v] + 1
                order.append(w)
                edges.append(InfluenceEdge(v, w, EdgeKind.TRAVERSAL))
                queue.append(w)

    nodes = [
        InfluenceNode(v, hop[v], int(deltas.get(v, 0)), g.label(v)) for v in order
    ]
    for v in sorted(influenced_set - set(hop)):
        nodes.append(InfluenceNode(v, None, int(deltas.get(v, 0)), g.label(v)))
        edges.append(InfluenceEdge(removed, v, EdgeKind.INF_ATTACH))
    return InfluenceGraph(removed, nodes, edges)


def filter_influence(
    ig: InfluenceGraph,
    hop_min: int = 1,
    hop_max: int | None = None,
    direction: InfluenceDirection | str = InfluenceDirection.ALL,
) -> InfluenceGraph:
    """Subgraph view of the influence graph.

    Retains the removed node, plus nodes whose hop lies in
    [hop_min, hop_max] (hop-inf nodes only when hop_max is None, meaning
    unbounded) and whose delta matches `direction`. Traversal edges
    survive only when both endpoints do.
    """
    direction = InfluenceDirection(direction)
    if hop_min < 1:
        raise ValueError(f"hop_min must be >= 1, got {hop_min}")
    if hop_max is not None and hop_max < hop_min:
        raise ValueError(f"empty hop range [{hop_min}, {hop_max}]")

    def keep(n: InfluenceNode) -> bool:
        if n.node == ig.removed:
            return True
        if n.hop is None:
            if hop_max is not None:
                return False
        elif not (hop_min <= n.hop and (hop_max is None or n.hop <= hop_max)):
            return False
        if direction is InfluenceDirection.INCREASED:
            return n.delta > 0
        if direction is InfluenceDirection.DECREASED:
            return n.delta < 0
        return True

    nodes = [n for n in ig.nodes if keep(n)]
    kept = {n.node for n in nodes}
    edges = [e for e in ig.edges if e.source in kept and e.target in kept]
    return InfluenceGraph(ig.removed, nodes, edges)


def build_report(
    g: DirectedGraph,
    d: DeltaVector,
    baseline: Mapping[str, int],
    k: int,
    fingerprint: str,
) -> PerturbationReport:
    """Assemble a full report from precomputed positions and deltas.

    `baseline` is the mode-aligned pre-removal ranking over the survivors;
    the perturbed ranking is reconstructed exactly as baseline - delta.
    Both the live path (diagnose) and the cache-backed service go through
    here, so their reports are identical.
    """
    perturbed = {v: baseline[v] - d.deltas[v] for v in baseline}
    survivors_labels = {v: g.label(v) for v in baseline}
    records = [
        RankingChangeRecord(v, baseline[v], perturbed[v], d.deltas[v], survivors_labels[v])
        for v in sorted(baseline, key=lambda v: baseline[v])
    ]
    return PerturbationReport(
        removed=d.removed,
        fingerprint=fingerprint,
        k=k,
        overview=overview_stats(d, g),
        records=records,
        topk=topk_proportions(baseline, perturbed, survivors_labels, k),
        influence=build_influence_graph(g, d.removed, d.influenced(), d.deltas),
    )


def diagnose(
    g: DirectedGraph,
    cfg: RankingConfig,
    mode: BaselineMode,
    removed: str,
    k: int,
) -> PerturbationReport:
    """Full what-if diagnosis of removing one node, computed live."""
    if removed not in g:
        raise NodeNotFoundError(removed)
    if not 1 <= k <= g.node_count - 1:
        raise ValueError(f"k must be in [1, {g.node_count - 1}], got {k}")
    positions, _ = rank_with_iterations(g, cfg)
    d = ranking_deltas(g, cfg, mode, removed, base_positions=positions)
    baseline = aligned_baseline(positions, removed, mode)
    return build_report(g, d, baseline, k, audit_fingerprint(g, cfg, mode))
