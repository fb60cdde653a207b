"""Graph ranking methods: PageRank and HITS power iteration, plus the
score-to-position conversion and a registry for plug-in methods.

PageRank iterates r = c*A*r + (1-c)*t on the column-stochastic
out-degree-normalized adjacency matrix; dangling mass is redistributed
uniformly over all nodes each step, which keeps the score vector
stochastic. HITS alternates authority/hub updates with an L2
normalization after each full sweep. Both stop when the L1 change of the
iterated vector(s) drops below the configured tolerance.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Callable, Mapping

import numpy as np
import scipy.sparse as sp

from .errors import (
    ConvergenceError,
    DegenerateGraphError,
    InvalidScoreError,
)
from .graph import DirectedGraph


class Method(str, Enum):
    PAGERANK = "pagerank"
    HITS = "hits"


class HitsScoreKind(str, Enum):
    AUTHORITY = "authority"
    HUB = "hub"


def method_key(method: object) -> str:
    """Registry key for a method given as enum member or plain string."""
    return method.value if isinstance(method, Enum) else str(method)


@dataclass(frozen=True)
class RankingConfig:
    """Parameters for the built-in ranking methods.

    `teleport` maps node id to restart probability; None means uniform 1/n.
    On perturbed graphs the vector is restricted to surviving nodes and
    renormalized, so one config serves a whole removal sweep.
    """

    method: str = Method.PAGERANK
    damping: float = 0.85
    tolerance: float = 1e-8
    max_iterations: int = 1000
    hits_score_kind: str = HitsScoreKind.AUTHORITY
    teleport: Mapping[str, float] | None = None

    def __post_init__(self):
        if not 0.0 < self.damping < 1.0:
            raise ValueError(f"damping must be in (0,1), got {self.damping}")
        if self.tolerance <= 0.0:
            raise ValueError(f"tolerance must be > 0, got {self.tolerance}")
        if self.max_iterations < 1:
            raise ValueError(f"max_iterations must be >= 1, got {self.max_iterations}")

    def validate_teleport(self, g: DirectedGraph) -> None:
        """Check the teleport vector is a distribution over g's nodes."""
        if self.teleport is None:
            return
        unknown = set(self.teleport) - set(g.nodes)
        if unknown:
            raise ValueError(f"teleport names unknown nodes: {sorted(unknown)[:5]}")
        vals = list(self.teleport.values())
        if any(x < 0 for x in vals):
            raise ValueError("teleport entries must be nonnegative")
        if abs(sum(vals) - 1.0) > 1e-12:
            raise ValueError(f"teleport must sum to 1 (got {sum(vals)!r})")


@dataclass(frozen=True)
class RankingScores:
    """Converged score vector and the iteration count that produced it."""

    scores: dict[str, float]
    iterations: int


def _teleport_vector(g: DirectedGraph, cfg: RankingConfig, order: tuple[str, ...]) -> np.ndarray:
    n = len(order)
    if cfg.teleport is None:
        return np.full(n, 1.0 / n)
    t = np.array([max(cfg.teleport.get(v, 0.0), 0.0) for v in order], dtype=float)
    total = t.sum()
    if total <= 0.0:
        raise ValueError("teleport vector has no mass on the surviving nodes")
    return t / total


def _out_matrix(g: DirectedGraph, order: tuple[str, ...]) -> tuple[sp.csr_matrix, np.ndarray]:
    """Column-stochastic transition matrix and the dangling-node mask."""
    n = len(order)
    idx = {v: i for i, v in enumerate(order)}
    rows, cols, data = [], [], []
    dangling = np.zeros(n, dtype=bool)
    for s in order:
        succs = g.successors(s)
        if not succs:
            dangling[idx[s]] = True
            continue
        w = 1.0 / len(succs)
        for t in succs:
            rows.append(idx[t])
            cols.append(idx[s])
            data.append(w)
    mat = sp.csr_matrix((data, (rows, cols)), shape=(n, n))
    return mat, dangling


def _pagerank_vector(g: DirectedGraph, cfg: RankingConfig):
    """Raw power iteration; returns (order, vector, iterations, residuals)."""
    order = g.nodes
    n = len(order)
    if n == 0:
        raise ValueError("pagerank requires a non-empty graph")
    mat, dangling = _out_matrix(g, order)
    t = _teleport_vector(g, cfg, order)
    c = cfg.damping
    r = t.copy()
    residuals: list[float] = []
    for it in range(1, cfg.max_iterations + 1):
        r_next = c * (mat @ r + r[dangling].sum() / n) + (1.0 - c) * t
        resid = float(np.abs(r_next - r).sum())
        residuals.append(resid)
        r = r_next
        if resid < cfg.tolerance:
            return order, r, it, residuals
    raise ConvergenceError("pagerank", residuals[-1], cfg.max_iterations)


def pagerank(g: DirectedGraph, cfg: RankingConfig | None = None) -> RankingScores:
    """PageRank scores; nonnegative and summing to 1."""
    cfg = cfg or RankingConfig()
    order, r, iterations, _ = _pagerank_vector(g, cfg)
    return RankingScores({v: float(x) for v, x in zip(order, r)}, iterations)


def hits(g: DirectedGraph, cfg: RankingConfig | None = None) -> tuple[RankingScores, RankingScores]:
    """(authority, hub) score vectors, each L2-normalized."""
    cfg = cfg or RankingConfig(method=Method.HITS)
    order = g.nodes
    n = len(order)
    if n == 0:
        raise ValueError("hits requires a non-empty graph")
    if g.edge_count == 0:
        raise DegenerateGraphError("hits is undefined on a graph with no edges")
    idx = {v: i for i, v in enumerate(order)}
    rows, cols = [], []
    for s in order:
        for t in g.successors(s):
            rows.append(idx[s])
            cols.append(idx[t])
    adj = sp.csr_matrix((np.ones(len(rows)), (rows, cols)), shape=(n, n))
    adj_t = adj.T.tocsr()

    auth = np.ones(n)
    hub = np.ones(n)
    for it in range(1, cfg.max_iterations + 1):
        auth_next = adj_t @ hub
        auth_next /= np.linalg.norm(auth_next)
        hub_next = adj @ auth_next
        hub_next /= np.linalg.norm(hub_next)
        resid = max(
            float(np.abs(auth_next - auth).sum()),
            float(np.abs(hub_next - hub).sum()),
        )
        auth, hub = auth_next, hub_next
        if resid < cfg.tolerance:
            auth_scores = {v: float(x) for v, x in zip(order, auth)}
            hub_scores = {v: float(x) for v, x in zip(order, hub)}
            return RankingScores(auth_scores, it), RankingScores(hub_scores, it)
    raise ConvergenceError("hits", resid, cfg.max_iterations)


def scores_to_positions(scores: Mapping[str, float]) -> dict[str, int]:
    """Dense 1-based ranks: 1 = best score, exact ties broken by node id."""
    if not scores:
        raise ValueError("cannot rank an empty score vector")
    for v, x in scores.items():
        if x != x:  # NaN
            raise InvalidScoreError(f"score for node {v!r} is NaN")
    ordered = sorted(scores, key=lambda v: (-scores[v], v))
    return {v: pos for pos, v in enumerate(ordered, start=1)}


# Plug-in registry: any callable (graph, config) -> score mapping (or
# (score mapping, iterations)) can be ranked through the same pipeline.
_Scorer = Callable[[DirectedGraph, RankingConfig], object]
_METHODS: dict[str, _Scorer] = {}


def register_ranking_method(name: str, scorer: _Scorer) -> None:
    _METHODS[method_key(name)] = scorer


def ranking_methods() -> tuple[str, ...]:
    return tuple(sorted(_METHODS))


def _pagerank_scorer(g, cfg):
    res = pagerank(g, cfg)
    return res.scores, res.iterations


def _hits_scorer(g, cfg):
    authority, hub = hits(g, cfg)
    kind = HitsScoreKind(cfg.hits_score_kind)
    chosen = authority if kind is HitsScoreKind.AUTHORITY else hub
    return chosen.scores, chosen.iterations


register_ranking_method(Method.PAGERANK, _pagerank_scorer)
register_ranking_method(Method.HITS, _hits_scorer)


def method_scores(g: DirectedGraph, cfg: RankingConfig) -> RankingScores:
    """Dispatch to the configured method and normalize the return shape."""
    name = method_key(cfg.method)
    try:
        scorer = _METHODS[name]
    except KeyError:
        known = ", ".join(ranking_methods())
        raise ValueError(f"unknown ranking method {name!r} (known: {known})") from None
    out = scorer(g, cfg)
    if isinstance(out, tuple):
        scores, iterations = out
    else:
        scores, iterations = out, 0
    return RankingScores(dict(scores), int(iterations))


def rank(g: DirectedGraph, cfg: RankingConfig | None = None) -> dict[str, int]:
    """Ranking positions for the configured method; the single entry point
    the audit pipeline uses, so plug-in methods slot in here."""
    cfg = cfg or RankingConfig()
    return scores_to_positions(method_scores(g, cfg).scores)
