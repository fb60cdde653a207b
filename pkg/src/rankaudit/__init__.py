"""rankaudit: node-removal sensitivity auditing for graph ranking methods.

Pipeline: parse a labeled directed graph, rank it (PageRank, HITS, or a
registered plug-in), sweep every single-node removal to build the
sensitivity table, persist the audit as a deterministic cache, and serve
the interactive diagnosis API over it.
"""

from .constraints import ConstraintRule, RuleDirection, RuleSet, ThresholdKind, filter_table, violates
from .diagnosis import (
    EdgeKind,
    InfluenceDirection,
    InfluenceGraph,
    PerturbationOverview,
    PerturbationReport,
    RankingChangeRecord,
    TopKProportions,
    build_influence_graph,
    diagnose,
    filter_influence,
    overview_stats,
    topk_proportions,
)
from .errors import (
    AuditError,
    CacheError,
    CacheParseError,
    ConvergenceError,
    CorruptCacheError,
    DegenerateGraphError,
    EmptyGraphError,
    FingerprintMismatchError,
    GraphParseError,
    IncompleteCacheError,
    InvalidScoreError,
    NodeNotFoundError,
    UnsupportedVersionError,
)
from .graph import UNLABELED, DirectedGraph, GraphSummary, degree, load_graph, parse_graph, remove_node
from .ranking import (
    HitsScoreKind,
    Method,
    RankingConfig,
    RankingScores,
    hits,
    pagerank,
    rank,
    register_ranking_method,
    scores_to_positions,
)
from .sensitivity import (
    BaselineMode,
    DeltaVector,
    SensitivityRecord,
    SensitivityTable,
    aligned_baseline,
    audit_fingerprint,
    ranking_deltas,
    run_sweep,
    sensitivity_initial_check,
)
from .store import (
    AuditCache,
    build_cache,
    check_cache_matches,
    load_cache,
    read_cache,
    report_from_cache,
    save_cache,
    write_cache,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
