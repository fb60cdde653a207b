#!/usr/bin/env python3
"""Sweep-scaling experiment: time the full sensitivity precompute on a
seeded random graph across worker counts.

Usage: python scripts/benchmark_sweep.py [--nodes 500] [--edges 7000]
       [--workers 1,2,4] [--seed 424242]
"""

import argparse
import random
import sys
import time

from rankaudit import BaselineMode, DirectedGraph, RankingConfig
from rankaudit.sensitivity import run_sweep


def build_graph(n_nodes: int, n_edges: int, seed: int) -> DirectedGraph:
    rng = random.Random(seed)
    nodes = [f"v{i:04d}" for i in range(n_nodes)]
    edges = set()
    while len(edges) < n_edges:
        s, t = rng.sample(nodes, 2)
        edges.add((s, t))
    labels = {v: rng.choice(["red", "blue", "green"]) for v in nodes}
    return DirectedGraph(edges, labels)


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--nodes", type=int, default=500)
    parser.add_argument("--edges", type=int, default=7000)
    parser.add_argument("--workers", default="1,2,4")
    parser.add_argument("--seed", type=int, default=424242)
    args = parser.parse_args()

    g = build_graph(args.nodes, args.edges, args.seed)
    cfg = RankingConfig(tolerance=1e-8)
    print(f"graph: {g.node_count} nodes, {g.edge_count} edges", file=sys.stderr)

    baseline = None
    reference = None
    for workers in [int(w) for w in args.workers.split(",")]:
        started = time.perf_counter()
        result = run_sweep(g, cfg, BaselineMode.COMPACT, workers=workers)
        elapsed = time.perf_counter() - started
        if reference is None:
            reference = result
            baseline = elapsed
        else:
            assert result.table == reference.table, "worker counts disagree!"
        speedup = baseline / elapsed
        print(f"workers={workers:<2d} wall={elapsed:7.2f}s speedup={speedup:5.2f}x "
              f"(perturbed iters total {result.stats.perturbed_iterations_total})")
    return 0


if __name__ == "__main__":
    sys.exit(main())
