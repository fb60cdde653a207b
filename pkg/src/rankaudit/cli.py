"""Batch entry points: precompute the audit cache, emit reports, serve.

Exit codes are a stable scripting contract: 0 success, 1 data or
computation error, 2 usage error. Informational output goes to stderr;
machine output goes to stdout only when `--out -` is given.
"""

from __future__ import annotations

import argparse
import csv
import io
import os
import sys
import time

from .constraints import RuleSet  # noqa: F401  (re-exported for service config)
from .errors import AuditError, NodeNotFoundError
from .graph import load_graph
from .ranking import HitsScoreKind, Method, RankingConfig
from .sensitivity import BaselineMode
from .store import (
    build_cache,
    check_cache_matches,
    load_cache,
    report_from_cache,
    save_cache,
    write_cache,
)

PORT_ENV_VAR = "RANKAUDIT_PORT"


def _info(msg: str) -> None:
    print(msg, file=sys.stderr)


def _add_graph_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--graph", required=True, help="edge list file (source<sep>target)")
    p.add_argument("--labels", help="label file (node<sep>label); optional")
    p.add_argument("--header", action="store_true",
                   help="skip the first row of each input file")


def _add_ranking_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--method", choices=[m.value for m in Method], default="pagerank")
    p.add_argument("--damping", type=float, default=0.85)
    p.add_argument("--tolerance", type=float, default=1e-8)
    p.add_argument("--max-iterations", type=int, default=1000)
    p.add_argument("--hits-score-kind", choices=[k.value for k in HitsScoreKind],
                   default="authority")
    p.add_argument("--mode", choices=[m.value for m in BaselineMode], default="compact",
                   help="baseline alignment for rank deltas")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rankaudit",
        description="Audit the node-removal sensitivity of graph ranking methods.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_pre = sub.add_parser("precompute", help="run the full sensitivity sweep")
    _add_graph_args(p_pre)
    _add_ranking_args(p_pre)
    p_pre.add_argument("--threads", type=int, default=1, help="worker processes")
    p_pre.add_argument("--out", required=True,
                       help="cache output path (.json or .json.gz), or - for stdout")
    p_pre.set_defaults(func=cmd_precompute)

    p_rep = sub.add_parser("report", help="emit the diagnosis for one removal")
    p_rep.add_argument("--cache", required=True, help="cache file from precompute")
    _add_graph_args(p_rep)
    p_rep.add_argument("--node", required=True, help="node to remove")
    p_rep.add_argument("--format", choices=["json", "csv"], default="json")
    p_rep.add_argument("--k", type=int, default=None,
                       help="top-k window for proportions (default min(100, n-1))")
    p_rep.add_argument("--out", default="-", help="output path, - for stdout")
    p_rep.set_defaults(func=cmd_report)

    p_srv = sub.add_parser("serve", help="serve the audit API over a cache")
    p_srv.add_argument("--cache", required=True)
    _add_graph_args(p_srv)
    p_srv.add_argument("--port", type=int,
                       default=int(os.environ.get(PORT_ENV_VAR, "8000")))
    p_srv.add_argument("--host", default="127.0.0.1")
    p_srv.add_argument("--static", help="directory with the built UI bundle")
    p_srv.set_defaults(func=cmd_serve)
    return parser


def _config_from_args(args) -> RankingConfig:
    return RankingConfig(
        method=args.method,
        damping=args.damping,
        tolerance=args.tolerance,
        max_iterations=args.max_iterations,
        hits_score_kind=args.hits_score_kind,
    )


def _load_inputs(args):
    graph, report = load_graph(args.graph, args.labels, header=args.header)
    dropped = report.self_loops_dropped + report.duplicate_edges_dropped
    if dropped:
        _info(
            f"dropped {report.self_loops_dropped} self-loops and "
            f"{report.duplicate_edges_dropped} duplicate edges at ingestion"
        )
    return graph


def cmd_precompute(args) -> int:
    if args.threads < 1:
        raise UsageError("--threads must be >= 1")
    graph = _load_inputs(args)
    cfg = _config_from_args(args)
    mode = BaselineMode(args.mode)
    started = time.perf_counter()
    cache, result = build_cache(graph, cfg, mode, workers=args.threads)
    wall = time.perf_counter() - started
    if args.out == "-":
        write_cache(cache, sys.stdout.buffer)
        sys.stdout.buffer.flush()
    else:
        save_cache(cache, args.out)
    s = result.stats
    _info(
        f"precomputed {s.node_count} nodes / {s.edge_count} edges in {wall:.2f}s "
        f"({args.threads} worker{'s' if args.threads != 1 else ''})"
    )
    _info(
        f"iterations: original {s.original_iterations}, perturbed "
        f"min {s.perturbed_iterations_min} / max {s.perturbed_iterations_max} "
        f"/ total {s.perturbed_iterations_total}"
    )
    if args.out != "-":
        _info(f"cache written to {args.out}")
    return 0


def _report_csv(report) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["node", "previous_rank", "perturbed_rank", "delta", "label"])
    for rec in report.records:
        writer.writerow([rec.node, rec.previous_rank, rec.perturbed_rank,
                         rec.delta, rec.label])
    return buf.getvalue()


def cmd_report(args) -> int:
    cache = load_cache(args.cache)
    graph = _load_inputs(args)
    check_cache_matches(cache, graph)
    n = len(cache.positions)
    k = args.k if args.k is not None else min(100, n - 1)
    report = report_from_cache(cache, graph, args.node, k)
    if args.format == "csv":
        payload = _report_csv(report)
    else:
        from .canonical import canonical_json

        payload = canonical_json(report.to_dict()) + "\n"
    if args.out == "-":
        sys.stdout.write(payload)
    else:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(payload)
        _info(f"report written to {args.out}")
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    cache = load_cache(args.cache)
    graph = _load_inputs(args)
    app = create_app(cache, graph, static_dir=args.static)
    _info(f"serving audit API on http://{args.host}:{args.port}")
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


class UsageError(Exception):
    pass


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as err:
        parser.error(str(err))  # exits 2
        return 2
    except NodeNotFoundError as err:
        _info(f"error: {err}")
        return 1
    except (AuditError, OSError, ValueError) as err:
        _info(f"error: {err}")
        return 1


if __name__ == "__main__":
    sys.exit(main())
