"""Immutable labeled directed graph plus edge-list/label-file ingestion.

The graph is the audited object: simple directed edges (no self-loops, no
duplicates), exactly one label per node, and out/in adjacency precomputed
for ranking and BFS. All perturbations are value-semantic: remove_node
returns a new graph and never touches the original.
"""

from __future__ import annotations

from dataclasses import dataclass

from .canonical import canonical_bytes, sha256_hex
from .errors import EmptyGraphError, GraphParseError, NodeNotFoundError

UNLABELED = "UNLABELED"


@dataclass(frozen=True)
class ParseReport:
    """Ingestion bookkeeping: what was kept and what was dropped."""

    self_loops_dropped: int = 0
    duplicate_edges_dropped: int = 0


@dataclass(frozen=True)
class GraphSummary:
    node_count: int
    edge_count: int
    label_counts: dict[str, int]

    def to_dict(self) -> dict:
        return {
            "nodeCount": self.node_count,
            "edgeCount": self.edge_count,
            "labelCounts": {b: self.label_counts[b] for b in sorted(self.label_counts)},
        }


class DirectedGraph:
    """Simple directed graph with per-node labels.

    Immutable after construction; adjacency tuples are sorted by node id so
    every traversal in the package is deterministic. Safe for unrestricted
    concurrent reads and for pickling into worker processes.
    """

    __slots__ = ("_nodes", "_labels", "_out", "_in", "_edge_count")

    def __init__(self, edges: set[tuple[str, str]], labels: dict[str, str]):
        nodes = set(labels)
        for s, t in edges:
            if s == t:
                raise ValueError(f"self-loop {s!r} not allowed")
            if s not in nodes or t not in nodes:
                raise ValueError(f"edge ({s!r}, {t!r}) references an unlabeled node")
        out: dict[str, list[str]] = {v: [] for v in nodes}
        in_: dict[str, list[str]] = {v: [] for v in nodes}
        for s, t in edges:
            out[s].append(t)
            in_[t].append(s)
        object.__setattr__(self, "_nodes", tuple(sorted(nodes)))
        object.__setattr__(self, "_labels", dict(labels))
        object.__setattr__(self, "_out", {v: tuple(sorted(out[v])) for v in nodes})
        object.__setattr__(self, "_in", {v: tuple(sorted(in_[v])) for v in nodes})
        object.__setattr__(self, "_edge_count", len(edges))

    def __setattr__(self, name, value):  # pragma: no cover - guard only
        raise AttributeError("DirectedGraph is immutable")

    # pickling support for worker processes (__slots__ + immutability)
    def __getstate__(self):
        return {"edges": set(self.edges()), "labels": self._labels}

    def __setstate__(self, state):
        self.__init__(state["edges"], state["labels"])

    @property
    def nodes(self) -> tuple[str, ...]:
        """All node ids, sorted ascending."""
        return self._nodes

    @property
    def node_count(self) -> int:
        return len(self._nodes)

    @property
    def edge_count(self) -> int:
        return self._edge_count

    @property
    def labels(self) -> dict[str, str]:
        return dict(self._labels)

    def label(self, v: str) -> str:
        self._require(v)
        return self._labels[v]

    def label_universe(self) -> tuple[str, ...]:
        """Distinct labels in use, sorted."""
        return tuple(sorted(set(self._labels.values())))

    def __contains__(self, v: str) -> bool:
        return v in self._out

    def __eq__(self, other) -> bool:
        if not isinstance(other, DirectedGraph):
            return NotImplemented
        return self._labels == other._labels and self._out == other._out

    def __hash__(self):
        return hash((self._nodes, tuple(sorted(self.edges()))))

    def __repr__(self):
        return f"DirectedGraph(nodes={self.node_count}, edges={self.edge_count})"

    def successors(self, v: str) -> tuple[str, ...]:
        self._require(v)
        return self._out[v]

    def predecessors(self, v: str) -> tuple[str, ...]:
        self._require(v)
        return self._in[v]

    def edges(self):
        """Iterate (source, target) pairs in sorted order."""
        for s in self._nodes:
            for t in self._out[s]:
                yield (s, t)

    def degree(self, v: str) -> tuple[int, int, int]:
        """(in_degree, out_degree, total) of v."""
        self._require(v)
        i, o = len(self._in[v]), len(self._out[v])
        return (i, o, i + o)

    def remove_node(self, v: str) -> "DirectedGraph":
        """New graph without v and without every edge incident to v.

        Builds the result from the already-sorted adjacency (filtering
        keeps tuples sorted), skipping the constructor's re-sort; this is
        the hot path of the removal sweep.
        """
        self._require(v)
        out = {}
        in_ = {}
        edge_count = 0
        for u in self._nodes:
            if u == v:
                continue
            succs = self._out[u]
            out[u] = tuple(t for t in succs if t != v) if v in succs else succs
            preds = self._in[u]
            in_[u] = tuple(s for s in preds if s != v) if v in preds else preds
            edge_count += len(out[u])
        g = object.__new__(DirectedGraph)
        object.__setattr__(g, "_nodes", tuple(u for u in self._nodes if u != v))
        object.__setattr__(g, "_labels", {u: b for u, b in self._labels.items() if u != v})
        object.__setattr__(g, "_out", out)
        object.__setattr__(g, "_in", in_)
        object.__setattr__(g, "_edge_count", edge_count)
        return g

    def summary(self) -> GraphSummary:
        counts: dict[str, int] = {}
        for b in self._labels.values():
            counts[b] = counts.get(b, 0) + 1
        return GraphSummary(self.node_count, self.edge_count, counts)

    def canonical_text(self) -> str:
        """Deterministic serialization used for fingerprinting."""
        lines = [f"n\t{v}\t{self._labels[v]}" for v in self._nodes]
        lines += [f"e\t{s}\t{t}" for s, t in self.edges()]
        return "\n".join(lines) + "\n"

    def to_edge_text(self) -> str:
        """Edge rows in the ingestion format (one `source,target` per line)."""
        return "\n".join(f"{s},{t}" for s, t in self.edges())

    def to_label_text(self) -> str:
        """Label rows in the ingestion format (one `node,label` per line)."""
        return "\n".join(f"{v},{self._labels[v]}" for v in self._nodes)

    def fingerprint(self) -> str:
        return sha256_hex(canonical_bytes(self.canonical_text()))

    def _require(self, v: str) -> None:
        if v not in self._out:
            raise NodeNotFoundError(v)


def remove_node(g: DirectedGraph, v: str) -> DirectedGraph:
    return g.remove_node(v)


def degree(g: DirectedGraph, v: str) -> tuple[int, int, int]:
    return g.degree(v)


def _split_row(row: str, line_no: int, what: str) -> tuple[str, str]:
    # separator auto-detect per row: tab wins if present, else comma
    sep = "\t" if "\t" in row else ","
    parts = [p.strip() for p in row.split(sep)]
    if len(parts) != 2 or not parts[0] or not parts[1]:
        raise GraphParseError(f"expected two {what} columns, got {row!r}", line_no)
    return parts[0], parts[1]


def parse_graph(
    edge_text: str,
    label_text: str = "",
    header: bool = False,
) -> tuple[DirectedGraph, ParseReport]:
    """Build a graph from delimited edge and label text.

    Rows are `source<sep>target` and `node<sep>label` with `,` or tab as
    separator. Self-loops and duplicate edges are dropped and counted in the
    ParseReport. Nodes that appear in the edge list but not in the label
    file get the reserved UNLABELED label; label-only nodes become isolated
    nodes. `header` skips the first non-empty row of each file.
    """
    edges: set[tuple[str, str]] = set()
    labels: dict[str, str] = {}
    self_loops = 0
    duplicates = 0

    def rows(text: str):
        skipped_header = not header
        for i, raw in enumerate(text.splitlines(), start=1):
            row = raw.strip()
            if not row:
                continue
            if not skipped_header:
                skipped_header = True
                continue
            yield i, row

    for i, row in rows(label_text):
        node, label = _split_row(row, i, "label")
        labels[node] = label

    for i, row in rows(edge_text):
        s, t = _split_row(row, i, "edge")
        if s == t:
            self_loops += 1
            continue
        if (s, t) in edges:
            duplicates += 1
            continue
        edges.add((s, t))
        labels.setdefault(s, UNLABELED)
        labels.setdefault(t, UNLABELED)

    if not labels:
        raise EmptyGraphError("no nodes found in input")
    graph = DirectedGraph(edges, labels)
    return graph, ParseReport(self_loops, duplicates)


def load_graph(edge_path: str, label_path: str | None, header: bool = False):
    """parse_graph over files; UTF-8 text."""
    with open(edge_path, encoding="utf-8") as fh:
        edge_text = fh.read()
    label_text = ""
    if label_path is not None:
        with open(label_path, encoding="utf-8") as fh:
            label_text = fh.read()
    return parse_graph(edge_text, label_text, header=header)
