import pytest

from rankaudit import BaselineMode, DirectedGraph, RankingConfig


def pytest_terminal_summary(terminalreporter):
    """One visible pass/fail line per acceptance criterion."""
    lines = []
    for status, bucket in (("PASS", "passed"), ("FAIL", "failed")):
        for report in terminalreporter.stats.get(bucket, []):
            nodeid = getattr(report, "nodeid", "")
            if "test_acceptance" in nodeid and getattr(report, "when", "call") == "call":
                lines.append((nodeid.split("::")[-1], status))
    if not lines:
        return
    terminalreporter.write_line("")
    terminalreporter.write_line("acceptance criteria:")
    for name, status in sorted(lines):
        terminalreporter.write_line(f"  [{status}] {name}")

TOY_EDGE_TEXT = "1,2\n2,3\n3,1\n4,1\n5,4\n2,5"
TOY_LABEL_TEXT = "1,A\n2,A\n3,B\n4,B\n5,C\n6,C"


@pytest.fixture
def toy_graph() -> DirectedGraph:
    """Six labeled nodes (one isolated), six edges; the fixture every
    cross-module oracle comparison uses."""
    edges = {("1", "2"), ("2", "3"), ("3", "1"), ("4", "1"), ("5", "4"), ("2", "5")}
    labels = {"1": "A", "2": "A", "3": "B", "4": "B", "5": "C", "6": "C"}
    return DirectedGraph(edges, labels)


@pytest.fixture
def pagerank_cfg() -> RankingConfig:
    return RankingConfig(method="pagerank", damping=0.85, tolerance=1e-10)


@pytest.fixture
def compact() -> BaselineMode:
    return BaselineMode.COMPACT


def cycle3() -> DirectedGraph:
    return DirectedGraph(
        {("a", "b"), ("b", "c"), ("c", "a")}, {"a": "X", "b": "X", "c": "Y"}
    )


def chain3() -> DirectedGraph:
    return DirectedGraph(
        {("a", "b"), ("b", "c")}, {"a": "X", "b": "X", "c": "Y"}
    )
