import json
import os
import socket
import subprocess
import sys
import time

import httpx
import pytest

from rankaudit import BaselineMode, RankingConfig, build_cache, diagnose, load_cache, save_cache
from rankaudit.cli import main

from conftest import TOY_EDGE_TEXT, TOY_LABEL_TEXT

GOLDEN = os.path.join(os.path.dirname(__file__), "data", "golden_cache.json")


@pytest.fixture
def toy_files(tmp_path):
    edges = tmp_path / "edges.csv"
    labels = tmp_path / "labels.csv"
    edges.write_text(TOY_EDGE_TEXT)
    labels.write_text(TOY_LABEL_TEXT)
    return str(edges), str(labels)


def run_cli(*argv) -> int:
    return main(list(argv))


class TestPrecompute:
    def test_writes_cache_and_summary(self, toy_files, tmp_path, capsys):
        edges, labels = toy_files
        out = str(tmp_path / "cache.json")
        code = run_cli("precompute", "--graph", edges, "--labels", labels,
                       "--method", "pagerank", "--out", out)
        assert code == 0
        err = capsys.readouterr().err
        assert "6 nodes / 6 edges" in err
        assert "iterations" in err
        assert os.path.exists(out)

    def test_matches_golden_fixture(self, toy_files, tmp_path):
        edges, labels = toy_files
        out = str(tmp_path / "cache.json")
        assert run_cli("precompute", "--graph", edges, "--labels", labels,
                       "--out", out) == 0
        with open(out, "rb") as fh, open(GOLDEN, "rb") as golden:
            assert fh.read() == golden.read()

    def test_thread_count_does_not_change_bytes(self, toy_files, tmp_path):
        edges, labels = toy_files
        one = str(tmp_path / "one.json")
        eight = str(tmp_path / "eight.json")
        assert run_cli("precompute", "--graph", edges, "--labels", labels,
                       "--threads", "1", "--out", one) == 0
        assert run_cli("precompute", "--graph", edges, "--labels", labels,
                       "--threads", "8", "--out", eight) == 0
        with open(one, "rb") as a, open(eight, "rb") as b:
            assert a.read() == b.read()

    def test_stdout_mode_emits_pure_json(self, toy_files, capsys):
        edges, labels = toy_files
        assert run_cli("precompute", "--graph", edges, "--labels", labels,
                       "--out", "-") == 0
        captured = capsys.readouterr()
        doc = json.loads(captured.out)
        assert doc["version"] == 1
        assert "nodes" in captured.err

    def test_gzip_output(self, toy_files, tmp_path):
        edges, labels = toy_files
        out = str(tmp_path / "cache.json.gz")
        assert run_cli("precompute", "--graph", edges, "--labels", labels,
                       "--out", out) == 0
        cache = load_cache(out)
        assert len(cache.positions) == 6

    def test_unreadable_input_exit_1(self, tmp_path, capsys):
        code = run_cli("precompute", "--graph", str(tmp_path / "missing.csv"),
                       "--out", str(tmp_path / "c.json"))
        assert code == 1
        assert "error:" in capsys.readouterr().err

    def test_bad_arguments_exit_2(self, toy_files):
        with pytest.raises(SystemExit) as exc:
            run_cli("precompute", "--graph")
        assert exc.value.code == 2
        edges, labels = toy_files
        with pytest.raises(SystemExit) as exc:
            run_cli("precompute", "--graph", edges, "--labels", labels,
                    "--threads", "0", "--out", "-")
        assert exc.value.code == 2


@pytest.fixture
def cached(toy_files, tmp_path):
    edges, labels = toy_files
    out = str(tmp_path / "cache.json")
    assert run_cli("precompute", "--graph", edges, "--labels", labels,
                   "--out", out) == 0
    return edges, labels, out


class TestReport:
    def test_csv_matches_diagnose(self, cached, capsys, toy_graph):
        edges, labels, cache_path = cached
        code = run_cli("report", "--cache", cache_path, "--graph", edges,
                       "--labels", labels, "--node", "4", "--format", "csv", "--k", "3")
        assert code == 0
        out = capsys.readouterr().out
        lines = out.strip().splitlines()
        assert lines[0] == "node,previous_rank,perturbed_rank,delta,label"
        report = diagnose(toy_graph, RankingConfig(), BaselineMode.COMPACT, "4", 3)
        want = [f"{r.node},{r.previous_rank},{r.perturbed_rank},{r.delta},{r.label}"
                for r in report.records]
        assert lines[1:] == want

    def test_json_roundtrips_to_equal_report(self, cached, capsys, toy_graph):
        edges, labels, cache_path = cached
        code = run_cli("report", "--cache", cache_path, "--graph", edges,
                       "--labels", labels, "--node", "4", "--format", "json", "--k", "3")
        assert code == 0
        doc = json.loads(capsys.readouterr().out)
        live = diagnose(toy_graph, RankingConfig(), BaselineMode.COMPACT, "4", 3)
        assert doc == live.to_dict()

    def test_unknown_node_exit_1_with_suggestion(self, cached, capsys):
        edges, labels, cache_path = cached
        code = run_cli("report", "--cache", cache_path, "--graph", edges,
                       "--labels", labels, "--node", "44")
        assert code == 1
        err = capsys.readouterr().err
        assert "did you mean" in err

    def test_output_file(self, cached, tmp_path, toy_graph):
        edges, labels, cache_path = cached
        out = str(tmp_path / "report.json")
        assert run_cli("report", "--cache", cache_path, "--graph", edges,
                       "--labels", labels, "--node", "4", "--out", out) == 0
        with open(out) as fh:
            doc = json.load(fh)
        assert doc["removed"] == "4"


class TestServe:
    def test_stale_cache_refused(self, cached, tmp_path, capsys):
        edges, labels, cache_path = cached
        edited = tmp_path / "edited.csv"
        edited.write_text(TOY_EDGE_TEXT + "\n6,1")
        code = run_cli("serve", "--cache", cache_path, "--graph", str(edited),
                       "--labels", labels, "--port", "0")
        assert code == 1
        assert "fingerprint" in capsys.readouterr().err

    def test_serve_subprocess_health(self, cached):
        edges, labels, cache_path = cached
        with socket.socket() as s:
            s.bind(("127.0.0.1", 0))
            port = s.getsockname()[1]
        proc = subprocess.Popen(
            [sys.executable, "-m", "rankaudit.cli", "serve", "--cache", cache_path,
             "--graph", edges, "--labels", labels, "--port", str(port)],
            stdout=subprocess.PIPE, stderr=subprocess.PIPE,
        )
        try:
            deadline = time.time() + 15
            last_err = None
            while time.time() < deadline:
                try:
                    resp = httpx.get(f"http://127.0.0.1:{port}/api/health", timeout=1.0)
                    assert resp.status_code == 200
                    assert resp.text == "ok"
                    summary = httpx.get(f"http://127.0.0.1:{port}/api/summary", timeout=1.0)
                    assert summary.json()["nodeCount"] == 6
                    break
                except (httpx.TransportError, AssertionError) as err:
                    last_err = err
                    if proc.poll() is not None:
                        raise AssertionError(
                            f"server exited early: {proc.stderr.read().decode()}"
                        )
                    time.sleep(0.2)
            else:
                raise AssertionError(f"server never came up: {last_err}")
        finally:
            proc.terminate()
            proc.wait(timeout=10)


def test_env_var_default_port(monkeypatch):
    monkeypatch.setenv("RANKAUDIT_PORT", "7777")
    from rankaudit.cli import build_parser

    args = build_parser().parse_args(["serve", "--cache", "x", "--graph", "y"])
    assert args.port == 7777
