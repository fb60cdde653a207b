import pytest

from rankaudit import (
    BaselineMode,
    DeltaVector,
    DirectedGraph,
    EdgeKind,
    InfluenceDirection,
    RankingConfig,
    build_influence_graph,
    diagnose,
    filter_influence,
    overview_stats,
    ranking_deltas,
    topk_proportions,
)

from oracles import bfs_hops, random_graph


def make_graph(edges, labels=None):
    nodes = {v for e in edges for v in e}
    labels = labels or {v: "X" for v in nodes}
    return DirectedGraph(set(edges), labels)


class TestOverviewStats:
    def test_mixed_deltas(self):
        g = make_graph([("r", "b"), ("r", "c"), ("c", "d"), ("d", "e")])
        d = DeltaVector("r", {"b": 3, "c": -1, "d": -2, "e": 0})
        ov = overview_stats(d, g)
        assert ov.influenced_count == 3
        assert ov.increased_count == 1
        assert ov.decreased_count == 2
        assert ov.max_increase == 3
        assert ov.max_decrease == 2
        assert ov.median_increase == 3.0
        assert ov.median_decrease == 1.5
        assert ov.removed_degree == g.degree("r")[2]

    def test_all_zero(self):
        g = make_graph([("r", "b")])
        ov = overview_stats(DeltaVector("r", {"b": 0}), g)
        assert (ov.influenced_count, ov.increased_count, ov.decreased_count) == (0, 0, 0)
        assert (ov.max_increase, ov.max_decrease) == (0, 0)
        assert (ov.median_increase, ov.median_decrease) == (0.0, 0.0)
        assert ov.removed_degree == 1

    def test_counting_identity(self, toy_graph, pagerank_cfg):
        for v in toy_graph.nodes:
            d = ranking_deltas(toy_graph, pagerank_cfg, BaselineMode.COMPACT, v)
            ov = overview_stats(d, toy_graph)
            zeros = sum(1 for x in d.deltas.values() if x == 0)
            assert ov.increased_count + ov.decreased_count + zeros == toy_graph.node_count - 1


class TestTopkProportions:
    def test_simple_before(self):
        before = {"a": 1, "b": 2, "c": 3, "d": 4}
        after = {"a": 2, "b": 1, "c": 3, "d": 4}
        labels = {"a": "X", "b": "Y", "c": "X", "d": "Y"}
        props = topk_proportions(before, after, labels, k=2)
        assert props.before == {"X": 0.5, "Y": 0.5}
        assert props.after == {"X": 0.5, "Y": 0.5}

    def test_whole_population_equals_label_distribution(self):
        before = {"a": 1, "b": 2, "c": 3, "d": 4}
        after = {"d": 1, "c": 2, "b": 3, "a": 4}
        labels = {"a": "X", "b": "X", "c": "X", "d": "Y"}
        props = topk_proportions(before, after, labels, k=4)
        assert props.before == props.after == {"X": 0.75, "Y": 0.25}

    def test_fractions_sum_to_one(self):
        before = {f"v{i}": i + 1 for i in range(7)}
        after = {f"v{i}": 7 - i for i in range(7)}
        labels = {f"v{i}": "ABC"[i % 3] for i in range(7)}
        for k in range(1, 8):
            props = topk_proportions(before, after, labels, k)
            assert abs(sum(props.before.values()) - 1.0) <= 1e-12
            assert abs(sum(props.after.values()) - 1.0) <= 1e-12

    def test_gap_baseline_selects_best_k(self):
        # baseline with a vacated position: top-2 means the 2 best values
        before = {"a": 1, "c": 3, "d": 4}
        after = {"a": 1, "c": 2, "d": 3}
        labels = {"a": "X", "c": "Y", "d": "Y"}
        props = topk_proportions(before, after, labels, k=2)
        assert props.before == {"X": 0.5, "Y": 0.5}

    def test_k_bounds(self):
        before = after = {"a": 1, "b": 2}
        labels = {"a": "X", "b": "X"}
        with pytest.raises(ValueError):
            topk_proportions(before, after, labels, k=0)
        with pytest.raises(ValueError):
            topk_proportions(before, after, labels, k=3)

    def test_mismatched_domains(self):
        with pytest.raises(ValueError):
            topk_proportions({"a": 1}, {"b": 1}, {"a": "X", "b": "X"}, k=1)


class TestInfluenceGraph:
    def test_spec_trace(self):
        # r->x, x->y, y->x; z influenced but unreachable from r
        g = make_graph([("r", "x"), ("x", "y"), ("y", "x"), ("z", "r")])
        ig = build_influence_graph(g, "r", {"x", "y", "z"})
        assert ig.hops() == {"r": 0, "x": 1, "y": 2, "z": None}
        kinds = {(e.source, e.target): e.kind for e in ig.edges}
        assert kinds == {
            ("r", "x"): EdgeKind.TRAVERSAL,
            ("x", "y"): EdgeKind.TRAVERSAL,
            ("r", "z"): EdgeKind.INF_ATTACH,
        }

    def test_empty_influenced(self):
        g = make_graph([("r", "x")])
        ig = build_influence_graph(g, "r", set())
        assert [n.node for n in ig.nodes] == ["r"]
        assert ig.nodes[0].hop == 0
        assert ig.edges == []

    def test_toy_graph_hops_match_oracle(self, toy_graph, pagerank_cfg):
        for mode in BaselineMode:
            d = ranking_deltas(toy_graph, pagerank_cfg, mode, "4")
            influenced = set(d.influenced())
            ig = build_influence_graph(toy_graph, "4", influenced, d.deltas)
            oracle = bfs_hops(set(toy_graph.edges()), "4", influenced)
            hops = ig.hops()
            hops.pop("4")
            assert hops == oracle

    def test_random_pairs_match_oracle(self, pagerank_cfg):
        for seed in range(8):
            g = random_graph(seed, max_nodes=16)
            v = g.nodes[seed % g.node_count]
            d = ranking_deltas(g, pagerank_cfg, BaselineMode.COMPACT, v)
            influenced = set(d.influenced())
            ig = build_influence_graph(g, v, influenced, d.deltas)
            hops = ig.hops()
            hops.pop(v)
            assert hops == bfs_hops(set(g.edges()), v, influenced)

    def test_traversal_edges_advance_hops(self, toy_graph, pagerank_cfg):
        d = ranking_deltas(toy_graph, pagerank_cfg, BaselineMode.GAP, "1")
        ig = build_influence_graph(toy_graph, "1", set(d.influenced()), d.deltas)
        hops = ig.hops()
        for e in ig.edges:
            if e.kind is EdgeKind.TRAVERSAL:
                assert hops[e.target] == hops[e.source] + 1

    def test_influenced_totality(self, toy_graph, pagerank_cfg):
        d = ranking_deltas(toy_graph, pagerank_cfg, BaselineMode.GAP, "1")
        influenced = set(d.influenced())
        ig = build_influence_graph(toy_graph, "1", influenced, d.deltas)
        assert len(ig.nodes) - 1 == len(influenced)
        assert len({n.node for n in ig.nodes}) == len(ig.nodes)

    def test_rejects_bad_influenced_set(self, toy_graph):
        with pytest.raises(ValueError):
            build_influence_graph(toy_graph, "4", {"4"})
        with pytest.raises(ValueError):
            build_influence_graph(toy_graph, "4", {"ghost"})


class TestFilterInfluence:
    @pytest.fixture
    def ig(self, toy_graph, pagerank_cfg):
        d = ranking_deltas(toy_graph, pagerank_cfg, BaselineMode.GAP, "1")
        return build_influence_graph(toy_graph, "1", set(d.influenced()), d.deltas)

    def test_identity_filter(self, ig):
        assert filter_influence(ig, 1, None, InfluenceDirection.ALL) == ig

    def test_hop1_only(self, ig):
        out = filter_influence(ig, 1, 1, InfluenceDirection.ALL)
        hops = out.hops()
        assert set(hops.values()) <= {0, 1}
        direct = {n.node for n in ig.nodes if n.hop == 1}
        assert {n.node for n in out.nodes if n.node != "1"} == direct

    def test_direction_filter_matches_predicate_scan(self, ig):
        out = filter_influence(ig, 2, None, InfluenceDirection.DECREASED)
        expected = {
            n.node
            for n in ig.nodes
            if n.node != ig.removed
            and n.delta < 0
            and (n.hop is None or n.hop >= 2)
        }
        assert {n.node for n in out.nodes} - {ig.removed} == expected

    def test_inf_nodes_dropped_with_finite_hop_max(self, ig):
        out = filter_influence(ig, 1, 99, InfluenceDirection.ALL)
        assert all(n.hop is not None for n in out.nodes)

    def test_traversal_edges_need_both_endpoints(self, ig):
        out = filter_influence(ig, 2, 2, InfluenceDirection.ALL)
        kept = {n.node for n in out.nodes}
        for e in out.edges:
            assert e.source in kept and e.target in kept

    def test_bad_ranges(self, ig):
        with pytest.raises(ValueError):
            filter_influence(ig, 0, None, InfluenceDirection.ALL)
        with pytest.raises(ValueError):
            filter_influence(ig, 3, 2, InfluenceDirection.ALL)


class TestDiagnose:
    def test_report_composition(self, toy_graph, pagerank_cfg):
        report = diagnose(toy_graph, pagerank_cfg, BaselineMode.COMPACT, "4", k=3)
        assert report.removed == "4"
        assert report.k == 3
        d = ranking_deltas(toy_graph, pagerank_cfg, BaselineMode.COMPACT, "4")
        assert report.deltas.deltas == d.deltas
        assert report.overview == overview_stats(d, toy_graph)
        assert report.overview.influenced_count == len(report.influence.nodes) - 1
        assert {r.node for r in report.records} == set(toy_graph.nodes) - {"4"}
        for rec in report.records:
            assert rec.delta == rec.previous_rank - rec.perturbed_rank
            assert rec.label == toy_graph.label(rec.node)

    def test_records_sorted_by_previous_rank(self, toy_graph, pagerank_cfg):
        report = diagnose(toy_graph, pagerank_cfg, BaselineMode.GAP, "1", k=2)
        ranks = [r.previous_rank for r in report.records]
        assert ranks == sorted(ranks)

    def test_k_validation(self, toy_graph, pagerank_cfg):
        with pytest.raises(ValueError):
            diagnose(toy_graph, pagerank_cfg, BaselineMode.COMPACT, "4", k=0)
        with pytest.raises(ValueError):
            diagnose(toy_graph, pagerank_cfg, BaselineMode.COMPACT, "4", k=6)

    def test_three_cycle_diagnosis(self, pagerank_cfg):
        from conftest import cycle3

        report = diagnose(cycle3(), pagerank_cfg, BaselineMode.COMPACT, "c", k=2)
        # removal breaks the symmetry: both survivors move
        assert report.overview.influenced_count == 2
        assert report.deltas.deltas == {"a": -1, "b": 1}
        hops = report.influence.hops()
        assert hops == {"c": 0, "a": 1, "b": 2}

    def test_serialization_roundtrip_shape(self, toy_graph, pagerank_cfg):
        report = diagnose(toy_graph, pagerank_cfg, BaselineMode.COMPACT, "4", k=3)
        doc = report.to_dict()
        assert set(doc) == {"removed", "fingerprint", "k", "overview", "records",
                            "topk", "influence"}
        assert doc["overview"]["influencedCount"] == report.overview.influenced_count
        assert len(doc["records"]) == toy_graph.node_count - 1
        assert abs(sum(doc["topk"]["before"].values()) - 1.0) <= 1e-12
