import pytest
from fastapi.testclient import TestClient

from rankaudit import (
    BaselineMode,
    FingerprintMismatchError,
    RankingConfig,
    build_cache,
    filter_influence,
    report_from_cache,
)
from rankaudit.service import create_app, sensitivity_payload, sort_records


@pytest.fixture(scope="module")
def audit(request):
    from conftest import TOY_EDGE_TEXT, TOY_LABEL_TEXT
    from rankaudit import parse_graph

    graph, _ = parse_graph(TOY_EDGE_TEXT, TOY_LABEL_TEXT)
    cache, _ = build_cache(graph, RankingConfig(), BaselineMode.COMPACT)
    return graph, cache


@pytest.fixture(scope="module")
def client(audit):
    graph, cache = audit
    app = create_app(cache, graph)
    with TestClient(app) as c:
        yield c


class TestBasicEndpoints:
    def test_health(self, client):
        resp = client.get("/api/health")
        assert resp.status_code == 200
        assert resp.text == "ok"

    def test_summary_equals_library(self, client, audit):
        graph, _ = audit
        resp = client.get("/api/summary")
        assert resp.status_code == 200
        assert resp.json() == graph.summary().to_dict()

    def test_repeated_gets_byte_identical(self, client):
        first = client.get("/api/sensitivity?sort=si&order=desc")
        second = client.get("/api/sensitivity?sort=si&order=desc")
        assert first.content == second.content


class TestSensitivityEndpoint:
    def test_equals_cache_table(self, client, audit):
        _, cache = audit
        resp = client.get("/api/sensitivity")
        assert resp.json() == sensitivity_payload(cache.table, "rank", "asc", None, 0)

    def test_sort_si_desc_with_limit(self, client, audit):
        _, cache = audit
        resp = client.get("/api/sensitivity?sort=si&order=desc&limit=3")
        body = resp.json()
        assert body["total"] == 6
        want = [r.to_dict() for r in sort_records(cache.table.records, "si", "desc")[:3]]
        assert body["records"] == want
        sis = [r["si"] for r in body["records"]]
        assert sis == sorted(sis, reverse=True)

    def test_per_label_sort(self, client):
        resp = client.get("/api/sensitivity?sort=perLabel:B&order=desc&limit=1")
        assert resp.status_code == 200
        top = resp.json()["records"][0]
        assert top["perLabelPos"]["B"] + top["perLabelNeg"]["B"] >= 0

    def test_offset_pagination(self, client):
        full = client.get("/api/sensitivity?sort=rank&order=asc").json()["records"]
        page = client.get("/api/sensitivity?sort=rank&order=asc&limit=2&offset=2").json()
        assert page["records"] == full[2:4]

    def test_unknown_sort_field(self, client):
        resp = client.get("/api/sensitivity?sort=bogus")
        assert resp.status_code == 400
        err = resp.json()["error"]
        assert err["code"] == "unknown_sort"
        assert err["param"] == "sort"

    def test_unknown_label_sort(self, client):
        resp = client.get("/api/sensitivity?sort=perLabel:NOPE")
        assert resp.status_code == 400
        assert resp.json()["error"]["code"] == "unknown_label"

    def test_bad_limit(self, client):
        resp = client.get("/api/sensitivity?limit=-2")
        assert resp.status_code == 400
        assert resp.json()["error"]["param"] == "limit"


class TestPerturbationEndpoint:
    def test_equals_library_report(self, client, audit):
        graph, cache = audit
        resp = client.get("/api/perturbation/4?k=3")
        assert resp.status_code == 200
        assert resp.json() == report_from_cache(cache, graph, "4", 3).to_dict()

    def test_default_k_clamped_to_population(self, client, audit):
        graph, cache = audit
        resp = client.get("/api/perturbation/4")
        # toy graph has 6 nodes, so default k=100 clamps to 5
        assert resp.json() == report_from_cache(cache, graph, "4", 5).to_dict()

    def test_unknown_node_404(self, client):
        resp = client.get("/api/perturbation/ghost")
        assert resp.status_code == 404
        err = resp.json()["error"]
        assert err["code"] == "unknown_node"

    def test_bad_k(self, client):
        resp = client.get("/api/perturbation/4?k=0")
        assert resp.status_code == 400
        resp = client.get("/api/perturbation/4?k=99")
        assert resp.status_code == 400
        assert resp.json()["error"]["param"] == "k"

    def test_influence_filtering(self, client, audit):
        graph, cache = audit
        full = report_from_cache(cache, graph, "1", 5).influence
        resp = client.get("/api/perturbation/1/influence?hopMin=1&hopMax=1")
        assert resp.json() == filter_influence(full, 1, 1, "all").to_dict()
        resp = client.get("/api/perturbation/1/influence?direction=decreased")
        assert resp.json() == filter_influence(full, 1, None, "decreased").to_dict()
        resp = client.get("/api/perturbation/1/influence?hopMax=inf")
        assert resp.json() == full.to_dict()

    def test_influence_bad_params(self, client):
        assert client.get("/api/perturbation/1/influence?direction=sideways").status_code == 400
        assert client.get("/api/perturbation/1/influence?hopMin=0").status_code == 400
        resp = client.get("/api/perturbation/1/influence?hopMin=3&hopMax=2")
        assert resp.status_code == 400
        assert resp.json()["error"]["code"] == "bad_range"


RULE_PROTECT_1 = [{"id": "keep1", "protected": ["1"], "direction": "no_decrease",
                   "threshold": 0, "kind": "abs"}]


class TestSessions:
    def test_create_rules_filter_delete(self, client, audit):
        _, cache = audit
        sid = client.post("/api/session").json()["sessionId"]
        resp = client.post(f"/api/session/{sid}/rules", json=RULE_PROTECT_1)
        assert resp.status_code == 200
        retained = resp.json()["retained"]

        filtered = client.get(f"/api/sensitivity?sessionId={sid}").json()
        assert filtered["total"] == retained
        # node 4's removal drops node 1, so 4 must be filtered out; so is 1 itself
        kept_nodes = {r["node"] for r in filtered["records"]}
        assert "4" not in kept_nodes and "1" not in kept_nodes

        assert client.delete(f"/api/session/{sid}").status_code == 200
        assert client.get(f"/api/sensitivity?sessionId={sid}").status_code == 404

    def test_rule_isolation_between_sessions(self, client):
        sid_a = client.post("/api/session").json()["sessionId"]
        sid_b = client.post("/api/session").json()["sessionId"]
        client.post(f"/api/session/{sid_a}/rules", json=RULE_PROTECT_1)

        body_a = client.get(f"/api/sensitivity?sessionId={sid_a}").json()
        body_b = client.get(f"/api/sensitivity?sessionId={sid_b}").json()
        plain = client.get("/api/sensitivity").json()
        assert body_b == plain  # B sees no rules
        assert body_a["total"] < body_b["total"]

        # replacing rules with an empty set restores the full table
        client.post(f"/api/session/{sid_a}/rules", json=[])
        assert client.get(f"/api/sensitivity?sessionId={sid_a}").json() == plain

    def test_unknown_session(self, client):
        assert client.get("/api/sensitivity?sessionId=nope").status_code == 404
        assert client.delete("/api/session/nope").status_code == 404

    def test_invalid_rules_rejected(self, client):
        sid = client.post("/api/session").json()["sessionId"]
        resp = client.post(f"/api/session/{sid}/rules",
                           json=[{"id": "x", "protected": [], "direction": "no_decrease",
                                  "threshold": 0}])
        assert resp.status_code == 400
        assert resp.json()["error"]["code"] == "bad_rules"
        resp = client.post(f"/api/session/{sid}/rules", json={"not": "a list"})
        assert resp.status_code == 400

    def test_session_expiry(self, audit):
        graph, cache = audit
        app = create_app(cache, graph, session_timeout=0.0)
        with TestClient(app) as c:
            sid = c.post("/api/session").json()["sessionId"]
            import time

            time.sleep(0.01)
            assert c.get(f"/api/sensitivity?sessionId={sid}").status_code == 404


def test_fingerprint_mismatch_refused(audit):
    graph, cache = audit
    with pytest.raises(FingerprintMismatchError):
        create_app(cache, graph.remove_node("6"))


def test_root_without_static(client):
    resp = client.get("/")
    assert resp.status_code == 200
    assert "rankaudit" in resp.text
