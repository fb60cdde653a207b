#!/usr/bin/env python3
"""Record API responses from the toy-fixture service into
frontend/tests/fixtures/ so the UI contract tests run against real,
frozen payloads.

Usage: python scripts/record_ui_fixtures.py
"""

import json
import pathlib
import sys

from fastapi.testclient import TestClient

from rankaudit import BaselineMode, RankingConfig, build_cache, parse_graph
from rankaudit.service import create_app

TOY_EDGE_TEXT = "1,2\n2,3\n3,1\n4,1\n5,4\n2,5"
TOY_LABEL_TEXT = "1,A\n2,A\n3,B\n4,B\n5,C\n6,C"

OUT_DIR = pathlib.Path(__file__).resolve().parent.parent / "frontend" / "tests" / "fixtures"


def main() -> int:
    graph, _ = parse_graph(TOY_EDGE_TEXT, TOY_LABEL_TEXT)
    cache, _ = build_cache(graph, RankingConfig(), BaselineMode.COMPACT)
    app = create_app(cache, graph)
    OUT_DIR.mkdir(parents=True, exist_ok=True)

    def record(name: str, payload) -> None:
        path = OUT_DIR / f"{name}.json"
        path.write_text(json.dumps(payload, indent=2, sort_keys=False) + "\n")
        print(f"wrote {path.relative_to(OUT_DIR.parent.parent)}", file=sys.stderr)

    with TestClient(app) as client:
        record("summary", client.get("/api/summary").json())
        record("sensitivity_default", client.get("/api/sensitivity").json())
        record("sensitivity_si_desc",
               client.get("/api/sensitivity?sort=si&order=desc").json())
        record("report_4_k3", client.get("/api/perturbation/4?k=3").json())
        record("report_1_k5", client.get("/api/perturbation/1?k=5").json())
        record("influence_1_all", client.get("/api/perturbation/1/influence").json())
        record("influence_1_hop1",
               client.get("/api/perturbation/1/influence?hopMin=1&hopMax=1").json())

        # constraint round trip: shield node 1, protect it from any drop
        session = client.post("/api/session").json()["sessionId"]
        rule_request = [{
            "id": "rule-1",
            "protected": ["1"],
            "direction": "no_decrease",
            "threshold": 0,
            "kind": "abs",
        }]
        retained = client.post(f"/api/session/{session}/rules", json=rule_request).json()
        filtered = client.get(f"/api/sensitivity?sessionId={session}").json()
        record("rules_roundtrip", {
            "drafts": ["1"],
            "request": rule_request,
            "response": retained,
            "filtered": filtered,
            "full": client.get("/api/sensitivity").json(),
        })
    return 0


if __name__ == "__main__":
    sys.exit(main())
