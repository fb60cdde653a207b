"""Read-mostly HTTP/JSON API over a precomputed audit cache.

Every response is a pure function of (cache, session rules, query
parameters); the only mutable state is the per-session rule sets, guarded
by one lock and expired after an idle timeout. Nothing here reruns a
ranking - reports are rebuilt from the cached integer deltas.
"""

from __future__ import annotations

import threading
import time
import uuid
from dataclasses import dataclass, field

from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, PlainTextResponse
from fastapi.staticfiles import StaticFiles

from .constraints import RuleSet, filter_table
from .diagnosis import InfluenceDirection, filter_influence
from .errors import AuditError, NodeNotFoundError
from .graph import DirectedGraph
from .sensitivity import SensitivityRecord, SensitivityTable
from .store import AuditCache, check_cache_matches, report_from_cache

DEFAULT_SESSION_TIMEOUT = 3600.0
DEFAULT_TOP_K = 100


class ApiError(Exception):
    """Error with a machine-readable code and the offending parameter."""

    def __init__(self, status: int, code: str, param: str | None, message: str):
        super().__init__(message)
        self.status = status
        self.code = code
        self.param = param

    def response(self) -> JSONResponse:
        body = {"code": self.code, "param": self.param, "message": str(self)}
        return JSONResponse(status_code=self.status, content={"error": body})


@dataclass
class Session:
    session_id: str
    rules: RuleSet = field(default_factory=RuleSet)
    last_access: float = field(default_factory=time.monotonic)


class SessionStore:
    """Session-scoped constraint state; idle sessions expire lazily."""

    def __init__(self, timeout: float = DEFAULT_SESSION_TIMEOUT):
        self.timeout = timeout
        self._sessions: dict[str, Session] = {}
        self._lock = threading.Lock()

    def create(self) -> Session:
        session = Session(session_id=uuid.uuid4().hex)
        with self._lock:
            self._expire()
            self._sessions[session.session_id] = session
        return session

    def get(self, session_id: str) -> Session:
        with self._lock:
            self._expire()
            session = self._sessions.get(session_id)
            if session is None:
                raise ApiError(404, "unknown_session", "sessionId",
                               f"session {session_id!r} does not exist")
            session.last_access = time.monotonic()
            return session

    def set_rules(self, session_id: str, rules: RuleSet) -> Session:
        session = self.get(session_id)
        with self._lock:
            session.rules = rules
        return session

    def delete(self, session_id: str) -> None:
        with self._lock:
            if session_id not in self._sessions:
                raise ApiError(404, "unknown_session", "sessionId",
                               f"session {session_id!r} does not exist")
            del self._sessions[session_id]

    def _expire(self) -> None:
        now = time.monotonic()
        stale = [k for k, s in self._sessions.items() if now - s.last_access > self.timeout]
        for k in stale:
            del self._sessions[k]


_SORT_FIELDS = {
    "rank": lambda r: r.original_rank,
    "si": lambda r: r.si,
    "siPos": lambda r: r.si_pos,
    "siNeg": lambda r: r.si_neg,
}


def sort_records(
    records: list[SensitivityRecord], sort: str, order: str
) -> list[SensitivityRecord]:
    """Stable sensitivity ordering; ties always break by node id ascending.

    `perLabel:<b>` sorts by that label's combined positive+negative index.
    """
    if sort in _SORT_FIELDS:
        key = _SORT_FIELDS[sort]
    elif sort.startswith("perLabel:"):
        label = sort.split(":", 1)[1]
        known = {b for r in records for b in r.per_label_pos}
        if label not in known:
            raise ApiError(400, "unknown_label", "sort",
                           f"label {label!r} not present in this audit")
        key = lambda r: r.per_label_pos.get(label, 0) + r.per_label_neg.get(label, 0)
    else:
        raise ApiError(400, "unknown_sort", "sort",
                       "sort must be one of rank, si, siPos, siNeg, perLabel:<label>")
    if order == "asc":
        return sorted(records, key=lambda r: (key(r), r.node))
    if order == "desc":
        return sorted(records, key=lambda r: (-key(r), r.node))
    raise ApiError(400, "bad_order", "order", "order must be 'asc' or 'desc'")


def _int_param(raw: str | None, name: str, default: int | None, minimum: int = 0):
    if raw is None or raw == "":
        return default
    try:
        value = int(raw)
    except ValueError:
        raise ApiError(400, "bad_parameter", name, f"{name} must be an integer") from None
    if value < minimum:
        raise ApiError(400, "bad_parameter", name, f"{name} must be >= {minimum}")
    return value


def sensitivity_payload(
    table: SensitivityTable, sort: str, order: str, limit: int | None, offset: int
) -> dict:
    ordered = sort_records(table.records, sort, order)
    total = len(ordered)
    window = ordered[offset:] if limit is None else ordered[offset : offset + limit]
    return {
        "total": total,
        "fingerprint": table.fingerprint,
        "records": [r.to_dict() for r in window],
    }


def create_app(
    cache: AuditCache,
    graph: DirectedGraph,
    static_dir: str | None = None,
    session_timeout: float = DEFAULT_SESSION_TIMEOUT,
    cors_origins: tuple[str, ...] = ("*",),
) -> FastAPI:
    """Wire the audit endpoints over one cache/graph pair.

    Raises FingerprintMismatchError up front when the cache was not built
    for this graph.
    """
    check_cache_matches(cache, graph)
    app = FastAPI(title="rankaudit", docs_url=None, redoc_url=None)
    app.add_middleware(
        CORSMiddleware,
        allow_origins=list(cors_origins),
        allow_methods=["*"],
        allow_headers=["*"],
    )
    sessions = SessionStore(timeout=session_timeout)
    n = len(cache.positions)

    @app.exception_handler(ApiError)
    async def _api_error(_request: Request, exc: ApiError):
        return exc.response()

    @app.exception_handler(AuditError)
    async def _audit_error(_request: Request, exc: AuditError):
        return ApiError(500, "internal_error", None, str(exc)).response()

    @app.get("/api/health")
    def health():
        return PlainTextResponse("ok")

    @app.get("/api/summary")
    def summary():
        return graph.summary().to_dict()

    @app.get("/api/sensitivity")
    def sensitivity(
        sort: str = "rank",
        order: str = "asc",
        limit: str | None = None,
        offset: str | None = None,
        sessionId: str | None = None,
    ):
        table = cache.table
        if sessionId is not None:
            session = sessions.get(sessionId)
            table = filter_table(table, session.rules, cache.deltas)
        return sensitivity_payload(
            table,
            sort,
            order,
            _int_param(limit, "limit", None),
            _int_param(offset, "offset", 0),
        )

    def _report(node: str, k_raw: str | None):
        k = _int_param(k_raw, "k", min(DEFAULT_TOP_K, n - 1), minimum=1)
        if k > n - 1:
            raise ApiError(400, "bad_parameter", "k", f"k must be in [1, {n - 1}]")
        try:
            return report_from_cache(cache, graph, node, k)
        except NodeNotFoundError as err:
            raise ApiError(404, "unknown_node", "node", str(err)) from None

    @app.get("/api/perturbation/{node}")
    def perturbation(node: str, k: str | None = None):
        return _report(node, k).to_dict()

    @app.get("/api/perturbation/{node}/influence")
    def influence(
        node: str,
        hopMin: str | None = None,
        hopMax: str | None = None,
        direction: str = "all",
    ):
        report = _report(node, None)
        hop_min = _int_param(hopMin, "hopMin", 1, minimum=1)
        hop_max = None if hopMax in (None, "", "inf") else _int_param(hopMax, "hopMax", None)
        try:
            dir_ = InfluenceDirection(direction)
        except ValueError:
            raise ApiError(400, "bad_parameter", "direction",
                           "direction must be all, increased, or decreased") from None
        try:
            return filter_influence(report.influence, hop_min, hop_max, dir_).to_dict()
        except ValueError as err:
            raise ApiError(400, "bad_range", "hopMin", str(err)) from None

    @app.post("/api/session")
    def create_session():
        return {"sessionId": sessions.create().session_id}

    @app.post("/api/session/{session_id}/rules")
    async def set_rules(session_id: str, request: Request):
        body = await request.json()
        if not isinstance(body, list):
            raise ApiError(400, "bad_rules", "body", "expected a JSON array of rules")
        try:
            rules = RuleSet.from_list(body)
        except (KeyError, TypeError, ValueError) as err:
            raise ApiError(400, "bad_rules", "body", f"invalid rule: {err}") from None
        session = sessions.set_rules(session_id, rules)
        retained = filter_table(cache.table, session.rules, cache.deltas)
        return {"sessionId": session_id, "retained": len(retained.records)}

    @app.delete("/api/session/{session_id}")
    def delete_session(session_id: str):
        sessions.delete(session_id)
        return {"deleted": session_id}

    if static_dir is not None:
        app.mount("/", StaticFiles(directory=static_dir, html=True), name="ui")
    else:
        @app.get("/")
        def index():
            return PlainTextResponse("rankaudit service (no UI bundle mounted)")

    return app
