"""HTTP facade: render and search endpoints plus backend failover.

POST /api/render  {"latex": str, "query": bool?} ->
    200 {"ok": true, "tree": ..., "canonical_latex": str}
    422 {"ok": false, "error": {"position", "kind", "message"}}
    400 on a malformed body
POST /api/search  {"text"?, "math"?, "alpha"?, "limit"?} ->
    200 canonical search response, 400 when both parts are empty or the
    body is malformed, 422 on a math parse error
GET /healthz      snapshot counts and backend health

Rendering can be delegated to external backends speaking this same
/api/render contract: requests rotate round-robin over healthy backends,
a failing backend is retried once per remaining healthy one, and the
built-in parser answers when every backend is down (or none is
configured), so /api/render always returns a definitive reply.
"""

from __future__ import annotations

import json
import threading
import time
from pathlib import Path as FsPath

import httpx
from fastapi import FastAPI, Request, Response
from fastapi.staticfiles import StaticFiles

from . import jsonio
from .canon import canonicalize
from .corpus import IndexSnapshot
from .engine import CombinedQuery, EmptyQueryError, search_response
from .expr import to_jsonable
from .texparse import ParseError, parse_formula, parse_query, unparse

FAILURE_THRESHOLD = 3
COOLDOWN_SECONDS = 30.0


class BackendPool:
    """Round-robin dispatch over render backends with failure tracking.

    The cursor advances once per dispatch (modulo pool size); a backend
    reaching the failure threshold is skipped until its cooldown elapses.
    Cursor and failure counters are the only shared mutable state, guarded
    by one lock.
    """

    def __init__(
        self,
        urls: list[str],
        threshold: int = FAILURE_THRESHOLD,
        cooldown: float = COOLDOWN_SECONDS,
        clock=time.monotonic,
    ):
        self.urls = [u.rstrip("/") for u in urls]
        self.threshold = threshold
        self.cooldown = cooldown
        self.clock = clock
        self._cursor = 0
        self._failures = {u: 0 for u in self.urls}
        self._blocked_until = {u: 0.0 for u in self.urls}
        self._lock = threading.Lock()

    def __len__(self) -> int:
        return len(self.urls)

    def _healthy(self, url: str) -> bool:
        if self._failures[url] < self.threshold:
            return True
        return self.clock() >= self._blocked_until[url]

    def plan(self) -> list[str]:
        """Healthy backends in rotation order; advances the cursor by one."""
        with self._lock:
            if not self.urls:
                return []
            start = self._cursor
            self._cursor = (self._cursor + 1) % len(self.urls)
            rotation = self.urls[start:] + self.urls[:start]
            return [u for u in rotation if self._healthy(u)]

    def record_success(self, url: str) -> None:
        with self._lock:
            self._failures[url] = 0

    def record_failure(self, url: str) -> None:
        with self._lock:
            self._failures[url] += 1
            if self._failures[url] >= self.threshold:
                self._blocked_until[url] = self.clock() + self.cooldown

    def states(self) -> list[tuple[str, bool]]:
        with self._lock:
            return [(u, self._healthy(u)) for u in self.urls]


def _render_local(latex: str, as_query: bool) -> tuple[int, dict]:
    try:
        tree = parse_query(latex) if as_query else parse_formula(latex)
    except ParseError as e:
        return 422, {
            "ok": False,
            "error": {"position": e.position, "kind": e.kind, "message": e.message},
        }
    return 200, {
        "ok": True,
        "tree": to_jsonable(tree),
        "canonical_latex": unparse(canonicalize(tree)),
    }


def _json_response(status: int, obj: dict) -> Response:
    return Response(
        content=jsonio.dump_bytes(obj),
        status_code=status,
        media_type="application/json",
    )


def create_app(
    snapshot: IndexSnapshot,
    pool: BackendPool | None = None,
    webui_dir: str | FsPath | None = None,
    transport: httpx.BaseTransport | None = None,
) -> FastAPI:
    """Build the application around a frozen snapshot.

    transport overrides the HTTP transport used to reach render backends
    (tests inject httpx.MockTransport here).
    """
    app = FastAPI(title="mathfind", docs_url=None, redoc_url=None)
    app.state.snapshot = snapshot
    app.state.pool = pool if pool is not None else BackendPool([])
    client = httpx.Client(transport=transport, timeout=5.0)

    @app.post("/api/render")
    async def render(request: Request) -> Response:
        raw = await request.body()
        try:
            body = json.loads(raw)
        except json.JSONDecodeError:
            return _json_response(400, {"error": "request body must be JSON"})
        if not isinstance(body, dict) or not isinstance(body.get("latex"), str):
            return _json_response(400, {"error": "body must carry a string 'latex'"})
        as_query = bool(body.get("query"))

        forward = {"latex": body["latex"]}
        if as_query:
            forward["query"] = True
        for url in app.state.pool.plan():
            try:
                reply = client.post(url + "/api/render", json=forward)
            except httpx.HTTPError:
                app.state.pool.record_failure(url)
                continue
            if reply.status_code in (200, 422):
                app.state.pool.record_success(url)
                return Response(
                    content=reply.content,
                    status_code=reply.status_code,
                    media_type="application/json",
                )
            app.state.pool.record_failure(url)
        status, obj = _render_local(body["latex"], as_query)
        return _json_response(status, obj)

    @app.post("/api/search")
    async def search_endpoint(request: Request) -> Response:
        raw = await request.body()
        try:
            body = json.loads(raw)
        except json.JSONDecodeError:
            return _json_response(400, {"error": "request body must be JSON"})
        if not isinstance(body, dict):
            return _json_response(400, {"error": "body must be a JSON object"})
        limit = body.get("limit", 10)
        if not isinstance(limit, int) or isinstance(limit, bool) or limit < 1:
            return _json_response(400, {"error": "limit must be a positive integer"})
        try:
            q = CombinedQuery(
                text=body.get("text"),
                math=body.get("math"),
                alpha=bool(body.get("alpha", False)),
                limit=limit,
            )
        except EmptyQueryError:
            return _json_response(
                400, {"error": "at least one of text/math must be nonempty"}
            )
        try:
            obj = search_response(app.state.snapshot, q)
        except ParseError as e:
            return _json_response(
                422,
                {"error": {"position": e.position, "kind": e.kind, "message": e.message}},
            )
        return _json_response(200, obj)

    @app.get("/healthz")
    async def healthz() -> Response:
        snap: IndexSnapshot = app.state.snapshot
        obj = {
            "status": "ok",
            "docs": snap.doc_count,
            "formulas": snap.formula_count,
            "backends": [
                {"url": u, "healthy": h} for u, h in app.state.pool.states()
            ],
        }
        return _json_response(200, obj)

    if webui_dir is not None and FsPath(webui_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(webui_dir), html=True), name="webui")
    else:

        @app.get("/")
        async def index_page() -> Response:
            return Response(
                "<!doctype html><title>mathfind</title>"
                "<p>mathfind is running; POST /api/search to query. "
                "No web UI bundle is configured.</p>",
                media_type="text/html",
            )

    return app
