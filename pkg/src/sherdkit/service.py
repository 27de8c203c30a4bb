"""Local HTTP/JSON facade over the assembly engine.

One session per process, loaded from a profiles directory at startup. All
mutations are serialized through a lock and guarded by an optimistic
revision counter: POST /api/decision must present the revision it saw
(If-Match header), so two browser tabs cannot double-commit. Responses
carry engine numbers verbatim — no rounding, no recomputation.
"""

from __future__ import annotations

import json
import threading
from pathlib import Path
from typing import Literal

from fastapi import FastAPI, Header
from fastapi.responses import HTMLResponse, JSONResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from .assembly import (
    AssemblyState,
    commit,
    init_assembly,
    strip_order,
    undo,
)
from .errors import (
    NotACandidateError,
    NothingToUndoError,
    SherdKitError,
    UnknownSherdError,
)
from .matching import MatchConfig
from .profile import load_profile_dir

DEFAULT_PORT = 7131


class _Stale(Exception):
    pass


class _NoSession(Exception):
    pass


class SessionStore:
    """Owns the AssemblyState and its revision counter.

    Mutations happen under a lock; every successful one bumps the revision.
    When log_path is set, each action is appended there as one JSON line.
    """

    def __init__(self, state: AssemblyState | None = None, log_path=None):
        self._lock = threading.Lock()
        self.state = state
        self.revision = 0
        self.log_path = Path(log_path) if log_path else None

    @classmethod
    def from_directory(cls, directory, cfg: MatchConfig = MatchConfig(), log_path=None):
        return cls(init_assembly(load_profile_dir(directory), cfg), log_path=log_path)

    def _append_log(self, record: dict) -> None:
        if self.log_path is not None:
            with self.log_path.open("a", encoding="utf-8") as fh:
                fh.write(json.dumps(record, sort_keys=True) + "\n")

    def view(self) -> dict:
        with self._lock:
            return self._view_locked()

    def _view_locked(self) -> dict:
        if self.state is None:
            raise _NoSession
        s = self.state
        step = s.meta.profile.step
        pool_by_id = {p.sherd_id: p for p in s.pool}
        candidates = []
        for c in s.candidates:
            entry = c.to_dict()
            if c.match is not None:
                prof = pool_by_id[c.sherd_id]
                entry["overlay"] = {
                    "start_mm": c.match.offset * step,
                    "samples_mm": [float(x) for x in prof.samples],
                }
            else:
                entry["overlay"] = None
            candidates.append(entry)
        return {
            "revision": self.revision,
            "complete": s.complete,
            "log_length": len(s.log),
            "config": s.config.to_dict(),
            "meta": {
                "step_mm": step,
                "samples_mm": [float(x) for x in s.meta.profile.samples],
                "provenance": [int(x) for x in s.meta.provenance],
            },
            "placements": [
                m.to_dict() | {"offset_mm": m.offset * step} for m in s.meta.members
            ],
            "strip": strip_order(s),
            "candidates": candidates,
            "pool": [p.sherd_id for p in s.pool],
        }

    def decide(self, sherd_id: str, side: str, override: bool, expected_revision: int | None) -> dict:
        with self._lock:
            if self.state is None:
                raise _NoSession
            if expected_revision is None or expected_revision != self.revision:
                raise _Stale
            self.state = commit(self.state, sherd_id, side, override)
            self.revision += 1
            self._append_log(
                {
                    "action": "commit",
                    "sherd_id": sherd_id,
                    "side": side,
                    "override": override,
                    "revision": self.revision,
                }
            )
            return self._view_locked()

    def undo_last(self, expected_revision: int | None) -> dict:
        with self._lock:
            if self.state is None:
                raise _NoSession
            if expected_revision is not None and expected_revision != self.revision:
                raise _Stale
            self.state = undo(self.state)
            self.revision += 1
            self._append_log({"action": "undo", "revision": self.revision})
            return self._view_locked()


def _parse_if_match(value: str | None) -> int | None:
    if value is None:
        return None
    token = value.strip()
    if token.startswith("W/"):
        token = token[2:]
    token = token.strip('"')
    try:
        return int(token)
    except ValueError:
        return None


class DecisionBody(BaseModel):
    sherd_id: str
    side: Literal["LEFT", "RIGHT"]
    override: bool = False


_FALLBACK_PAGE = """<!doctype html>
<title>sherd assembly service</title>
<h1>Assembly session running</h1>
<p>The API lives under <code>/api</code>. No browser UI is installed;
point the frontend build's static directory at the server to get one.</p>
"""


def create_app(store: SessionStore, static_dir=None) -> FastAPI:
    """Wire the HTTP routes around a SessionStore."""
    app = FastAPI(docs_url=None, redoc_url=None, openapi_url=None)

    def ok(view: dict) -> JSONResponse:
        return JSONResponse(view, headers={"ETag": f'"{view["revision"]}"'})

    def fail(status: int, message: str) -> JSONResponse:
        return JSONResponse({"error": message, "revision": store.revision}, status_code=status)

    @app.get("/api/state")
    def get_state():
        try:
            return ok(store.view())
        except _NoSession:
            return fail(503, "no session loaded")

    @app.post("/api/decision")
    def post_decision(body: DecisionBody, if_match: str | None = Header(default=None)):
        try:
            view = store.decide(
                body.sherd_id, body.side, body.override, _parse_if_match(if_match)
            )
            return ok(view)
        except _NoSession:
            return fail(503, "no session loaded")
        except _Stale:
            return fail(409, "stale revision: refetch /api/state and retry")
        except UnknownSherdError as exc:
            return fail(404, str(exc))
        except NotACandidateError as exc:
            return fail(422, str(exc))
        except SherdKitError as exc:
            return fail(422, str(exc))

    @app.post("/api/undo")
    def post_undo(if_match: str | None = Header(default=None)):
        try:
            return ok(store.undo_last(_parse_if_match(if_match)))
        except _NoSession:
            return fail(503, "no session loaded")
        except _Stale:
            return fail(409, "stale revision: refetch /api/state and retry")
        except NothingToUndoError as exc:
            return fail(409, str(exc))

    if static_dir is not None and Path(static_dir).is_dir():
        app.mount("/", StaticFiles(directory=static_dir, html=True), name="ui")
    else:

        @app.get("/")
        def index():
            return HTMLResponse(_FALLBACK_PAGE)

    return app


def serve(
    profiles_dir,
    cfg: MatchConfig = MatchConfig(),
    host: str = "127.0.0.1",
    port: int = DEFAULT_PORT,
    static_dir=None,
    log_path=None,
) -> None:
    """Blocking entry point: load the session and run uvicorn."""
    import uvicorn

    store = SessionStore.from_directory(profiles_dir, cfg, log_path=log_path)
    app = create_app(store, static_dir=static_dir)
    uvicorn.run(app, host=host, port=port, log_level="warning")
