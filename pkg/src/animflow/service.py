"""HTTP session service exposing the playground wire protocol.

Sessions are independent; event application is serialized per session
with a lock.  The runtime itself is logical-time only; an optional
realtime ticker converts wall-clock play into advance(dt) calls.
"""

from __future__ import annotations

import threading
import time
import uuid

from fastapi import FastAPI, HTTPException, Request
from fastapi.responses import JSONResponse

from . import api
from .model import SpecError
from .scenegraph import frame_doc


class Session:
    def __init__(self, state, realtime: bool = False, tick_ms: float = 16.0):
        self.state = state
        self.lock = threading.Lock()
        self.alive = True
        self.tick_ms = tick_ms
        if realtime:
            threading.Thread(target=self._ticker, daemon=True).start()

    def _ticker(self) -> None:
        while self.alive:
            time.sleep(self.tick_ms / 1000.0)
            with self.lock:
                if not self.alive:
                    return
                if self.state.signals.get("is_playing", True):
                    self.state.advance(self.tick_ms)

    def frame(self) -> dict:
        return frame_doc(self.state.scenegraph())


def create_app() -> FastAPI:
    app = FastAPI(title="animflow session service")
    sessions: dict[str, Session] = {}

    def get_session(session_id: str) -> Session:
        session = sessions.get(session_id)
        if session is None:
            raise HTTPException(status_code=404, detail=f"unknown session {session_id!r}")
        return session

    @app.exception_handler(SpecError)
    async def spec_error(request: Request, exc: SpecError):
        return JSONResponse(status_code=400, content={"error": str(exc), "path": exc.path})

    @app.post("/sessions")
    async def create_session(body: dict):
        spec = body.get("spec")
        if spec is None:
            raise HTTPException(status_code=400, detail="missing: spec")
        try:
            state, diagnostics = api.build_session(spec, body.get("data"))
        except (ValueError, api.BuildError) as e:
            raise HTTPException(status_code=400, detail=str(e)) from None
        errors = [d for d in diagnostics if d.severity == "error"]
        if errors:
            raise HTTPException(
                status_code=400,
                detail=[{"severity": d.severity, "path": d.path, "message": d.message}
                        for d in errors],
            )
        session_id = uuid.uuid4().hex
        sessions[session_id] = Session(
            state,
            realtime=bool(body.get("realtime", False)),
            tick_ms=float(body.get("tick_ms", 16)),
        )
        return {
            "session_id": session_id,
            "widgets": [dict(w) for w in state.widgets],
            "cycle_ms": state.cycle_ms,
        }

    @app.post("/sessions/{session_id}/events")
    async def post_event(session_id: str, body: dict):
        session = get_session(session_id)
        event = body.get("event")
        if not isinstance(event, dict):
            raise HTTPException(status_code=400, detail="missing: event")
        with session.lock:
            try:
                session.state.inject_event(event)
            except Exception as e:
                raise HTTPException(status_code=400, detail=str(e)) from None
            out = {"frame": session.frame()}
        if "seq" in body:
            out["seq"] = body["seq"]
        return out

    @app.post("/sessions/{session_id}/advance")
    async def post_advance(session_id: str, body: dict):
        session = get_session(session_id)
        dt = body.get("dt_ms")
        if not isinstance(dt, (int, float)) or dt < 0:
            raise HTTPException(status_code=400, detail="dt_ms must be a number >= 0")
        with session.lock:
            session.state.advance(dt)
            out = {"frame": session.frame()}
        if "seq" in body:
            out["seq"] = body["seq"]
        return out

    @app.get("/sessions/{session_id}/frame")
    async def get_frame(session_id: str):
        session = get_session(session_id)
        with session.lock:
            return {"frame": session.frame()}

    @app.delete("/sessions/{session_id}")
    async def delete_session(session_id: str):
        session = sessions.pop(session_id, None)
        if session is None:
            raise HTTPException(status_code=404, detail=f"unknown session {session_id!r}")
        session.alive = False
        return {"deleted": True}

    return app
