"""HTTP facade over the app store and the dialogue engine.

Sessions live in memory; a restart loses active conversations. Each session
processes one event at a time: a second concurrent event gets 409.
"""

from __future__ import annotations

import mimetypes
import threading
from contextlib import contextmanager
from typing import Iterator

from fastapi import FastAPI, File, Request, Response, UploadFile
from fastapi.responses import FileResponse, JSONResponse
from pydantic import BaseModel

from bugscribe.dialogue import DialogueEngine, DialogueSession, Phase
from bugscribe.errors import (
    BusyError,
    InvalidOptionError,
    NotFoundError,
    ProtocolError,
)
from bugscribe.report import generate_report, render
from bugscribe.service.config import ServiceConfig
from bugscribe.service.store import AppStore


class SessionRequest(BaseModel):
    app_id: str | None = None


class MessageRequest(BaseModel):
    text: str


class SelectionRequest(BaseModel):
    option_ids: list[str]


class ConfirmationRequest(BaseModel):
    value: bool


class ActionRequest(BaseModel):
    action: str


class StepEditRequest(BaseModel):
    text: str


class SessionRegistry:
    def __init__(self) -> None:
        self._sessions: dict[str, DialogueSession] = {}
        self._locks: dict[str, threading.Lock] = {}
        self._guard = threading.Lock()

    def add(self, session: DialogueSession) -> None:
        with self._guard:
            self._sessions[session.session_id] = session
            self._locks[session.session_id] = threading.Lock()

    @contextmanager
    def locked(self, session_id: str) -> Iterator[DialogueSession]:
        with self._guard:
            session = self._sessions.get(session_id)
            lock = self._locks.get(session_id)
        if session is None or lock is None:
            raise NotFoundError(f"unknown session {session_id!r}")
        if not lock.acquire(blocking=False):
            raise BusyError(f"session {session_id!r} is handling another event")
        try:
            yield session
        finally:
            lock.release()


def create_app(config: ServiceConfig | None = None) -> FastAPI:
    config = config or ServiceConfig()
    store = AppStore(config.asset_dir)
    engine = DialogueEngine(
        store,
        threshold_screen=config.threshold_screen,
        threshold_edge=config.threshold_edge,
    )
    sessions = SessionRegistry()

    app = FastAPI(title="bugscribe", docs_url=None, redoc_url=None)
    app.state.store = store
    app.state.engine = engine
    app.state.sessions = sessions
    app.state.config = config

    @app.exception_handler(NotFoundError)
    async def _not_found(_: Request, exc: NotFoundError) -> JSONResponse:
        return JSONResponse(
            status_code=404, content={"detail": str(exc), "reason": exc.reason}
        )

    @app.exception_handler(ProtocolError)
    async def _protocol(_: Request, exc: ProtocolError) -> JSONResponse:
        return JSONResponse(status_code=400, content={"detail": str(exc)})

    @app.exception_handler(InvalidOptionError)
    async def _invalid_option(_: Request, exc: InvalidOptionError) -> JSONResponse:
        return JSONResponse(status_code=400, content={"detail": str(exc)})

    @app.exception_handler(BusyError)
    async def _busy(_: Request, exc: BusyError) -> JSONResponse:
        return JSONResponse(status_code=409, content={"detail": str(exc)})

    # -- apps ---------------------------------------------------------------

    @app.get("/apps")
    def list_apps() -> list[dict]:
        return [summary.to_dict() for summary in store.list_apps()]

    @app.post("/apps")
    async def upload_app(
        zip: UploadFile = File(...), icon: UploadFile | None = File(None)
    ) -> Response:
        zip_bytes = await zip.read()
        if len(zip_bytes) > config.upload_limit_bytes:
            return JSONResponse(
                status_code=413,
                content={"detail": "upload exceeds the configured size limit"},
            )
        icon_bytes = await icon.read() if icon is not None else None
        report, model = store.publish(zip_bytes, icon_bytes)
        payload = report.to_dict()
        if model is not None:
            payload["app_id"] = model.app_id
            return JSONResponse(status_code=201, content=payload)
        return JSONResponse(status_code=422, content=payload)

    @app.get("/apps/{app_id}/screens/{fingerprint}/capture")
    def screen_capture(app_id: str, fingerprint: str) -> FileResponse:
        path = store.capture_path(app_id, fingerprint)
        media_type = mimetypes.guess_type(path.name)[0] or "application/octet-stream"
        return FileResponse(path, media_type=media_type)

    @app.get("/apps/{app_id}/icon")
    def app_icon(app_id: str) -> FileResponse:
        return FileResponse(store.icon_path(app_id), media_type="image/png")

    # -- sessions --------------------------------------------------------------

    @app.post("/sessions", status_code=201)
    def create_session(body: SessionRequest) -> dict:
        session, response = engine.start_session(body.app_id)
        sessions.add(session)
        return response.to_dict()

    @app.post("/sessions/{session_id}/messages")
    def post_message(session_id: str, body: MessageRequest) -> dict:
        with sessions.locked(session_id) as session:
            return engine.handle_text(session, body.text).to_dict()

    @app.post("/sessions/{session_id}/selections")
    def post_selection(session_id: str, body: SelectionRequest) -> dict:
        with sessions.locked(session_id) as session:
            return engine.handle_selection(session, body.option_ids).to_dict()

    @app.post("/sessions/{session_id}/confirmations")
    def post_confirmation(session_id: str, body: ConfirmationRequest) -> dict:
        with sessions.locked(session_id) as session:
            return engine.handle_confirmation(session, body.value).to_dict()

    @app.post("/sessions/{session_id}/actions")
    def post_action(session_id: str, body: ActionRequest) -> dict:
        with sessions.locked(session_id) as session:
            return engine.handle_quick_action(session, body.action).to_dict()

    @app.patch("/sessions/{session_id}/steps/{index}")
    def patch_step(session_id: str, index: int, body: StepEditRequest) -> dict:
        with sessions.locked(session_id) as session:
            return engine.edit_step(session, index, body.text).to_dict()

    def _report_response(session: DialogueSession, format: str) -> Response:
        report = generate_report(session)
        asset_dir = store.app_dir(session.app_id) if session.app_id else None
        body = render(report, format, asset_dir=asset_dir)
        draft = session.phase is not Phase.REPORT_READY
        media = "application/json" if format == "structured" else "text/markdown"
        return Response(
            content=body,
            media_type=media,
            headers={"X-Draft": "true" if draft else "false"},
        )

    @app.get("/sessions/{session_id}/report")
    def get_report(session_id: str) -> Response:
        with sessions.locked(session_id) as session:
            return _report_response(session, "structured")

    @app.get("/sessions/{session_id}/report.md")
    def get_report_markdown(session_id: str) -> Response:
        with sessions.locked(session_id) as session:
            return _report_response(session, "markdown")

    return app
