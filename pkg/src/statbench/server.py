"""HTTP service hosting workbench sessions.

Thin layer: every route validates the path, grabs the session lock, and
delegates to the session/manager methods.  Handlers are synchronous on
purpose; the framework runs them in a worker pool, so the per-session
lock serializes operations on one session without stalling others.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from fastapi import Body, FastAPI, HTTPException
from fastapi.responses import HTMLResponse, PlainTextResponse, Response

from .dataset import serialize_csv
from .errors import (
    DataError,
    DomainError,
    ScriptEvalError,
    ScriptSyntaxError,
    SessionError,
)
from .registry import Registry, discover, nav_structure
from .session import Session, SessionManager

PACKAGE_ROOT = Path(__file__).resolve().parent
DEFAULT_MODULES_DIR = PACKAGE_ROOT / "defaults" / "modules"
THEMES_DIR = PACKAGE_ROOT / "defaults" / "themes"
DEMO_CSV = PACKAGE_ROOT / "defaults" / "data" / "class_survey.csv"

FALLBACK_PAGE = """<!doctype html>
<html><head><title>statbench</title></head>
<body>
<h1>statbench</h1>
<p>The API is running. No web UI bundle is installed; point --ui-dir at a
built frontend, or use the HTTP API directly (see /api/modules).</p>
</body></html>
"""


def available_themes() -> list[str]:
    return sorted(p.stem for p in THEMES_DIR.glob("*.css"))


@dataclass
class ServerConfig:
    modules_dir: Path = DEFAULT_MODULES_DIR
    enabled: list[str] | None = None
    theme: str = "default"
    port: int = 8000
    session_ttl_seconds: float = 1800.0
    max_upload_bytes: int = 8 * 1024 * 1024
    ui_dir: Path | None = None
    demo_csv: Path = field(default_factory=lambda: DEMO_CSV)

    def validate(self):
        themes = available_themes()
        if self.theme not in themes:
            raise ValueError(
                f"unknown theme {self.theme!r}; available: {', '.join(themes)}"
            )


def build_manager(config: ServerConfig) -> SessionManager:
    registry = discover(config.modules_dir, config.enabled)
    return SessionManager(
        registry=registry,
        filename=config.demo_csv.name,
        data=config.demo_csv.read_bytes(),
        ttl_seconds=config.session_ttl_seconds,
    )


def create_app(config: ServerConfig | None = None) -> FastAPI:
    config = config if config is not None else ServerConfig()
    config.validate()
    manager = build_manager(config)
    app = FastAPI(title="statbench", docs_url=None, redoc_url=None)
    app.state.manager = manager
    app.state.config = config

    def get_session(session_id: str) -> Session:
        try:
            return manager.get(session_id)
        except SessionError as e:
            raise HTTPException(status_code=404, detail=str(e)) from None

    # -- session lifecycle ------------------------------------------------

    @app.post("/api/sessions")
    def create_session() -> dict:
        session = manager.create()
        return {"session_id": session.id}

    @app.post("/api/sessions/resume")
    def resume_session(body: dict = Body(...)) -> dict:
        script = body.get("script")
        data = body.get("data")
        if not isinstance(script, str) or not isinstance(data, str):
            raise HTTPException(
                status_code=400, detail="body needs string fields script and data"
            )
        filename = body.get("filename", "data.csv")
        try:
            session = manager.resume(script, data.encode("utf-8"), filename=filename)
        except (ScriptSyntaxError, ScriptEvalError, DataError) as e:
            raise HTTPException(status_code=400, detail=str(e)) from None
        return {"session_id": session.id}

    # -- data -------------------------------------------------------------

    @app.post("/api/sessions/{session_id}/data")
    def upload_data(
        session_id: str,
        filename: str = "data.csv",
        body: bytes = Body(..., media_type="text/csv"),
    ) -> dict:
        if len(body) > config.max_upload_bytes:
            raise HTTPException(
                status_code=413,
                detail=f"upload exceeds {config.max_upload_bytes} bytes",
            )
        session = get_session(session_id)
        with session.lock:
            try:
                return session.upload_data(filename, body)
            except DataError as e:
                raise HTTPException(status_code=400, detail=str(e)) from None

    @app.get("/api/sessions/{session_id}/data")
    def download_data(session_id: str) -> Response:
        session = get_session(session_id)
        with session.lock:
            text = serialize_csv(session.graph.peek("dataset"))
            name = session.data_filename
        return Response(
            content=text,
            media_type="text/csv",
            headers={"Content-Disposition": f'attachment; filename="{name}"'},
        )

    # -- modules ------------------------------------------------------------

    @app.get("/api/modules")
    def list_modules() -> dict:
        reg: Registry = manager.registry
        nav = []
        for section in nav_structure(reg):
            entries = []
            for m in reg.modules:
                if m.category.capitalize() == section["heading"]:
                    entries.append({"id": m.module_id, "title": m.title})
            nav.append({"heading": section["heading"], "entries": entries})
        return {"nav": nav, "enabled": reg.module_ids()}

    @app.get("/api/sessions/{session_id}/modules/{category}/{name}/ui")
    def module_ui(session_id: str, category: str, name: str) -> dict:
        session = get_session(session_id)
        with session.lock:
            try:
                return session.module_ui(category, name)
            except SessionError as e:
                raise HTTPException(status_code=404, detail=str(e)) from None

    @app.post("/api/sessions/{session_id}/modules/{category}/{name}/store")
    def store_result(session_id: str, category: str, name: str) -> dict:
        session = get_session(session_id)
        with session.lock:
            try:
                length = session.store(category, name)
            except SessionError as e:
                raise HTTPException(status_code=404, detail=str(e)) from None
            except DomainError as e:
                raise HTTPException(status_code=409, detail=str(e)) from None
        return {"script_length": length}

    # -- inputs ---------------------------------------------------------------

    @app.put("/api/sessions/{session_id}/inputs/{input_id}")
    def set_input(session_id: str, input_id: str, body: dict = Body(...)) -> dict:
        if "value" not in body:
            raise HTTPException(status_code=400, detail="body needs a value field")
        session = get_session(session_id)
        with session.lock:
            try:
                return session.set_input_value(input_id, body["value"])
            except SessionError as e:
                raise HTTPException(status_code=404, detail=str(e)) from None
            except DomainError as e:
                raise HTTPException(status_code=400, detail=str(e)) from None

    # -- script and report ------------------------------------------------------

    @app.get("/api/sessions/{session_id}/script")
    def get_script(session_id: str) -> PlainTextResponse:
        session = get_session(session_id)
        with session.lock:
            text = session.script_text()
        return PlainTextResponse(
            content=text,
            headers={"Content-Disposition": 'attachment; filename="analysis.sb"'},
        )

    @app.put("/api/sessions/{session_id}/code-visibility")
    def set_code_visibility(session_id: str, body: dict = Body(...)) -> dict:
        visible = body.get("visible")
        if not isinstance(visible, bool):
            raise HTTPException(status_code=400, detail="body needs boolean visible")
        session = get_session(session_id)
        with session.lock:
            session.set_code_visibility(visible)
            return {"visible": session.code_visible}

    @app.post("/api/sessions/{session_id}/report")
    def render_report(session_id: str) -> dict:
        session = get_session(session_id)
        with session.lock:
            try:
                return session.report_bundle()
            except ScriptEvalError as e:
                # stored statements no longer evaluate against the data
                raise HTTPException(status_code=409, detail=str(e)) from None

    # -- static UI -----------------------------------------------------------

    @app.get("/theme.css")
    def theme_css() -> Response:
        path = THEMES_DIR / f"{config.theme}.css"
        return Response(content=path.read_text(), media_type="text/css")

    @app.get("/", response_class=HTMLResponse)
    def index() -> str:
        if config.ui_dir is not None:
            page = Path(config.ui_dir) / "index.html"
            if page.is_file():
                return page.read_text()
        return FALLBACK_PAGE

    if config.ui_dir is not None and Path(config.ui_dir).is_dir():
        from fastapi.staticfiles import StaticFiles

        app.mount("/assets", StaticFiles(directory=str(config.ui_dir)), name="assets")

    return app
