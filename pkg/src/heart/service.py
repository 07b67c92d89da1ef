"""Stateless HTTP service exposing the pipeline.

Endpoints:

* ``POST /api/timeline`` — annotated XML in, complete view JSON out.
* ``POST /api/render`` — annotated XML in, SVG out.
* ``GET /api/health`` — liveness probe.
* ``GET /`` — the browser viewer bundle, when one is installed.

Responses for a given body and configuration are byte-identical to the
CLI's output for the same input: both call the same pipeline and the
same canonical serializers.  Documents are processed in memory and never
stored.
"""

from __future__ import annotations

import datetime as dt
import os
from dataclasses import dataclass
from pathlib import Path

from fastapi import FastAPI, Query, Request, Response
from fastapi.responses import PlainTextResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel, Field

from .layout import LayoutConfig
from .model import Diagnostic, DocumentError, Severity
from .pipeline import process_document, svg_text, view_json
from .temporal import LocaleTable, default_locale_table
from .view import canonical_json

DEFAULT_LISTEN = "127.0.0.1:8787"
DEFAULT_MAX_BODY_BYTES = 1024 * 1024


@dataclass(frozen=True)
class ServiceConfig:
    """Startup configuration; read once, immutable afterwards."""

    host: str = "127.0.0.1"
    port: int = 8787
    spacing: str = "ordinal"
    show_empty_dct: bool = False
    locale_table_path: str | None = None
    static_dir: str | None = None
    max_body_bytes: int = DEFAULT_MAX_BODY_BYTES

    @staticmethod
    def from_env(env: dict | None = None) -> "ServiceConfig":
        env = dict(os.environ) if env is None else env
        listen = env.get("HEART_LISTEN", DEFAULT_LISTEN)
        host, _, port_text = listen.rpartition(":")
        try:
            port = int(port_text)
        except ValueError as exc:
            raise ValueError(f"HEART_LISTEN must look like host:port, got {listen!r}") from exc
        return ServiceConfig(
            host=host or "127.0.0.1",
            port=port,
            locale_table_path=env.get("HEART_LOCALE_TABLE"),
            static_dir=env.get("HEART_STATIC_DIR"),
        )


class DiagnosticPayload(BaseModel):
    """One parser/inference diagnostic as serialized in error responses."""

    severity: str = Field(examples=["error"])
    code: str = Field(examples=["bad-dct"])
    message: str
    location: int | None = None


class DiagnosticsResponse(BaseModel):
    """Body of every 4xx produced by document processing."""

    diagnostics: list[DiagnosticPayload]


def _diagnostics_response(diagnostics: list[Diagnostic], status: int = 400) -> Response:
    payload = DiagnosticsResponse(
        diagnostics=[DiagnosticPayload(**d.to_json_dict()) for d in diagnostics]
    )
    return Response(
        content=canonical_json(payload.model_dump()),
        status_code=status,
        media_type="application/json",
    )


def _single_error(code: str, message: str, status: int = 400) -> Response:
    return _diagnostics_response([Diagnostic(Severity.ERROR, code, message)], status)


def create_app(config: ServiceConfig | None = None) -> FastAPI:
    config = config or ServiceConfig()
    locale_table = (
        LocaleTable.from_path(config.locale_table_path)
        if config.locale_table_path
        else default_locale_table()
    )

    app = FastAPI(
        title="heart timeline service",
        description="Turns annotated clinical documents into chronological timeline views.",
        version="0.1.0",
    )

    async def _read_body(request: Request) -> bytes | Response:
        declared = request.headers.get("content-length")
        if declared is not None and declared.isdigit() and int(declared) > config.max_body_bytes:
            return _single_error("oversized", f"request body exceeds {config.max_body_bytes} bytes", 413)
        body = await request.body()
        if len(body) > config.max_body_bytes:
            return _single_error("oversized", f"request body exceeds {config.max_body_bytes} bytes", 413)
        return body

    def _run(
        body: bytes,
        dct: str | None,
        spacing: str | None,
        show_empty_dct: bool | None,
    ):
        try:
            xml_text = body.decode("utf-8")
        except UnicodeDecodeError as exc:
            return None, _single_error("encoding", f"request body is not valid UTF-8: {exc}")
        dct_value = None
        if dct:
            try:
                dct_value = dt.date.fromisoformat(dct)
            except ValueError:
                return None, _single_error("bad-dct", f"dct query parameter is not an ISO date: {dct!r}")
        requested_spacing = spacing or config.spacing
        if requested_spacing not in ("ordinal", "proportional"):
            return None, _single_error("bad-spacing", f"spacing must be ordinal or proportional, got {requested_spacing!r}")
        layout_config = LayoutConfig(
            spacing=requested_spacing,
            show_empty_dct=config.show_empty_dct if show_empty_dct is None else show_empty_dct,
        )
        try:
            result = process_document(
                xml_text,
                dct=dct_value,
                locale_table=locale_table,
                layout_config=layout_config,
            )
        except DocumentError as exc:
            return None, _diagnostics_response(exc.diagnostics)
        return result, None

    @app.post(
        "/api/timeline",
        responses={
            200: {"description": "heart-view/1 JSON for the document"},
            400: {"model": DiagnosticsResponse},
            413: {"model": DiagnosticsResponse},
        },
    )
    async def timeline_endpoint(
        request: Request,
        dct: str | None = Query(default=None, description="override document creation time (ISO date)"),
        spacing: str | None = Query(default=None, description="ordinal or proportional"),
        showEmptyDct: bool | None = Query(default=None),
    ) -> Response:
        body = await _read_body(request)
        if isinstance(body, Response):
            return body
        result, err = _run(body, dct, spacing, showEmptyDct)
        if err is not None:
            return err
        return Response(content=view_json(result), media_type="application/json")

    @app.post(
        "/api/render",
        responses={
            200: {"content": {"image/svg+xml": {}}, "description": "rendered SVG"},
            400: {"model": DiagnosticsResponse},
            413: {"model": DiagnosticsResponse},
        },
    )
    async def render_endpoint(
        request: Request,
        dct: str | None = Query(default=None),
        spacing: str | None = Query(default=None),
        showEmptyDct: bool | None = Query(default=None),
    ) -> Response:
        body = await _read_body(request)
        if isinstance(body, Response):
            return body
        result, err = _run(body, dct, spacing, showEmptyDct)
        if err is not None:
            return err
        return Response(content=svg_text(result), media_type="image/svg+xml")

    @app.get("/api/health")
    async def health() -> PlainTextResponse:
        return PlainTextResponse("ok")

    static_dir = config.static_dir or str(Path.cwd() / "frontend" / "dist")
    if Path(static_dir).is_dir():
        app.mount("/", StaticFiles(directory=static_dir, html=True), name="viewer")
    else:
        @app.get("/", include_in_schema=False)
        async def index() -> PlainTextResponse:
            return PlainTextResponse(
                "heart timeline service\n\nPOST annotated XML to /api/timeline or /api/render.\n"
            )

    return app


def run(config: ServiceConfig | None = None) -> None:  # pragma: no cover - thin uvicorn wrapper
    import uvicorn

    config = config or ServiceConfig.from_env()
    uvicorn.run(create_app(config), host=config.host, port=config.port, log_level="info")
