"""FastAPI application exposing the voting library."""

from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .. import __version__
from ..errors import ProtocolError
from . import api, schemas


def create_app() -> FastAPI:
    app = FastAPI(
        title="receiptvote",
        version=__version__,
        description=(
            "Receipt-based verifiable voting: run simulated elections, verify "
            "receipts against the published board, audit counts, replay the "
            "trusted-authority checks and analyze coercion leakage."
        ),
    )

    @app.exception_handler(api.ServiceError)
    async def service_error_handler(_: Request, exc: api.ServiceError) -> JSONResponse:
        return JSONResponse(
            status_code=exc.http_status,
            content={"detail": {"code": exc.code, "message": exc.message}},
        )

    @app.exception_handler(ProtocolError)
    async def protocol_error_handler(_: Request, exc: ProtocolError) -> JSONResponse:
        return JSONResponse(
            status_code=422,
            content={"detail": {"code": api.CODE_BAD_REQUEST, "message": str(exc)}},
        )

    @app.get("/health", response_model=schemas.HealthResponse)
    def health() -> schemas.HealthResponse:
        return api.health()

    @app.post("/scenario/run", response_model=schemas.RunResponse)
    def run(request: schemas.RunRequest) -> schemas.RunResponse:
        return api.run(request)

    @app.post("/receipt/verify", response_model=schemas.VerifyReceiptResponse)
    def verify_receipt(request: schemas.VerifyReceiptRequest) -> schemas.VerifyReceiptResponse:
        return api.verify_receipt(request)

    @app.post("/board/audit", response_model=schemas.AuditResponse)
    def audit(request: schemas.AuditRequest) -> schemas.AuditResponse:
        return api.audit(request)

    @app.post("/board/render", response_model=schemas.RenderBoardResponse)
    def render_board(request: schemas.RenderBoardRequest) -> schemas.RenderBoardResponse:
        return api.render_board(request)

    @app.post("/authority/check", response_model=schemas.AuthorityCheckResponse)
    def authority_check(request: schemas.AuthorityCheckRequest) -> schemas.AuthorityCheckResponse:
        return api.authority_check(request)

    @app.post("/coercion/analyze", response_model=schemas.CoercionResponse)
    def coercion(request: schemas.CoercionRequest) -> schemas.CoercionResponse:
        return api.coercion(request)

    @app.post("/complaint/file", response_model=schemas.ComplaintResponse)
    def complaint(request: schemas.ComplaintRequest) -> schemas.ComplaintResponse:
        return api.complaint(request)

    return app


app = create_app()
