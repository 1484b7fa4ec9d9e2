"""FastAPI surface wrapping the analysis handlers."""
from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from ..errors import CRFlatError
from . import handlers
from .models import (
    CheckAutRequest,
    ErrorResponse,
    FlatRequest,
    FrameRequest,
    NormalizeRequest,
    RankRequest,
    ReportResponse,
    SffRequest,
)

app = FastAPI(
    title="crflat",
    description="Flatness analysis of proper rational CR maps between Heisenberg hypersurfaces",
    version="0.1.0",
)

_HTTP_STATUS = {1: 422, 2: 400, 3: 422, 4: 409}


@app.exception_handler(CRFlatError)
async def crflat_error_handler(_request: Request, exc: CRFlatError) -> JSONResponse:
    payload = ErrorResponse(error=type(exc).__name__, detail=str(exc), exit_code=exc.exit_code)
    return JSONResponse(status_code=_HTTP_STATUS.get(exc.exit_code, 500), content=payload.model_dump())


@app.get("/v1/health")
def health() -> dict:
    return {"status": "ok"}


@app.post("/v1/rank", response_model=ReportResponse)
def rank(req: RankRequest) -> ReportResponse:
    return handlers.handle_rank(req)


@app.post("/v1/normalize", response_model=ReportResponse)
def normalize(req: NormalizeRequest) -> ReportResponse:
    return handlers.handle_normalize(req)


@app.post("/v1/sff", response_model=ReportResponse)
def sff(req: SffRequest) -> ReportResponse:
    return handlers.handle_sff(req)


@app.post("/v1/flat", response_model=ReportResponse)
def flat(req: FlatRequest) -> ReportResponse:
    return handlers.handle_flat(req)


@app.post("/v1/frame", response_model=ReportResponse)
def frame(req: FrameRequest) -> ReportResponse:
    return handlers.handle_frame(req)


@app.post("/v1/check-aut", response_model=ReportResponse)
def check_aut(req: CheckAutRequest) -> ReportResponse:
    return handlers.handle_check_aut(req)
