"""Pydantic request/response models shared by the HTTP service and the CLI."""
from __future__ import annotations

from typing import Literal, Optional

from pydantic import BaseModel, Field


class MapDocument(BaseModel):
    model: Literal["ball", "siegel"]
    n: int = Field(ge=1)
    N: int = Field(ge=1)
    components: list[str]
    name: Optional[str] = None


class PointModel(BaseModel):
    """Boundary point: z components and u as expression strings (exact by default)."""

    z: list[str]
    u: str = "0"


class AutDocument(BaseModel):
    kind: Literal["sigma0", "isotropy"]
    z0: Optional[list[str]] = None
    u0: Optional[str] = None
    lam: Optional[str] = Field(default=None, alias="lambda")
    r: Optional[str] = None
    a: Optional[list[str]] = None
    U: Optional[list[list[str]]] = None

    model_config = {"populate_by_name": True}


class RankRequest(BaseModel):
    map: MapDocument
    points: Optional[list[PointModel]] = None
    samples: int = 5
    seed: int = 0
    rank_tol: float = 1e-6
    order: int = 4


class NormalizeRequest(BaseModel):
    map: MapDocument
    point: Optional[PointModel] = None
    stage: Literal["star2", "star3"] = "star3"
    rank_tol: float = 1e-6
    order: int = 4


class SffRequest(BaseModel):
    map: MapDocument
    points: Optional[list[PointModel]] = None
    samples: int = 3
    seed: int = 0
    vanish_tol: float = 1e-8
    rank_tol: float = 1e-6
    order: int = 4


class FlatRequest(BaseModel):
    map: MapDocument
    samples: int = 20
    seed: int = 0
    vanish_tol: float = 1e-8
    rank_tol: float = 1e-6
    order: int = 4


class FrameRequest(BaseModel):
    map: MapDocument
    points: Optional[list[PointModel]] = None
    samples: int = 1
    seed: int = 0
    kind: Literal["spherical", "general"] = "spherical"
    frame_tol: float = 1e-10
    order: int = 6


class CheckAutRequest(BaseModel):
    automorphism: AutDocument
    tol: float = 1e-12


class ReportResponse(BaseModel):
    command: str
    exit_code: int = 0
    report: dict


class ErrorResponse(BaseModel):
    error: str
    detail: str
    exit_code: int
