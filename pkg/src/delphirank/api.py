"""HTTP gateway: JSON documents over the panel service.

Engine and service errors surface as machine-readable bodies::

    {"error": {"code": "ROUND_CLOSED", "message": "..."}}

with the HTTP status derived from the error code: 401 for bad tokens,
404 for unknown entities addressed by the URL, 409 for state conflicts,
400 for everything malformed, 500 for storage trouble. Success bodies
are plain JSON maps in lower_snake_case with full-precision numbers.
"""

from __future__ import annotations

import os

from fastapi import FastAPI, Path, Query, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse, PlainTextResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel, ConfigDict

from .errors import DomainError
from .ranking import Scope
from .sampling import SamplingParams
from .service import PanelService
from .store import PanelStore

_STATUS_BY_CODE = {
    "UNKNOWN_TOKEN": 401,
    "UNKNOWN_PANEL": 404,
    "UNKNOWN_RANKING": 404,
    "UNKNOWN_ROSTER": 404,
    "UNKNOWN_EXPERT": 404,
    "ILLEGAL_TRANSITION": 409,
    "ROUND_CLOSED": 409,
    "ROUND_NOT_OPEN": 409,
    "ROUND_NOT_CLOSED": 409,
    "ROUND_NOT_STARTED": 409,
    "NOT_FINALIZED": 409,
    "DUPLICATE_PANEL": 409,
    "STORAGE_UNAVAILABLE": 500,
    "CORRUPT_RECORD": 500,
}


def _error_body(code: str, message: str) -> dict:
    return {"error": {"code": code, "message": message}}


class ResponseItemPayload(BaseModel):
    model_config = ConfigDict(extra="forbid")

    publisher: str
    known: bool
    disagree: bool = False
    new_score: int | None = None


class SubmitPayload(BaseModel):
    model_config = ConfigDict(extra="forbid")

    items: list[ResponseItemPayload] = []
    suggested_publishers: list[str] = []


class CreatePanelPayload(BaseModel):
    model_config = ConfigDict(extra="forbid")

    field: str
    seed: int
    panel_id: str | None = None
    confidence: float | None = None
    margin: float | None = None
    proportion: float | None = None

    def sampling_params(self) -> SamplingParams | None:
        overrides = {
            key: value
            for key, value in {
                "confidence_z": self.confidence,
                "margin_e": self.margin,
                "proportion_p": self.proportion,
            }.items()
            if value is not None
        }
        return SamplingParams(**overrides) if overrides else None


class ExtendPanelPayload(BaseModel):
    model_config = ConfigDict(extra="forbid")

    extra: int
    seed: int


def build_app(service: PanelService, static_dir: str | None = None) -> FastAPI:
    app = FastAPI(title="delphirank", docs_url=None, redoc_url=None)

    @app.exception_handler(DomainError)
    async def domain_error_handler(request: Request, exc: DomainError):
        status = _STATUS_BY_CODE.get(exc.code, 400)
        return JSONResponse(status_code=status, content=_error_body(exc.code, str(exc)))

    @app.exception_handler(RequestValidationError)
    async def validation_error_handler(request: Request, exc: RequestValidationError):
        return JSONResponse(status_code=400, content=_error_body("MALFORMED", str(exc.errors())))

    # -- imports -----------------------------------------------------------

    @app.post("/api/rankings")
    async def import_ranking(request: Request, field: str, scope: str):
        text = (await request.body()).decode("utf-8")
        ranked = service.import_ranking_csv(text, field, Scope.parse(scope))
        return {
            "field": ranked.field.name,
            "scope": ranked.scope.value,
            "entries": len(ranked.entries),
        }

    @app.post("/api/rosters")
    async def import_roster(request: Request, field: str):
        text = (await request.body()).decode("utf-8")
        roster = service.import_roster_csv(text, field)
        return {"field": field, "subjects": len(roster)}

    @app.get("/api/rankings/{field}/{scope}", response_class=PlainTextResponse)
    def export_ranking(field: str, scope: str):
        return service.ranking_csv(field, Scope.parse(scope))

    # -- panels ------------------------------------------------------------

    @app.post("/api/panels")
    def create_panel(payload: CreatePanelPayload):
        panel = service.create_panel(
            field_name=payload.field,
            seed=payload.seed,
            params=payload.sampling_params(),
            panel_id=payload.panel_id,
        )
        return service.panel_summary(panel)

    @app.get("/api/panels")
    def list_panels():
        return {"panels": [service.panel_summary(p) for p in service.list_panels()]}

    @app.get("/api/panels/{panel_id}")
    def panel_detail(panel_id: str):
        return service.panel_summary(service.get_panel(panel_id))

    @app.post("/api/panels/{panel_id}/extend")
    def extend_panel(panel_id: str, payload: ExtendPanelPayload):
        panel = service.extend_panel(panel_id, payload.extra, payload.seed)
        return service.panel_summary(panel)

    @app.post("/api/panels/{panel_id}/rounds/{round_index}/open")
    def open_round(panel_id: str, round_index: int = Path(ge=1, le=2)):
        return service.panel_summary(service.open_round(panel_id, round_index))

    @app.post("/api/panels/{panel_id}/rounds/{round_index}/close")
    def close_round(panel_id: str, round_index: int = Path(ge=1, le=2)):
        return service.panel_summary(service.close_round(panel_id, round_index))

    @app.post("/api/panels/{panel_id}/finalize")
    def finalize(panel_id: str):
        service.finalize(panel_id)
        return service.finals_document(panel_id)

    # -- expert questionnaire ----------------------------------------------

    @app.get("/api/q/{token}")
    def questionnaire(token: str):
        return service.questionnaire_for_token(token)

    @app.post("/api/q/{token}")
    def submit(token: str, payload: SubmitPayload):
        return service.submit_response(
            token,
            items=[item.model_dump() for item in payload.items],
            suggested_publishers=payload.suggested_publishers,
        )

    # -- results and analytics ----------------------------------------------

    @app.get("/api/panels/{panel_id}/aggregates")
    def aggregates(panel_id: str, round: int = Query(ge=1, le=2)):
        return service.aggregates_document(panel_id, round)

    @app.get("/api/panels/{panel_id}/final")
    def final(panel_id: str):
        return service.finals_document(panel_id)

    @app.get("/api/panels/{panel_id}/final.csv", response_class=PlainTextResponse)
    def final_csv(panel_id: str):
        return service.final_csv(panel_id)

    @app.get("/api/panels/{panel_id}/analytics")
    def analytics(panel_id: str):
        return service.analytics_document(panel_id)

    @app.get("/api/panels/{panel_id}/response-rates")
    def response_rates(panel_id: str):
        return service.response_rates_document(panel_id)

    @app.get("/api/panels/{panel_id}/nonrespondents")
    def nonrespondents(panel_id: str, round: int = Query(ge=1, le=2)):
        return service.nonrespondents_document(panel_id, round)

    if static_dir and os.path.isdir(static_dir):
        app.mount("/", StaticFiles(directory=static_dir, html=True), name="webui")

    return app


def create_app(store_path: str, static_dir: str | None = None) -> FastAPI:
    """Open (or create) the store at the given path and build the app."""
    return build_app(PanelService(PanelStore(store_path)), static_dir)
