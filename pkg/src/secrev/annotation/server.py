"""HTTP surface for the annotation service (versioned under /api/v1).

Bearer tokens are issued at session creation; this is a local tool, not an
internet-facing service. The optional ui_dir mounts the built frontend as
static assets at /ui.
"""

import json
from pathlib import Path

from fastapi import Depends, FastAPI, Header, Path as PathParam, Query, Request
from fastapi.responses import JSONResponse, PlainTextResponse
from pydantic import BaseModel, ConfigDict, Field

from secrev.annotation.service import AnnotationService
from secrev.errors import (
    AlreadyLabeled,
    ConflictOfInterest,
    DuplicateAnnotators,
    EmptyItems,
    IncompleteSession,
    InvalidLabel,
    NotDisagreed,
    NotYourSession,
    SecrevError,
    UnknownItem,
)

API_PREFIX = "/api/v1"

STATUS_BY_ERROR = {
    NotYourSession: 403,
    ConflictOfInterest: 403,
    UnknownItem: 404,
    AlreadyLabeled: 409,
    NotDisagreed: 409,
    IncompleteSession: 409,
    EmptyItems: 422,
    DuplicateAnnotators: 422,
    InvalidLabel: 422,
}


class ItemIn(BaseModel):
    model_config = ConfigDict(extra="forbid")
    item_id: str | None = None
    payload: dict = Field(default_factory=dict)
    meta: dict = Field(default_factory=dict)


class CreateSessionIn(BaseModel):
    model_config = ConfigDict(extra="forbid")
    kind: str
    rubric_version: str = "v1"
    annotators: list[str]
    adjudicator: str | None = None
    seed: int | None = None
    items: list[ItemIn]


class LabelIn(BaseModel):
    model_config = ConfigDict(extra="forbid")
    verdict: bool | None = None
    criteria: dict[str, bool] | None = None
    semantic_equivalence: bool | None = None
    applicability: bool | None = None
    note: str = ""
    proposed_keywords: list[str] = Field(default_factory=list)


def create_app(service: AnnotationService) -> FastAPI:
    app = FastAPI(title="secrev annotation service")

    @app.exception_handler(SecrevError)
    async def secrev_error_handler(request: Request, exc: SecrevError):
        status = next((code for cls, code in STATUS_BY_ERROR.items()
                       if isinstance(exc, cls)), 400)
        return JSONResponse(status_code=status,
                            content={"error": type(exc).__name__, "detail": str(exc)})

    def bearer(authorization: str = Header(default="")) -> str:
        if not authorization.startswith("Bearer "):
            raise NotYourSession("missing bearer token")
        return authorization.removeprefix("Bearer ").strip()

    def caller(session_id: str = PathParam(...), token: str = Depends(bearer)):
        return service.authenticate(session_id, token)

    @app.post(API_PREFIX + "/sessions", status_code=201)
    def create_session(body: CreateSessionIn):
        try:
            return service.create_session(
                kind=body.kind,
                items=[item.model_dump() for item in body.items],
                annotator_ids=body.annotators,
                rubric_version=body.rubric_version,
                adjudicator_id=body.adjudicator,
                seed=body.seed,
            )
        except ValueError as exc:
            return JSONResponse(status_code=422,
                                content={"error": "ValueError", "detail": str(exc)})

    @app.get(API_PREFIX + "/sessions/{session_id}")
    def session_summary(auth=Depends(caller)):
        session, role, actor = auth
        summary = {
            "session_id": session.session_id,
            "kind": session.kind,
            "rubric_version": session.rubric_version,
            "n_items": len(session.item_order),
            "role": role,
            "actor": actor,
        }
        if role == "adjudicator":
            summary["annotators"] = list(session.annotators)
        return summary

    @app.get(API_PREFIX + "/sessions/{session_id}/items")
    def annotator_items(auth=Depends(caller)):
        session, role, actor = auth
        if role != "annotator":
            raise NotYourSession("items view is for annotators; use /adjudication")
        return {"items": service.annotator_items(session.session_id, actor)}

    @app.post(API_PREFIX + "/sessions/{session_id}/items/{item_id}/label")
    def submit_label(item_id: str, body: LabelIn, auth=Depends(caller)):
        session, role, actor = auth
        if role != "annotator":
            raise NotYourSession("only annotators submit labels")
        return service.submit_label(session.session_id, actor, item_id,
                                    body.model_dump())

    @app.get(API_PREFIX + "/sessions/{session_id}/adjudication")
    def adjudication_queue(auth=Depends(caller)):
        session, role, actor = auth
        if role != "adjudicator":
            raise ConflictOfInterest("adjudication view requires the adjudicator token")
        return {"items": service.adjudication_queue(session.session_id, actor)}

    @app.post(API_PREFIX + "/sessions/{session_id}/items/{item_id}/adjudicate")
    def adjudicate(item_id: str, body: LabelIn, auth=Depends(caller)):
        session, role, actor = auth
        if role != "adjudicator":
            raise ConflictOfInterest("only the adjudicator resolves disagreements")
        return service.adjudicate(session.session_id, actor, item_id,
                                  body.model_dump())

    @app.get(API_PREFIX + "/sessions/{session_id}/stats")
    def stats(auth=Depends(caller)):
        session, _, _ = auth
        return service.session_stats(session.session_id)

    @app.get(API_PREFIX + "/sessions/{session_id}/export")
    def export(auth=Depends(caller), force: bool = Query(default=False)):
        session, _, _ = auth
        lines = service.export_labels(session.session_id, force=force)
        body = "".join(json.dumps(line, ensure_ascii=False) + "\n" for line in lines)
        return PlainTextResponse(body, media_type="application/x-ndjson")

    return app


def serve(sessions_dir: str | Path, host: str = "127.0.0.1", port: int = 8431,
          ui_dir: str | Path | None = None) -> None:
    """Run the annotation server (the one long-running pipeline command)."""
    import uvicorn

    service = AnnotationService(sessions_dir)
    app = create_app(service)
    if ui_dir is not None and Path(ui_dir).is_dir():
        from fastapi.staticfiles import StaticFiles

        app.mount("/ui", StaticFiles(directory=str(ui_dir), html=True), name="ui")
    uvicorn.run(app, host=host, port=port, log_level="info")
