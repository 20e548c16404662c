"""HTTP surface for the web UI and scripts.

Thin translation layer: requests become engine commands, responses are
mission views. All domain decisions stay in the core; the API maps errors
to status codes (400 validation, 404 unknown mission, 409 sequence
conflict, 413 oversized kickoff edit). Mutations for one mission are
serialized by the engine's command path.
"""

from __future__ import annotations

from pathlib import Path
from typing import Optional

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from . import core
from .engine import Engine, KickoffTooLong
from .messages import KICKOFF, compose
from .store import NotFound, SequenceConflict
from .timeutil import parse_ts
from .transport import WebhookTransport


class CreateMissionBody(BaseModel):
    name: str
    rationale: str = ""
    hashtag: str
    selection_deadline: str
    execution_time: str
    creator: str
    kickoff_text: Optional[str] = None


class IdeaBody(BaseModel):
    author: str
    text: str


class VoteBody(BaseModel):
    author: str
    idea_id: str
    kind: str = "favorite"


class DetailBody(BaseModel):
    author: str
    text: str


class SubscribeBody(BaseModel):
    author: str
    phases: list[str] = Field(default_factory=list)


class CancelBody(BaseModel):
    author: str


def build_app(engine: Engine, ui_dir: Optional[str] = None) -> FastAPI:
    app = FastAPI(title="rallypoint")

    @app.exception_handler(core.MissionError)
    async def _domain_error(request: Request, exc: core.MissionError):
        return JSONResponse(
            status_code=400,
            content={"error": type(exc).__name__, "detail": str(exc)})

    @app.exception_handler(NotFound)
    async def _not_found(request: Request, exc: NotFound):
        return JSONResponse(status_code=404,
                            content={"error": "NotFound", "detail": str(exc)})

    @app.exception_handler(SequenceConflict)
    async def _conflict(request: Request, exc: SequenceConflict):
        return JSONResponse(
            status_code=409,
            content={"error": "SequenceConflict", "detail": str(exc)})

    @app.exception_handler(KickoffTooLong)
    async def _too_long(request: Request, exc: KickoffTooLong):
        return JSONResponse(
            status_code=413,
            content={"error": "KickoffTooLong", "detail": str(exc)})

    @app.exception_handler(ValueError)
    async def _bad_value(request: Request, exc: ValueError):
        return JSONResponse(status_code=400,
                            content={"error": "ValueError",
                                     "detail": str(exc)})

    @app.get("/healthz")
    def healthz():
        return {"status": "ok"}

    @app.post("/missions", status_code=201)
    def create_mission(body: CreateMissionBody):
        spec = core.MissionSpec(
            name=body.name,
            rationale=body.rationale,
            hashtag=body.hashtag,
            selection_deadline=parse_ts(body.selection_deadline),
            execution_time=parse_ts(body.execution_time),
            creator=body.creator,
        )
        mission_id = engine.create_mission(spec, body.kickoff_text)
        view = engine.build_view(mission_id)
        view["suggested_kickoff"] = compose(
            KICKOFF, engine.state_of(mission_id), engine.templates)[0].text
        return view

    @app.get("/missions")
    def list_missions():
        return engine.list_views()

    @app.get("/missions/{mission_id}")
    def mission_view(mission_id: str):
        return engine.build_view(mission_id)

    @app.post("/missions/{mission_id}/ideas")
    def submit_idea(mission_id: str, body: IdeaBody):
        engine.submit_idea(mission_id, body.author, body.text)
        return engine.build_view(mission_id)

    @app.post("/missions/{mission_id}/votes")
    def cast_vote(mission_id: str, body: VoteBody):
        engine.cast_vote(mission_id, body.author, body.idea_id, body.kind)
        return engine.build_view(mission_id)

    @app.post("/missions/{mission_id}/details")
    def add_detail(mission_id: str, body: DetailBody):
        engine.add_detail(mission_id, body.author, body.text)
        return engine.build_view(mission_id)

    @app.post("/missions/{mission_id}/subscribe")
    def subscribe(mission_id: str, body: SubscribeBody):
        phases = [core.Phase(p) for p in body.phases]
        engine.subscribe(mission_id, body.author, phases)
        return engine.build_view(mission_id)

    @app.post("/missions/{mission_id}/cancel")
    def cancel(mission_id: str, body: CancelBody):
        engine.cancel(mission_id, body.author)
        return engine.build_view(mission_id)

    @app.get("/missions/{mission_id}/timeline")
    def timeline(mission_id: str):
        return engine.build_view(mission_id)["timeline"]

    @app.get("/missions/{mission_id}/leaders")
    def leaders(mission_id: str):
        return engine.build_view(mission_id)["leaders"]

    if isinstance(engine.transport, WebhookTransport):
        @app.post("/inbound", status_code=202)
        def inbound(record: dict):
            engine.transport.receive(record)
            applied = engine.ingest()
            return {"accepted": applied}

    if hasattr(engine.transport, "posts"):
        @app.get("/feed")
        def feed():
            # Debug view of the simulated feed's outbound posts.
            return [
                {"post_id": p.post_id, "kind": p.kind, "text": p.text}
                for p in engine.transport.posts
            ]

    if ui_dir and Path(ui_dir).is_dir():
        from fastapi.staticfiles import StaticFiles
        app.mount("/", StaticFiles(directory=ui_dir, html=True), name="ui")

    return app
