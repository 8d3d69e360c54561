"""HTTP API for the triage loop; consumed by the CLI and the web UI.

Endpoints (JSON bodies):

    GET  /campaigns
    GET  /campaigns/{campaign_id}
    GET  /campaigns/{campaign_id}/items?status=pending
    GET  /items/{item_id}
    POST /items/{item_id}/reviews   {reviewer_id, verdict, round, note?, version?}
    GET  /campaigns/{campaign_id}/export
    POST /predict                   {attack_text, threshold_pct?, top_k?}

Review submissions use optimistic concurrency: send the item version you
rendered; a stale version or duplicate vote returns 409, an invalid verdict
422, unknown ids 404.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Literal, Mapping

from fastapi import FastAPI, HTTPException
from fastapi.responses import FileResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from linkforge.embedding.backend import EmbeddingBackendDescriptor, embed_batch
from linkforge.embedding.store import VectorMap
from linkforge.errors import ContractError
from linkforge.similarity import percent_score, rank_and_cut
from linkforge.textprep import clean
from linkforge.triage.service import (
    DuplicateVoteError,
    TriageService,
    UnknownItemError,
    VersionConflictError,
    export_curated,
)


@dataclass
class Predictor:
    """Live what-if scoring against the loaded CVE vector map."""

    backend: EmbeddingBackendDescriptor
    cve_vectors: VectorMap

    def predict(self, attack_text: str, threshold_pct: float, top_k: int | None):
        cleaned = clean(attack_text, source_id="what-if")
        vector = embed_batch([cleaned], self.backend)[0]
        result = rank_and_cut("what-if", vector, self.cve_vectors.vectors, threshold_pct)
        ranked = result.ranked if top_k is None else result.ranked[:top_k]
        return {
            "threshold_pct": threshold_pct,
            "backend_id": self.backend.backend_id,
            "predictions": [
                {
                    "cve_id": cve_id,
                    "score_pct": percent_score(score),
                    "predicted": cve_id in result.predicted,
                }
                for cve_id, score in ranked
            ],
        }


class ReviewBody(BaseModel):
    reviewer_id: str
    verdict: Literal["link", "no_link"]
    round: int = 1
    note: str = ""
    version: int | None = None


class PredictBody(BaseModel):
    attack_text: str
    threshold_pct: float = 58.0
    top_k: int | None = 25


def create_app(
    service: TriageService,
    predictor: Predictor | None = None,
    frontend_dir: str | Path | None = None,
    texts: Mapping[str, str] | None = None,
) -> FastAPI:
    """Build the app. ``texts`` maps entity ids to descriptions; when given,
    item responses carry ``attack_text`` and ``cve_text`` for the two-pane
    reading view."""
    app = FastAPI(title="linkforge triage")

    def item_view(item) -> dict:
        record = item.as_dict()
        if texts is not None:
            record["attack_text"] = texts.get(item.attack_id, "")
            record["cve_text"] = texts.get(item.cve_id, "")
        return record

    @app.get("/campaigns")
    def list_campaigns():
        return [c.as_dict() for c in service.campaigns.values()]

    @app.get("/campaigns/{campaign_id}")
    def get_campaign(campaign_id: str):
        try:
            return service.get_campaign(campaign_id).as_dict()
        except UnknownItemError as exc:
            raise HTTPException(status_code=404, detail=str(exc))

    @app.get("/campaigns/{campaign_id}/items")
    def list_items(campaign_id: str, status: str | None = None):
        try:
            campaign = service.get_campaign(campaign_id)
        except UnknownItemError as exc:
            raise HTTPException(status_code=404, detail=str(exc))
        items = campaign.items_sorted()
        if status:
            items = [i for i in items if i.status == status]
        return [item_view(i) for i in items]

    @app.get("/items/{item_id}")
    def get_item(item_id: str):
        try:
            return item_view(service.get_item(item_id))
        except UnknownItemError as exc:
            raise HTTPException(status_code=404, detail=str(exc))

    @app.post("/items/{item_id}/reviews")
    def post_review(item_id: str, body: ReviewBody):
        try:
            item = service.submit_review(
                item_id=item_id,
                reviewer_id=body.reviewer_id,
                verdict=body.verdict,
                round=body.round,
                note=body.note,
                expected_version=body.version,
            )
        except UnknownItemError as exc:
            raise HTTPException(status_code=404, detail=str(exc))
        except (DuplicateVoteError, VersionConflictError) as exc:
            raise HTTPException(status_code=409, detail=str(exc))
        except ContractError as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        return item_view(item)

    @app.get("/campaigns/{campaign_id}/export")
    def get_export(campaign_id: str):
        try:
            campaign = service.get_campaign(campaign_id)
        except UnknownItemError as exc:
            raise HTTPException(status_code=404, detail=str(exc))
        return export_curated(campaign).as_dict()

    @app.post("/predict")
    def post_predict(body: PredictBody):
        if predictor is None:
            raise HTTPException(status_code=503, detail="no prediction backend configured")
        if not 0.0 <= body.threshold_pct <= 100.0:
            raise HTTPException(status_code=422, detail="threshold_pct must be in [0, 100]")
        return predictor.predict(body.attack_text, body.threshold_pct, body.top_k)

    if frontend_dir is not None and Path(frontend_dir).is_dir():
        frontend = Path(frontend_dir)

        @app.get("/")
        def index():
            return FileResponse(frontend / "index.html")

        app.mount("/ui", StaticFiles(directory=frontend), name="ui")

    return app
