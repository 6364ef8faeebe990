"""HTTP review service for the expert curation workflows.

Endpoints (JSON bodies unless noted):
  POST /sessions                    {mode, seed, variant?, subset?, sample_ids?, pred_dir?}
  GET  /sessions                    all sessions with progress
  GET  /sessions/{id}               session status + progress
  GET  /sessions/{id}/next          pending item view (never carries provenance)
  GET  /sessions/{id}/items         per-item status; provenance only after decision
  GET  /items/{id}/overlay/{side}.png?alpha=&classes=   composite PNG
  GET  /items/{id}/photo.png        the sample photograph
  POST /items/{id}/decision         {choice, reviewer, override?}
  POST /sessions/{id}/apply         {variant_name, allow_partial?}
  GET  /healthz
"""

from __future__ import annotations

import io
import logging
from pathlib import Path

from fastapi import FastAPI, HTTPException, Response
from PIL import Image
from pydantic import BaseModel

from .errors import ConflictError, ValidationFailure
from .maskio import render_overlay
from .store import MODES, AdjudicationItem, AdjudicationSession, CurationStore

log = logging.getLogger(__name__)


class CreateSessionRequest(BaseModel):
    mode: str
    seed: int = 0
    variant: str = "original"
    subset: str | None = None
    sample_ids: list[str] | None = None
    pred_dir: str | None = None


class SessionView(BaseModel):
    session_id: str
    mode: str
    status: str
    created_at: str
    seed: int
    base_variant: str
    applied_variant: str
    total: int
    decided: int


class PendingItemView(BaseModel):
    """Blinded item view: by schema it cannot carry provenance fields."""

    item_id: str
    sample_id: str
    index: int
    mode: str
    total: int
    decided: int
    photo: str
    overlay_a: str
    overlay_b: str


class SessionCompleteView(BaseModel):
    session_id: str
    complete: bool = True
    total: int
    decided: int


class DecisionRequest(BaseModel):
    choice: str
    reviewer: str = ""
    override: bool = False


class DecidedItemView(BaseModel):
    item_id: str
    sample_id: str
    index: int
    decision: str
    reviewer: str
    decided_at: str
    provenance: dict[str, str]


class ItemStatusView(BaseModel):
    item_id: str
    sample_id: str
    index: int
    decision: str
    provenance: dict[str, str] | None = None  # revealed once decided


class ApplyRequest(BaseModel):
    variant_name: str
    allow_partial: bool = False


class ApplyResult(BaseModel):
    session_id: str
    variant: str
    samples_written: int
    decided: int
    total: int


def _session_view(store: CurationStore, session: AdjudicationSession) -> SessionView:
    decided, total = store.progress(session)
    return SessionView(
        session_id=session.session_id, mode=session.mode, status=session.status,
        created_at=session.created_at, seed=session.seed,
        base_variant=session.base_variant, applied_variant=session.applied_variant,
        total=total, decided=decided,
    )


def _item_provenance(item: AdjudicationItem) -> dict[str, str]:
    return {"a": item.option_a.provenance(), "b": item.option_b.provenance()}


def create_app(store: CurationStore) -> FastAPI:
    app = FastAPI(title="crosscut curation service")

    @app.get("/healthz")
    def healthz():
        return {"status": "ok"}

    @app.post("/sessions", response_model=SessionView)
    def create_session(req: CreateSessionRequest):
        if req.mode not in MODES:
            raise HTTPException(400, f"mode must be one of {MODES}")
        try:
            session = store.create_session(
                mode=req.mode, seed=req.seed, base_variant=req.variant,
                subset=req.subset, sample_ids=req.sample_ids, pred_dir=req.pred_dir,
            )
        except ValidationFailure as exc:
            raise HTTPException(400, str(exc))
        return _session_view(store, session)

    @app.get("/sessions", response_model=list[SessionView])
    def list_sessions():
        return [_session_view(store, s) for s in store.sessions.values()]

    @app.get("/sessions/{session_id}", response_model=SessionView)
    def get_session(session_id: str):
        try:
            return _session_view(store, store.session(session_id))
        except KeyError:
            raise HTTPException(404, f"unknown session {session_id}")

    @app.get("/sessions/{session_id}/next",
             response_model=PendingItemView | SessionCompleteView)
    def next_item(session_id: str):
        try:
            session = store.session(session_id)
        except KeyError:
            raise HTTPException(404, f"unknown session {session_id}")
        item = store.next_item(session_id)
        decided, total = store.progress(session)
        if item is None:
            return SessionCompleteView(session_id=session_id, total=total, decided=decided)
        return PendingItemView(
            item_id=item.item_id, sample_id=item.sample_id, index=item.index,
            mode=session.mode, total=total, decided=decided,
            photo=f"/items/{item.item_id}/photo.png",
            overlay_a=f"/items/{item.item_id}/overlay/a.png",
            overlay_b=f"/items/{item.item_id}/overlay/b.png",
        )

    @app.get("/sessions/{session_id}/items", response_model=list[ItemStatusView])
    def session_items(session_id: str):
        try:
            session = store.session(session_id)
        except KeyError:
            raise HTTPException(404, f"unknown session {session_id}")
        out = []
        for item_id in session.item_ids:
            item = store.items[item_id]
            out.append(ItemStatusView(
                item_id=item.item_id, sample_id=item.sample_id, index=item.index,
                decision=item.decision,
                provenance=_item_provenance(item) if not item.pending else None,
            ))
        return out

    @app.post("/items/{item_id}/decision", response_model=DecidedItemView)
    def submit_decision(item_id: str, req: DecisionRequest):
        try:
            item = store.submit_decision(item_id, req.choice, req.reviewer, req.override)
        except KeyError:
            raise HTTPException(404, f"unknown item {item_id}")
        except ValidationFailure as exc:
            raise HTTPException(400, str(exc))
        except ConflictError as exc:
            raise HTTPException(409, str(exc))
        return DecidedItemView(
            item_id=item.item_id, sample_id=item.sample_id, index=item.index,
            decision=item.decision, reviewer=item.reviewer, decided_at=item.decided_at,
            provenance=_item_provenance(item),
        )

    def _load_photo(item: AdjudicationItem) -> Image.Image:
        sample = store.manifest.sample(item.sample_id)
        path = Path(sample.image)
        if not path.is_absolute():
            path = store.image_root / path
        if not path.is_file():
            raise HTTPException(404, f"photo for sample {sample.sample_id} not found")
        return Image.open(path).convert("RGB")

    @app.get("/items/{item_id}/photo.png")
    def item_photo(item_id: str):
        if item_id not in store.items:
            raise HTTPException(404, f"unknown item {item_id}")
        photo = _load_photo(store.items[item_id])
        buf = io.BytesIO()
        photo.save(buf, format="PNG")
        return Response(content=buf.getvalue(), media_type="image/png")

    @app.get("/items/{item_id}/overlay/{side}.png")
    def item_overlay(item_id: str, side: str, alpha: float = 0.5, classes: str = ""):
        if item_id not in store.items:
            raise HTTPException(404, f"unknown item {item_id}")
        if side not in ("a", "b"):
            raise HTTPException(404, "overlay side must be a or b")
        item = store.items[item_id]
        ref = item.option_a if side == "a" else item.option_b
        try:
            mask = store.resolve_option(item, ref)
            class_filter = None
            if classes:
                class_filter = {int(c) for c in classes.split(",") if c.strip()}
            overlay = render_overlay(_load_photo(item), mask, alpha, class_filter)
        except ValidationFailure as exc:
            raise HTTPException(400, str(exc))
        buf = io.BytesIO()
        overlay.save(buf, format="PNG")
        return Response(content=buf.getvalue(), media_type="image/png")

    @app.post("/sessions/{session_id}/apply", response_model=ApplyResult)
    def apply_session(session_id: str, req: ApplyRequest):
        try:
            result = store.apply_decisions(session_id, req.variant_name, req.allow_partial)
        except KeyError:
            raise HTTPException(404, f"unknown session {session_id}")
        except ValidationFailure as exc:
            raise HTTPException(400, str(exc))
        except ConflictError as exc:
            raise HTTPException(409, str(exc))
        return ApplyResult(**result)

    return app
