"""JSON-over-HTTP surface for the audit service (versioned under /v1).

Authentication is a single static token in the X-Audit-Token header,
deliberately minimal and replaceable. The review endpoint returns only
blinded fields plus the lease expiry and time budget; decision-bearing
fields never cross it.
"""

from __future__ import annotations

import json
from typing import Optional

from fastapi import FastAPI, Query, Request, Response
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from .errors import (
    AuditError,
    ForbiddenError,
    IncompleteAuditError,
    InsufficientPoolError,
    NotFoundError,
    ValidationError,
)
from .models import AuditConfig, format_ts
from .service import AuditService
from .store import load_documents


class ConfigBody(BaseModel):
    delta: float
    alpha: float
    beta: float
    p_assumed: float
    chunk_count: int = 12
    per_item_seconds: int = 60


class CreateAuditBody(BaseModel):
    config: ConfigBody
    seed: int = Field(ge=0)
    pool_path: str


class SubmitDecisionBody(BaseModel):
    item_id: str
    reviewer: str
    label: str
    review_seconds: float


def create_app(service: AuditService, token: Optional[str] = None) -> FastAPI:
    app = FastAPI(title="blindaudit", version="1")

    def authorize(request: Request) -> Optional[JSONResponse]:
        if token is not None and request.headers.get("X-Audit-Token") != token:
            return JSONResponse({"error": "invalid or missing token"}, status_code=401)
        return None

    @app.exception_handler(AuditError)
    async def audit_error_handler(_request: Request, exc: AuditError):
        status = 400
        payload: dict = {"error": str(exc)}
        if isinstance(exc, NotFoundError):
            status = 404
        elif isinstance(exc, ForbiddenError):
            status = 403
        elif isinstance(exc, IncompleteAuditError):
            status = 409
            payload["missing_chunks"] = exc.missing_chunks
            payload["missing_model_docs"] = exc.missing_model_docs
        elif isinstance(exc, InsufficientPoolError):
            payload["n_required"] = exc.required
            payload["pool_size"] = exc.available
        elif isinstance(exc, ValidationError):
            status = 400
        return JSONResponse(payload, status_code=status)

    @app.post("/v1/audits")
    def create_audit(body: CreateAuditBody, request: Request):
        denied = authorize(request)
        if denied:
            return denied
        config = AuditConfig(**body.config.model_dump())
        pool = load_documents(body.pool_path)
        audit_id, n = service.create_audit(config, pool, body.seed)
        return {"audit_id": audit_id, "n_required": n}

    @app.get("/v1/audits/{audit_id}/next")
    def next_item(
        audit_id: str, request: Request, reviewer: str = Query(min_length=1)
    ):
        denied = authorize(request)
        if denied:
            return denied
        leased = service.next_item(audit_id, reviewer)
        if leased is None:
            return Response(status_code=204)
        item, lease = leased
        snap = service.snapshot(audit_id)
        body = item.to_dict()
        body["lease_expires_at"] = format_ts(lease.expires_at)
        body["per_item_seconds"] = snap.config.per_item_seconds
        return body

    @app.post("/v1/audits/{audit_id}/decisions")
    def submit_decision(audit_id: str, body: SubmitDecisionBody, request: Request):
        denied = authorize(request)
        if denied:
            return denied
        accepted, timed_out = service.submit_decision(
            audit_id, body.item_id, body.reviewer, body.label, body.review_seconds
        )
        return {"accepted": accepted, "timed_out": timed_out}

    @app.post("/v1/audits/{audit_id}/ingest")
    async def ingest(audit_id: str, request: Request):
        denied = authorize(request)
        if denied:
            return denied
        raw = (await request.body()).decode("utf-8")
        rows = []
        for line in raw.splitlines():
            if line.strip():
                try:
                    rows.append(json.loads(line))
                except json.JSONDecodeError:
                    rows.append({})  # counted as rejected downstream
        counts = service.ingest_decisions(audit_id, rows)
        return counts.to_dict()

    @app.get("/v1/audits/{audit_id}/status")
    def status(audit_id: str, request: Request):
        denied = authorize(request)
        if denied:
            return denied
        return service.status(audit_id).to_dict()

    @app.get("/v1/audits/{audit_id}/report")
    def report(audit_id: str, request: Request, mode: str = "interim"):
        denied = authorize(request)
        if denied:
            return denied
        return service.report(audit_id, mode).to_dict()

    return app
