#!/usr/bin/env python3
"""Record real audit-service responses as JSON fixtures for the UI tests.

Builds a small audit over a labeled pool, loads the store with model,
upstream, and gold decisions (the worst case for a blinding leak), then
captures next-item, status, and decision responses exactly as the wire
returns them.
"""

import json
import sys
from datetime import datetime, timedelta, timezone
from pathlib import Path

from fastapi.testclient import TestClient

from blindaudit.api import create_app
from blindaudit.models import DocumentRecord, Label
from blindaudit.service import AuditService
from blindaudit.store import DecisionStore, save_documents

FIXTURES = Path(__file__).resolve().parent.parent / "test" / "fixtures"


def build_pool(count):
    docs = []
    for i in range(count):
        docs.append(
            DocumentRecord(
                doc_id=f"doc-{i:05d}",
                text=(
                    f"specimen narrative {i}: excisional biopsy, margins clear; "
                    "microscopic description follows in section B"
                ),
                upstream_label=Label.REPORTABLE if i % 3 else Label.NON_REPORTABLE,
                received_at=datetime(2026, 1, 1, tzinfo=timezone.utc)
                + timedelta(minutes=i),
            )
        )
    return docs


def main(tmp_root: Path):
    service = AuditService(DecisionStore(tmp_root / "data", fsync=False))
    client = TestClient(create_app(service))

    pool_path = tmp_root / "pool.jsonl"
    save_documents(pool_path, build_pool(200))
    created = client.post(
        "/v1/audits",
        json={
            "config": {
                "delta": 0.15,
                "alpha": 0.05,
                "beta": 0.2,
                "p_assumed": 0.9,
                "chunk_count": 3,
            },
            "seed": 2026,
            "pool_path": str(pool_path),
        },
    ).json()
    audit_id = created["audit_id"]

    snap = service.snapshot(audit_id)
    for kind, reviewer in (("model", "ensemble"), ("upstream", "rule-engine"),
                           ("gold", "adjudicator")):
        rows = [
            {
                "doc_id": item.doc_id,
                "reviewer_id": reviewer,
                "reviewer_kind": kind,
                "label": "reportable" if i % 2 else "non_reportable",
            }
            for i, item in enumerate(snap.queue)
        ]
        body = "\n".join(json.dumps(r) for r in rows)
        client.post(f"/v1/audits/{audit_id}/ingest", content=body.encode())

    next_bodies = []
    for reviewer in ("sme-alpha", "sme-beta", "sme-gamma", "sme-delta"):
        response = client.get(
            f"/v1/audits/{audit_id}/next", params={"reviewer": reviewer}
        )
        next_bodies.append(response.json())

    first = next_bodies[0]
    submit_ok = client.post(
        f"/v1/audits/{audit_id}/decisions",
        json={
            "item_id": first["item_id"],
            "reviewer": "sme-alpha",
            "label": "reportable",
            "review_seconds": 41.2,
        },
    ).json()
    submit_dup = client.post(
        f"/v1/audits/{audit_id}/decisions",
        json={
            "item_id": first["item_id"],
            "reviewer": "sme-alpha",
            "label": "reportable",
            "review_seconds": 41.2,
        },
    ).json()
    status = client.get(f"/v1/audits/{audit_id}/status").json()

    FIXTURES.mkdir(parents=True, exist_ok=True)
    (FIXTURES / "next_items.json").write_text(json.dumps(next_bodies, indent=2))
    (FIXTURES / "status.json").write_text(json.dumps(status, indent=2))
    (FIXTURES / "submit_accepted.json").write_text(json.dumps(submit_ok, indent=2))
    (FIXTURES / "submit_duplicate.json").write_text(json.dumps(submit_dup, indent=2))
    print(f"fixtures written to {FIXTURES}")


if __name__ == "__main__":
    import tempfile

    with tempfile.TemporaryDirectory() as tmp:
        main(Path(tmp))
