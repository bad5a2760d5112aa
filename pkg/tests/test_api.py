import json

import pytest
from fastapi.testclient import TestClient

from blindaudit.api import create_app
from blindaudit.service import AuditService
from blindaudit.store import DecisionStore, save_documents

from conftest import build_pool

NEXT_FIELDS = {
    "item_id",
    "audit_id",
    "doc_id",
    "text",
    "chunk_index",
    "lease_expires_at",
    "per_item_seconds",
}

# Decision-bearing vocabulary that must never cross the review endpoint.
FORBIDDEN_SUBSTRINGS = [
    "label",
    "upstream",
    "model",
    "reviewer_kind",
    "decided_at",
    "review_seconds",
    "timed_out",
    "reportable",
    "sme",
    "gold",
]

SMALL_CONFIG = {
    "delta": 0.15,
    "alpha": 0.05,
    "beta": 0.2,
    "p_assumed": 0.9,
    "chunk_count": 3,
}


@pytest.fixture
def client(tmp_path):
    service = AuditService(DecisionStore(tmp_path / "data", fsync=False))
    return TestClient(create_app(service))


@pytest.fixture
def pool_path(tmp_path):
    path = tmp_path / "pool.jsonl"
    save_documents(path, build_pool(200))
    return str(path)


def create_audit(client, pool_path, config=SMALL_CONFIG, seed=5):
    response = client.post(
        "/v1/audits", json={"config": config, "seed": seed, "pool_path": pool_path}
    )
    assert response.status_code == 200, response.text
    return response.json()


def test_create_audit_endpoint(client, pool_path):
    body = create_audit(client, pool_path)
    assert set(body) == {"audit_id", "n_required"}
    assert body["n_required"] == 63


def test_create_audit_insufficient_pool(client, tmp_path):
    path = tmp_path / "tiny.jsonl"
    save_documents(path, build_pool(10))
    response = client.post(
        "/v1/audits",
        json={"config": SMALL_CONFIG, "seed": 5, "pool_path": str(path)},
    )
    assert response.status_code == 400
    assert response.json()["n_required"] == 63


def test_next_item_schema_and_blinding(client, pool_path):
    audit_id = create_audit(client, pool_path)["audit_id"]
    response = client.get(f"/v1/audits/{audit_id}/next", params={"reviewer": "r1"})
    assert response.status_code == 200
    body = response.json()
    assert set(body) == NEXT_FIELDS
    assert body["per_item_seconds"] == 60
    assert body["chunk_index"] == 0
    raw = response.text.lower()
    for banned in FORBIDDEN_SUBSTRINGS:
        assert banned not in raw, f"{banned!r} leaked into a review response"


def test_next_item_exhaustion_gives_204(client, pool_path):
    audit_id = create_audit(client, pool_path)["audit_id"]
    while True:
        response = client.get(
            f"/v1/audits/{audit_id}/next", params={"reviewer": "r1"}
        )
        if response.status_code == 204:
            break
        item = response.json()
        decided = client.post(
            f"/v1/audits/{audit_id}/decisions",
            json={
                "item_id": item["item_id"],
                "reviewer": "r1",
                "label": "reportable",
                "review_seconds": 12.5,
            },
        )
        assert decided.json() == {"accepted": True, "timed_out": False}


def test_unknown_audit_is_404(client):
    response = client.get("/v1/audits/audit-9999/next", params={"reviewer": "r1"})
    assert response.status_code == 404


def test_decision_endpoint_idempotency_and_timeout(client, pool_path):
    audit_id = create_audit(client, pool_path)["audit_id"]
    item = client.get(
        f"/v1/audits/{audit_id}/next", params={"reviewer": "r1"}
    ).json()
    payload = {
        "item_id": item["item_id"],
        "reviewer": "r1",
        "label": "non_reportable",
        "review_seconds": 75.0,
    }
    first = client.post(f"/v1/audits/{audit_id}/decisions", json=payload)
    assert first.json() == {"accepted": True, "timed_out": True}
    second = client.post(f"/v1/audits/{audit_id}/decisions", json=payload)
    assert second.json() == {"accepted": False, "timed_out": True}


def test_submit_without_lease_is_403(client, pool_path):
    audit_id = create_audit(client, pool_path)["audit_id"]
    response = client.post(
        f"/v1/audits/{audit_id}/decisions",
        json={
            "item_id": "item-00000",
            "reviewer": "stranger",
            "label": "reportable",
            "review_seconds": 5.0,
        },
    )
    assert response.status_code == 403


def test_ingest_endpoint_jsonl(client, pool_path):
    audit_id = create_audit(client, pool_path)["audit_id"]
    status = client.get(f"/v1/audits/{audit_id}/status").json()
    n = sum(status["chunk_sizes"])
    # Look up sampled doc ids through the review queue's own doc_id field.
    lines = []
    item = client.get(f"/v1/audits/{audit_id}/next", params={"reviewer": "probe"}).json()
    lines.append(
        json.dumps(
            {
                "doc_id": item["doc_id"],
                "reviewer_id": "ensemble",
                "reviewer_kind": "model",
                "label": "reportable",
            }
        )
    )
    lines.append(json.dumps({"doc_id": "doc-unsampled", "reviewer_id": "ensemble",
                             "reviewer_kind": "model", "label": "reportable"}))
    lines.append("this is not json")
    response = client.post(
        f"/v1/audits/{audit_id}/ingest", content="\n".join(lines).encode()
    )
    assert response.json() == {"stored": 1, "duplicates": 0, "rejected": 2}
    again = client.post(
        f"/v1/audits/{audit_id}/ingest", content=lines[0].encode()
    )
    assert again.json() == {"stored": 0, "duplicates": 1, "rejected": 0}
    assert n == 63


def test_status_endpoint(client, pool_path):
    audit_id = create_audit(client, pool_path)["audit_id"]
    body = client.get(f"/v1/audits/{audit_id}/status").json()
    assert body["chunk_sizes"] == [21, 21, 21]
    assert body["chunk_done"] == [0, 0, 0]
    assert body["chunks_completed"] == 0


def test_report_final_incomplete_is_409(client, pool_path):
    audit_id = create_audit(client, pool_path)["audit_id"]
    response = client.get(
        f"/v1/audits/{audit_id}/report", params={"mode": "final"}
    )
    assert response.status_code == 409
    assert response.json()["missing_chunks"] == [0, 1, 2]


def test_report_interim_roundtrip(client, pool_path):
    audit_id = create_audit(client, pool_path)["audit_id"]
    item = client.get(
        f"/v1/audits/{audit_id}/next", params={"reviewer": "r1"}
    ).json()
    client.post(
        f"/v1/audits/{audit_id}/decisions",
        json={
            "item_id": item["item_id"],
            "reviewer": "r1",
            "label": "reportable",
            "review_seconds": 30.0,
        },
    )
    row = json.dumps(
        {
            "doc_id": item["doc_id"],
            "reviewer_id": "ensemble",
            "reviewer_kind": "model",
            "label": "reportable",
        }
    )
    client.post(f"/v1/audits/{audit_id}/ingest", content=row.encode())
    body = client.get(
        f"/v1/audits/{audit_id}/report", params={"mode": "interim"}
    ).json()
    assert body["interim"] is True
    assert body["verdict"] in ("equivalent", "demonstrably_different", "inconclusive")
    assert body["difference"] == 0.0


def test_static_token_auth(tmp_path):
    service = AuditService(DecisionStore(tmp_path / "data", fsync=False))
    client = TestClient(create_app(service, token="hunter2"))
    path = tmp_path / "pool.jsonl"
    save_documents(path, build_pool(200))
    denied = client.post(
        "/v1/audits",
        json={"config": SMALL_CONFIG, "seed": 5, "pool_path": str(path)},
    )
    assert denied.status_code == 401
    allowed = client.post(
        "/v1/audits",
        json={"config": SMALL_CONFIG, "seed": 5, "pool_path": str(path)},
        headers={"X-Audit-Token": "hunter2"},
    )
    assert allowed.status_code == 200
