from __future__ import annotations

import sys
from datetime import datetime, timedelta, timezone
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from blindaudit.models import DocumentRecord, Label
from blindaudit.service import AuditService
from blindaudit.store import DecisionStore


def build_pool(count: int, with_upstream: bool = True) -> list[DocumentRecord]:
    """Synthetic document pool. Texts avoid every blinding-forbidden substring
    so wire assertions can scan raw response bytes."""
    docs = []
    for i in range(count):
        upstream = None
        if with_upstream:
            upstream = Label.REPORTABLE if i % 3 else Label.NON_REPORTABLE
        docs.append(
            DocumentRecord(
                doc_id=f"doc-{i:05d}",
                text=f"specimen narrative {i}: tissue section, margins clear",
                upstream_label=upstream,
                received_at=datetime(2026, 1, 1, tzinfo=timezone.utc)
                + timedelta(minutes=i),
            )
        )
    return docs


class FakeClock:
    """Deterministic clock for lease-expiry and timestamp tests."""

    def __init__(self, start: datetime | None = None):
        self.now = start or datetime(2026, 3, 1, 9, 0, 0, tzinfo=timezone.utc)

    def __call__(self) -> datetime:
        return self.now

    def advance(self, seconds: float) -> None:
        self.now += timedelta(seconds=seconds)


@pytest.fixture
def pool():
    return build_pool(200)


@pytest.fixture
def clock():
    return FakeClock()


@pytest.fixture
def make_service(tmp_path, clock):
    """Service factory over a fresh store; fsync off for test speed."""

    def _make(subdir: str = "data") -> AuditService:
        return AuditService(DecisionStore(tmp_path / subdir, fsync=False), clock=clock)

    return _make
