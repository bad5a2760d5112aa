"""Durable append-only persistence for audits, decisions, and leases.

Layout under one data directory (env BLINDAUDIT_DATA_DIR or --data-dir):

    audits/<audit_id>/manifest.json    config, plan, seed, creation time
    audits/<audit_id>/sample.jsonl     sampled documents (documents-file schema)
    audits/<audit_id>/queue.jsonl      blinded items, queue order
    audits/<audit_id>/decisions.jsonl  decision records, append-only
    audits/<audit_id>/leases.jsonl     lease grants, append-only

State is a pure fold over the decision and lease logs, so replaying a
directory from scratch always reproduces the same snapshot. All mutations
serialize through one lock (single-writer commits); each commit is flushed
and fsynced before it is acknowledged. Readers get immutable snapshots.
"""

from __future__ import annotations

import json
import os
import threading
from datetime import datetime, timedelta
from pathlib import Path
from typing import Iterable, Optional, Sequence

from .errors import (
    ConflictError,
    NotFoundError,
    StorageError,
    ValidationError,
)
from dataclasses import replace

from .models import (
    AuditConfig,
    AuditSnapshot,
    BlindedItem,
    ChunkPlan,
    DecisionRecord,
    DocumentRecord,
    LeaseRecord,
    ReviewerKind,
    format_ts,
    parse_ts,
    truncate_ms,
)

# An abandoned review should recycle quickly without racing the item timer,
# so leases default to twice the per-item budget.
LEASE_TTL_FACTOR = 2


def load_documents(path: Path | str) -> list[DocumentRecord]:
    """Read a documents JSONL file (one object per line)."""
    path = Path(path)
    if not path.exists():
        raise StorageError(f"documents file not found: {path}")
    docs = []
    for lineno, line in enumerate(_read_jsonl(path), start=1):
        try:
            docs.append(DocumentRecord.from_dict(line))
        except (KeyError, ValidationError) as exc:
            raise StorageError(f"{path}:{lineno}: bad document record: {exc}") from exc
    return docs


def save_documents(path: Path | str, docs: Iterable[DocumentRecord]) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        for doc in docs:
            fh.write(json.dumps(doc.to_dict(), sort_keys=True) + "\n")


def _read_jsonl(path: Path) -> list[dict]:
    rows: list[dict] = []
    raw_lines = path.read_text(encoding="utf-8").splitlines()
    for index, raw in enumerate(raw_lines):
        if not raw.strip():
            continue
        try:
            rows.append(json.loads(raw))
        except json.JSONDecodeError as exc:
            if index == len(raw_lines) - 1:
                # A torn final line is an uncommitted write; drop it.
                break
            raise StorageError(f"{path}:{index + 1}: corrupt log line") from exc
    return rows


class _AuditState:
    """Mutable in-memory fold of one audit's logs."""

    def __init__(
        self,
        audit_id: str,
        created_at: datetime,
        seed: int,
        config: AuditConfig,
        plan: ChunkPlan,
        queue: Sequence[BlindedItem],
        documents: Sequence[DocumentRecord],
    ):
        self.audit_id = audit_id
        self.created_at = created_at
        self.seed = seed
        self.config = config
        self.plan = plan
        self.queue = tuple(queue)
        self.documents = tuple(documents)
        self.items = {item.item_id: item for item in queue}
        self.item_for_doc = {item.doc_id: item for item in queue}
        self.decisions: list[DecisionRecord] = []
        self.decision_keys: set[tuple[str, str]] = set()
        self.leases: dict[str, LeaseRecord] = {}
        self.lease_history: set[tuple[str, str]] = set()

    def apply_decision(self, record: DecisionRecord) -> None:
        self.decisions.append(record)
        self.decision_keys.add(record.key)

    def apply_lease(self, lease: LeaseRecord) -> None:
        self.leases[lease.item_id] = lease
        self.lease_history.add((lease.item_id, lease.reviewer_id))

    def snapshot(self) -> AuditSnapshot:
        return AuditSnapshot(
            audit_id=self.audit_id,
            created_at=self.created_at,
            seed=self.seed,
            config=self.config,
            plan=self.plan,
            queue=self.queue,
            documents=self.documents,
            decisions=tuple(self.decisions),
            leases=tuple(self.leases.values()),
            lease_history=frozenset(self.lease_history),
        )


class DecisionStore:
    """Append-only audit store rooted at one data directory.

    A data directory must have a single writing process at a time; within the
    process all mutations are serialized by self.lock.
    """

    def __init__(self, root: Path | str, fsync: bool = True):
        self.root = Path(root)
        self.fsync = fsync
        self.lock = threading.RLock()
        self._audits: dict[str, _AuditState] = {}
        (self.root / "audits").mkdir(parents=True, exist_ok=True)

    # -- paths --------------------------------------------------------------

    def _audit_dir(self, audit_id: str) -> Path:
        return self.root / "audits" / audit_id

    # -- audit lifecycle ------------------------------------------------------

    def list_audits(self) -> list[str]:
        return sorted(
            p.name for p in (self.root / "audits").iterdir() if p.is_dir()
        )

    def new_audit_id(self) -> str:
        existing = set(self.list_audits())
        index = len(existing) + 1
        while f"audit-{index:04d}" in existing:
            index += 1
        return f"audit-{index:04d}"

    def create_audit(
        self,
        audit_id: str,
        created_at: datetime,
        seed: int,
        config: AuditConfig,
        plan: ChunkPlan,
        queue: Sequence[BlindedItem],
        documents: Sequence[DocumentRecord],
    ) -> None:
        with self.lock:
            audit_dir = self._audit_dir(audit_id)
            if audit_dir.exists():
                raise ConflictError(f"audit {audit_id!r} already exists")
            audit_dir.mkdir(parents=True)

            documents = [
                replace(doc, received_at=truncate_ms(doc.received_at))
                if doc.received_at is not None
                else doc
                for doc in documents
            ]
            sample_path = audit_dir / "sample.jsonl"
            save_documents(sample_path, documents)
            with open(audit_dir / "queue.jsonl", "w", encoding="utf-8") as fh:
                for item in queue:
                    fh.write(json.dumps(item.to_dict(), sort_keys=True) + "\n")

            created_at = truncate_ms(created_at)
            manifest = {
                "audit_id": audit_id,
                "created_at": format_ts(created_at),
                "seed": seed,
                "config": config.to_dict(),
                "plan": plan.to_dict(),
            }
            tmp = audit_dir / "manifest.json.tmp"
            tmp.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
            tmp.replace(audit_dir / "manifest.json")

            self._audits[audit_id] = _AuditState(
                audit_id, created_at, seed, config, plan, queue, documents
            )

    def _state(self, audit_id: str) -> _AuditState:
        state = self._audits.get(audit_id)
        if state is not None:
            return state
        audit_dir = self._audit_dir(audit_id)
        if not (audit_dir / "manifest.json").exists():
            raise NotFoundError(f"unknown audit {audit_id!r}")
        try:
            manifest = json.loads((audit_dir / "manifest.json").read_text())
        except json.JSONDecodeError as exc:
            raise StorageError(f"corrupt manifest for audit {audit_id!r}") from exc

        state = _AuditState(
            audit_id=manifest["audit_id"],
            created_at=parse_ts(manifest["created_at"]),
            seed=int(manifest["seed"]),
            config=AuditConfig.from_dict(manifest["config"]),
            plan=ChunkPlan.from_dict(manifest["plan"]),
            queue=[
                BlindedItem.from_dict(row)
                for row in _read_jsonl(audit_dir / "queue.jsonl")
            ],
            documents=load_documents(audit_dir / "sample.jsonl"),
        )
        decisions_path = audit_dir / "decisions.jsonl"
        if decisions_path.exists():
            for row in _read_jsonl(decisions_path):
                state.apply_decision(DecisionRecord.from_dict(row))
        leases_path = audit_dir / "leases.jsonl"
        if leases_path.exists():
            for row in _read_jsonl(leases_path):
                state.apply_lease(LeaseRecord.from_dict(row))
        self._audits[audit_id] = state
        return state

    def load_audit(self, audit_id: str) -> AuditSnapshot:
        with self.lock:
            return self._state(audit_id).snapshot()

    # -- commits ----------------------------------------------------------------

    def _commit_lines(self, path: Path, lines: list[str]) -> None:
        with open(path, "a", encoding="utf-8") as fh:
            fh.write("".join(lines))
            fh.flush()
            if self.fsync:
                os.fsync(fh.fileno())

    def _validate_decision(self, state: _AuditState, record: DecisionRecord) -> None:
        if record.audit_id != state.audit_id:
            raise ValidationError(
                f"decision audit_id {record.audit_id!r} does not match {state.audit_id!r}"
            )
        if record.reviewer_kind is ReviewerKind.SME:
            item = state.items.get(record.item_id)
            if item is None:
                raise NotFoundError(f"unknown item {record.item_id!r}")
            if item.doc_id != record.doc_id:
                raise ValidationError(
                    f"item {record.item_id!r} belongs to {item.doc_id!r}, "
                    f"not {record.doc_id!r}"
                )
        else:
            if record.doc_id not in state.item_for_doc:
                raise NotFoundError(
                    f"document {record.doc_id!r} is not in the audit sample"
                )

    def append_decision(self, record: DecisionRecord) -> bool:
        """Store one decision. Returns False (a no-op) when the same
        (item_id, reviewer_id) pair was already stored."""
        stored, _ = self.append_decisions([record])
        return stored == 1

    def append_decisions(
        self, records: Sequence[DecisionRecord]
    ) -> tuple[int, int]:
        """Batch append as a single commit. Returns (stored, duplicates)."""
        if not records:
            return (0, 0)
        audit_ids = {r.audit_id for r in records}
        if len(audit_ids) != 1:
            raise ValidationError("a batch must target exactly one audit")
        with self.lock:
            state = self._state(next(iter(audit_ids)))
            fresh: list[DecisionRecord] = []
            seen: set[tuple[str, str]] = set()
            duplicates = 0
            for record in records:
                self._validate_decision(state, record)
                if record.key in state.decision_keys or record.key in seen:
                    duplicates += 1
                    continue
                seen.add(record.key)
                # Persisted precision is milliseconds; fold the same value.
                fresh.append(
                    replace(record, decided_at=truncate_ms(record.decided_at))
                )
            if fresh:
                self._commit_lines(
                    self._audit_dir(state.audit_id) / "decisions.jsonl",
                    [json.dumps(r.to_dict(), sort_keys=True) + "\n" for r in fresh],
                )
                for record in fresh:
                    state.apply_decision(record)
            return (len(fresh), duplicates)

    def acquire_lease(
        self,
        audit_id: str,
        item_id: str,
        reviewer_id: str,
        ttl_seconds: int,
        now: datetime,
    ) -> Optional[LeaseRecord]:
        """Grant an exclusive review lease, or return None when another
        reviewer's lease is still live. Renewal of one's own lease is allowed.
        """
        if ttl_seconds < 1:
            raise ValidationError("ttl_seconds must be >= 1")
        with self.lock:
            state = self._state(audit_id)
            if item_id not in state.items:
                raise NotFoundError(f"unknown item {item_id!r}")
            if (item_id, reviewer_id) in state.decision_keys:
                raise ConflictError(
                    f"item {item_id!r} already decided by {reviewer_id!r}"
                )
            current = state.leases.get(item_id)
            if (
                current is not None
                and current.reviewer_id != reviewer_id
                and not current.expired(now)
            ):
                return None
            now = truncate_ms(now)
            lease = LeaseRecord(
                item_id=item_id,
                reviewer_id=reviewer_id,
                leased_at=now,
                expires_at=now + timedelta(seconds=ttl_seconds),
            )
            self._commit_lines(
                self._audit_dir(audit_id) / "leases.jsonl",
                [json.dumps(lease.to_dict(), sort_keys=True) + "\n"],
            )
            state.apply_lease(lease)
            return lease
