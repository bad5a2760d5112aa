"""Audit lifecycle orchestration: create, serve blinded items, collect decisions.

This is the transport-agnostic core behind both the HTTP API and the CLI.
Items are served chunk by chunk: chunk k+1 opens only once every item of
chunk k has an SME decision, which realizes the one-chunk-per-period cadence
without any calendar logic. The per-item time budget is advisory: late
submissions are accepted but flagged timed_out, because silently discarding
expert labels would bias the audit.
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import datetime
from typing import Callable, Optional, Sequence

from . import planning, stats
from .errors import (
    DegenerateDesignError,
    ForbiddenError,
    IncompleteAuditError,
    NotFoundError,
    ValidationError,
)
from .models import (
    AuditConfig,
    AuditSnapshot,
    BlindedItem,
    DecisionRecord,
    DocumentRecord,
    EquivalenceReport,
    InterimSummary,
    LeaseRecord,
    ReviewerKind,
    parse_label,
    parse_ts,
    utc_now,
)
from .reports import build_equivalence_report, labels_by_doc
from .store import LEASE_TTL_FACTOR, DecisionStore

INGESTIBLE_KINDS = (ReviewerKind.MODEL, ReviewerKind.UPSTREAM, ReviewerKind.GOLD)


@dataclass(frozen=True)
class IngestCounts:
    stored: int
    duplicates: int
    rejected: int

    def to_dict(self) -> dict:
        return {
            "stored": self.stored,
            "duplicates": self.duplicates,
            "rejected": self.rejected,
        }


class AuditService:
    def __init__(
        self, store: DecisionStore, clock: Callable[[], datetime] = utc_now
    ):
        self.store = store
        self.clock = clock

    # -- creation ---------------------------------------------------------

    def create_audit(
        self, config: AuditConfig, pool: Sequence[DocumentRecord], seed: int
    ) -> tuple[str, int]:
        """Size the audit, draw and blind the sample, persist everything.

        Returns (audit_id, required_n). The draw is deterministic for a fixed
        (pool order, seed), so a recreated audit has an identical queue.
        """
        n = stats.sample_size(config.delta, config.p_assumed, config.alpha, config.beta)
        if n == 0:
            raise DegenerateDesignError(
                "computed sample size is 0 (p_assumed = 1 leaves nothing to audit)"
            )
        sample = planning.draw_sample(pool, n, seed)
        plan = planning.partition_chunks(n, config.chunk_count)
        with self.store.lock:
            audit_id = self.store.new_audit_id()
            queue = planning.build_blinded_queue(audit_id, sample, plan)
            self.store.create_audit(
                audit_id=audit_id,
                created_at=self.clock(),
                seed=seed,
                config=config,
                plan=plan,
                queue=queue,
                documents=sample,
            )
        return audit_id, n

    # -- review workflow -----------------------------------------------------

    def next_item(
        self, audit_id: str, reviewer_id: str
    ) -> Optional[tuple[BlindedItem, LeaseRecord]]:
        """Lease the next undecided item from the lowest incomplete chunk.

        Returns None when no item is currently available to this reviewer
        (everything decided, or all remaining items leased out).
        """
        if not reviewer_id:
            raise ValidationError("reviewer_id must be non-empty")
        now = self.clock()
        with self.store.lock:
            snap = self.store.load_audit(audit_id)
            decided = self._decided_items(snap)
            active_chunk = self._lowest_incomplete_chunk(snap, decided)
            if active_chunk is None:
                return None
            live_leases = {
                lease.item_id: lease
                for lease in snap.leases
                if not lease.expired(now)
            }
            for item in snap.queue:
                if item.chunk_index != active_chunk or item.item_id in decided:
                    continue
                lease = live_leases.get(item.item_id)
                if lease is not None and lease.reviewer_id != reviewer_id:
                    continue
                granted = self.store.acquire_lease(
                    audit_id,
                    item.item_id,
                    reviewer_id,
                    ttl_seconds=snap.config.per_item_seconds * LEASE_TTL_FACTOR,
                    now=now,
                )
                if granted is not None:
                    return item, granted
            return None

    def submit_decision(
        self,
        audit_id: str,
        item_id: str,
        reviewer_id: str,
        label: str,
        review_seconds: float,
    ) -> tuple[bool, bool]:
        """Record an SME decision. Returns (accepted, timed_out).

        The reviewer must hold or have held a lease on the item. Duplicate
        submissions, and submissions for an item another SME already decided,
        return accepted=False without altering the store.
        """
        decided_label = parse_label(label)
        if review_seconds < 0:
            raise ValidationError("review_seconds must be non-negative")
        with self.store.lock:
            snap = self.store.load_audit(audit_id)
            items = snap.item_by_id()
            if item_id not in items:
                raise NotFoundError(f"unknown item {item_id!r}")
            if (item_id, reviewer_id) not in snap.lease_history:
                raise ForbiddenError(
                    f"reviewer {reviewer_id!r} never held a lease on {item_id!r}"
                )
            timed_out = review_seconds > snap.config.per_item_seconds
            already_decided = any(
                d.item_id == item_id and d.reviewer_kind is ReviewerKind.SME
                for d in snap.decisions
            )
            if already_decided:
                return False, timed_out
            record = DecisionRecord(
                audit_id=audit_id,
                item_id=item_id,
                doc_id=items[item_id].doc_id,
                reviewer_id=reviewer_id,
                reviewer_kind=ReviewerKind.SME,
                label=decided_label,
                decided_at=self.clock(),
                review_seconds=review_seconds,
                timed_out=timed_out,
            )
            accepted = self.store.append_decision(record)
            return accepted, timed_out

    # -- machine decision ingestion ----------------------------------------------

    def ingest_decisions(self, audit_id: str, rows: Sequence[dict]) -> IngestCounts:
        """Batch-ingest model/upstream/gold decision rows.

        Each row needs doc_id, reviewer_id, reviewer_kind, and label;
        decided_at defaults to ingestion time. Referentially broken rows are
        counted as rejected without aborting the batch; re-sent rows count as
        duplicates. Blinded queue payloads are never touched.
        """
        with self.store.lock:
            snap = self.store.load_audit(audit_id)
            item_for_doc = snap.item_by_doc()
            now = self.clock()
            valid: list[DecisionRecord] = []
            rejected = 0
            for row in rows:
                try:
                    if not isinstance(row, dict):
                        raise ValidationError("record is not an object")
                    kind = ReviewerKind(str(row.get("reviewer_kind", "")))
                    if kind not in INGESTIBLE_KINDS:
                        raise ValidationError(f"kind {kind.value!r} is not ingestible")
                    doc_id = str(row["doc_id"])
                    item = item_for_doc.get(doc_id)
                    if item is None:
                        raise ValidationError(f"document {doc_id!r} not in sample")
                    raw_ts = row.get("decided_at")
                    valid.append(
                        DecisionRecord(
                            audit_id=audit_id,
                            item_id=item.item_id,
                            doc_id=doc_id,
                            reviewer_id=str(row["reviewer_id"]),
                            reviewer_kind=kind,
                            label=parse_label(str(row["label"])),
                            decided_at=parse_ts(str(raw_ts)) if raw_ts else now,
                            review_seconds=None,
                            timed_out=False,
                        )
                    )
                except (KeyError, TypeError, ValueError, ValidationError):
                    rejected += 1
            stored, duplicates = self.store.append_decisions(valid) if valid else (0, 0)
            return IngestCounts(stored=stored, duplicates=duplicates, rejected=rejected)

    # -- monitoring and reporting ---------------------------------------------------

    def status(self, audit_id: str) -> InterimSummary:
        snap = self.store.load_audit(audit_id)
        return planning.interim_status(
            list(snap.decisions), snap.config, snap.plan, list(snap.queue)
        )

    def report(self, audit_id: str, mode: str = "interim") -> EquivalenceReport:
        """Equivalence report. Final mode demands every chunk complete and a
        model decision for every sampled document; interim mode is always
        allowed and flagged as non-confirmatory."""
        if mode not in ("interim", "final"):
            raise ValidationError(f"mode must be 'interim' or 'final', got {mode!r}")
        snap = self.store.load_audit(audit_id)
        sme, model, gold = labels_by_doc(list(snap.decisions), list(snap.queue))
        chunks_completed = self._chunks_completed(snap)
        if mode == "final":
            missing_chunks = self._missing_chunks(snap)
            missing_model = sum(
                1 for item in snap.queue if item.doc_id not in model
            )
            if missing_chunks or missing_model:
                raise IncompleteAuditError(missing_chunks, missing_model)
        return build_equivalence_report(
            audit_id=audit_id,
            config=snap.config,
            sme_labels=sme,
            model_labels=model,
            gold_labels=gold,
            interim=(mode == "interim"),
            chunks_completed=chunks_completed,
        )

    def snapshot(self, audit_id: str) -> AuditSnapshot:
        return self.store.load_audit(audit_id)

    # -- internals ------------------------------------------------------------------

    @staticmethod
    def _decided_items(snap: AuditSnapshot) -> set[str]:
        return {
            d.item_id
            for d in snap.decisions
            if d.reviewer_kind is ReviewerKind.SME
        }

    @staticmethod
    def _chunk_progress(snap: AuditSnapshot) -> list[tuple[int, int]]:
        decided = AuditService._decided_items(snap)
        done = [0] * len(snap.plan.chunk_sizes)
        for item in snap.queue:
            if item.item_id in decided:
                done[item.chunk_index] += 1
        return list(zip(done, snap.plan.chunk_sizes))

    @staticmethod
    def _lowest_incomplete_chunk(
        snap: AuditSnapshot, decided: set[str]
    ) -> Optional[int]:
        remaining = [0] * len(snap.plan.chunk_sizes)
        for item in snap.queue:
            if item.item_id not in decided:
                remaining[item.chunk_index] += 1
        for index, count in enumerate(remaining):
            if count > 0:
                return index
        return None

    @staticmethod
    def _missing_chunks(snap: AuditSnapshot) -> list[int]:
        return [
            index
            for index, (done, size) in enumerate(AuditService._chunk_progress(snap))
            if done < size
        ]

    def _chunks_completed(self, snap: AuditSnapshot) -> int:
        return sum(
            1 for done, size in self._chunk_progress(snap) if done >= size
        )
