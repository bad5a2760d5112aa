"""Domain types: configuration, records, plans, and report shapes.

Everything that crosses a module boundary or gets serialized lives here.
Wire/file formats are JSON with snake_case keys; timestamps are UTC
ISO-8601 with millisecond precision.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import Optional

from .errors import ValidationError


# --- timestamps -------------------------------------------------------------

def utc_now() -> datetime:
    return truncate_ms(datetime.now(timezone.utc))


def truncate_ms(ts: datetime) -> datetime:
    """Drop sub-millisecond digits so in-memory state matches the log bytes."""
    return ts.replace(microsecond=(ts.microsecond // 1000) * 1000)


def format_ts(ts: datetime) -> str:
    """UTC ISO-8601 with millisecond precision, e.g. 2026-08-10T12:00:00.000+00:00."""
    if ts.tzinfo is None:
        ts = ts.replace(tzinfo=timezone.utc)
    return ts.astimezone(timezone.utc).isoformat(timespec="milliseconds")


def parse_ts(raw: str) -> datetime:
    ts = datetime.fromisoformat(raw)
    if ts.tzinfo is None:
        ts = ts.replace(tzinfo=timezone.utc)
    return ts


# --- enums ------------------------------------------------------------------

class Label(str, enum.Enum):
    REPORTABLE = "reportable"
    NON_REPORTABLE = "non_reportable"


class ReviewerKind(str, enum.Enum):
    SME = "sme"
    MODEL = "model"
    UPSTREAM = "upstream"
    GOLD = "gold"


class Verdict(str, enum.Enum):
    EQUIVALENT = "equivalent"
    DEMONSTRABLY_DIFFERENT = "demonstrably_different"
    INCONCLUSIVE = "inconclusive"


def parse_label(raw: str) -> Label:
    try:
        return Label(raw)
    except ValueError:
        raise ValidationError(f"unknown label {raw!r}") from None


# --- configuration ----------------------------------------------------------

@dataclass(frozen=True)
class AuditConfig:
    """Trial parameters: margin, error levels, assumed reviewer accuracy, cadence."""

    delta: float
    alpha: float
    beta: float
    p_assumed: float
    chunk_count: int = 12
    per_item_seconds: int = 60

    def __post_init__(self):
        if not 0.0 < self.delta < 1.0:
            raise ValidationError(f"delta must be in (0, 1), got {self.delta}")
        if not 0.0 < self.alpha < 1.0:
            raise ValidationError(f"alpha must be in (0, 1), got {self.alpha}")
        if not 0.0 < self.beta < 1.0:
            raise ValidationError(f"beta must be in (0, 1), got {self.beta}")
        if not 0.0 < self.p_assumed <= 1.0:
            raise ValidationError(
                f"p_assumed must be in (0, 1], got {self.p_assumed}"
            )
        if int(self.chunk_count) != self.chunk_count or self.chunk_count < 1:
            raise ValidationError("chunk_count must be a positive integer")
        if int(self.per_item_seconds) != self.per_item_seconds or self.per_item_seconds < 1:
            raise ValidationError("per_item_seconds must be a positive integer")

    def to_dict(self) -> dict:
        return {
            "delta": self.delta,
            "alpha": self.alpha,
            "beta": self.beta,
            "p_assumed": self.p_assumed,
            "chunk_count": self.chunk_count,
            "per_item_seconds": self.per_item_seconds,
        }

    @classmethod
    def from_dict(cls, raw: dict) -> "AuditConfig":
        return cls(
            delta=float(raw["delta"]),
            alpha=float(raw["alpha"]),
            beta=float(raw["beta"]),
            p_assumed=float(raw["p_assumed"]),
            chunk_count=int(raw.get("chunk_count", 12)),
            per_item_seconds=int(raw.get("per_item_seconds", 60)),
        )


# --- statistics primitives ---------------------------------------------------

@dataclass(frozen=True)
class ProportionEstimate:
    successes: int
    trials: int

    def __post_init__(self):
        if self.trials < 1:
            raise ValidationError("trials must be >= 1")
        if not 0 <= self.successes <= self.trials:
            raise ValidationError(
                f"successes must be in [0, trials], got {self.successes}/{self.trials}"
            )

    @property
    def estimate(self) -> float:
        return self.successes / self.trials

    def to_dict(self) -> dict:
        return {
            "successes": self.successes,
            "trials": self.trials,
            "estimate": self.estimate,
        }


@dataclass(frozen=True)
class ConfidenceInterval:
    low: float
    high: float
    level: float

    def __post_init__(self):
        if self.low > self.high:
            raise ValidationError(f"interval low {self.low} exceeds high {self.high}")
        if not 0.0 < self.level < 1.0:
            raise ValidationError(f"level must be in (0, 1), got {self.level}")

    @property
    def width(self) -> float:
        return self.high - self.low

    def to_dict(self) -> dict:
        return {"low": self.low, "high": self.high, "level": self.level}


# --- documents and the blinded queue -----------------------------------------

@dataclass(frozen=True)
class DocumentRecord:
    doc_id: str
    text: str
    upstream_label: Optional[Label] = None
    received_at: Optional[datetime] = None

    def __post_init__(self):
        if not self.doc_id:
            raise ValidationError("doc_id must be non-empty")

    def to_dict(self) -> dict:
        return {
            "doc_id": self.doc_id,
            "text": self.text,
            "upstream_label": self.upstream_label.value if self.upstream_label else None,
            "received_at": format_ts(self.received_at) if self.received_at else None,
        }

    @classmethod
    def from_dict(cls, raw: dict) -> "DocumentRecord":
        label = raw.get("upstream_label")
        received = raw.get("received_at")
        return cls(
            doc_id=str(raw["doc_id"]),
            text=str(raw.get("text", "")),
            upstream_label=parse_label(label) if label else None,
            received_at=parse_ts(received) if received else None,
        )


@dataclass(frozen=True)
class BlindedItem:
    """A review-queue entry. Carries no label of any kind, by construction."""

    item_id: str
    audit_id: str
    doc_id: str
    text: str
    chunk_index: int

    def to_dict(self) -> dict:
        return {
            "item_id": self.item_id,
            "audit_id": self.audit_id,
            "doc_id": self.doc_id,
            "text": self.text,
            "chunk_index": self.chunk_index,
        }

    @classmethod
    def from_dict(cls, raw: dict) -> "BlindedItem":
        return cls(
            item_id=str(raw["item_id"]),
            audit_id=str(raw["audit_id"]),
            doc_id=str(raw["doc_id"]),
            text=str(raw["text"]),
            chunk_index=int(raw["chunk_index"]),
        )


@dataclass(frozen=True)
class ChunkPlan:
    chunk_sizes: tuple[int, ...]
    chunk_due: tuple[int, ...]

    def __post_init__(self):
        if len(self.chunk_sizes) != len(self.chunk_due):
            raise ValidationError("chunk_sizes and chunk_due lengths differ")
        if any(s < 0 for s in self.chunk_sizes):
            raise ValidationError("chunk sizes must be non-negative")

    @property
    def total(self) -> int:
        return sum(self.chunk_sizes)

    def to_dict(self) -> dict:
        return {"chunk_sizes": list(self.chunk_sizes), "chunk_due": list(self.chunk_due)}

    @classmethod
    def from_dict(cls, raw: dict) -> "ChunkPlan":
        return cls(
            chunk_sizes=tuple(int(s) for s in raw["chunk_sizes"]),
            chunk_due=tuple(int(d) for d in raw["chunk_due"]),
        )


# --- decisions and leases -----------------------------------------------------

@dataclass(frozen=True)
class DecisionRecord:
    audit_id: str
    item_id: str
    doc_id: str
    reviewer_id: str
    reviewer_kind: ReviewerKind
    label: Label
    decided_at: datetime
    review_seconds: Optional[float] = None
    timed_out: bool = False

    def __post_init__(self):
        if self.reviewer_kind is ReviewerKind.SME and self.review_seconds is None:
            raise ValidationError("SME decisions must carry review_seconds")
        if self.review_seconds is not None and self.review_seconds < 0:
            raise ValidationError("review_seconds must be non-negative")

    @property
    def key(self) -> tuple[str, str]:
        return (self.item_id, self.reviewer_id)

    def to_dict(self) -> dict:
        return {
            "audit_id": self.audit_id,
            "item_id": self.item_id,
            "doc_id": self.doc_id,
            "reviewer_id": self.reviewer_id,
            "reviewer_kind": self.reviewer_kind.value,
            "label": self.label.value,
            "decided_at": format_ts(self.decided_at),
            "review_seconds": self.review_seconds,
            "timed_out": self.timed_out,
        }

    @classmethod
    def from_dict(cls, raw: dict) -> "DecisionRecord":
        seconds = raw.get("review_seconds")
        return cls(
            audit_id=str(raw["audit_id"]),
            item_id=str(raw["item_id"]),
            doc_id=str(raw["doc_id"]),
            reviewer_id=str(raw["reviewer_id"]),
            reviewer_kind=ReviewerKind(raw["reviewer_kind"]),
            label=parse_label(raw["label"]),
            decided_at=parse_ts(raw["decided_at"]),
            review_seconds=float(seconds) if seconds is not None else None,
            timed_out=bool(raw.get("timed_out", False)),
        )


@dataclass(frozen=True)
class LeaseRecord:
    item_id: str
    reviewer_id: str
    leased_at: datetime
    expires_at: datetime

    def expired(self, now: datetime) -> bool:
        return now >= self.expires_at

    def to_dict(self) -> dict:
        return {
            "item_id": self.item_id,
            "reviewer_id": self.reviewer_id,
            "leased_at": format_ts(self.leased_at),
            "expires_at": format_ts(self.expires_at),
        }

    @classmethod
    def from_dict(cls, raw: dict) -> "LeaseRecord":
        return cls(
            item_id=str(raw["item_id"]),
            reviewer_id=str(raw["reviewer_id"]),
            leased_at=parse_ts(raw["leased_at"]),
            expires_at=parse_ts(raw["expires_at"]),
        )


# --- scoring and reports --------------------------------------------------------

@dataclass(frozen=True)
class ClassAccuracies:
    """Per-class and pooled accuracy. An accuracy is None when its class has
    no reference documents; overall is the pooled ratio, never a macro mean."""

    reportable_successes: int
    reportable_trials: int
    nonreportable_successes: int
    nonreportable_trials: int

    @property
    def reportable_accuracy(self) -> Optional[float]:
        if self.reportable_trials == 0:
            return None
        return self.reportable_successes / self.reportable_trials

    @property
    def nonreportable_accuracy(self) -> Optional[float]:
        if self.nonreportable_trials == 0:
            return None
        return self.nonreportable_successes / self.nonreportable_trials

    @property
    def overall_accuracy(self) -> float:
        total = self.reportable_trials + self.nonreportable_trials
        if total == 0:
            raise ValidationError("no reference documents to score")
        return (self.reportable_successes + self.nonreportable_successes) / total

    def to_dict(self) -> dict:
        return {
            "reportable_accuracy": self.reportable_accuracy,
            "nonreportable_accuracy": self.nonreportable_accuracy,
            "overall_accuracy": self.overall_accuracy,
            "counts": {
                "reportable": {
                    "successes": self.reportable_successes,
                    "trials": self.reportable_trials,
                },
                "non_reportable": {
                    "successes": self.nonreportable_successes,
                    "trials": self.nonreportable_trials,
                },
            },
        }


@dataclass(frozen=True)
class EquivalenceReport:
    audit_id: str
    sme_estimate: ProportionEstimate
    model_estimate: ProportionEstimate
    difference: float
    ci: ConfidenceInterval
    delta: float
    verdict: Verdict
    per_class: ClassAccuracies
    interim: bool
    chunks_completed: int
    reference_mode: str = "adjudicated"

    def to_dict(self) -> dict:
        return {
            "audit_id": self.audit_id,
            "sme_estimate": self.sme_estimate.to_dict(),
            "model_estimate": self.model_estimate.to_dict(),
            "difference": self.difference,
            "ci": self.ci.to_dict(),
            "delta": self.delta,
            "verdict": self.verdict.value,
            "per_class": self.per_class.to_dict(),
            "interim": self.interim,
            "chunks_completed": self.chunks_completed,
            "reference_mode": self.reference_mode,
        }


@dataclass(frozen=True)
class InterimSummary:
    audit_id: str
    chunk_sizes: tuple[int, ...]
    chunk_done: tuple[int, ...]
    chunks_completed: int
    decisions_by_kind: dict[str, int]
    report: Optional[EquivalenceReport]

    def to_dict(self) -> dict:
        return {
            "audit_id": self.audit_id,
            "chunk_sizes": list(self.chunk_sizes),
            "chunk_done": list(self.chunk_done),
            "chunks_completed": self.chunks_completed,
            "decisions_by_kind": dict(self.decisions_by_kind),
            "report": self.report.to_dict() if self.report else None,
        }


# --- simulation ------------------------------------------------------------------

@dataclass(frozen=True)
class SimScenario:
    p_sme: float
    p_model: float
    config: AuditConfig
    trials: int
    seed: int

    def __post_init__(self):
        if not 0.0 <= self.p_sme <= 1.0:
            raise ValidationError(f"p_sme must be in [0, 1], got {self.p_sme}")
        if not 0.0 <= self.p_model <= 1.0:
            raise ValidationError(f"p_model must be in [0, 1], got {self.p_model}")
        if self.trials < 1:
            raise ValidationError("trials must be >= 1")
        if self.seed < 0:
            raise ValidationError("seed must be a non-negative integer")


@dataclass(frozen=True)
class SimResult:
    verdict_counts: dict[Verdict, int]
    equivalence_rate: float
    mean_ci_width: float

    @property
    def trials(self) -> int:
        return sum(self.verdict_counts.values())


# --- snapshots --------------------------------------------------------------------

@dataclass(frozen=True)
class AuditSnapshot:
    """Immutable view of one audit's full persisted state."""

    audit_id: str
    created_at: datetime
    seed: int
    config: AuditConfig
    plan: ChunkPlan
    queue: tuple[BlindedItem, ...]
    documents: tuple[DocumentRecord, ...]
    decisions: tuple[DecisionRecord, ...]
    leases: tuple[LeaseRecord, ...]
    lease_history: frozenset[tuple[str, str]] = field(default_factory=frozenset)

    @property
    def n(self) -> int:
        return len(self.queue)

    def document_by_id(self) -> dict[str, DocumentRecord]:
        return {d.doc_id: d for d in self.documents}

    def item_by_id(self) -> dict[str, BlindedItem]:
        return {i.item_id: i for i in self.queue}

    def item_by_doc(self) -> dict[str, BlindedItem]:
        return {i.doc_id: i for i in self.queue}
