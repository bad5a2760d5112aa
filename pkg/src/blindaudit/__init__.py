"""Single-blind equivalence auditing of deployed classifiers against experts."""

from .models import (
    AuditConfig,
    BlindedItem,
    ConfidenceInterval,
    DecisionRecord,
    DocumentRecord,
    EquivalenceReport,
    Label,
    ProportionEstimate,
    ReviewerKind,
    Verdict,
)
from .stats import diff_ci, equivalence_verdict, normal_quantile, sample_size

__all__ = [
    "AuditConfig",
    "BlindedItem",
    "ConfidenceInterval",
    "DecisionRecord",
    "DocumentRecord",
    "EquivalenceReport",
    "Label",
    "ProportionEstimate",
    "ReviewerKind",
    "Verdict",
    "diff_ci",
    "equivalence_verdict",
    "normal_quantile",
    "sample_size",
]

__version__ = "0.1.0"
