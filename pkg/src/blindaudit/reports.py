"""Equivalence report assembly shared by the service and interim monitoring.

Scoring reference resolution: when adjudicated gold decisions cover every
scorable document they are the reference; otherwise the SME labels serve as
gold. Documents are scorable once they carry both an SME and a model decision.
Multiple model decisions for one document (a two-model deployment) are folded
with the OR rule before scoring.
"""

from __future__ import annotations

from typing import Mapping, Sequence

from . import stats
from .ensemble import or_combine_all, paired_proportions, score
from .errors import ValidationError
from .models import (
    AuditConfig,
    BlindedItem,
    DecisionRecord,
    EquivalenceReport,
    Label,
    ReviewerKind,
)

SME_AS_GOLD = "sme_as_gold"
ADJUDICATED = "adjudicated"


def labels_by_doc(
    decisions: Sequence[DecisionRecord], queue: Sequence[BlindedItem]
) -> tuple[dict[str, Label], dict[str, Label], dict[str, Label]]:
    """Split decisions into per-document SME, model, and gold label maps.

    Model decisions are OR-combined per document; for SME and gold the last
    record in log order wins (log position is the tiebreak).
    """
    sampled = {item.doc_id for item in queue}
    sme: dict[str, Label] = {}
    gold: dict[str, Label] = {}
    model_votes: dict[str, list[Label]] = {}
    for decision in decisions:
        if sampled and decision.doc_id not in sampled:
            raise ValidationError(
                f"decision references unsampled document {decision.doc_id!r}"
            )
        if decision.reviewer_kind is ReviewerKind.SME:
            sme[decision.doc_id] = decision.label
        elif decision.reviewer_kind is ReviewerKind.MODEL:
            model_votes.setdefault(decision.doc_id, []).append(decision.label)
        elif decision.reviewer_kind is ReviewerKind.GOLD:
            gold[decision.doc_id] = decision.label
    model = {doc: or_combine_all(votes) for doc, votes in model_votes.items()}
    return sme, model, gold


def resolve_reference(
    sme_labels: Mapping[str, Label],
    gold_labels: Mapping[str, Label],
    scored_docs: set[str],
) -> tuple[dict[str, Label], str]:
    if gold_labels and scored_docs <= set(gold_labels):
        return {doc: gold_labels[doc] for doc in scored_docs}, ADJUDICATED
    return {doc: sme_labels[doc] for doc in scored_docs}, SME_AS_GOLD


def build_equivalence_report(
    audit_id: str,
    config: AuditConfig,
    sme_labels: Mapping[str, Label],
    model_labels: Mapping[str, Label],
    gold_labels: Mapping[str, Label],
    interim: bool,
    chunks_completed: int,
) -> EquivalenceReport:
    scored = set(sme_labels) & set(model_labels)
    if not scored:
        raise ValidationError("no documents carry both an SME and a model decision")

    reference, mode = resolve_reference(sme_labels, gold_labels, scored)
    ref_pairs = sorted(reference.items())
    sme_pairs = [(doc, sme_labels[doc]) for doc, _ in ref_pairs]
    model_pairs = [(doc, model_labels[doc]) for doc, _ in ref_pairs]

    sme_est, model_est = paired_proportions(sme_pairs, model_pairs, ref_pairs)
    ci = stats.diff_ci(sme_est, model_est, config.alpha)
    verdict = stats.equivalence_verdict(ci, config.delta)
    per_class = score(model_pairs, ref_pairs)

    return EquivalenceReport(
        audit_id=audit_id,
        sme_estimate=sme_est,
        model_estimate=model_est,
        difference=sme_est.estimate - model_est.estimate,
        ci=ci,
        delta=config.delta,
        verdict=verdict,
        per_class=per_class,
        interim=interim,
        chunks_completed=chunks_completed,
        reference_mode=mode,
    )
