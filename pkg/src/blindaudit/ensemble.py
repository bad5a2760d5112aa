"""Label combination and accuracy scoring.

The OR rule classifies a document reportable when either constituent model
does, trading non-reportable precision for reportable recall. Scoring is
always reported per class as well as pooled.
"""

from __future__ import annotations

from typing import Iterable, Sequence

from .errors import ValidationError
from .models import ClassAccuracies, Label, ProportionEstimate

LabelPair = tuple[str, Label]


def or_combine(a: Label, b: Label) -> Label:
    """Reportable iff either input is reportable."""
    if a is Label.REPORTABLE or b is Label.REPORTABLE:
        return Label.REPORTABLE
    return Label.NON_REPORTABLE


def or_combine_all(labels: Iterable[Label]) -> Label:
    """Fold of or_combine; a single label passes through unchanged."""
    result = None
    for label in labels:
        result = label if result is None else or_combine(result, label)
    if result is None:
        raise ValidationError("or_combine_all requires at least one label")
    return result


def _as_unique_map(pairs: Sequence[LabelPair], name: str) -> dict[str, Label]:
    mapping: dict[str, Label] = {}
    for doc_id, label in pairs:
        if doc_id in mapping:
            raise ValidationError(f"duplicate doc_id {doc_id!r} in {name}")
        if not isinstance(label, Label):
            raise ValidationError(f"{name} label for {doc_id!r} is not a Label")
        mapping[doc_id] = label
    return mapping


def score(
    predictions: Sequence[LabelPair], reference: Sequence[LabelPair]
) -> ClassAccuracies:
    """Per-class and pooled accuracy of predictions against a reference.

    The prediction and reference doc_id sets must match exactly; a missing or
    extra prediction is a validation error, not a silent skip.
    """
    pred = _as_unique_map(predictions, "predictions")
    ref = _as_unique_map(reference, "reference")
    if not ref:
        raise ValidationError("reference must be non-empty")
    missing = set(ref) - set(pred)
    if missing:
        raise ValidationError(f"unpredicted reference documents: {sorted(missing)[:5]}")
    extra = set(pred) - set(ref)
    if extra:
        raise ValidationError(f"predictions for unknown documents: {sorted(extra)[:5]}")

    counts = {Label.REPORTABLE: [0, 0], Label.NON_REPORTABLE: [0, 0]}
    for doc_id, truth in ref.items():
        bucket = counts[truth]
        bucket[1] += 1
        if pred[doc_id] is truth:
            bucket[0] += 1
    rep, nonrep = counts[Label.REPORTABLE], counts[Label.NON_REPORTABLE]
    return ClassAccuracies(
        reportable_successes=rep[0],
        reportable_trials=rep[1],
        nonreportable_successes=nonrep[0],
        nonreportable_trials=nonrep[1],
    )


def paired_proportions(
    sme: Sequence[LabelPair],
    model: Sequence[LabelPair],
    reference: Sequence[LabelPair],
) -> tuple[ProportionEstimate, ProportionEstimate]:
    """Agreement-with-reference proportions for SMEs and the model over the
    same documents, ready for a difference confidence interval.

    All three inputs must cover the same doc_id set. With the SME labels as
    reference (sme-as-gold mode) the SME proportion is n/n by definition.
    """
    sme_map = _as_unique_map(sme, "sme")
    model_map = _as_unique_map(model, "model")
    ref_map = _as_unique_map(reference, "reference")
    if not ref_map:
        raise ValidationError("reference must be non-empty")
    if set(sme_map) != set(ref_map) or set(model_map) != set(ref_map):
        raise ValidationError("sme, model, and reference doc_id sets differ")

    n = len(ref_map)
    sme_hits = sum(1 for doc_id, truth in ref_map.items() if sme_map[doc_id] is truth)
    model_hits = sum(
        1 for doc_id, truth in ref_map.items() if model_map[doc_id] is truth
    )
    return (
        ProportionEstimate(successes=sme_hits, trials=n),
        ProportionEstimate(successes=model_hits, trials=n),
    )
