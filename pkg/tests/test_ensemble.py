import random

import pytest

from blindaudit.ensemble import or_combine, or_combine_all, paired_proportions, score
from blindaudit.errors import ValidationError
from blindaudit.models import Label

R = Label.REPORTABLE
N = Label.NON_REPORTABLE


# --- OR combination ------------------------------------------------------------


def test_or_truth_table():
    # The four rows of the published combination table.
    assert or_combine(R, R) is R
    assert or_combine(N, R) is R
    assert or_combine(R, N) is R
    assert or_combine(N, N) is N


def test_or_commutative_and_idempotent():
    for a in (R, N):
        assert or_combine(a, a) is a
        for b in (R, N):
            assert or_combine(a, b) is or_combine(b, a)


def test_or_monotone():
    # Promoting either input to REPORTABLE never flips the output back.
    for a in (R, N):
        for b in (R, N):
            base = or_combine(a, b)
            assert or_combine(R, b) is R or base is N
            for promoted in (or_combine(R, b), or_combine(a, R)):
                assert not (base is R and promoted is N)


def test_or_combine_all():
    assert or_combine_all([N]) is N
    assert or_combine_all([N, N, R]) is R
    with pytest.raises(ValidationError):
        or_combine_all([])


def test_combined_recall_dominates_constituents():
    # On any dataset the OR ensemble's reportable-class recall is at least
    # each constituent model's recall. 1,000 random small datasets.
    rng = random.Random(42)
    for _ in range(1000):
        size = rng.randint(1, 20)
        truth = [rng.choice((R, N)) for _ in range(size)]
        model_a = [rng.choice((R, N)) for _ in range(size)]
        model_b = [rng.choice((R, N)) for _ in range(size)]
        combined = [or_combine(a, b) for a, b in zip(model_a, model_b)]

        def recall(preds):
            positives = [i for i, t in enumerate(truth) if t is R]
            if not positives:
                return 1.0
            return sum(1 for i in positives if preds[i] is R) / len(positives)

        assert recall(combined) >= recall(model_a)
        assert recall(combined) >= recall(model_b)


# --- scoring ----------------------------------------------------------------------


def _pairs(labels, prefix="doc"):
    return [(f"{prefix}-{i:03d}", label) for i, label in enumerate(labels)]


def test_score_perfect_predictions():
    reference = _pairs([R, N, R, N])
    result = score(reference, reference)
    assert result.reportable_accuracy == 1.0
    assert result.nonreportable_accuracy == 1.0
    assert result.overall_accuracy == 1.0


def test_score_production_failure_figures():
    # 100 reportable + 100 non-reportable; correct on 85 and 70 respectively.
    reference = _pairs([R] * 100 + [N] * 100)
    predictions = _pairs([R] * 85 + [N] * 15 + [N] * 70 + [R] * 30)
    result = score(predictions, reference)
    assert result.reportable_accuracy == pytest.approx(0.85)
    assert result.nonreportable_accuracy == pytest.approx(0.70)
    assert result.overall_accuracy == pytest.approx(0.775)
    assert result.reportable_trials == 100
    assert result.nonreportable_trials == 100


def test_score_is_order_invariant():
    reference = _pairs([R, N, R, N, R])
    predictions = _pairs([R, R, N, N, R])
    shuffled_ref = list(reversed(reference))
    shuffled_pred = list(reversed(predictions))
    assert score(predictions, reference) == score(shuffled_pred, shuffled_ref)


def test_score_rejects_unknown_document():
    reference = _pairs([R, N])
    predictions = reference + [("doc-999", R)]
    with pytest.raises(ValidationError):
        score(predictions, reference)


def test_score_rejects_unpredicted_document():
    reference = _pairs([R, N, R])
    with pytest.raises(ValidationError):
        score(reference[:2], reference)


def test_score_rejects_duplicates():
    reference = _pairs([R, N])
    with pytest.raises(ValidationError):
        score(reference + [reference[0]], reference)


def test_score_rejects_empty_reference():
    with pytest.raises(ValidationError):
        score([], [])


def test_score_single_class_reference():
    reference = _pairs([R, R, R])
    predictions = _pairs([R, N, R])
    result = score(predictions, reference)
    assert result.reportable_accuracy == pytest.approx(2 / 3)
    assert result.nonreportable_accuracy is None
    assert result.overall_accuracy == pytest.approx(2 / 3)


# --- paired proportions ---------------------------------------------------------------


def test_paired_proportions_identical_everywhere():
    reference = _pairs([R, N, R, N])
    sme_est, model_est = paired_proportions(reference, reference, reference)
    assert (sme_est.successes, sme_est.trials) == (4, 4)
    assert (model_est.successes, model_est.trials) == (4, 4)


def test_sme_as_gold_gives_unit_estimate():
    sme = _pairs([R, N, R])
    model = _pairs([R, R, R])
    sme_est, model_est = paired_proportions(sme, model, sme)
    assert sme_est.estimate == 1.0
    assert (model_est.successes, model_est.trials) == (2, 3)


def test_paired_proportions_production_scale():
    gold = _pairs([R] * 1506)
    sme = _pairs([R] * 1476 + [N] * 30)
    model = _pairs([R] * 1280 + [N] * 226)
    sme_est, model_est = paired_proportions(sme, model, gold)
    assert (sme_est.successes, sme_est.trials) == (1476, 1506)
    assert (model_est.successes, model_est.trials) == (1280, 1506)


def test_paired_proportions_rejects_mismatched_sets():
    sme = _pairs([R, N])
    model = _pairs([R, N, R])
    with pytest.raises(ValidationError):
        paired_proportions(sme, model, sme)
