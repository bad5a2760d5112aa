"""Monte Carlo validation of the audit design's operating characteristics.

Each trial draws N correctness indicators per reviewer arm against a
synthetic gold standard and applies the equivalence decision to the
resulting difference interval. The decision uses the two-one-sided-tests
convention: the 100(1-2*alpha)% interval must sit strictly inside
(-delta, delta). That is the rule under which the sizing formula delivers
its nominal power 1-beta at zero true difference and size alpha at the
margin.

Reviewer errors are modeled as independent Bernoulli draws; document-level
correlation between SME and model mistakes is not modeled. Per-trial RNG
substreams are spawned from the scenario seed, so trials are order-
independent and parallelizable.
"""

from __future__ import annotations

import csv
import io
from typing import Sequence

import numpy as np

from . import stats
from .errors import DegenerateDesignError, ValidationError
from .models import ProportionEstimate, SimResult, SimScenario, Verdict

INDEPENDENCE_NOTE = (
    "note: reviewer errors are simulated as independent Bernoulli draws; "
    "document-level SME/model error correlation is not modeled"
)

CSV_COLUMNS = [
    "delta",
    "alpha",
    "beta",
    "p_assumed",
    "p_sme",
    "p_model",
    "n",
    "trials",
    "equivalent",
    "different",
    "inconclusive",
    "equivalence_rate",
    "mean_ci_width",
]


def _tost_alpha(alpha: float) -> float:
    # One-sided size alpha on each flank <=> the (1 - 2*alpha) interval.
    doubled = 2.0 * alpha
    if not 0.0 < doubled < 1.0:
        raise ValidationError(
            f"alpha {alpha} leaves no room for a two-one-sided-tests interval"
        )
    return doubled


def simulate_audit(scenario: SimScenario) -> SimResult:
    """Run one scenario and tally verdicts over its trials.

    Deterministic for a fixed scenario: trial t always consumes substream t
    of the scenario seed, drawing the SME arm before the model arm.
    """
    config = scenario.config
    n = stats.sample_size(config.delta, config.p_assumed, config.alpha, config.beta)
    if n == 0:
        raise DegenerateDesignError(
            "scenario design yields a sample size of 0 (p_assumed = 1)"
        )

    ci_alpha = _tost_alpha(config.alpha)
    counts = {verdict: 0 for verdict in Verdict}
    width_total = 0.0
    streams = np.random.SeedSequence(scenario.seed).spawn(scenario.trials)
    for stream in streams:
        rng = np.random.default_rng(stream)
        sme_hits = int(np.count_nonzero(rng.random(n) < scenario.p_sme))
        model_hits = int(np.count_nonzero(rng.random(n) < scenario.p_model))
        ci = stats.diff_ci(
            ProportionEstimate(sme_hits, n),
            ProportionEstimate(model_hits, n),
            ci_alpha,
        )
        counts[stats.equivalence_verdict(ci, config.delta)] += 1
        width_total += ci.width

    return SimResult(
        verdict_counts=counts,
        equivalence_rate=counts[Verdict.EQUIVALENT] / scenario.trials,
        mean_ci_width=width_total / scenario.trials,
    )


def sweep(scenarios: Sequence[SimScenario]) -> list[tuple[SimScenario, SimResult]]:
    """One result per scenario, in input order."""
    if not scenarios:
        raise ValidationError("sweep requires at least one scenario")
    return [(scenario, simulate_audit(scenario)) for scenario in scenarios]


def sweep_csv(scenarios: Sequence[SimScenario]) -> str:
    """Sweep rendered as CSV: header row then one row per scenario."""
    rows = sweep(scenarios)
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for scenario, result in rows:
        config = scenario.config
        n = stats.sample_size(
            config.delta, config.p_assumed, config.alpha, config.beta
        )
        writer.writerow(
            [
                config.delta,
                config.alpha,
                config.beta,
                config.p_assumed,
                scenario.p_sme,
                scenario.p_model,
                n,
                scenario.trials,
                result.verdict_counts[Verdict.EQUIVALENT],
                result.verdict_counts[Verdict.DEMONSTRABLY_DIFFERENT],
                result.verdict_counts[Verdict.INCONCLUSIVE],
                result.equivalence_rate,
                result.mean_ci_width,
            ]
        )
    return out.getvalue()
