"""Pure numerical engine: normal quantiles, sample size, Wald intervals, verdicts.

The quantile is built from the Abramowitz & Stegun 26.2.23 rational
approximation and polished with Halley steps against the erf-based normal
CDF until |cdf(z) - p| <= 1e-13, comfortably inside the 1e-9 contract.
All functions are pure and thread-safe.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ValidationError
from .models import ConfidenceInterval, ProportionEstimate, Verdict

_SQRT2 = math.sqrt(2.0)
_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)

# Abramowitz & Stegun 26.2.23 coefficients (|error| < 4.5e-4 before refinement).
_AS_NUM = (2.515517, 0.802853, 0.010328)
_AS_DEN = (1.432788, 0.189269, 0.001308)

_CDF_TOL = 1e-13
_MAX_REFINE = 8


def normal_cdf(x: float) -> float:
    """Standard normal CDF via the complementary error function."""
    return 0.5 * math.erfc(-x / _SQRT2)


def normal_pdf(x: float) -> float:
    return _INV_SQRT_2PI * math.exp(-0.5 * x * x)


def _rational_tail_estimate(p_tail: float) -> float:
    """A&S 26.2.23 initial guess for the upper-tail quantile, p_tail in (0, 0.5]."""
    t = math.sqrt(-2.0 * math.log(p_tail))
    num = _AS_NUM[0] + t * (_AS_NUM[1] + t * _AS_NUM[2])
    den = 1.0 + t * (_AS_DEN[0] + t * (_AS_DEN[1] + t * _AS_DEN[2]))
    return t - num / den


def normal_quantile(p: float) -> float:
    """Standard normal deviate z with cdf(z) = p.

    Raises ValidationError unless 0 < p < 1. Accurate to better than 1e-9
    absolute over the whole open interval.
    """
    if not 0.0 < p < 1.0:
        raise ValidationError(f"quantile argument must be in (0, 1), got {p}")
    if p == 0.5:
        return 0.0

    if p < 0.5:
        z = -_rational_tail_estimate(p)
    else:
        z = _rational_tail_estimate(1.0 - p)

    # Halley refinement; cubic convergence from the 4.5e-4 starting error.
    for _ in range(_MAX_REFINE):
        err = normal_cdf(z) - p
        if abs(err) <= _CDF_TOL:
            break
        pdf = normal_pdf(z)
        if pdf <= 0.0 or not math.isfinite(pdf):
            break  # deep in a tail; the rational estimate is the best we can do
        step = err / pdf
        z -= step / (1.0 + 0.5 * step * z)
    return z


@dataclass(frozen=True)
class SampleSizeBreakdown:
    """Sample size with the intermediate quantities operators want to see."""

    n: int
    z_half_alpha: float
    z_beta: float
    raw: float


def sample_size_breakdown(
    delta: float, p: float, alpha: float, beta: float
) -> SampleSizeBreakdown:
    if not 0.0 < delta < 1.0:
        raise ValidationError(f"delta must be in (0, 1), got {delta}")
    if not 0.0 < p <= 1.0:
        raise ValidationError(f"p must be in (0, 1], got {p}")
    if not 0.0 < alpha < 1.0:
        raise ValidationError(f"alpha must be in (0, 1), got {alpha}")
    if not 0.0 < beta < 1.0:
        raise ValidationError(f"beta must be in (0, 1), got {beta}")

    z_half_alpha = normal_quantile(1.0 - alpha / 2.0)
    z_beta = normal_quantile(1.0 - beta)
    raw = 2.0 * ((z_half_alpha + z_beta) / delta) ** 2 * p * (1.0 - p)
    return SampleSizeBreakdown(
        n=math.ceil(raw), z_half_alpha=z_half_alpha, z_beta=z_beta, raw=raw
    )


def sample_size(delta: float, p: float, alpha: float, beta: float) -> int:
    """Required audit size: ceil(2 * ((z_{1-a/2} + z_{1-b}) / delta)^2 * p * (1-p)).

    The ceiling guarantees the audit is never underpowered. p = 1 legally
    yields 0 (zero variance means nothing to audit).
    """
    return sample_size_breakdown(delta, p, alpha, beta).n


def diff_ci(
    a: ProportionEstimate, b: ProportionEstimate, alpha: float
) -> ConfidenceInterval:
    """Unpaired Wald interval for (a.estimate - b.estimate) at level 1 - alpha.

    Degenerate zero-variance inputs (estimates of 0 or 1 on both sides) give a
    zero-width interval; callers need no special-casing.
    """
    if not 0.0 < alpha < 1.0:
        raise ValidationError(f"alpha must be in (0, 1), got {alpha}")
    z = normal_quantile(1.0 - alpha / 2.0)
    pa, pb = a.estimate, b.estimate
    se = math.sqrt(pa * (1.0 - pa) / a.trials + pb * (1.0 - pb) / b.trials)
    center = pa - pb
    return ConfidenceInterval(
        low=center - z * se, high=center + z * se, level=1.0 - alpha
    )


def equivalence_verdict(ci: ConfidenceInterval, delta: float) -> Verdict:
    """Classify an interval against the margin (-delta, delta).

    EQUIVALENT when the interval lies strictly inside the margin,
    DEMONSTRABLY_DIFFERENT when it lies entirely on or beyond one boundary,
    INCONCLUSIVE when it straddles a boundary. Exactly one holds.
    """
    if not delta > 0.0:
        raise ValidationError(f"delta must be positive, got {delta}")
    if -delta < ci.low and ci.high < delta:
        return Verdict.EQUIVALENT
    if ci.low >= delta or ci.high <= -delta:
        return Verdict.DEMONSTRABLY_DIFFERENT
    return Verdict.INCONCLUSIVE


def rejects_null(verdict: Verdict) -> bool:
    """Hypothesis mapping: only EQUIVALENT rejects the null of a material
    difference; DEMONSTRABLY_DIFFERENT and INCONCLUSIVE both fail to."""
    return verdict is Verdict.EQUIVALENT
