"""Noncentrality, achievable power, and minimum sample size.

The test of the p-dimensional effect rejects when
N b^T Sigma_b^{-1} b > (p (N-q-1)/(N-q-p)) F^{-1}_{p, N-q-p}(1 - alpha0);
the statistic divided by the multiplier is noncentral-F distributed, so power
reduces to 1 - NoncentralFCdf(F^{-1}_{p,N-q-p}(1-alpha0); p, N-q-p, c_N) with
c_N = N d^T M d — the multiplier cancels and never appears here.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .design import StudyDesign, information_matrix
from .errors import FieldError, SampleSizeCapError, ValidationError
from .numerics import f_quantile, noncentral_f_cdf

__all__ = [
    "PowerCalcResult",
    "SampleSizeResult",
    "noncentrality",
    "power_at",
    "solve_sample_size",
    "SAMPLE_SIZE_CAP",
    "SAMPLE_SIZE_FLOOR",
]

SAMPLE_SIZE_CAP = 10_000
SAMPLE_SIZE_FLOOR = 10


@dataclass(frozen=True)
class PowerCalcResult:
    power: float
    n: int
    inputs: dict = field(default_factory=dict)


@dataclass(frozen=True)
class SampleSizeResult:
    n: int
    power_at_n: float
    warnings: list = field(default_factory=list)
    inputs: dict = field(default_factory=dict)


def noncentrality(design: StudyDesign, n: int) -> float:
    """c_N = N d^T M d with M the availability/probability-weighted Gram matrix."""
    if n < 1:
        raise ValidationError(FieldError("invalid_n", "n", f"n must be >= 1, got {n}"))
    M = information_matrix(design)
    return float(n * design.d @ M @ design.d)


@lru_cache(maxsize=4096)
def _crit(alpha0: float, p: int, df2: int) -> float:
    return f_quantile(1.0 - alpha0, p, df2)


def _validate_alpha(alpha0: float) -> None:
    if not 0.0 < alpha0 < 1.0:
        raise ValidationError(FieldError(
            "invalid_alpha", "alpha0", f"alpha0 must be in (0, 1), got {alpha0}"))


def power_at(design: StudyDesign, alpha0: float, n: int) -> float:
    """Power of the effect test with n participants."""
    _validate_alpha(alpha0)
    df2 = n - design.q - design.p
    if df2 < 1:
        raise ValidationError(FieldError(
            "n_too_small", "n",
            f"n must be at least p+q+1 = {design.p + design.q + 1} "
            f"so the test has positive denominator degrees of freedom"))
    c_n = noncentrality(design, n)
    crit = _crit(alpha0, design.p, df2)
    return 1.0 - noncentral_f_cdf(crit, design.p, df2, c_n)


def solve_sample_size(
    design: StudyDesign, alpha0: float, target_power: float
) -> SampleSizeResult:
    """Smallest integer n with power_at(n) >= target_power, subject to the
    floor of 10 participants and a feasibility cap of 10,000.

    If the unfloored minimum is below 10 the result is 10 with a floor warning
    (reporting the power actually achieved at 10). The returned n always
    satisfies power_at(n) >= target and, when n > 10, power_at(n-1) < target.
    """
    _validate_alpha(alpha0)
    if not alpha0 < target_power < 1.0:
        raise ValidationError(FieldError(
            "invalid_target", "target_power",
            f"target power must lie in (alpha0, 1) = ({alpha0}, 1), "
            f"got {target_power}"))

    n_min = design.p + design.q + 1
    M = information_matrix(design)
    quad = float(design.d @ M @ design.d)
    if quad <= 0.0:
        # power is pinned at alpha0 for every n; no finite n can reach target
        raise SampleSizeCapError(
            "effect is zero at every decision time; power equals alpha0 "
            f"for all sample sizes up to the cap of {SAMPLE_SIZE_CAP}",
            cap=SAMPLE_SIZE_CAP,
            power_at_cap=power_at(design, alpha0, SAMPLE_SIZE_CAP),
        )

    def p_at(n: int) -> float:
        return power_at(design, alpha0, n)

    if p_at(SAMPLE_SIZE_CAP) < target_power:
        raise SampleSizeCapError(
            f"effect too small to reach power {target_power} at any sample "
            f"size up to {SAMPLE_SIZE_CAP}",
            cap=SAMPLE_SIZE_CAP,
            power_at_cap=p_at(SAMPLE_SIZE_CAP),
        )

    start = max(n_min, SAMPLE_SIZE_FLOOR)
    if p_at(start) >= target_power:
        # crossing at or below the floor: find the unfloored minimum by a
        # short upward scan from the smallest feasible n
        unfloored = start
        for n in range(n_min, start):
            if p_at(n) >= target_power:
                unfloored = n
                break
        warnings = []
        if unfloored < SAMPLE_SIZE_FLOOR:
            warnings.append({
                "code": "sample_size_floor",
                "message": (
                    f"the unfloored minimum sample size is {unfloored}; "
                    f"returning the floor of {SAMPLE_SIZE_FLOOR} participants"),
            })
        return SampleSizeResult(
            n=SAMPLE_SIZE_FLOOR,
            power_at_n=p_at(SAMPLE_SIZE_FLOOR),
            warnings=warnings,
        )

    # gallop to bracket the crossing, then bisect to the first n whose power
    # clears the target while its predecessor does not
    lo = start  # power(lo) < target
    hi = start
    while True:
        hi = min(hi * 2, SAMPLE_SIZE_CAP)
        if p_at(hi) >= target_power:
            break
        lo = hi
        if hi == SAMPLE_SIZE_CAP:  # unreachable: cap power checked above
            break
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if p_at(mid) >= target_power:
            hi = mid
        else:
            lo = mid
    return SampleSizeResult(n=hi, power_at_n=p_at(hi), warnings=[])
