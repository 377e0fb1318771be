"""Scientist-facing trend elicitation: constant/linear/quadratic day curves.

A trend is elicited by its study-long average, its initial (day-1) value, and —
for quadratic trends — the changing point, the day at which the curve attains
its extremum. Curves are defined on day granularity: all decision times within
a day share the day's value. The same machinery serves expected availability
(values must stay in [0, 1]) and the standardized proximal effect (values must
stay nonnegative).
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np

from .errors import FieldError, ValidationError

__all__ = [
    "TrendSpec",
    "DayCurve",
    "build_curve",
    "validate_curve",
    "effect_basis_coefficients",
]

TrendKind = Literal["constant", "linear", "quadratic"]
TrendRole = Literal["availability", "effect"]


@dataclass(frozen=True)
class TrendSpec:
    """Elicited parameters of one trend.

    kind: constant | linear | quadratic
    average: mean of the curve over days 1..D (exact, by construction)
    initial: curve value at day 1 (linear and quadratic only)
    changing_point: day of the quadratic extremum; real-valued in [1, D]
    role: availability | effect (selects the validation rule)
    """

    kind: TrendKind
    average: float
    initial: float | None = None
    changing_point: float | None = None
    role: TrendRole = "effect"

    def __post_init__(self):
        errs = []
        if self.kind not in ("constant", "linear", "quadratic"):
            errs.append(FieldError("invalid_kind", "kind",
                                   f"unknown trend kind {self.kind!r}"))
        if self.kind == "constant":
            if self.initial is not None:
                errs.append(FieldError("unexpected_field", "initial",
                                       "constant trends take only an average"))
            if self.changing_point is not None:
                errs.append(FieldError("unexpected_field", "changing_point",
                                       "constant trends take only an average"))
        else:
            if self.initial is None:
                errs.append(FieldError("missing_field", "initial",
                                       f"{self.kind} trends require an initial value"))
        if self.kind == "quadratic" and self.changing_point is None:
            errs.append(FieldError("missing_field", "changing_point",
                                   "quadratic trends require a changing point"))
        if self.kind == "linear" and self.changing_point is not None:
            errs.append(FieldError("unexpected_field", "changing_point",
                                   "linear trends take no changing point"))
        if errs:
            raise ValidationError(errs)


@dataclass(frozen=True)
class DayCurve:
    """A curve evaluated on days 1..D."""

    values: np.ndarray
    role: TrendRole

    @property
    def days(self) -> int:
        return len(self.values)

    def per_decision_time(self, per_day: int) -> np.ndarray:
        """Expand to length D*K, constant within each day."""
        return np.repeat(self.values, per_day)


def _quad_moment(days: np.ndarray, c: float) -> float:
    # M(c) = (1/D) sum over days of (day - c)^2
    return float(np.mean((days - c) ** 2))


def build_curve(spec: TrendSpec, days: int) -> DayCurve:
    """Materialize the day curve for a trend spec over days 1..D.

    constant:  value(day) = average
    linear:    value(day) = initial + s (day-1), s = 2(average-initial)/(D-1);
               the mean over days is `average` exactly.
    quadratic: value(day) = v + kappa (day-c)^2 with
               kappa = (initial-average) / ((1-c)^2 - M(c)),
               v = average - kappa M(c), M(c) = mean((day-c)^2);
               hits `initial` at day 1, extremum at c, mean `average` exactly.
    """
    if days < 1:
        raise ValidationError(FieldError("invalid_days", "days",
                                         f"day count must be >= 1, got {days}"))
    grid = np.arange(1, days + 1, dtype=float)
    if spec.kind == "constant":
        values = np.full(days, float(spec.average))
    elif spec.kind == "linear":
        if days == 1:
            if spec.average != spec.initial:
                raise ValidationError(FieldError(
                    "degenerate_linear", "initial",
                    "a one-day linear trend requires average = initial"))
            values = np.array([float(spec.average)])
        else:
            slope = 2.0 * (spec.average - spec.initial) / (days - 1)
            values = spec.initial + slope * (grid - 1.0)
    else:
        c = float(spec.changing_point)
        if not 1.0 <= c <= days:
            raise ValidationError(FieldError(
                "changing_point_range", "changing_point",
                f"changing point must lie within [1, {days}], got {c}"))
        moment = _quad_moment(grid, c)
        denom = (1.0 - c) ** 2 - moment
        if abs(denom) <= 1e-12 * max(1.0, moment):
            raise ValidationError(FieldError(
                "degenerate_quadratic", "changing_point",
                "degenerate quadratic elicitation: the initial value and the "
                "average coincide for this changing point, so the curvature "
                "is undetermined"))
        kappa = (spec.initial - spec.average) / denom
        v = spec.average - kappa * moment
        values = v + kappa * (grid - c) ** 2
    return DayCurve(values=values, role=spec.role)


def validate_curve(curve: DayCurve, role: TrendRole | None = None) -> list[FieldError]:
    """Role-specific range checks; returns the violations (empty when valid).

    Effect curves must be nonnegative on every day: a negative proximal effect
    on some days means the elicited trend contradicts the alternative being
    powered and the calculation is refused. Availability curves are expected
    proportions and must stay within [0, 1]; out-of-range values are an error,
    never silently clamped, since clamping would change the answer invisibly.
    """
    role = role or curve.role
    errs: list[FieldError] = []
    vals = curve.values
    # tolerate float dust: curves elicited to touch a boundary exactly
    # (e.g. initial 0) may land an ulp past it after reconstruction
    tol = 1e-9 * max(1.0, float(np.max(np.abs(vals))) if len(vals) else 1.0)
    if role == "effect":
        bad = np.nonzero(vals < -tol)[0]
        if bad.size:
            days = [int(d) + 1 for d in bad[:10]]
            errs.append(FieldError(
                "effect_negative", "effect",
                f"effect trend goes negative on day(s) {days}"
                + ("..." if bad.size > 10 else ""),
                detail={"days": days}))
    else:
        bad = np.nonzero((vals < -tol) | (vals > 1.0 + tol))[0]
        if bad.size:
            days = [int(d) + 1 for d in bad[:10]]
            errs.append(FieldError(
                "availability_range", "availability",
                f"availability must stay within [0, 1]; violated on day(s) {days}"
                + ("..." if bad.size > 10 else ""),
                detail={"days": days}))
    return errs


def effect_basis_coefficients(spec: TrendSpec, days: int) -> np.ndarray:
    """Coefficients d with d(t) = Z_t^T d for the in-day basis (1, g, g^2),
    g = day - 1.

    constant:  (average,)
    linear:    (initial, s)
    quadratic: (v + kappa (1-c)^2, 2 kappa (1-c), kappa) — first entry equals
               `initial` since value(1) = initial.
    """
    build_curve(spec, days)  # validates the elicitation
    if spec.kind == "constant":
        return np.array([float(spec.average)])
    if spec.kind == "linear":
        if days == 1:
            return np.array([float(spec.initial), 0.0])
        slope = 2.0 * (spec.average - spec.initial) / (days - 1)
        return np.array([float(spec.initial), slope])
    c = float(spec.changing_point)
    grid = np.arange(1, days + 1, dtype=float)
    moment = _quad_moment(grid, c)
    kappa = (spec.initial - spec.average) / ((1.0 - c) ** 2 - moment)
    v = spec.average - kappa * moment
    return np.array([v + kappa * (1.0 - c) ** 2, 2.0 * kappa * (1.0 - c), kappa])
