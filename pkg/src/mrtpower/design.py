"""Full trial description: time grid, randomization schedule, availability,
effect basis, the information matrix feeding the noncentrality parameter, and
the projection of arbitrary effect curves onto the working basis.

Decision times are indexed t = 1..T with T = D*K; the in-day index
g = floor((t-1)/K) maps t to its (0-based) day. The effect basis is
Z_t = (1), (1, g) or (1, g, g^2) according to the elicited effect class; the
intercept (nuisance) basis B_t is quadratic in g by default.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from .errors import FieldError, ValidationError
from .trends import DayCurve, TrendSpec, build_curve, effect_basis_coefficients, validate_curve

__all__ = [
    "RandomizationSchedule",
    "StudyDesign",
    "build_design",
    "parse_probability_csv",
    "information_matrix",
    "project_effect",
    "time_basis",
]

RandMode = Literal["constant", "per_day", "per_time"]


@dataclass(frozen=True)
class RandomizationSchedule:
    """Randomization probabilities, constant or varying by day / decision time."""

    mode: RandMode
    values: float | np.ndarray

    def materialize(self, days: int, per_day: int) -> np.ndarray:
        """Per-decision-time probabilities, length T = days*per_day."""
        T = days * per_day
        if self.mode == "constant":
            return np.full(T, float(self.values))
        vals = np.asarray(self.values, dtype=float)
        if self.mode == "per_day":
            if len(vals) != days:
                raise ValidationError(FieldError(
                    "length_mismatch", "randomization.values",
                    f"per-day schedule needs {days} values, got {len(vals)}"))
            return np.repeat(vals, per_day)
        if len(vals) != T:
            raise ValidationError(FieldError(
                "length_mismatch", "randomization.values",
                f"per-time schedule needs {T} values, got {len(vals)}"))
        return vals.copy()


@dataclass(frozen=True)
class StudyDesign:
    """Immutable, fully materialized trial description."""

    days: int
    per_day: int
    rho_t: np.ndarray          # length T, each in (0,1)
    availability: DayCurve     # day-indexed expected availability
    effect: TrendSpec | None   # None when the effect was supplied as a curve
    d: np.ndarray              # effect coefficients in the Z basis, length p
    p: int
    q: int
    inputs: dict = field(default_factory=dict)  # echo of raw inputs

    @property
    def T(self) -> int:
        return self.days * self.per_day

    @property
    def tau_t(self) -> np.ndarray:
        return self.availability.per_decision_time(self.per_day)

    def z_basis(self) -> np.ndarray:
        return time_basis(self.days, self.per_day, self.p)

    def b_basis(self) -> np.ndarray:
        return time_basis(self.days, self.per_day, self.q)

    def effect_curve_t(self) -> np.ndarray:
        """The modeled per-decision-time standardized effect Z_t^T d."""
        return self.z_basis() @ self.d


def time_basis(days: int, per_day: int, dim: int) -> np.ndarray:
    """Polynomial basis (1, g, ..., g^(dim-1)) with g = day index, per t."""
    g = np.repeat(np.arange(days, dtype=float), per_day)
    return np.vander(g, dim, increasing=True)


_EFFECT_DIM = {"constant": 1, "linear": 2, "quadratic": 3}


def build_design(
    days: int,
    per_day: int,
    randomization: RandomizationSchedule,
    availability: TrendSpec,
    effect: TrendSpec,
    q: int | None = None,
    inputs: dict | None = None,
) -> StudyDesign:
    """Validate all inputs and assemble the design.

    The intercept basis dimension q defaults to min(3, days): the sample-size
    model pairs any effect class with a quadratic-in-day nuisance regression,
    which is the configuration whose analytic powers the simulator verifies.
    """
    errs: list[FieldError] = []
    if days < 1:
        errs.append(FieldError("invalid_days", "days", f"days must be >= 1, got {days}"))
    if per_day < 1:
        errs.append(FieldError("invalid_per_day", "per_day",
                               f"per_day must be >= 1, got {per_day}"))
    if errs:
        raise ValidationError(errs)

    if isinstance(randomization, (int, float)):
        randomization = RandomizationSchedule(
            mode="constant", values=float(randomization))
    rho_t = randomization.materialize(days, per_day)
    if np.any((rho_t <= 0) | (rho_t >= 1)):
        bad = int(np.nonzero((rho_t <= 0) | (rho_t >= 1))[0][0]) + 1
        raise ValidationError(FieldError(
            "prob_out_of_range", "randomization.values",
            f"randomization probabilities must lie strictly inside (0, 1); "
            f"first violation at decision time {bad}"))

    avail_curve = build_curve(availability, days)
    errs.extend(validate_curve(avail_curve, "availability"))
    effect_curve = build_curve(effect, days)
    errs.extend(validate_curve(effect_curve, "effect"))
    if errs:
        raise ValidationError(errs)

    p = _EFFECT_DIM[effect.kind]
    d = effect_basis_coefficients(effect, days)
    q_eff = q if q is not None else min(3, days)
    if q_eff < 1:
        raise ValidationError(FieldError("invalid_q", "q", f"q must be >= 1, got {q_eff}"))
    return StudyDesign(
        days=days, per_day=per_day, rho_t=rho_t, availability=avail_curve,
        effect=effect, d=d, p=p, q=q_eff, inputs=inputs or {},
    )


def parse_probability_csv(
    data: bytes | str, mode: Literal["per_day", "per_time"], days: int, per_day: int
) -> RandomizationSchedule:
    """Parse an uploaded randomization-probability CSV.

    Format: header line `index,probability`, then one `int,decimal` row per
    index. Indices must cover exactly 1..D (per_day) or 1..T (per_time) in any
    order without duplicates; probabilities must lie strictly inside (0, 1).
    Errors carry the offending line number.
    """
    if isinstance(data, bytes):
        try:
            text = data.decode("utf-8-sig")
        except UnicodeDecodeError as exc:
            raise ValidationError(FieldError(
                "csv_encoding", "csv", f"CSV is not valid UTF-8: {exc}")) from exc
    else:
        text = data.lstrip("﻿")

    expected = days if mode == "per_day" else days * per_day
    reader = csv.reader(io.StringIO(text))
    rows = list(reader)
    if not rows or [c.strip() for c in rows[0]] != ["index", "probability"]:
        raise ValidationError(FieldError(
            "csv_header", "csv",
            "first line must be the header `index,probability`",
            detail={"line": 1}))

    seen: dict[int, float] = {}
    for lineno, row in enumerate(rows[1:], start=2):
        if not row or (len(row) == 1 and not row[0].strip()):
            continue  # ignore blank lines
        if len(row) != 2:
            raise ValidationError(FieldError(
                "csv_malformed_row", "csv",
                f"line {lineno}: expected `index,probability`, got {len(row)} fields",
                detail={"line": lineno}))
        try:
            idx = int(row[0].strip())
        except ValueError:
            raise ValidationError(FieldError(
                "csv_malformed_row", "csv",
                f"line {lineno}: index {row[0]!r} is not an integer",
                detail={"line": lineno})) from None
        try:
            prob = float(row[1].strip())
        except ValueError:
            raise ValidationError(FieldError(
                "csv_malformed_row", "csv",
                f"line {lineno}: probability {row[1]!r} is not a decimal",
                detail={"line": lineno})) from None
        if idx in seen:
            raise ValidationError(FieldError(
                "csv_duplicate_index", "csv",
                f"line {lineno}: duplicate index {idx}",
                detail={"line": lineno, "index": idx}))
        if not 1 <= idx <= expected:
            raise ValidationError(FieldError(
                "csv_index_range", "csv",
                f"line {lineno}: index {idx} outside 1..{expected}",
                detail={"line": lineno, "index": idx}))
        if not 0.0 < prob < 1.0:
            raise ValidationError(FieldError(
                "csv_probability_range", "csv",
                f"line {lineno}: probability {prob} outside (0, 1)",
                detail={"line": lineno, "index": idx}))
        seen[idx] = prob

    missing = sorted(set(range(1, expected + 1)) - set(seen))
    if missing:
        raise ValidationError(FieldError(
            "csv_missing_index", "csv",
            f"missing index(es) {missing[:10]}{'...' if len(missing) > 10 else ''}",
            detail={"missing": missing[:10]}))
    values = np.array([seen[i] for i in range(1, expected + 1)])
    return RandomizationSchedule(mode=mode, values=values)


def information_matrix(design: StudyDesign) -> np.ndarray:
    """M = sum over t of tau_t rho_t (1-rho_t) Z_t Z_t^T (p x p)."""
    Z = design.z_basis()
    w = design.tau_t * design.rho_t * (1.0 - design.rho_t)
    M = (Z * w[:, None]).T @ Z
    M = 0.5 * (M + M.T)
    try:
        np.linalg.cholesky(M)
    except np.linalg.LinAlgError:
        raise ValidationError(FieldError(
            "singular_information", "design",
            "information matrix is singular: the design cannot identify the "
            "effect basis (check availability and day count vs basis dimension)"
        )) from None
    return M


def project_effect(d_curve: np.ndarray, design: StudyDesign) -> np.ndarray:
    """Availability-weighted projection of a per-t effect curve onto the Z basis:
    d = (sum tau_t Z_t Z_t^T)^{-1} sum tau_t Z_t d(t).

    Exact (round-trip) when d(t) already lies in the span of Z.
    """
    d_curve = np.asarray(d_curve, dtype=float)
    if len(d_curve) != design.T:
        raise ValidationError(FieldError(
            "length_mismatch", "effect_curve",
            f"effect curve must have length T={design.T}, got {len(d_curve)}"))
    Z = design.z_basis()
    tau = design.tau_t
    gram = (Z * tau[:, None]).T @ Z
    rhs = (Z * tau[:, None]).T @ d_curve
    try:
        return np.linalg.solve(gram, rhs)
    except np.linalg.LinAlgError:
        raise ValidationError(FieldError(
            "singular_information", "design",
            "projection Gram matrix is singular")) from None
