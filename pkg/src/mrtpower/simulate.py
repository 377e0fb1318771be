"""Monte Carlo verification engine.

Generates participant trajectories under several error laws and deliberate
misspecifications (effect-shape drift, time-varying and arm-dependent error
variance), fits the working least-squares model with a sandwich variance, runs
the F-test, and reports empirical power.

Determinism contract: replication ``r`` of a scenario with seed ``s`` draws
everything from ``np.random.default_rng([s, r])`` in a fixed field order
(availability uniforms, treatment uniforms, error noise), with all N
participants drawn jointly per field. Results are therefore bit-identical
across runs and across worker counts.
"""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .design import StudyDesign
from .errors import FieldError, ValidationError
from .numerics import f_quantile

__all__ = [
    "ERROR_LAWS",
    "EFFECT_SHAPES",
    "VARIANCE_TRENDS",
    "CORRECTIONS",
    "GenerativeModel",
    "Trajectory",
    "FitResult",
    "ScenarioResult",
    "variance_profile",
    "effect_shape_curve",
    "critical_value",
    "generate_trajectory",
    "wls_fit",
    "run_scenario",
]

ERROR_LAWS = ("iid_normal", "iid_t3", "iid_centered_exp", "ar", "cs_block")
EFFECT_SHAPES = ("in_class", "maintained", "slightly_degraded", "severely_degraded")
VARIANCE_TRENDS = ("flat", "incr", "decr", "jump")
CORRECTIONS = ("none", "md", "kc")

_CORRELATED_LAWS = ("ar", "cs_block")


@dataclass(frozen=True)
class GenerativeModel:
    """How outcomes are generated, possibly violating the working assumptions.

    error_law: iid_normal | iid_t3 | iid_centered_exp | ar | cs_block; the
        correlated laws need rho_corr in (-1, 1). All laws have unit marginal
        variance (t3 scaled by 1/sqrt(3), exponential(1) centered).
    effect_shape: in_class keeps the effect exactly on the working basis;
        maintained / slightly_degraded / severely_degraded swap in the
        piecewise-linear rise-then-hold / rise-then-fade / rise-then-vanish
        day curves with the same average effect.
    variance_trend: flat | incr | decr | jump — time profile of the average
        conditional error variance, rescaled so its time mean is 1.
    ratio: sigma_1t / sigma_0t, constant over t (arm-dependent variance).
    """

    error_law: str = "iid_normal"
    rho_corr: float | None = None
    effect_shape: str = "in_class"
    variance_trend: str = "flat"
    ratio: float = 1.0
    seed: int = 0

    def __post_init__(self) -> None:
        errs = []
        if self.error_law not in ERROR_LAWS:
            errs.append(FieldError(
                "invalid_error_law", "error_law",
                f"error_law must be one of {', '.join(ERROR_LAWS)}, "
                f"got {self.error_law!r}"))
        elif self.error_law in _CORRELATED_LAWS:
            if self.rho_corr is None:
                errs.append(FieldError(
                    "missing_field", "rho_corr",
                    f"error_law {self.error_law!r} requires rho_corr"))
            elif not -1.0 < float(self.rho_corr) < 1.0:
                errs.append(FieldError(
                    "rho_corr_out_of_range", "rho_corr",
                    f"rho_corr must be in (-1, 1), got {self.rho_corr}"))
        elif self.rho_corr is not None:
            errs.append(FieldError(
                "unexpected_field", "rho_corr",
                f"rho_corr does not apply to error_law {self.error_law!r}"))
        if self.effect_shape not in EFFECT_SHAPES:
            errs.append(FieldError(
                "invalid_effect_shape", "effect_shape",
                f"effect_shape must be one of {', '.join(EFFECT_SHAPES)}, "
                f"got {self.effect_shape!r}"))
        if self.variance_trend not in VARIANCE_TRENDS:
            errs.append(FieldError(
                "invalid_variance_trend", "variance_trend",
                f"variance_trend must be one of {', '.join(VARIANCE_TRENDS)}, "
                f"got {self.variance_trend!r}"))
        if not (isinstance(self.ratio, (int, float)) and self.ratio > 0
                and math.isfinite(self.ratio)):
            errs.append(FieldError(
                "ratio_out_of_range", "ratio",
                f"ratio must be a finite positive number, got {self.ratio}"))
        if not (isinstance(self.seed, int) and self.seed >= 0):
            errs.append(FieldError(
                "invalid_seed", "seed",
                f"seed must be a nonnegative integer, got {self.seed!r}"))
        if errs:
            raise ValidationError(errs)


@dataclass(frozen=True)
class Trajectory:
    """One participant. treatment is -1 (undefined) at unavailable times;
    outcome is present for every t but unavailable times contribute nothing
    to any fit."""

    availability: np.ndarray  # (T,) int8 in {0, 1}
    treatment: np.ndarray     # (T,) int8 in {-1, 0, 1}
    outcome: np.ndarray       # (T,) float


@dataclass(frozen=True)
class FitResult:
    alpha_hat: np.ndarray
    beta_hat: np.ndarray
    sigma_beta_hat: np.ndarray
    test_statistic: float
    reject: bool


@dataclass(frozen=True)
class ScenarioResult:
    empirical_power: float
    se: float
    replications: int
    rejections: int
    discarded: int
    inputs: dict = field(default_factory=dict)


def variance_profile(trend: str, t_total: int) -> np.ndarray:
    """Relative variance over decision times, rescaled to time mean 1."""
    if trend not in VARIANCE_TRENDS:
        raise ValidationError(FieldError(
            "invalid_variance_trend", "variance_trend",
            f"variance_trend must be one of {', '.join(VARIANCE_TRENDS)}, "
            f"got {trend!r}"))
    if trend == "flat" or t_total == 1:
        return np.ones(t_total)
    u = np.arange(t_total, dtype=float) / (t_total - 1)
    if trend == "incr":
        v = 0.5 + u
    elif trend == "decr":
        v = 1.5 - u
    else:  # jump at midstudy
        t = np.arange(t_total, dtype=float)
        v = np.where(t < t_total / 2, 0.5, 1.5)
    return v / v.mean()


def effect_shape_curve(shape: str, days: int, per_day: int, d_bar: float) -> np.ndarray:
    """Per-decision-time effect for the off-basis shapes.

    All three rise linearly from 0 on day 1 to a peak at day (D+1)/2, then
    hold the peak (maintained), decline to 60% of it by day D
    (slightly_degraded), or decline to zero at day D (severely_degraded);
    the curve is scaled so its day mean equals d_bar.
    """
    if shape not in EFFECT_SHAPES or shape == "in_class":
        raise ValidationError(FieldError(
            "invalid_effect_shape", "effect_shape",
            "shape must be maintained, slightly_degraded or severely_degraded "
            "(in_class effects come from the design itself), "
            f"got {shape!r}"))
    if days == 1:
        return np.full(per_day, float(d_bar))
    day = np.arange(1, days + 1, dtype=float)
    peak = (days + 1) / 2.0
    rise = (day - 1) / (peak - 1)
    if shape == "maintained":
        tail = np.ones_like(day)
    elif shape == "slightly_degraded":
        tail = 1.0 - 0.4 * (day - peak) / (days - peak)
    else:
        tail = (days - day) / (days - peak)
    vals = np.where(day <= peak, rise, tail)
    vals = vals * (float(d_bar) / vals.mean())
    return np.repeat(vals, per_day)


@lru_cache(maxsize=4096)
def critical_value(alpha0: float, p: int, q: int, n: int) -> float:
    """Rejection threshold for N beta' Sigma_beta^{-1} beta: the F quantile
    times the small-sample multiplier p(N-q-1)/(N-q-p)."""
    df2 = n - q - p
    return p * (n - q - 1) / df2 * f_quantile(1.0 - alpha0, p, df2)


def _arm_scales(design: StudyDesign, model: GenerativeModel) -> tuple[np.ndarray, np.ndarray]:
    """Per-time error SD for the untreated and treated arm. The availability-
    and treatment-averaged variance at t equals the trend profile:
    rho_t sigma_1t^2 + (1 - rho_t) sigma_0t^2 = v_t."""
    v = variance_profile(model.variance_trend, design.T)
    r = float(model.ratio)
    sig0 = np.sqrt(v / (design.rho_t * r * r + 1.0 - design.rho_t))
    return sig0, r * sig0


def _error_cholesky(model: GenerativeModel, days: int, per_day: int) -> np.ndarray | None:
    """Cholesky factor of the error correlation over all T slots, or None
    for the independent laws."""
    if model.error_law not in _CORRELATED_LAWS:
        return None
    rho = float(model.rho_corr)
    t_total = days * per_day
    if model.error_law == "ar":
        idx = np.arange(t_total)
        return np.linalg.cholesky(rho ** np.abs(idx[:, None] - idx[None, :]))
    if per_day > 1 and rho <= -1.0 / (per_day - 1):
        raise ValidationError(FieldError(
            "rho_corr_out_of_range", "rho_corr",
            f"cs_block correlation must exceed -1/(K-1) = {-1.0 / (per_day - 1):.4f} "
            f"for K = {per_day}, got {rho}"))
    block = np.linalg.cholesky(
        (1.0 - rho) * np.eye(per_day) + rho * np.ones((per_day, per_day)))
    return np.kron(np.eye(days), block)


def _effect_curve(design: StudyDesign, model: GenerativeModel) -> np.ndarray:
    base = design.effect_curve_t()
    if model.effect_shape == "in_class":
        return base
    return effect_shape_curve(
        model.effect_shape, design.days, design.per_day, float(base.mean()))


def _generate_block(design, model, n, rng, d_t, sig0, sig1, chol):
    """Draw all n participants for one replication. Field order and joint
    shapes are part of the determinism contract; do not reorder."""
    t_total = design.T
    avail = rng.random((n, t_total)) < design.tau_t
    treat = (rng.random((n, t_total)) < design.rho_t).astype(float)
    if model.error_law == "iid_normal":
        eps = rng.standard_normal((n, t_total))
    elif model.error_law == "iid_t3":
        eps = rng.standard_t(3.0, size=(n, t_total)) / math.sqrt(3.0)
    elif model.error_law == "iid_centered_exp":
        eps = rng.exponential(1.0, size=(n, t_total)) - 1.0
    else:
        eps = rng.standard_normal((n, t_total)) @ chol.T
    sd = np.where(treat > 0.5, sig1[None, :], sig0[None, :])
    outcome = (treat - design.rho_t) * d_t[None, :] + sd * eps
    return avail.astype(float), treat, outcome


def generate_trajectory(design: StudyDesign, model: GenerativeModel,
                        rng: np.random.Generator) -> Trajectory:
    """One participant's trajectory; treatment is masked to -1 (undefined)
    where the participant was unavailable."""
    d_t = _effect_curve(design, model)
    sig0, sig1 = _arm_scales(design, model)
    chol = _error_cholesky(model, design.days, design.per_day)
    avail, treat, outcome = _generate_block(
        design, model, 1, rng, d_t, sig0, sig1, chol)
    avail8 = avail[0].astype(np.int8)
    treat8 = np.where(avail[0] > 0.5, treat[0], -1.0).astype(np.int8)
    return Trajectory(availability=avail8, treatment=treat8, outcome=outcome[0])


def _fit_arrays(avail, treat, outcome, design, crit, correction):
    """Vectorized least-squares fit + sandwich over an (n, T) block.

    Unavailable rows are zeroed out of the regressors, outcomes and
    residuals, so they contribute nothing to any sum. Raises
    np.linalg.LinAlgError when a required matrix is singular (the caller
    discards and counts the replication).
    """
    q, p = design.q, design.p
    b_basis = design.b_basis()
    z_basis = design.z_basis()
    centered = (treat - design.rho_t) * avail
    x = np.concatenate(
        [b_basis[None, :, :] * avail[:, :, None],
         centered[:, :, None] * z_basis[None, :, :]], axis=2)
    y = outcome * avail
    s = np.einsum("ita,itb->iab", x, x)
    q_tot = s.sum(axis=0)
    theta = np.linalg.solve(q_tot, np.einsum("ita,it->ia", x, y).sum(axis=0))
    resid = y - x @ theta
    w = np.einsum("ita,it->ia", x, resid)
    if correction == "md":
        adj = np.linalg.solve(q_tot[None, :, :] - s, w[:, :, None])[:, :, 0]
        w = w + np.einsum("iab,ib->ia", s, adj)
    elif correction == "kc":
        l_g = np.linalg.cholesky(np.linalg.inv(q_tot))
        c = np.einsum("ba,ibc,cd->iad", l_g, s, l_g)
        lam, vec = np.linalg.eigh(c)
        if np.any(lam >= 1.0 - 1e-12):
            raise np.linalg.LinAlgError("leverage eigenvalue at or above 1")
        fac = np.where(lam > 1e-12,
                       ((1.0 - lam) ** -0.5 - 1.0) / np.where(lam > 1e-12, lam, 1.0),
                       0.5)
        inner = fac * np.einsum("iba,ib->ia", vec, np.einsum("ba,ib->ia", l_g, w))
        w = w + np.einsum("iab,ib->ia", s, np.einsum(
            "ab,ib->ia", l_g, np.einsum("iab,ib->ia", vec, inner)))
    n = avail.shape[0]
    lam_hat = np.einsum("ia,ib->ab", w, w) / n
    q_inv = np.linalg.inv(q_tot / n)
    sigma = q_inv @ lam_hat @ q_inv
    sigma_beta = sigma[q:, q:]
    beta = theta[q:]
    stat = float(n * beta @ np.linalg.solve(sigma_beta, beta))
    if not math.isfinite(stat):
        raise np.linalg.LinAlgError("non-finite test statistic")
    return theta[:q], beta, sigma_beta, stat, stat > crit


def _validate_fit_args(design, n, alpha0, correction):
    errs = []
    if n < design.p + design.q + 1:
        errs.append(FieldError(
            "n_too_small", "n",
            f"need at least p+q+1 = {design.p + design.q + 1} participants, got {n}"))
    if not 0.0 < alpha0 < 1.0:
        errs.append(FieldError(
            "invalid_alpha", "alpha0", f"alpha0 must be in (0, 1), got {alpha0}"))
    if correction not in CORRECTIONS:
        errs.append(FieldError(
            "invalid_correction", "correction",
            f"correction must be one of {', '.join(CORRECTIONS)}, got {correction!r}"))
    if errs:
        raise ValidationError(errs)


def wls_fit(trajectories, design: StudyDesign, alpha0: float = 0.05,
            correction: str = "md") -> FitResult:
    """Fit the working model to N trajectories and test the effect.

    correction picks the sandwich middle-term residual adjustment: "none" for
    the plain estimator, "md" (default) inflates residuals by (I - H_i)^{-1},
    "kc" by (I - H_i)^{-1/2}.
    """
    trajectories = list(trajectories)
    _validate_fit_args(design, len(trajectories), alpha0, correction)
    t_total = design.T
    for traj in trajectories:
        if traj.outcome.shape != (t_total,):
            raise ValidationError(FieldError(
                "length_mismatch", "trajectories",
                f"trajectory has {traj.outcome.shape[0]} decision times, "
                f"design has {t_total}"))
    avail = np.stack([t.availability for t in trajectories]).astype(float)
    treat = np.stack([t.treatment for t in trajectories]).astype(float)
    outcome = np.stack([t.outcome for t in trajectories])
    crit = critical_value(alpha0, design.p, design.q, len(trajectories))
    alpha_hat, beta, sigma_beta, stat, reject = _fit_arrays(
        avail, treat, outcome, design, crit, correction)
    return FitResult(alpha_hat=alpha_hat, beta_hat=beta,
                     sigma_beta_hat=sigma_beta, test_statistic=stat,
                     reject=bool(reject))


def _run_reps(design, model, n, alpha0, correction, seed, rep_lo, rep_hi):
    d_t = _effect_curve(design, model)
    sig0, sig1 = _arm_scales(design, model)
    chol = _error_cholesky(model, design.days, design.per_day)
    crit = critical_value(alpha0, design.p, design.q, n)
    rejections = 0
    discarded = 0
    for rep in range(rep_lo, rep_hi):
        rng = np.random.default_rng([seed, rep])
        avail, treat, outcome = _generate_block(
            design, model, n, rng, d_t, sig0, sig1, chol)
        try:
            *_, reject = _fit_arrays(avail, treat, outcome, design, crit, correction)
        except np.linalg.LinAlgError:
            discarded += 1
            continue
        rejections += int(reject)
    return rejections, discarded


def _run_reps_star(args):
    return _run_reps(*args)


def run_scenario(design: StudyDesign, model: GenerativeModel, n: int,
                 alpha0: float = 0.05, replications: int = 1000,
                 seed: int | None = None, correction: str = "md",
                 workers: int = 1) -> ScenarioResult:
    """Empirical power of the effect test under the generative model.

    Replication r draws from np.random.default_rng([seed, r]), so the result
    is reproducible bit-for-bit and independent of workers. Replications
    whose fit hits a singular matrix are discarded and counted (they never
    reject).
    """
    _validate_fit_args(design, n, alpha0, correction)
    if replications < 1:
        raise ValidationError(FieldError(
            "invalid_replications", "replications",
            f"replications must be >= 1, got {replications}"))
    if seed is None:
        seed = model.seed
    workers = max(1, int(workers))
    if workers == 1:
        rejections, discarded = _run_reps(
            design, model, n, alpha0, correction, seed, 0, replications)
    else:
        bounds = np.linspace(0, replications, workers + 1).astype(int)
        tasks = [(design, model, n, alpha0, correction, seed, int(lo), int(hi))
                 for lo, hi in zip(bounds[:-1], bounds[1:]) if lo < hi]
        rejections = discarded = 0
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for rej, disc in pool.map(_run_reps_star, tasks):
                rejections += rej
                discarded += disc
    p_hat = rejections / replications
    se = math.sqrt(p_hat * (1.0 - p_hat) / replications)
    inputs = {
        "design": dict(design.inputs),
        "model": {
            "error_law": model.error_law,
            "rho_corr": model.rho_corr,
            "effect_shape": model.effect_shape,
            "variance_trend": model.variance_trend,
            "ratio": model.ratio,
        },
        "n": n,
        "alpha0": alpha0,
        "replications": replications,
        "seed": seed,
        "correction": correction,
    }
    return ScenarioResult(empirical_power=p_hat, se=se,
                          replications=replications, rejections=rejections,
                          discarded=discarded, inputs=inputs)
