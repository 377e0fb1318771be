"""Special-function kernel: regularized incomplete beta, central F CDF and
quantile, noncentral F CDF, and bracketed root solving.

Self-contained on purpose: the sample-size solver's tolerances are pinned here
and oracle-tested, rather than inherited from whatever stats library happens to
be installed. scipy appears in the test suite only, as an independent oracle.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ConvergenceError, DomainError, SeriesCapError

__all__ = [
    "Tolerance",
    "DEFAULT_TOL",
    "reg_inc_beta",
    "f_cdf",
    "f_quantile",
    "noncentral_f_cdf",
    "solve_bracketed_root",
]

_TINY = 1e-300


@dataclass(frozen=True)
class Tolerance:
    """Shared numeric tolerances; one default instance covers the artifact."""

    abs_tol: float = 1e-12
    max_iter: int = 500
    series_terms_cap: int = 10000

    def __post_init__(self):
        if not self.abs_tol > 0:
            raise DomainError("abs_tol must be > 0")
        if self.max_iter < 1:
            raise DomainError("max_iter must be >= 1")
        if self.series_terms_cap < 1:
            raise DomainError("series_terms_cap must be >= 1")


DEFAULT_TOL = Tolerance()


def _beta_cf(x: float, a: float, b: float, tol: Tolerance) -> float:
    """Continued fraction for the incomplete beta, by Lentz's method.

    Converges fast only for x < (a+1)/(a+b+2); callers switch via symmetry.
    """
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _TINY:
        d = _TINY
    d = 1.0 / d
    h = d
    for m in range(1, tol.max_iter + 1):
        m2 = 2 * m
        # even step
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _TINY:
            d = _TINY
        c = 1.0 + aa / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        h *= d * c
        # odd step
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _TINY:
            d = _TINY
        c = 1.0 + aa / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < tol.abs_tol:
            return h
    raise ConvergenceError(
        f"incomplete beta continued fraction did not converge for "
        f"x={x}, a={a}, b={b}",
        residual=abs(delta - 1.0),
    )


def reg_inc_beta(x: float, a: float, b: float, tol: Tolerance = DEFAULT_TOL) -> float:
    """Regularized incomplete beta I_x(a, b)."""
    if math.isnan(x) or not 0.0 <= x <= 1.0:
        raise DomainError(f"x must be in [0, 1], got {x}")
    if not (a > 0 and b > 0) or math.isinf(a) or math.isinf(b):
        raise DomainError(f"a, b must be finite and > 0, got a={a}, b={b}")
    if x == 0.0:
        return 0.0
    if x == 1.0:
        return 1.0
    ln_front = (
        math.lgamma(a + b)
        - math.lgamma(a)
        - math.lgamma(b)
        + a * math.log(x)
        + b * math.log1p(-x)
    )
    front = math.exp(ln_front)
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _beta_cf(x, a, b, tol) / a
    return 1.0 - front * _beta_cf(1.0 - x, b, a, tol) / b


def f_cdf(x: float, d1: float, d2: float, tol: Tolerance = DEFAULT_TOL) -> float:
    """Central F distribution CDF."""
    if not (d1 > 0 and d2 > 0):
        raise DomainError(f"degrees of freedom must be > 0, got d1={d1}, d2={d2}")
    if math.isnan(x) or x < 0:
        raise DomainError(f"x must be >= 0, got {x}")
    if x == 0:
        return 0.0
    y = d1 * x / (d1 * x + d2)
    return reg_inc_beta(y, 0.5 * d1, 0.5 * d2, tol)


def f_quantile(u: float, d1: float, d2: float, tol: Tolerance = DEFAULT_TOL) -> float:
    """Inverse of f_cdf in x: the u-quantile of the F(d1, d2) distribution."""
    if not 0.0 < u < 1.0:
        raise DomainError(f"u must be strictly inside (0, 1), got {u}")
    if not (d1 > 0 and d2 > 0):
        raise DomainError(f"degrees of freedom must be > 0, got d1={d1}, d2={d2}")
    hi = 1.0
    for _ in range(tol.max_iter):
        if f_cdf(hi, d1, d2, tol) >= u:
            break
        hi *= 2.0
    else:
        raise ConvergenceError(f"failed to bracket the {u}-quantile of F({d1},{d2})")
    return solve_bracketed_root(lambda x: f_cdf(x, d1, d2, tol) - u, 0.0, hi, tol)


def solve_bracketed_root(f, lo: float, hi: float, tol: Tolerance = DEFAULT_TOL) -> float:
    """Root of a continuous f on [lo, hi], by a secant/bisection hybrid.

    Requires a sign change over the bracket. Converges when |f| <= abs_tol or
    the bracket width falls to abs_tol.
    """
    flo, fhi = f(lo), f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if (flo > 0) == (fhi > 0):
        raise DomainError(
            f"invalid bracket: f({lo})={flo} and f({hi})={fhi} have the same sign"
        )
    x, fx = hi, fhi
    for _ in range(tol.max_iter):
        width = hi - lo
        denom = fhi - flo
        if denom != 0.0:
            x = hi - fhi * (hi - lo) / denom
        # fall back to bisection when the secant step leaves the bracket or
        # fails to shrink it meaningfully
        if not (lo < x < hi) or min(x - lo, hi - x) < 0.01 * width:
            x = 0.5 * (lo + hi)
        fx = f(x)
        if abs(fx) <= tol.abs_tol or width <= tol.abs_tol:
            return x
        if (fx > 0) == (flo > 0):
            lo, flo = x, fx
        else:
            hi, fhi = x, fx
    if abs(fx) <= 1e-9 or (hi - lo) <= 1e-9:
        return x
    raise ConvergenceError(
        f"root solve did not converge; residual {abs(fx)}", residual=abs(fx)
    )


def noncentral_f_cdf(
    x: float, d1: float, d2: float, ncp: float, tol: Tolerance = DEFAULT_TOL
) -> float:
    """Noncentral F CDF with noncentrality ncp.

    Evaluated as the Poisson(ncp/2)-weighted mixture of incomplete beta
    functions, summed outward from the modal Poisson index so large ncp does
    not underflow the leading weights. Incomplete beta values at successive
    indices come from the stable one-step recurrences.
    """
    if not (d1 > 0 and d2 > 0):
        raise DomainError(f"degrees of freedom must be > 0, got d1={d1}, d2={d2}")
    if math.isnan(ncp) or ncp < 0:
        raise DomainError(f"ncp must be >= 0, got {ncp}")
    if math.isnan(x) or x < 0:
        raise DomainError(f"x must be >= 0, got {x}")
    if x == 0:
        return 0.0
    if ncp == 0:
        return f_cdf(x, d1, d2, tol)
    y = d1 * x / (d1 * x + d2)
    if y >= 1.0:
        return 1.0
    lam = 0.5 * ncp
    b = 0.5 * d2
    j0 = int(lam)
    a0 = 0.5 * d1 + j0
    # modal Poisson weight and incomplete beta, then the term
    # G(a) = y^a (1-y)^b / (a B(a, b)) driving I_y(a+1,b) = I_y(a,b) - G(a)
    lw0 = -lam if j0 == 0 else -lam + j0 * math.log(lam) - math.lgamma(j0 + 1)
    w0 = math.exp(lw0)
    i0 = reg_inc_beta(y, a0, b, tol)
    lg0 = (
        a0 * math.log(y)
        + b * math.log1p(-y)
        + math.lgamma(a0 + b)
        - math.lgamma(a0 + 1.0)
        - math.lgamma(b)
    )
    g0 = math.exp(lg0)

    total = w0 * i0
    sumw = w0
    terms = 1

    # downward from the mode (finite; weights decay fast below it)
    w, g, i, aj = w0, g0, i0, a0
    j = j0
    while j > 0:
        if terms >= tol.series_terms_cap:
            rem = max(0.0, 1.0 - sumw)
            raise SeriesCapError(
                f"noncentral F series hit the {tol.series_terms_cap}-term cap",
                lower=total,
                upper=min(1.0, total + rem),
            )
        w = w * j / lam
        g = g * aj / (y * (aj + b - 1.0))
        i = min(1.0, i + g)
        aj -= 1.0
        j -= 1
        total += w * i
        sumw += w
        terms += 1
        if w * max(j, 1) < 0.25 * tol.abs_tol:
            sumw += w * j  # bound the skipped mass as if all remaining weight were here
            break

    # upward from the mode until the Poisson tail is negligible
    w, g, i, aj = w0, g0, i0, a0
    j = j0
    while 1.0 - sumw > tol.abs_tol:
        if terms >= tol.series_terms_cap:
            rem = max(0.0, 1.0 - sumw)
            raise SeriesCapError(
                f"noncentral F series hit the {tol.series_terms_cap}-term cap",
                lower=total,
                upper=min(1.0, total + rem),
            )
        w = w * lam / (j + 1.0)
        i = max(0.0, i - g)
        g = g * y * (aj + b) / (aj + 1.0)
        aj += 1.0
        j += 1
        total += w * i
        sumw += w
        terms += 1
        # Rounding in w0 can leave sumw permanently short of 1 by a few
        # ulps-of-the-log, so the mass test alone may never fire at large ncp.
        # Past the mode the weight ratios lam/(j+1) shrink, so the remaining
        # mass is under the geometric sum w*r/(1-r); the beta factors only
        # decrease along j, making that a bound on the remaining contribution.
        r = lam / (j + 1.0)
        if r < 1.0 and w * r / (1.0 - r) < 0.25 * tol.abs_tol:
            break
    return min(1.0, max(0.0, total))
