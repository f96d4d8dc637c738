"""Chi-square distribution functions and simple estimators.

The regularized incomplete gamma function is evaluated with the classic
power series for ``x < a + 1`` and the Lentz continued fraction otherwise,
which keeps the absolute error near machine precision for the degrees of
freedom that appear in the scores (a few to a few hundred).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

_EPS = 1e-16
_TINY = 1e-300
_MAX_ITER = 10_000


@dataclass(frozen=True)
class Chi2Spec:
    dof: int
    quantile: float = 0.997

    def __post_init__(self) -> None:
        if self.dof < 1:
            raise ValueError("degrees of freedom must be >= 1")
        if not 0.0 < self.quantile < 1.0:
            raise ValueError("quantile must lie in (0, 1)")

    def threshold(self) -> float:
        return chi2_inv(self.quantile, self.dof)


def _gamma_series(a: float, x: float) -> float:
    term = 1.0 / a
    total = term
    ap = a
    for _ in range(_MAX_ITER):
        ap += 1.0
        term *= x / ap
        total += term
        if abs(term) < abs(total) * _EPS:
            break
    return total * math.exp(-x + a * math.log(x) - math.lgamma(a))


def _gamma_cf(a: float, x: float) -> float:
    """Upper regularized gamma Q(a, x) by modified Lentz."""
    b = x + 1.0 - a
    c = 1.0 / _TINY
    d = 1.0 / b
    h = d
    for i in range(1, _MAX_ITER):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < _TINY:
            d = _TINY
        c = b + an / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            break
    return math.exp(-x + a * math.log(x) - math.lgamma(a)) * h


def gammainc_lower(a: float, x: float) -> float:
    """Regularized lower incomplete gamma ``P(a, x)``."""
    if a <= 0:
        raise ValueError("a must be positive")
    if x < 0:
        raise ValueError("x must be nonnegative")
    if x == 0:
        return 0.0
    if x < a + 1.0:
        return min(1.0, _gamma_series(a, x))
    return max(0.0, 1.0 - _gamma_cf(a, x))


def gammainc_upper(a: float, x: float) -> float:
    """Regularized upper incomplete gamma ``Q(a, x) = 1 - P(a, x)``."""
    if x < a + 1.0:
        return 1.0 - gammainc_lower(a, x)
    return _gamma_cf(a, x)


def _check_dof(dof: int) -> None:
    if dof < 1:
        raise ValueError("degrees of freedom must be >= 1")


def chi2_cdf(x: float, dof: int) -> float:
    _check_dof(dof)
    if x < 0:
        raise ValueError("chi-square argument must be nonnegative")
    return gammainc_lower(dof / 2.0, x / 2.0)


def chi2_pdf(x: float, dof: int) -> float:
    _check_dof(dof)
    if x <= 0:
        return 0.0 if dof != 2 else (0.5 if x == 0 else 0.0)
    k = dof / 2.0
    return math.exp((k - 1.0) * math.log(x) - x / 2.0 - k * math.log(2.0) - math.lgamma(k))


def chi2_inv(q: float, dof: int, tol: float = 1e-12) -> float:
    """Inverse chi-square CDF by bracketed bisection with Newton steps."""
    _check_dof(dof)
    if not 0.0 < q < 1.0:
        raise ValueError("quantile must lie strictly between 0 and 1")
    if dof == 2:
        return -2.0 * math.log1p(-q)
    lo, hi = 0.0, max(1.0, float(dof))
    while chi2_cdf(hi, dof) < q:
        lo, hi = hi, 2.0 * hi
    x = 0.5 * (lo + hi)
    for _ in range(200):
        f = chi2_cdf(x, dof) - q
        if f > 0:
            hi = x
        else:
            lo = x
        dens = chi2_pdf(x, dof)
        step_ok = False
        if dens > 0:
            x_new = x - f / dens
            if lo < x_new < hi:
                step_ok = True
        x_prev = x
        x = x_new if step_ok else 0.5 * (lo + hi)
        if abs(x - x_prev) <= tol * max(1.0, x):
            break
    return x


def mean_stderr(samples: Sequence[float]) -> tuple[float, float]:
    """Sample mean and standard error (``ddof=1``)."""
    arr = np.asarray(samples, dtype=float)
    if arr.size == 0:
        raise ValueError("no samples")
    mean = float(arr.mean())
    if arr.size < 2:
        return mean, float("nan")
    return mean, float(arr.std(ddof=1) / math.sqrt(arr.size))


def gaussian_samples(mean: Sequence[float], sigma: Sequence[float], n_samples: int, rng: np.random.Generator) -> np.ndarray:
    """``(n_samples, len(mean))`` i.i.d. normal draws, per-column mean and sigma."""
    mean = np.asarray(mean, dtype=float)
    sigma = np.asarray(sigma, dtype=float)
    return mean[None, :] + sigma[None, :] * rng.standard_normal((n_samples, mean.size))
