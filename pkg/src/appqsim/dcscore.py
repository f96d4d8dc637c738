"""Distinguishability-cost score for the free-fermion dynamics benchmark.

The score of a series ``{m_n, tau_n}`` (``n = 1..T``) is the smallest total
number of two-qubit gates that an ideal device, running the same circuits,
must spend to reject the series with a 3-sigma chi-square test.  All
quantities here use the per-site-averaged Z form

    o_n = (1/L) sum_j f_j <Z_j>,

for which the single-shot variance without inter-site correlations is
``v_n = sum_j (1 - f_j^2 t_{n,j}^2) / L^2``.  Series produced in the
fermionic form ``sum_j f_j <n_j>`` are converted with
``o = (sum_j f_j - 2 * fermionic) / L`` (see :func:`inputs_from_fermionic`).
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np

from . import fforacle
from .numstat import chi2_inv
from .simcore.series import MeasurementSeries

CAP = 1e18
QUANTILE = 0.997


@dataclass
class DCInputs:
    """Measured series and exact references, indexed by ``n = 1..T``.

    ``m``, ``tau``, ``t_exact`` have length ``T``; ``t_site`` has shape
    ``(T, L)`` (exact ``<Z_j>``); ``r`` is the Trotter-step ratio ``0.2/dt``
    of the continuous-time variant (1 otherwise).
    """

    m: np.ndarray
    tau: np.ndarray
    t_exact: np.ndarray
    t_site: np.ndarray
    weights: np.ndarray
    r: int = 1

    def __post_init__(self) -> None:
        self.m = np.asarray(self.m, dtype=float)
        self.tau = np.asarray(self.tau, dtype=float)
        self.t_exact = np.asarray(self.t_exact, dtype=float)
        self.t_site = np.atleast_2d(np.asarray(self.t_site, dtype=float))
        self.weights = np.asarray(self.weights, dtype=float)
        T = self.m.size
        if T < 1:
            raise ValueError("need at least one time point")
        if self.tau.shape != (T,) or self.t_exact.shape != (T,):
            raise ValueError("m, tau and t_exact must have the same length")
        if self.t_site.shape != (T, self.weights.size):
            raise ValueError("t_site must have shape (T, L)")
        if np.any(self.tau < 0):
            raise ValueError("stderr must be nonnegative")
        if int(self.r) != self.r or self.r < 1:
            raise ValueError("Trotter-step ratio must be an integer >= 1")
        self.r = int(self.r)

    @property
    def T(self) -> int:
        return self.m.size

    @property
    def L(self) -> int:
        return self.weights.size

    @property
    def steps(self) -> np.ndarray:
        return np.arange(1, self.T + 1)


@dataclass
class DCScore:
    x: float
    delta_x: float
    n_star: int
    shots_required: float
    mean_score: float
    point_score: float
    capped_fraction: float
    mc_samples: int
    extra: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return asdict(self)


def unit_shot_variance(n: int, inputs: DCInputs) -> float:
    """Single-shot variance ``v_n`` of the site-averaged observable (correlations neglected)."""
    t = inputs.t_site[n - 1]
    return float(np.sum(1.0 - inputs.weights**2 * t**2) / inputs.L**2)


def unit_shot_variances(inputs: DCInputs) -> np.ndarray:
    return np.sum(1.0 - inputs.weights[None, :] ** 2 * inputs.t_site**2, axis=1) / inputs.L**2


def _score_rows(
    xi: np.ndarray, inputs: DCInputs, simple_nstar: bool, integer_shots: bool
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Vectorized score over rows of ``xi`` (shape ``(M, T)``): ``(score, n_star, shots)``."""
    v = np.maximum(unit_shot_variances(inputs), 0.0)
    n = inputs.steps.astype(float)
    d2 = (inputs.t_exact[None, :] - xi) ** 2
    with np.errstate(divide="ignore", invalid="ignore"):
        if simple_nstar:
            eff = d2 / n[None, :]
        else:
            eff = np.where(d2 > 0, d2 / (n[None, :] * v[None, :]), 0.0)
    eff = np.nan_to_num(eff, nan=0.0, posinf=np.inf)
    idx = np.argmax(eff, axis=1)
    rows = np.arange(xi.shape[0])
    d2s = d2[rows, idx]
    thresh = chi2_inv(QUANTILE, inputs.T)
    with np.errstate(divide="ignore", invalid="ignore"):
        shots = thresh * v[idx] / d2s
    if integer_shots:
        shots = np.maximum(np.ceil(shots), 1.0)
    n_star = idx + 1
    score = 12.0 * inputs.L * shots * n_star * inputs.r
    capped = ~(d2s > 0) | ~np.isfinite(score) | (score >= CAP)
    score = np.where(capped, CAP, score)
    shots = np.where(capped, np.inf, shots)
    return score, n_star, shots


def score_point(
    xi: Sequence[float], inputs: DCInputs, simple_nstar: bool = False, integer_shots: bool = True
) -> float:
    """Gate count ``12 L S_{n*} n* r`` for fixed outcomes ``xi`` (``CAP`` if indistinguishable)."""
    score, _, _ = _score_rows(np.asarray(xi, dtype=float)[None, :], inputs, simple_nstar, integer_shots)
    return float(score[0])


def point_details(xi: Sequence[float], inputs: DCInputs, simple_nstar: bool = False, integer_shots: bool = True):
    """``(score, n_star, shots)`` for fixed outcomes."""
    score, n_star, shots = _score_rows(np.asarray(xi, dtype=float)[None, :], inputs, simple_nstar, integer_shots)
    return float(score[0]), int(n_star[0]), float(shots[0])


def score_distribution(
    inputs: DCInputs,
    mc_samples: int = 10_000,
    seed: int = 0,
    simple_nstar: bool = False,
    integer_shots: bool = True,
) -> DCScore:
    """Gaussian-averaged score ``10^x`` and spread ``delta_x`` of ``log10`` scores."""
    if mc_samples < 100:
        raise ValueError("mc_samples must be >= 100")
    rng = np.random.default_rng(np.random.SeedSequence(int(seed)))
    xi = inputs.m[None, :] + inputs.tau[None, :] * rng.standard_normal((mc_samples, inputs.T))
    score, _, _ = _score_rows(xi, inputs, simple_nstar, integer_shots)
    logs = np.log10(score)
    mean_score = float(score.mean())
    p_score, p_n, p_shots = point_details(inputs.m, inputs, simple_nstar, integer_shots)
    return DCScore(
        x=math.log10(mean_score),
        delta_x=0.0 if np.ptp(logs) == 0 else float(logs.std()),
        n_star=p_n,
        shots_required=p_shots,
        mean_score=mean_score,
        point_score=p_score,
        capped_fraction=float(np.mean(score >= CAP)),
        mc_samples=int(mc_samples),
    )


# ---------------------------------------------------------------------------
# assembling inputs


def oracle_references(cfg: fforacle.OracleConfig, T: int, continuous: bool = False) -> tuple[np.ndarray, np.ndarray]:
    """Exact ``(t_n, t_{n,j})`` for ``n = 1..T`` in the site-averaged Z form.

    With ``continuous`` the references are the ``dt -> 0`` values at
    ``t = 0.2 n`` (the Trotter step in ``cfg`` is then ignored).
    """
    f = cfg.f()
    L = cfg.n_sites
    if continuous:
        t_site = np.array([fforacle.continuous_Zsite(0.2 * n, cfg) for n in range(1, T + 1)])
    else:
        t_site = np.array([1.0 - 2.0 * fforacle.occupations(n, cfg) for n in range(1, T + 1)])
    return t_site @ f / L, t_site


def z_from_fermionic(mean, stderr, weights: Sequence[float]) -> tuple[np.ndarray, np.ndarray]:
    """Convert ``sum_j f_j <n_j>`` estimates to the site-averaged Z form."""
    f = np.asarray(weights, dtype=float)
    L = f.size
    mean = np.asarray(mean, dtype=float)
    stderr = np.asarray(stderr, dtype=float)
    return (f.sum() - 2.0 * mean) / L, 2.0 * stderr / L


def inputs_from_fermionic(
    mean: Sequence[float],
    stderr: Sequence[float],
    cfg: fforacle.OracleConfig,
    r: int = 1,
    continuous: bool = False,
) -> DCInputs:
    """Inputs for ``n = 1..T`` from fermionic-form estimates (``len(mean) == T``)."""
    T = len(mean)
    m, tau = z_from_fermionic(mean, stderr, cfg.f())
    t_exact, t_site = oracle_references(cfg, T, continuous)
    return DCInputs(m, tau, t_exact, t_site, cfg.f(), r=r)


def inputs_from_series(series: MeasurementSeries, cfg: fforacle.OracleConfig, T: int | None = None) -> DCInputs:
    """Inputs from a free-fermion :class:`MeasurementSeries` in fermionic form.

    Points with ``n = 0`` are ignored; the remaining ones must be ``1..T``.
    For the continuous variant (``parameters["continuous"]``) points are
    indexed by ``n`` with ``t = 0.2 n`` and ``r = round(0.2 / dt)``.
    """
    pts = [p for p in series.points if (p.n if p.n is not None else round(p.t / 0.2)) >= 1]
    ns = [p.n if p.n is not None else int(round(p.t / 0.2)) for p in pts]
    T = T if T is not None else 2 * cfg.lx
    if ns != list(range(1, T + 1)):
        raise ValueError(f"series must cover n = 1..{T}")
    continuous = bool(series.parameters.get("continuous", False))
    r = 1
    if continuous:
        ratio = 0.2 / float(series.parameters.get("dt", 0.2))
        r = int(round(ratio))
        if abs(ratio - r) > 1e-9:
            raise ValueError("dt must be 0.2 / k for an integer k")
    return inputs_from_fermionic([p.mean for p in pts], [p.stderr for p in pts], cfg, r=r, continuous=continuous)
