"""Exact reference values for the Trotterized free-fermion benchmark.

One Trotter step acts on each momentum pair ``(c(k), c^dag(-k))`` as the
2x2 matrix ``M(k) = U_{ky} U_{kx}``.  Its ``n``-th power has the form
``[[alpha_n, beta_n], [-beta_n^*, alpha_n^*]]`` which gives the Heisenberg
evolution ``c_n(k) = alpha_n(k) c(k) + beta_n(k) c^dag(-k)``.  In real space
this is ``c_j(n) = sum_l A_jl c_l + B_jl c_l^dag`` and the two-point
functions of the evolved product state follow directly.

The encoded lattice carries four boundary-condition sectors (periodic or
antiperiodic in each direction, momenta ``2 pi (k + phi) / L``); the
benchmark expectation value is the equal-weight average over them.

Conventions: ``f_hat(k) = (1/L) sum_j exp(i j.k) f_j``; the Z/occupation
relation is ``Z_j = 1 - 2 n_j``; ``sgn(0) = +1`` in ``epsilon_k``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

SECTORS = ((0.0, 0.0), (0.0, 0.5), (0.5, 0.0), (0.5, 0.5))


@dataclass(frozen=True)
class OracleConfig:
    lx: int
    ly: int
    dt: float = 0.2
    occupation: tuple[int, ...] | None = None
    weights: tuple[float, ...] | None = None

    @property
    def n_sites(self) -> int:
        return self.lx * self.ly

    def occ(self) -> np.ndarray:
        if self.occupation is not None:
            return np.asarray(self.occupation, dtype=float)
        jy = np.arange(self.n_sites) // self.lx
        return (jy < self.ly // 2).astype(float)

    def f(self) -> np.ndarray:
        if self.weights is not None:
            return np.asarray(self.weights, dtype=float)
        jy = np.arange(self.n_sites) // self.lx
        return np.where(jy < self.ly // 2, -1.0, 1.0)


def momentum_grid(lx: int, ly: int, phi: tuple[float, float]) -> tuple[np.ndarray, np.ndarray]:
    """Arrays ``kx, ky`` of shape ``(ly, lx)``; entry ``[iy, ix]`` is momentum ``(ix, iy)``."""
    kx = 2 * np.pi * (np.arange(lx) + phi[0]) / lx
    ky = 2 * np.pi * (np.arange(ly) + phi[1]) / ly
    KY, KX = np.meshgrid(ky, kx, indexing="ij")
    return KX, KY


def u_single(k, dt: float) -> np.ndarray:
    """``U_k`` for one direction; shape ``(..., 2, 2)``."""
    k = np.asarray(k, dtype=float)
    s2 = np.sin(dt) ** 2
    c = np.cos(k)
    p = 1 - 2 * s2 * c**2
    r = np.sin(2 * dt) * c
    w = s2 * np.sin(2 * k)
    out = np.empty(k.shape + (2, 2), dtype=complex)
    out[..., 0, 0] = p - 1j * r
    out[..., 0, 1] = 1j * w
    out[..., 1, 0] = 1j * w
    out[..., 1, 1] = p + 1j * r
    return out


def step_matrix(kx, ky, dt: float) -> np.ndarray:
    """``M(k) = U_{ky} U_{kx}`` for one full Trotter step."""
    return u_single(ky, dt) @ u_single(kx, dt)


def epsilon_k(kx, ky, dt: float):
    """Quasi-energy with ``exp(+-i eps)`` the eigenvalues of ``M(k)``."""
    cx, cy = np.cos(kx), np.cos(ky)
    s2 = np.sin(dt) ** 2
    arg = 1 - 2 * s2 * (cx + cy) ** 2 + 4 * s2**2 * cx * cy * (1 + np.cos(np.add(kx, ky)))
    sgn = np.where(cx + cy >= 0, 1.0, -1.0)
    return sgn * np.arccos(np.clip(arg, -1.0, 1.0))


def _sin_ratio(n: int, eps: np.ndarray) -> np.ndarray:
    """``sin(n eps) / sin(eps)``, with the Chebyshev recurrence near ``sin eps = 0``."""
    eps = np.asarray(eps, dtype=float)
    s = np.sin(eps)
    small = np.abs(s) < 1e-8
    out = np.empty_like(eps)
    safe = ~small
    out[safe] = np.sin(n * eps[safe]) / s[safe]
    if np.any(small):
        x = np.cos(eps[small])
        u_prev, u = np.zeros_like(x), np.ones_like(x)  # U_{-1}, U_0
        if n == 0:
            out[small] = 0.0
        else:
            for _ in range(n - 1):
                u_prev, u = u, 2 * x * u - u_prev
            out[small] = u
    return out


def step_entries(kx, ky, dt: float) -> tuple[np.ndarray, np.ndarray]:
    """Closed form of ``M(k)[0,0]`` and ``M(k)[0,1]``."""
    cx, cy = np.cos(kx), np.cos(ky)
    s2 = np.sin(dt) ** 2
    s2d = np.sin(2 * dt)
    px, py = 1 - 2 * s2 * cx**2, 1 - 2 * s2 * cy**2
    rx, ry = s2d * cx, s2d * cy
    wx, wy = s2 * np.sin(2 * np.asarray(kx)), s2 * np.sin(2 * np.asarray(ky))
    a = px * py - rx * ry - wx * wy - 1j * (px * ry + py * rx)
    b = 1j * (py * wx + px * wy) + (ry * wx - rx * wy)
    return a, b


def alpha_beta(n: int, kx, ky, dt: float) -> tuple[np.ndarray, np.ndarray]:
    """``(alpha_n(k), beta_n(k))`` via the eigenphase form of ``M(k)**n``."""
    if n < 0:
        raise ValueError("step count must be nonnegative")
    kx = np.asarray(kx, dtype=float)
    ky = np.asarray(ky, dtype=float)
    eps = epsilon_k(kx, ky, dt)
    a, b = step_entries(kx, ky, dt)
    ratio = _sin_ratio(n, np.atleast_1d(eps)).reshape(np.shape(eps))
    alpha = np.exp(-1j * n * eps) + 1j * (a.imag + np.sin(eps)) * ratio
    beta = b * ratio
    return alpha, beta


def beta_printed(n: int, kx, ky, dt: float) -> np.ndarray:
    """Alternative closed form for ``beta_n`` with a symmetric last term (disagrees with ``M(k)**n``; comparison only)."""
    cx, cy = np.cos(kx), np.cos(ky)
    s2 = np.sin(dt) ** 2
    pref = (
        1j * s2 * (np.sin(2 * kx) + np.sin(2 * ky))
        - 2j * s2**2 * (cx**2 * np.sin(2 * ky) + cy**2 * np.sin(2 * kx))
        + s2 * np.sin(2 * dt) * (cx * np.sin(2 * ky) + cy * np.sin(2 * kx))
    )
    eps = epsilon_k(kx, ky, dt)
    return pref * _sin_ratio(n, np.atleast_1d(eps)).reshape(np.shape(eps))


# ---------------------------------------------------------------------------
# real-space propagators


def _site_coords(lx: int, ly: int) -> tuple[np.ndarray, np.ndarray]:
    j = np.arange(lx * ly)
    return j % lx, j // lx


def _fourier_matrix(lx: int, ly: int, phi) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """``E[j, k] = exp(i r_j.k) / sqrt(L)`` with k flattened as ``ix + lx*iy``."""
    KX, KY = momentum_grid(lx, ly, phi)
    kx, ky = KX.ravel(), KY.ravel()
    jx, jy = _site_coords(lx, ly)
    E = np.exp(1j * (np.outer(jx, kx) + np.outer(jy, ky))) / math.sqrt(lx * ly)
    return E, kx, ky


def propagators(n: int, lx: int, ly: int, dt: float, phi) -> tuple[np.ndarray, np.ndarray]:
    """Real-space ``A, B`` with ``c_j(n) = sum_l A_jl c_l + B_jl c_l^dag``."""
    E, kx, ky = _fourier_matrix(lx, ly, phi)
    alpha, beta = alpha_beta(n, kx, ky, dt)
    Eh = E.conj().T
    return (E * alpha) @ Eh, (E * beta) @ Eh


def two_point(n: int, cfg: OracleConfig, phi) -> tuple[np.ndarray, np.ndarray]:
    """``G_ij = <c_i^dag c_j>`` and ``F_ij = <c_i c_j>`` after ``n`` steps in sector ``phi``."""
    A, B = propagators(n, cfg.lx, cfg.ly, cfg.dt, phi)
    occ = cfg.occ()
    emp = 1.0 - occ
    G = (A.conj() * occ) @ A.T + (B.conj() * emp) @ B.T
    F = (A * emp) @ B.T + (B * occ) @ A.T
    return G, F


def _occupations_fft(n: int, cfg: OracleConfig, phi) -> np.ndarray:
    """``<n_j(n)>`` in one sector using FFT convolutions (O(L log L))."""
    lx, ly = cfg.lx, cfg.ly
    KX, KY = momentum_grid(lx, ly, phi)
    alpha, beta = alpha_beta(n, KX, KY, cfg.dt)
    # |a(d)|^2 with a(d) = (1/L) sum_k e^{i d.k} alpha(k); the twist only adds a phase
    pa = np.abs(np.fft.ifft2(alpha)) ** 2
    pb = np.abs(np.fft.ifft2(beta)) ** 2
    occ = cfg.occ().reshape(ly, lx)
    conv = lambda kern, x: np.real(np.fft.ifft2(np.fft.fft2(kern) * np.fft.fft2(x)))  # noqa: E731
    return (conv(pa, occ) + conv(pb, 1.0 - occ)).ravel()


def occupations(n: int, cfg: OracleConfig) -> np.ndarray:
    """Sector-averaged exact ``<n_j>`` after ``n`` Trotter steps."""
    return np.mean([_occupations_fft(n, cfg, phi) for phi in SECTORS], axis=0)


def exact_O(n: int, cfg: OracleConfig) -> float:
    """Exact ``<sum_j f_j n_j>`` (fermionic form) after ``n`` Trotter steps."""
    return float(np.dot(cfg.f(), occupations(n, cfg)))


def exact_Zsite(n: int, j: int, cfg: OracleConfig) -> tuple[float, float]:
    """``(<n_j>, <Z_j> = 1 - 2 <n_j>)`` after ``n`` steps."""
    if not 0 <= j < cfg.n_sites:
        raise IndexError("site out of range")
    occ = occupations(n, cfg)[j]
    return float(occ), float(1.0 - 2.0 * occ)


def exact_O_fourier(n: int, cfg: OracleConfig) -> float:
    """Momentum-space evaluation of the same quantity (independent cross-check).

    ``sum_{k,q} f_hat(q-k) [alpha*(k) alpha(q) n_hat(k-q)
    + beta*(k) beta(q) (delta_kq - n_hat(k-q))]``, averaged over sectors.
    """
    L = cfg.n_sites
    jx, jy = _site_coords(cfg.lx, cfg.ly)
    f, occ = cfg.f(), cfg.occ()
    total = 0.0
    for phi in SECTORS:
        _, kx, ky = _fourier_matrix(cfg.lx, cfg.ly, phi)
        alpha, beta = alpha_beta(n, kx, ky, cfg.dt)
        dkx = kx[:, None] - kx[None, :]
        dky = ky[:, None] - ky[None, :]
        phase = np.exp(1j * (jx[:, None, None] * dkx[None] + jy[:, None, None] * dky[None]))  # e^{i j (k-q)}
        fhat_kq = np.tensordot(f, phase, axes=1) / L  # f_hat(k - q)
        nhat_kq = np.tensordot(occ, phase, axes=1) / L
        term = np.conj(fhat_kq) * np.outer(alpha.conj(), alpha) * nhat_kq
        term += np.conj(fhat_kq) * np.outer(beta.conj(), beta) * (np.eye(L) - nhat_kq)
        total += float(np.real(term.sum()))
    return total / len(SECTORS)


# ---------------------------------------------------------------------------
# continuous-time limit


def exact_O_continuous(t: float, cfg: OracleConfig) -> float:
    """``lim_{dt -> 0}`` of :func:`exact_O` at fixed time ``t = n dt``.

    Pairing terms vanish and ``alpha(k) -> exp(-i t e_k)`` with
    ``e_k = 2 (cos kx + cos ky)``.
    """
    if t < 0:
        raise ValueError("time must be nonnegative")
    lx, ly = cfg.lx, cfg.ly
    occ = cfg.occ().reshape(ly, lx)
    res = np.zeros(cfg.n_sites)
    for phi in SECTORS:
        KX, KY = momentum_grid(lx, ly, phi)
        alpha = np.exp(-1j * t * 2 * (np.cos(KX) + np.cos(KY)))
        pa = np.abs(np.fft.ifft2(alpha)) ** 2
        res += np.real(np.fft.ifft2(np.fft.fft2(pa) * np.fft.fft2(occ))).ravel()
    return float(np.dot(cfg.f(), res / len(SECTORS)))


def exact_O_continuous_printed(t: float, cfg: OracleConfig) -> float:
    """Two-sector ``cos * cos`` expression (does not match the ``dt -> 0`` limit; comparison only)."""
    L = cfg.n_sites
    jx, jy = _site_coords(cfg.lx, cfg.ly)
    f, occ = cfg.f(), cfg.occ()
    total = 0.0
    for phi in ((0.0, 0.5), (0.5, 0.0)):
        _, kx, ky = _fourier_matrix(cfg.lx, cfg.ly, phi)
        e = 2 * (np.cos(kx) + np.cos(ky))
        dkx = kx[:, None] - kx[None, :]
        dky = ky[:, None] - ky[None, :]
        phase = np.exp(1j * (jx[:, None, None] * dkx[None] + jy[:, None, None] * dky[None]))
        fhat = np.tensordot(f, phase, axes=1) / L
        nhat = np.tensordot(occ, phase, axes=1) / L
        total += float(np.real(np.sum(fhat * np.outer(np.cos(t * e), np.cos(t * e)) * nhat)))
    return total


def continuous_Zsite(t: float, cfg: OracleConfig) -> np.ndarray:
    """Per-site ``<Z_j>`` in the continuous-time limit."""
    lx, ly = cfg.lx, cfg.ly
    occ = cfg.occ().reshape(ly, lx)
    res = np.zeros(cfg.n_sites)
    for phi in SECTORS:
        KX, KY = momentum_grid(lx, ly, phi)
        alpha = np.exp(-1j * t * 2 * (np.cos(KX) + np.cos(KY)))
        pa = np.abs(np.fft.ifft2(alpha)) ** 2
        res += np.real(np.fft.ifft2(np.fft.fft2(pa) * np.fft.fft2(occ))).ravel()
    return 1.0 - 2.0 * res / len(SECTORS)


# ---------------------------------------------------------------------------
# higher-weight observables via Wick's theorem


def wick(ops: Sequence[int], contraction) -> complex:
    """Expectation of a product of linear fermion operators by recursive Wick expansion.

    ``contraction(a, b)`` returns ``<op_a op_b>`` for positions in ``ops``.
    """
    ops = list(ops)
    if not ops:
        return 1.0
    if len(ops) % 2:
        return 0.0
    first = ops[0]
    total = 0.0
    for i in range(1, len(ops)):
        c = contraction(first, ops[i])
        if c == 0:
            continue
        rest = ops[1:i] + ops[i + 1 :]
        total += (-1) ** (i - 1) * c * wick(rest, contraction)
    return total


class _Majoranas:
    """Operators ``u = c + c^dag`` and ``v = c - c^dag`` per site, with their two-point table."""

    def __init__(self, G: np.ndarray, F: np.ndarray) -> None:
        L = G.shape[0]
        eye = np.eye(L)
        cc = F  # <c_i c_j>
        cdc = G  # <c_i^dag c_j>
        ccd = eye - G.T  # <c_i c_j^dag>
        cdcd = F.conj().T  # <c_i^dag c_j^dag>
        # table[s, t][i, j] for s, t in {u, v}: coefficients c + s c^dag
        signs = (1.0, -1.0)
        self.table = {}
        for a, sa in enumerate(signs):
            for b, sb in enumerate(signs):
                self.table[a, b] = cc + sb * ccd + sa * cdc + sa * sb * cdcd

    def __call__(self, x: tuple[int, int], y: tuple[int, int]) -> complex:
        return self.table[x[0], y[0]][x[1], y[1]]


def z_product_expectation(sites: Sequence[int], G: np.ndarray, F: np.ndarray) -> float:
    """``<Z_{s1} ... Z_{sw}>`` for distinct sites, with ``Z = -(c + c^dag)(c - c^dag)``."""
    contraction = _Majoranas(G, F)
    ops = []
    for s in sites:
        ops += [(0, s), (1, s)]
    val = (-1) ** len(sites) * wick(ops, contraction)
    return float(np.real(val))


def exact_Ow(w: int, n: int, cfg: OracleConfig) -> float:
    """Exact ``<O_[w]> = sum_{i1<...<iw} f_i1...f_iw <Z_i1...Z_iw>`` after ``n`` steps.

    Reported in the Z form (no fermionic conversion exists for ``w > 1``);
    ``w = 1`` therefore equals ``sum f_j - 2 exact_O``.
    """
    if w not in (1, 2, 3):
        raise ValueError("supported weights are 1, 2 and 3")
    f = cfg.f()
    support = [j for j in range(cfg.n_sites) if f[j] != 0]
    total = 0.0
    for phi in SECTORS:
        G, F = two_point(n, cfg, phi)
        for subset in itertools.combinations(support, w):
            total += np.prod(f[list(subset)]) * z_product_expectation(subset, G, F)
    return total / len(SECTORS)


def power_sum_expectations(n: int, cfg: OracleConfig, max_power: int = 3) -> dict[tuple[int, ...], float]:
    """``<S_1^p S_2^q ...>`` for the monomials needed by the Newton identities up to ``max_power``.

    ``S_{2m}`` is a scalar ``sum f^{2m}`` and ``S_{2m+1} = sum f^{2m+1} Z``; products
    of odd power sums are expanded into Z products and evaluated with Wick's theorem.
    Returns a map from exponent tuples ``(p1, p2, p3)`` to expectations.
    """
    f = cfg.f()
    L = cfg.n_sites
    out: dict[tuple[int, ...], float] = {}
    sectors = [two_point(n, cfg, phi) for phi in SECTORS]

    def z_poly(weights_list: list[np.ndarray]) -> float:
        # < prod_m (sum_j w_m[j] Z_j) > with repeated sites reduced by Z^2 = 1
        total = 0.0
        for idx in itertools.product(range(L), repeat=len(weights_list)):
            coef = np.prod([wl[j] for wl, j in zip(weights_list, idx)])
            if coef == 0:
                continue
            counts: dict[int, int] = {}
            for j in idx:
                counts[j] = counts.get(j, 0) + 1
            sites = sorted(j for j, c in counts.items() if c % 2)
            val = np.mean([z_product_expectation(sites, G, F) for G, F in sectors]) if sites else 1.0
            total += coef * val
        return total

    for p1 in range(max_power + 1):
        for p2 in range((max_power - p1) // 2 + 1):
            for p3 in range((max_power - p1 - 2 * p2) // 3 + 1):
                odd = [f] * p1 + [f**3] * p3
                out[(p1, p2, p3)] = z_poly(odd) * float(np.sum(f**2)) ** p2
    return out


def exact_Ow_newton(w: int, n: int, cfg: OracleConfig) -> float:
    """``<O_[w]>`` from the power-sum (Newton) identities; small lattices only."""
    e = power_sum_expectations(n, cfg, w)
    if w == 1:
        return e[(1, 0, 0)]
    if w == 2:
        return (e[(2, 0, 0)] - e[(0, 1, 0)]) / 2
    if w == 3:
        return (e[(3, 0, 0)] - 3 * e[(1, 1, 0)] + 2 * e[(0, 0, 1)]) / 6
    raise ValueError("supported weights are 1, 2 and 3")
