from __future__ import annotations

import numpy as np
import pytest
from helpers_ff import statevector_Ow, statevector_z

from appqsim.fforacle import (
    OracleConfig,
    alpha_beta,
    epsilon_k,
    exact_O,
    exact_O_continuous,
    exact_Ow,
    exact_Zsite,
    occupations,
    step_matrix,
)


def test_epsilon_vanishes_at_half_pi():
    assert epsilon_k(np.pi / 2, np.pi / 2, 0.2) == pytest.approx(0.0, abs=1e-12)


def test_epsilon_is_step_eigenphase():
    for k in [(0.0, 0.0), (0.7, 1.3), (2.9, 0.4)]:
        M = step_matrix(np.array([k[0]]), np.array([k[1]]), 0.2)[0]
        phases = np.abs(np.angle(np.linalg.eigvals(M)))
        assert abs(float(epsilon_k(*k, 0.2))) == pytest.approx(phases.max(), abs=1e-12)


def test_epsilon_continuum_limit():
    dt = 1e-3
    for kx, ky in [(0.3, 0.9), (1.1, 2.5), (0.0, 0.0)]:
        ref = abs(2 * (np.cos(kx) + np.cos(ky)))
        assert abs(abs(float(epsilon_k(kx, ky, dt))) / dt - ref) < 10 * dt**2 + 1e-9


def test_alpha_beta_against_matrix_powers(rng):
    kx, ky = rng.uniform(0, 2 * np.pi, 40), rng.uniform(0, 2 * np.pi, 40)
    M = step_matrix(kx, ky, 0.2)
    P = np.broadcast_to(np.eye(2), M.shape).copy()
    for n in range(12):
        a, b = alpha_beta(n, kx, ky, 0.2)
        assert np.allclose(a, P[:, 0, 0], atol=1e-12)
        assert np.allclose(b, P[:, 0, 1], atol=1e-12)
        assert np.allclose(np.abs(a) ** 2 + np.abs(b) ** 2, 1.0, atol=1e-12)
        P = M @ P
    a0, b0 = alpha_beta(0, 0.7, 1.3, 0.2)
    assert a0 == pytest.approx(1.0) and b0 == pytest.approx(0.0)


@pytest.mark.parametrize("lx,ly", [(2, 2), (2, 4), (4, 4)])
def test_initial_values(lx, ly):
    cfg = OracleConfig(lx, ly)
    L = lx * ly
    assert exact_O(0, cfg) == pytest.approx(-L / 2, abs=1e-12)
    assert exact_O_continuous(0.0, cfg) == pytest.approx(-L / 2, abs=1e-12)
    assert np.allclose(occupations(0, cfg), cfg.occ(), atol=1e-12)


def test_particle_conservation():
    cfg = OracleConfig(4, 4)
    for n in range(9):
        assert occupations(n, cfg).sum() == pytest.approx(8.0, abs=1e-10)


def test_exact_O_matches_statevector_2x2():
    z = statevector_z(2, 2, 8)
    cfg = OracleConfig(2, 2)
    for n in range(9):
        fermionic = float(np.sum(cfg.f() * (1 - z[n]) / 2))
        assert exact_O(n, cfg) == pytest.approx(fermionic, abs=1e-9)


def test_site_occupation_matches_statevector_2x4():
    z = statevector_z(2, 4, 3)
    occ, zj = exact_Zsite(3, 5, OracleConfig(2, 4))
    assert zj == pytest.approx(z[3, 5], abs=1e-9)
    assert occ == pytest.approx((1 - z[3, 5]) / 2, abs=1e-9)
    with pytest.raises(IndexError):
        exact_Zsite(0, 8, OracleConfig(2, 4))


def test_continuous_limit_convergence():
    # the 2x2 Trotter step is exact (error identically zero), so the study uses 2x4
    cfg = OracleConfig(2, 4)
    ref = exact_O_continuous(0.8, cfg)
    errs = [abs(exact_O(round(0.8 / dt), OracleConfig(2, 4, dt=dt)) - ref) for dt in (0.2, 0.1, 0.05, 0.025)]
    assert all(b < a for a, b in zip(errs, errs[1:]))
    two = [abs(exact_O(round(0.8 / dt), OracleConfig(2, 2, dt=dt)) - exact_O_continuous(0.8, OracleConfig(2, 2))) for dt in (0.2, 0.1)]
    assert max(two) < 1e-12


@pytest.mark.slow
def test_continuous_matches_fine_trotter_4x4():
    from appqsim.ffbench import FFBenchConfig, FFSimulator, fermionic_from_z

    cfg = FFBenchConfig(4, 4, dt=0.0125, max_steps=128)
    z = FFSimulator(cfg).exact_z()
    assert fermionic_from_z(z[128], cfg.weights) == pytest.approx(exact_O_continuous(1.6, OracleConfig(4, 4)), abs=1e-3)


def test_weight_one_equals_exact_O():
    cfg = OracleConfig(2, 4)
    for n in range(4):
        assert exact_Ow(1, n, cfg) == pytest.approx(cfg.f().sum() - 2 * exact_O(n, cfg), abs=1e-10)


def test_weight_two_product_state():
    cfg = OracleConfig(2, 4)
    z0 = 1 - 2 * cfg.occ()
    f = cfg.f()
    expected = sum(f[i] * f[j] * z0[i] * z0[j] for i in range(8) for j in range(i + 1, 8))
    assert exact_Ow(2, 0, cfg) == pytest.approx(expected, abs=1e-12)


@pytest.mark.parametrize("w", [2, 3])
def test_higher_weight_matches_statevector_2x2(w):
    cfg = OracleConfig(2, 2)
    sv = statevector_Ow(2, 2, w, 4, cfg.f())
    for n in range(5):
        assert exact_Ow(w, n, cfg) == pytest.approx(sv[n], abs=1e-8)


def test_unsupported_weight():
    with pytest.raises(ValueError):
        exact_Ow(4, 0, OracleConfig(2, 2))


def test_large_lattice_finite():
    cfg = OracleConfig(32, 32)
    vals = [exact_O(n, cfg) for n in (0, 8, 32, 64)]
    assert vals[0] == pytest.approx(-512.0, abs=1e-8)
    assert np.all(np.isfinite(vals))
    assert np.ptp(vals) > 1.0
