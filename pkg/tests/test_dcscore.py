from __future__ import annotations

import math

import numpy as np
import pytest

from appqsim.dcscore import (
    CAP,
    DCInputs,
    inputs_from_fermionic,
    inputs_from_series,
    oracle_references,
    point_details,
    score_distribution,
    score_point,
    unit_shot_variance,
    z_from_fermionic,
)
from appqsim.ffbench import FFBenchConfig, FFSimulator
from appqsim.fforacle import OracleConfig, exact_O
from appqsim.numstat import chi2_inv
from appqsim.simcore import MeasurementSeries, SeriesPoint


def synthetic(deviation: float = 0.1) -> tuple[DCInputs, np.ndarray]:
    L = T = 4
    t_site = np.zeros((T, L))
    inputs = DCInputs(np.zeros(T), np.zeros(T), np.zeros(T), t_site, np.ones(L))
    xi = np.zeros(T)
    xi[1] = deviation
    return inputs, xi


def test_unit_shot_variance_limits():
    det = DCInputs(np.zeros(1), np.zeros(1), np.zeros(1), np.array([[1.0, -1.0, 1.0, -1.0]]), np.array([1.0, -1.0, 1.0, 1.0]))
    assert unit_shot_variance(1, det) == 0.0
    flat = DCInputs(np.zeros(1), np.zeros(1), np.zeros(1), np.zeros((1, 4)), np.array([1.0, -1.0, 1.0, 1.0]))
    assert unit_shot_variance(1, flat) == pytest.approx(1 / 4)


def _empirical_2x2():
    cfg = FFBenchConfig(2, 2, shots=20000, max_steps=2)
    res = FFSimulator(cfg).run(seed=2)
    inputs = inputs_from_fermionic(res.mean[1:], res.stderr[1:], OracleConfig(2, 2))
    return cfg, res, inputs


def test_unit_shot_variance_is_sum_of_site_variances_2x2():
    cfg, res, inputs = _empirical_2x2()
    site_var = (res.z_stderr[2] ** 2) * cfg.shots
    assert unit_shot_variance(2, inputs) == pytest.approx(site_var.sum() / 16, rel=0.05)


@pytest.mark.xfail(strict=True, reason="particle-number conservation correlates the sites; the full variance is ~2.7x the uncorrelated one")
def test_unit_shot_variance_vs_full_empirical_2x2():
    cfg, _, inputs = _empirical_2x2()
    empirical = (inputs.tau[1] ** 2) * cfg.shots
    assert unit_shot_variance(2, inputs) == pytest.approx(empirical, rel=0.3)


def test_perfect_output_hits_cap():
    inputs, _ = synthetic()
    assert score_point(inputs.t_exact, inputs) == CAP


def test_synthetic_score():
    inputs, xi = synthetic(0.1)
    S = math.ceil(chi2_inv(0.997, 4) * 0.25 / 0.01)
    assert score_point(xi, inputs) == pytest.approx(12 * 4 * S * 2)
    score, n_star, shots = point_details(xi, inputs)
    assert n_star == 2 and shots == S


def test_doubling_deviation_quarters_shots():
    inputs, xi = synthetic(0.1)
    _, _, s1 = point_details(xi, inputs, integer_shots=False)
    _, _, s2 = point_details(2 * xi, inputs, integer_shots=False)
    assert s1 / s2 == pytest.approx(4.0)
    _, _, c1 = point_details(xi, inputs)
    _, _, c2 = point_details(2 * xi, inputs)
    assert abs(c2 - c1 / 4) <= 1.0


def test_degenerate_distribution():
    inputs, xi = synthetic(0.1)
    inputs = DCInputs(xi, np.zeros(4), inputs.t_exact, inputs.t_site, inputs.weights)
    sc = score_distribution(inputs, mc_samples=200, seed=0)
    assert sc.delta_x == 0.0
    assert sc.x == pytest.approx(math.log10(score_point(xi, inputs)))
    assert sc.capped_fraction == 0.0


def test_distribution_is_seeded():
    inputs, xi = synthetic(0.1)
    inputs = DCInputs(xi, np.full(4, 0.02), inputs.t_exact, inputs.t_site, inputs.weights)
    a = score_distribution(inputs, mc_samples=500, seed=3)
    b = score_distribution(inputs, mc_samples=500, seed=3)
    assert a.to_dict() == b.to_dict()
    with pytest.raises(ValueError):
        score_distribution(inputs, mc_samples=10)


def test_fermionic_conversion():
    f = np.array([-1.0, -1.0, 1.0, 1.0])
    m, tau = z_from_fermionic([-2.0], [0.1], f)
    assert m[0] == pytest.approx((0.0 + 4.0) / 4)
    assert tau[0] == pytest.approx(0.05)


def test_oracle_references_consistent():
    cfg = OracleConfig(2, 4)
    t_exact, t_site = oracle_references(cfg, 4)
    for n in range(1, 5):
        assert t_exact[n - 1] == pytest.approx((cfg.f().sum() - 2 * exact_O(n, cfg)) / 8)
    assert t_site.shape == (4, 8)


def test_inputs_from_series_exact_data_caps():
    cfg = OracleConfig(2, 2)
    pts = [SeriesPoint(exact_O(n, cfg), 0.0, 0, n=n) for n in range(0, 5)]
    inputs = inputs_from_series(MeasurementSeries("ff_dynamic", pts), cfg)
    assert score_point(inputs.m, inputs) == CAP


def test_inputs_from_series_continuous_ratio():
    cfg = OracleConfig(2, 2)
    pts = [SeriesPoint(0.0, 0.1, 10, n=n) for n in range(1, 5)]
    s = MeasurementSeries("ff_continuous", pts, {"continuous": True, "dt": 0.05})
    assert inputs_from_series(s, cfg).r == 4
    bad = MeasurementSeries("ff_continuous", pts, {"continuous": True, "dt": 0.03})
    with pytest.raises(ValueError):
        inputs_from_series(bad, cfg)


def test_noise_lowers_score_2x2():
    cfg = FFBenchConfig(2, 2, shots=1000, max_steps=4)
    sim = FFSimulator(cfg)
    ocfg = OracleConfig(2, 2)
    from appqsim.simcore import NoiseModel

    xs = {}
    for p in (0.01, 1e-4):
        vals = []
        for s in range(5):
            r = sim.run(s, noise=NoiseModel(p))
            vals.append(score_distribution(inputs_from_fermionic(r.mean[1:], r.stderr[1:], ocfg), 1000, s).x)
        xs[p] = np.median(vals)
    assert xs[0.01] < xs[1e-4]
