from __future__ import annotations

import itertools

import numpy as np
import pytest
from conftest import random_state

from appqsim.maxcut import (
    CutGraph,
    build_annealing_circuit,
    build_stats,
    cut_values,
    exact_maxcut,
    generate_graph,
    graph_variance,
    linear_routing_multiplier,
    score_maxcut,
    solve_protocol,
    step_count,
    success_probability,
    typicality,
)
from appqsim.simcore import NoiseModel, StateVector, evolve, sample_shots

PETERSEN = CutGraph(10, [(i, (i + 1) % 5) for i in range(5)] + [(i, i + 5) for i in range(5)] + [(5 + i, 5 + (i + 2) % 5) for i in range(5)])


def brute_force(g: CutGraph) -> int:
    return max(sum(bits[a] != bits[b] for a, b in g.edges) for bits in itertools.product((0, 1), repeat=g.n))


def test_k4_is_the_only_graph():
    g = generate_graph(4, seed=1)
    assert g.edges == list(itertools.combinations(range(4), 2))
    assert exact_maxcut(g) == brute_force(g) == 4


def test_petersen():
    assert PETERSEN.degrees().tolist() == [3] * 10
    assert exact_maxcut(PETERSEN) == brute_force(PETERSEN) == 12


def test_generator_structural_audit():
    rng = np.random.default_rng(99)
    for _ in range(1000):
        g = generate_graph(10, rng)
        assert len(g.edges) == 15
        assert len(set(g.edges)) == 15 and all(a != b for a, b in g.edges)
        assert g.degrees().tolist() == [3] * 10
        assert g.is_connected()


def test_generator_errors_and_determinism():
    with pytest.raises(ValueError):
        generate_graph(7, 0)
    with pytest.raises(ValueError):
        generate_graph(2, 0)
    assert generate_graph(16, 5).edges == generate_graph(16, 5).edges


def test_spectrum_and_variance():
    stats = build_stats(12, samples=100, seed=2)
    g = generate_graph(12, 3)
    assert g.eigenvalues()[-1] == pytest.approx(3.0)
    assert stats.means[-1] == pytest.approx(3.0)
    assert graph_variance(g, stats.means) >= 0
    with pytest.raises(ValueError):
        build_stats(12, samples=50)


def test_cut_values_and_symmetry():
    g = generate_graph(12, 4)
    assert g.cut_value(0) == 0 and g.cut_value([0] * 12) == 0
    x = np.arange(1 << 12)
    vals = cut_values(g, x)
    assert np.array_equal(vals, cut_values(g, x ^ ((1 << 12) - 1)))
    assert vals.max() == exact_maxcut(g) == brute_force(g)
    with pytest.raises(ValueError):
        exact_maxcut(CutGraph(30, generate_graph(30, 0).edges))
    assert exact_maxcut(CutGraph(30, [(0, 1)], optimum=1)) == 1


def test_step_count():
    assert step_count(3.0) == 12
    with pytest.raises(ValueError, match="step_count_not_integer"):
        step_count(0.3)


def test_single_step_is_pure_zz():
    g = generate_graph(6, 1)
    ops = build_annealing_circuit(g, 0.25, measure=False).ops
    rotations = [op for op in ops if type(op).__name__ == "PauliRot"]
    assert all(op.angle == 0.0 for op in rotations if len(op.paulis) == 1)
    assert all(op.angle == pytest.approx(0.25) for op in rotations if len(op.paulis) == 2)


def test_unitarity(rng):
    g = generate_graph(8, 2)
    v = random_state(8, rng)
    out = evolve(StateVector(8, v.copy()), build_annealing_circuit(g, 2.0, measure=False).ops, NoiseModel(0.0), None)
    assert np.linalg.norm(out.amplitudes) == pytest.approx(1.0, abs=1e-10)


def test_sampled_distribution_respects_z2_symmetry():
    g = generate_graph(8, 6)
    state = evolve(StateVector.zero(8), build_annealing_circuit(g, 2.0, measure=False).ops, NoiseModel(0.0), None)
    shots = sample_shots(state, None, 20000, np.random.default_rng(0))
    top = np.max(cut_values(g, np.arange(256)))
    best = cut_values(g, shots) == top
    low = shots[best] & 1 == 0
    k, n = low.sum(), best.sum()
    assert abs(k - n / 2) < 4 * np.sqrt(n / 4)


def test_success_probability_grows_with_time():
    g = generate_graph(10, 7)
    ps = [success_probability(g, T) for T in (0.5, 1.0, 2.0, 4.0, 6.0)]
    assert all(b >= a - 1e-12 for a, b in zip(ps, ps[1:]))
    assert ps[-1] > 0.3


def test_protocol_arithmetic():
    g = generate_graph(8, 3)
    r = solve_protocol(g, 6.0, 100, groups=10, seed=1)
    assert r.mean == 1.0 and r.stderr == 0.0 and r.solved
    r = solve_protocol(g, 0.25, 1, groups=10, seed=1)
    assert r.mean - 2 * r.stderr <= 0.5 and not r.solved
    with pytest.raises(ValueError):
        solve_protocol(g, 1.0, 10, groups=5)


def test_six_of_ten_is_not_solved():
    mean, groups = 0.6, 10
    stderr = np.sqrt(mean * (1 - mean) / groups)
    assert stderr == pytest.approx(np.sqrt(0.24 / 10))
    assert not mean - 2 * stderr > 0.5


def test_protocol_reproducible():
    g = generate_graph(8, 3)
    a = solve_protocol(g, 1.0, 3, groups=10, noise=NoiseModel(0.01), seed=5, trajectories=3)
    b = solve_protocol(g, 1.0, 3, groups=10, noise=NoiseModel(0.01), seed=5, trajectories=3)
    assert a.groups == b.groups


def test_linear_connectivity_degrades_success():
    g = generate_graph(8, 11)
    mult = linear_routing_multiplier(g)
    assert mult > 1
    assert linear_routing_multiplier(CutGraph(4, [(0, 1), (1, 2), (2, 3)])) == 1.0
    a2a = solve_protocol(g, 2.0, 2, groups=40, noise=NoiseModel(0.01), seed=2, trajectories=2)
    line = solve_protocol(g, 2.0, 2, groups=40, noise=NoiseModel(0.01, multiplier=mult), seed=2, trajectories=2)
    assert line.mean < a2a.mean


def test_typicality_band_small():
    stats = build_stats(12, samples=100, seed=0)
    rng = np.random.default_rng(1)
    typical = [typicality(generate_graph(12, rng), stats) for _ in range(100)]
    assert np.mean(typical) >= 1 - 2 / 12
    with pytest.raises(ValueError):
        typicality(generate_graph(10, 1), stats)


def test_score_examples():
    ok = {"solved": True, "typical": True, "connected": True, "shots": 200, "shot_runtime": 1e-3}
    bad = dict(ok, solved=False)
    s = score_maxcut({8: [ok], 12: [ok], 16: [bad]})
    assert s.score == 12 and s.time_to_solution == pytest.approx(0.2)
    none = score_maxcut({8: [bad]})
    assert none.score == 0 and none.time_to_solution is None and none.diagnostics
    atypical = score_maxcut({8: [ok], 12: [dict(ok, typical=False)]})
    assert atypical.score == 8


def test_graph_json_round_trip(tmp_path):
    g = generate_graph(10, 2)
    p = tmp_path / "g.json"
    import json

    p.write_text(json.dumps(g.to_json()))
    h = CutGraph.load(p)
    assert h.edges == g.edges and h.n == g.n
