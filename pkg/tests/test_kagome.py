from __future__ import annotations

import itertools
import math

import numpy as np
import pytest
from conftest import random_state

from appqsim.kagome import (
    build_adiabatic_circuit,
    build_kagome,
    energy_sweep,
    exact_energy,
    ground_energy,
    hamiltonian,
    measure_energy,
    phi,
    schedule,
    score_skh,
)
from appqsim.simcore import NoiseModel, StateVector, expectation_pauli, run_circuit


def geometric_bonds(lx: int, ly: int) -> set[tuple[int, int]]:
    """Unit-distance pairs of an explicit kagome embedding (independent of the builder)."""
    a1, a2 = np.array([2.0, 0.0]), np.array([1.0, math.sqrt(3)])
    offsets = [np.zeros(2), np.array([1.0, 0.0]), np.array([0.5, math.sqrt(3) / 2])]
    pos = {}
    for iy in range(ly):
        for ix in range(lx):
            for k in range(3):
                pos[3 * (ix + lx * iy) + k] = ix * a1 + iy * a2 + offsets[k]
    return {(i, j) for i, j in itertools.combinations(sorted(pos), 2) if abs(np.linalg.norm(pos[i] - pos[j]) - 1) < 1e-9}


def test_matching_3x2():
    m = set(build_kagome(3, 2).matching)
    assert {(0, 2), (1, 3), (4, 5), (6, 7), (8, 15), (16, 17)} <= m


@pytest.mark.parametrize("lx,ly", [(2, 2), (3, 2), (2, 4), (4, 4)])
def test_perfect_matching_and_bonds(lx, ly):
    lat = build_kagome(lx, ly)
    covered = [q for pair in lat.matching for q in pair]
    assert sorted(covered) == list(range(lat.n_sites))
    assert set(lat.matching) <= set(lat.bonds)
    assert set(lat.bonds) == geometric_bonds(lx, ly)
    assert lat.degree().max() <= 4


def test_interior_sites_have_degree_four():
    lat = build_kagome(4, 4)
    assert (lat.degree() == 4).sum() > 0
    assert lat.degree()[3 * (1 + 4 * 1) + 1] == 4


def test_invalid_lattice():
    with pytest.raises(ValueError):
        build_kagome(2, 3)


def test_phi_endpoints():
    assert phi(0.0) == 0.0 and phi(1.0) == 1.0
    assert phi(0.5) == pytest.approx(0.5)
    assert schedule(4) == [0.25, 0.5, 0.75, 1.0]


def test_singlet_product_energy():
    lat = build_kagome(2, 2)
    assert exact_energy(lat, 0) / lat.n_sites == pytest.approx(-1.5, abs=1e-12)


def test_step_unitarity(rng):
    lat = build_kagome(1, 2)
    v = random_state(lat.n_sites, rng)
    c = build_adiabatic_circuit(lat, 3)
    c.ops = [g for g in c.ops if type(g).__name__ == "PauliRot"]
    st = run_circuit(c, StateVector(lat.n_sites, v.copy()))
    assert np.linalg.norm(st.amplitudes) == pytest.approx(1.0, abs=1e-10)


def test_ground_energy_dense_small():
    lat = build_kagome(1, 2)
    dense = np.linalg.eigvalsh(hamiltonian(lat).to_matrix(lat.n_sites))[0]
    assert ground_energy(lat) == pytest.approx(dense, abs=1e-9)


def test_ground_energy_n12_frozen():
    assert ground_energy(build_kagome(2, 2)) == pytest.approx(-18.8532113907764, abs=1e-8)


def test_noiseless_energy_decreases_toward_ground():
    lat = build_kagome(2, 2)
    es = [exact_energy(lat, M) for M in (0, 2, 4, 8, 16, 32)]
    assert all(b < a for a, b in zip(es, es[1:]))
    assert es[-1] > ground_energy(lat)


def test_singlet_bond_correlations_from_shots():
    lat = build_kagome(2, 2)
    circ = build_adiabatic_circuit(lat, 0)
    st = run_circuit(circ)
    for ax in "XYZ":
        for a, b in lat.matching:
            from appqsim.simcore import TermSum

            t = TermSum([])
            t.add(1.0, [(a, ax), (b, ax)])
            assert expectation_pauli(st, t) == pytest.approx(-1.0, abs=1e-12)
    e, de = measure_energy(lat, circ, NoiseModel(0.0), 4000, seed=1)
    assert abs(e - (-18.0)) < 5 * de


def test_measured_energy_matches_exact():
    lat = build_kagome(2, 2)
    circ = build_adiabatic_circuit(lat, 8)
    e, de = measure_energy(lat, circ, NoiseModel(0.0), 20000, seed=4)
    assert abs(e - exact_energy(lat, 8)) < 5 * de


def test_sweep_reproducible_and_density():
    lat = build_kagome(2, 2)
    a = energy_sweep(lat, [0, 2], NoiseModel(0.01), 200, seed=3, trajectories=4)
    b = energy_sweep(lat, [0, 2], NoiseModel(0.01), 200, seed=3, trajectories=4)
    assert [(x.energy, x.stderr) for x in a] == [(x.energy, x.stderr) for x in b]
    assert a[0].density == pytest.approx(a[0].energy / 12)


def test_score_skh_examples():
    assert score_skh([(1, -10.0, 0.5)]) == (-9.0, 1)
    assert score_skh([(0, -30.0, 0.0), (1, -10.0, 0.1), (4, -12.0, 0.2), (8, -11.0, 0.1)]) == (pytest.approx(-11.6), 4)
    with pytest.raises(ValueError):
        score_skh([(0, -1.0, 0.0)])
