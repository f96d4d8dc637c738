"""Adiabatic ground-state preparation of the Kagome Heisenberg model.

Lattice: ``L_x x L_y`` small triangles (``L_y`` even, open boundaries),
triangle ``t = i_x + L_x i_y`` holding sites ``A, B, C = 3t, 3t+1, 3t+2``.
The initial Hamiltonian couples only the bonds of a fixed perfect matching,
so its ground state is a product of singlets; the circuit then follows

    H(s) = phi(1 - s) H_I + phi(s) H_F,   phi(s) = (1 + tanh(tan(pi s - pi/2))) / 2,

with ``M`` Trotter steps at ``s_k = k / M`` and step size
``dt(s) = 0.2 sqrt(1 - s)``.  Each step applies all XX, then all YY, then
all ZZ bond rotations ``exp(-i dt J_b P)``.

Sign convention: by default ``H = +sum (XX + YY + ZZ)`` (antiferromagnetic,
singlets are the ground state of ``H_I``); ``sign=-1`` selects the
ferromagnetic sign.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .numstat import mean_stderr
from .simcore import (
    CX,
    BasisChange,
    Circuit,
    H,
    NoiseModel,
    PauliRot,
    StateVector,
    TermSum,
    X,
    evolve,
    expectation_pauli,
    outcome_bits,
    run_circuit,
    sample_shots,
    trajectory_rng,
)

AXES = ("X", "Y", "Z")


@dataclass
class KagomeLattice:
    lx: int
    ly: int
    bonds: list[tuple[int, int]]
    matching: list[tuple[int, int]]

    @property
    def n_sites(self) -> int:
        return 3 * self.lx * self.ly

    def degree(self) -> np.ndarray:
        deg = np.zeros(self.n_sites, dtype=int)
        for i, j in self.bonds:
            deg[i] += 1
            deg[j] += 1
        return deg


def _tri(lx: int, ix: int, iy: int) -> int:
    return ix + lx * iy


def build_kagome(lx: int, ly: int) -> KagomeLattice:
    """Bonds and the standard perfect matching for ``L_x x L_y`` triangles."""
    if lx < 1 or ly < 2 or ly % 2:
        raise ValueError("need L_x >= 1 and even L_y >= 2")

    def site(ix: int, iy: int, k: int) -> int:
        return 3 * _tri(lx, ix, iy) + k

    bonds: set[tuple[int, int]] = set()

    def add(a: int, b: int) -> None:
        bonds.add((min(a, b), max(a, b)))

    for iy in range(ly):
        for ix in range(lx):
            a, b, c = (site(ix, iy, k) for k in range(3))
            add(a, b)
            add(a, c)
            add(b, c)
            if ix + 1 < lx:
                add(b, site(ix + 1, iy, 0))
            if iy + 1 < ly:
                add(c, site(ix, iy + 1, 0))
                if ix - 1 >= 0:
                    add(c, site(ix - 1, iy + 1, 1))
    matching: list[tuple[int, int]] = []
    for iy in range(ly):
        for ix in range(0, lx - 1, 2):
            matching.append((site(ix, iy, 0), site(ix, iy, 2)))
            matching.append((site(ix, iy, 1), site(ix + 1, iy, 0)))
            matching.append((site(ix + 1, iy, 1), site(ix + 1, iy, 2)))
    if lx % 2:
        ix = lx - 1
        for iy in range(0, ly, 2):
            matching.append((site(ix, iy, 0), site(ix, iy, 1)))
            matching.append((site(ix, iy, 2), site(ix, iy + 1, 0)))
            matching.append((site(ix, iy + 1, 1), site(ix, iy + 1, 2)))
    matching = sorted((min(a, b), max(a, b)) for a, b in matching)
    return KagomeLattice(lx, ly, sorted(bonds), matching)


def phi(s: float) -> float:
    """Smooth schedule with ``phi(0) = 0`` and ``phi(1) = 1``."""
    if s <= 0.0:
        return 0.0
    if s >= 1.0:
        return 1.0
    return (1.0 + math.tanh(math.tan(s * math.pi - math.pi / 2))) / 2.0


def dt_of_s(s: float) -> float:
    return 0.2 * math.sqrt(max(0.0, 1.0 - s))


def schedule(M: int, midpoint: bool = False) -> list[float]:
    if M < 0:
        raise ValueError("M must be nonnegative")
    return [((k - 0.5) if midpoint else k) / M for k in range(1, M + 1)]


def hamiltonian(lat: KagomeLattice, bonds: Sequence[tuple[int, int]] | None = None, sign: int = 1) -> TermSum:
    terms = TermSum([])
    for i, j in lat.bonds if bonds is None else bonds:
        for ax in AXES:
            terms.add(float(sign), [(i, ax), (j, ax)])
    return terms


def singlet_gates(a: int, b: int) -> list:
    """``X_a, H_a, CX(a, b), X_b`` maps ``|00>`` to ``(|01> - |10>)/sqrt 2``."""
    return [X(a), H(a), CX(a, b), X(b)]


def build_adiabatic_circuit(lat: KagomeLattice, M: int, sign: int = 1, midpoint: bool = False) -> Circuit:
    circ = Circuit(lat.n_sites, [])
    for a, b in lat.matching:
        circ.extend(singlet_gates(a, b))
    matched = set(lat.matching)
    for s in schedule(M, midpoint):
        dt = dt_of_s(s)
        wi, wf = phi(1.0 - s), phi(s)
        for ax in AXES:
            for bond in lat.bonds:
                coef = sign * (wf + (wi if bond in matched else 0.0))
                angle = -dt * coef
                circ.append(PauliRot(((bond[0], ax), (bond[1], ax)), angle))
    return circ


@dataclass
class EnergyEstimate:
    M: int
    energy: float
    stderr: float
    n_sites: int

    @property
    def density(self) -> float:
        """Energy per site."""
        return self.energy / self.n_sites


def bond_products(bits: np.ndarray, bonds: Sequence[tuple[int, int]]) -> np.ndarray:
    """``(shots, bonds)`` of ``+-1`` outcome products."""
    signs = 1 - 2 * bits.astype(np.int64)
    idx = np.asarray(bonds, dtype=int)
    return signs[:, idx[:, 0]] * signs[:, idx[:, 1]]


def measure_energy(
    lat: KagomeLattice,
    circuit: Circuit,
    noise: NoiseModel,
    shots: int,
    seed: int,
    trajectories: int = 20,
    sign: int = 1,
) -> tuple[float, float]:
    """Shot estimate ``(E, dE)`` from the all-X, all-Y and all-Z settings.

    Each setting uses ``shots`` shots split over noise trajectories; the
    setting stderr is the per-shot standard error and settings combine in
    quadrature.
    """
    if shots < 2:
        raise ValueError("need at least 2 shots per setting")
    n = lat.n_sites
    n_traj = min(trajectories, shots) if not noise.noiseless else 1
    per_traj = [shots // n_traj + (t < shots % n_traj) for t in range(n_traj)]
    values: dict[str, list[np.ndarray]] = {ax: [] for ax in AXES}
    ops = circuit.without_measurement().ops
    for t in range(n_traj):
        state = evolve(StateVector.zero(n), ops, noise, trajectory_rng(seed, t, 0))
        for a, ax in enumerate(AXES):
            out = sample_shots(state, BasisChange.uniform(n, ax), per_traj[t], trajectory_rng(seed, t, 1 + a))
            prod = bond_products(outcome_bits(out, n), lat.bonds)
            values[ax].append(sign * prod.sum(axis=1).astype(float))
    energy, var = 0.0, 0.0
    for ax in AXES:
        m, s = mean_stderr(np.concatenate(values[ax]))
        energy += m
        var += s**2
    return energy, math.sqrt(var)


def exact_energy(lat: KagomeLattice, M: int, sign: int = 1, midpoint: bool = False) -> float:
    """Noiseless ``<H_F>`` without shot noise (testing mode)."""
    state = run_circuit(build_adiabatic_circuit(lat, M, sign, midpoint))
    return float(expectation_pauli(state, hamiltonian(lat, sign=sign)))


def ground_energy(lat: KagomeLattice, sign: int = 1) -> float:
    """Exact ground energy of ``H_F`` by sparse Lanczos (scipy ``eigsh``)."""
    import scipy.sparse as sp
    from scipy.sparse.linalg import eigsh

    n = lat.n_sites
    dim = 1 << n
    idx = np.arange(dim, dtype=np.int64)
    diag = np.zeros(dim)
    rows, cols, vals = [], [], []
    for i, j in lat.bonds:
        zi = 1 - 2 * ((idx >> i) & 1)
        zj = 1 - 2 * ((idx >> j) & 1)
        diag += sign * zi * zj
        # XX + YY flips both spins and contributes 2 when they differ
        differ = ((idx >> i) & 1) != ((idx >> j) & 1)
        src = idx[differ]
        rows.append(src ^ ((1 << i) | (1 << j)))
        cols.append(src)
        vals.append(np.full(src.size, 2.0 * sign))
    off = sp.coo_matrix((np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(dim, dim))
    mat = (off + sp.diags(diag)).tocsr()
    if dim <= 64:
        return float(np.linalg.eigvalsh(mat.toarray())[0])
    w = eigsh(mat, k=1, which="SA", return_eigenvectors=False, tol=1e-12, v0=np.ones(dim) / math.sqrt(dim))
    return float(w[0])


def derived_seed(seed: int, *key: int) -> int:
    """Child seed ``SeedSequence(seed, spawn_key=key)`` reduced to a 32-bit integer."""
    return int(np.random.SeedSequence(int(seed), spawn_key=tuple(int(k) for k in key)).generate_state(1)[0])


def energy_sweep(
    lat: KagomeLattice,
    Ms: Sequence[int],
    noise: NoiseModel,
    shots: int,
    seed: int,
    trajectories: int = 20,
    sign: int = 1,
    midpoint: bool = False,
) -> list[EnergyEstimate]:
    out = []
    for M in Ms:
        circ = build_adiabatic_circuit(lat, M, sign, midpoint)
        e, de = measure_energy(lat, circ, noise, shots, derived_seed(seed, M), trajectories, sign)
        out.append(EnergyEstimate(M, e, de, lat.n_sites))
    return out


def score_skh(entries: Sequence[tuple[int, float, float]]) -> tuple[float, int]:
    """``min_{M >= 1} (E_M + 2 dE_M)`` and its argmin ``M*``."""
    valid = [(M, e + 2.0 * de) for M, e, de in entries if M >= 1]
    if not valid:
        raise ValueError("need at least one entry with M >= 1")
    M_star, best = min(valid, key=lambda x: (x[1], x[0]))
    return best, M_star
