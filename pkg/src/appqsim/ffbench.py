"""Conducting-materials benchmark: Trotterized free fermions in a compact encoding.

Geometry conventions
--------------------
* Lattice site ``j = jx + Lx * jy`` on an ``Lx x Ly`` periodic square lattice.
* Face ``(fx, fy)`` is the square whose lower-left corner is site ``(fx, fy)``.
  Ancillas sit on faces with ``fx = fy (mod 2)``; they are numbered row by
  row (increasing ``fy``, then increasing ``fx``) starting at qubit ``L``.
* A horizontal edge ``(jx, jy)-(jx+1, jy)`` borders faces ``(jx, jy)`` and
  ``(jx, jy-1)``; exactly one holds an ancilla, with ``P_a = Y_a``.
* A vertical edge ``(jx, jy)-(jx, jy+1)`` borders faces ``(jx-1, jy)`` (to its
  left) and ``(jx, jy)`` (to its right).  If the ancilla is the left face the
  edge lies on the right of the ancilla and ``P_a = +X_a``, otherwise
  ``P_a = -X_a``.
* Ancilla neighbours (periodic): ``a1 = (fx-1, fy+1)``, ``a2 = (fx+1, fy+1)``,
  ``a3 = (fx, fy+2)``, ``a4 = (fx+1, fy-1)``, ``a5 = (fx+2, fy)``.
* "Odd row" for ``Q_a`` refers to the face row ``fy``.

These reproduce the worked 4x4 and 2x4 examples and are validated end to
end against the exact free-fermion formula (see :mod:`appqsim.fforacle`).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .numstat import mean_stderr
from .simcore import (
    CX,
    Circuit,
    H,
    NoiseModel,
    Pauli,
    PauliRot,
    PauliTerm,
    S,
    Sdg,
    SeriesPoint,
    TermSum,
    X,
    trajectory_rng,
)
from .simcore.frame import FrameSimulator, FrameState
from .simcore.noise import sample_errors


@dataclass(frozen=True)
class Edge:
    i: int
    j: int
    orientation: str  # "h" or "v"
    parity: int  # row parity for horizontal edges, column parity for vertical ones
    ancilla: int  # qubit index
    axis: str  # "Y" or "X"
    sign: int  # +1 or -1


@dataclass
class EncodedLattice:
    lx: int
    ly: int
    faces: list[tuple[int, int]]
    edges: list[Edge]
    _face_index: dict[tuple[int, int], int] = field(repr=False, default_factory=dict)

    @property
    def n_sites(self) -> int:
        return self.lx * self.ly

    @property
    def n_qubits(self) -> int:
        return 3 * self.n_sites // 2

    @property
    def ancillas(self) -> list[int]:
        return list(range(self.n_sites, self.n_qubits))

    def site(self, jx: int, jy: int) -> int:
        return (jx % self.lx) + self.lx * (jy % self.ly)

    def site_coords(self, j: int) -> tuple[int, int]:
        return j % self.lx, j // self.lx

    def face_of(self, a: int) -> tuple[int, int]:
        return self.faces[a - self.n_sites]

    def ancilla_at(self, fx: int, fy: int) -> int:
        key = (fx % self.lx, fy % self.ly)
        return self.n_sites + self._face_index[key]

    def has_ancilla(self, fx: int, fy: int) -> bool:
        return (fx % self.lx, fy % self.ly) in self._face_index

    def neighbour(self, a: int, which: int) -> int:
        """Ancilla ``a^which`` for ``which`` in 1..5 (periodic)."""
        fx, fy = self.face_of(a)
        offsets = {1: (-1, 1), 2: (1, 1), 3: (0, 2), 4: (1, -1), 5: (2, 0)}
        dx, dy = offsets[which]
        return self.ancilla_at(fx + dx, fy + dy)

    def hamiltonian(self) -> TermSum:
        """``H = 1/2 sum_edges (X_i X_j + Y_i Y_j) P_a`` as a Pauli sum."""
        out = TermSum()
        for e in self.edges:
            for axis in ("X", "Y"):
                out.add(0.5 * e.sign, _edge_factors(e, axis))
        return out


def build_encoded_lattice(lx: int, ly: int) -> EncodedLattice:
    if lx < 2 or ly < 2 or lx % 2 or ly % 2:
        raise ValueError("lattice dimensions must be even and at least 2")
    faces = [(fx, fy) for fy in range(ly) for fx in range(lx) if (fx - fy) % 2 == 0]
    lat = EncodedLattice(lx, ly, faces, [])
    lat._face_index = {f: k for k, f in enumerate(faces)}
    edges = []
    for jy in range(ly):
        for jx in range(lx):
            i = lat.site(jx, jy)
            # horizontal edge to the right
            face = (jx, jy) if lat.has_ancilla(jx, jy) else (jx, jy - 1)
            edges.append(Edge(i, lat.site(jx + 1, jy), "h", jy % 2, lat.ancilla_at(*face), "Y", 1))
    for jy in range(ly):
        for jx in range(lx):
            i = lat.site(jx, jy)
            if lat.has_ancilla(jx - 1, jy):
                a, sign = lat.ancilla_at(jx - 1, jy), 1
            else:
                a, sign = lat.ancilla_at(jx, jy), -1
            edges.append(Edge(i, lat.site(jx, jy + 1), "v", jx % 2, a, "X", sign))
    lat.edges = edges
    return lat


def default_occupation(lat: EncodedLattice) -> np.ndarray:
    """``n_j = 1`` on the lower half of the lattice, 0 elsewhere."""
    return np.array([1 if lat.site_coords(j)[1] < lat.ly // 2 else 0 for j in range(lat.n_sites)])


def default_weights(lat: EncodedLattice) -> np.ndarray:
    """``f_j = -1`` on the lower half, ``+1`` on the upper half (imbalance)."""
    return np.array([-1.0 if lat.site_coords(j)[1] < lat.ly // 2 else 1.0 for j in range(lat.n_sites)])


def site_indicator(lat: EncodedLattice, j: int) -> np.ndarray:
    f = np.zeros(lat.n_sites)
    f[j] = 1.0
    return f


def _v_gates(lat: EncodedLattice, a: int, targets: Sequence[int]) -> list:
    gates: list = [H(a)]
    counts: dict[int, int] = {}
    order: list[int] = []
    for t in targets:
        if t not in counts:
            order.append(t)
        counts[t] = counts.get(t, 0) + 1
    # repeated CNOTs onto the same target cancel pairwise
    for t in order:
        if counts[t] % 2:
            gates.append(CX(a, t))
    return gates


def toric_code_schedule(lat: EncodedLattice) -> list[tuple[str, int]]:
    """Ordered ``("V", a)`` / ``("Vt", a)`` applications for the ancilla preparation.

    ``V`` on the ancillas of odd face rows ``Ly-3, Ly-5, ..., 1`` (each row
    left to right), then ``Vt`` on the row-0 ancillas at columns
    ``Lx-4, Lx-6, ..., 0``.  For 4x4 this is ``V_18, V_19, Vt_16``.
    """
    out: list[tuple[str, int]] = []
    for fy in range(lat.ly - 3, 0, -2):
        for fx in range(1, lat.lx, 2):
            out.append(("V", lat.ancilla_at(fx, fy)))
    for fx in range(lat.lx - 4, -1, -2):
        out.append(("Vt", lat.ancilla_at(fx, 0)))
    return out


def ancilla_prep_gates(lat: EncodedLattice) -> list:
    gates: list = []
    for kind, a in toric_code_schedule(lat):
        if kind == "V":
            targets = [lat.neighbour(a, 1), lat.neighbour(a, 2), lat.neighbour(a, 3)]
        else:
            targets = [lat.neighbour(a, 5), lat.neighbour(a, 4), lat.neighbour(a, 2)]
        gates.extend(_v_gates(lat, a, targets))
    return gates


def q_gates(lat: EncodedLattice) -> list:
    """``Q = H S^dag`` on odd face rows, ``Q = S H S`` on even rows (rightmost first)."""
    gates: list = []
    for a in lat.ancillas:
        fy = lat.face_of(a)[1]
        if fy % 2:
            gates += [Sdg(a), H(a)]
        else:
            gates += [S(a), H(a), S(a)]
    return gates


def build_initial_state_circuit(lat: EncodedLattice, occupation: Sequence[int] | None = None) -> Circuit:
    occ = default_occupation(lat) if occupation is None else np.asarray(occupation)
    if occ.shape != (lat.n_sites,) or not set(np.unique(occ)) <= {0, 1}:
        raise ValueError("occupation must be a 0/1 vector over lattice sites")
    gates: list = [X(j) for j in range(lat.n_sites) if occ[j]]
    gates += ancilla_prep_gates(lat)
    gates += q_gates(lat)
    return Circuit(lat.n_qubits, gates)


def _edge_factors(e: Edge, axis: str) -> list[tuple[int, str]]:
    return sorted([(e.i, axis), (e.j, axis), (e.ancilla, e.axis)])


def trotter_layers(lat: EncodedLattice) -> list[list[tuple[Edge, str]]]:
    """The four layers ``U_{-,1}, U_{-,2}, U_{|,1}, U_{|,2}`` in application order."""
    layers = []
    for orientation in ("h", "v"):
        for swap in (False, True):
            layer = []
            for parity in (0, 1):
                axis = "Y" if (parity == 0) != swap else "X"
                for e in lat.edges:
                    if e.orientation == orientation and e.parity == parity:
                        layer.append((e, axis))
            layers.append(layer)
    return layers


def build_trotter_step(lat: EncodedLattice, dt: float) -> Circuit:
    if dt < 0:
        raise ValueError("Trotter step must be nonnegative")
    ops = []
    for layer in trotter_layers(lat):
        for e, axis in layer:
            ops.append(PauliRot(_edge_factors(e, axis), 0.5 * dt * e.sign))
    return Circuit(lat.n_qubits, ops)


def observable_terms(lat: EncodedLattice, weights: Sequence[float]) -> TermSum:
    """``sum_j f_j Z_j`` (Z form)."""
    return TermSum([PauliTerm(float(f), ((j, "Z"),)) for j, f in enumerate(weights) if f != 0])


def fermionic_from_z(z: np.ndarray | float, weights: Sequence[float]) -> float:
    """``sum_j f_j n_j`` with ``n_j = (1 - Z_j) / 2`` from ``<Z_j>`` values."""
    f = np.asarray(weights, dtype=float)
    return float(np.sum(f * (1.0 - np.asarray(z)) / 2.0))


@dataclass
class FFBenchConfig:
    lx: int
    ly: int
    dt: float = 0.2
    occupation: np.ndarray | None = None
    weights: np.ndarray | None = None
    max_steps: int | None = None
    p: float = 0.0
    shots: int = 1000
    trajectories: int = 20

    def __post_init__(self) -> None:
        if self.dt <= 0:
            raise ValueError("dt must be positive")
        if self.shots < 1:
            raise ValueError("shots must be positive")
        if self.trajectories < 1:
            raise ValueError("need at least one trajectory")
        self.lattice = build_encoded_lattice(self.lx, self.ly)
        if self.occupation is None:
            self.occupation = default_occupation(self.lattice)
        if self.weights is None:
            self.weights = default_weights(self.lattice)
        self.occupation = np.asarray(self.occupation, dtype=int)
        self.weights = np.asarray(self.weights, dtype=float)
        if self.max_steps is None:
            self.max_steps = 2 * self.lx

    @property
    def n_sites(self) -> int:
        return self.lx * self.ly


@dataclass
class FFResult:
    """Per time point: fermionic observable estimate and per-site ``<Z_j>`` estimates."""

    steps: list[int]
    mean: np.ndarray
    stderr: np.ndarray
    shots: int
    z_mean: np.ndarray  # (steps, L)
    z_stderr: np.ndarray

    def points(self) -> list[SeriesPoint]:
        return [
            SeriesPoint(mean=float(m), stderr=float(s), shots=self.shots, n=int(n))
            for n, m, s in zip(self.steps, self.mean, self.stderr)
        ]


class FFSimulator:
    """Noisy shot-level simulation of the benchmark circuits.

    One trajectory runs the preparation followed by ``max_steps`` Trotter
    steps and is read out after every step (a prefix of the full circuit is
    exactly the circuit for that step count).  The reduced stabilizer-frame
    simulator is used throughout; noiseless states after each step are
    cached so that a trajectory only recomputes from the step containing its
    first error.
    """

    def __init__(self, config: FFBenchConfig) -> None:
        self.config = config
        lat = config.lattice
        self.prep = build_initial_state_circuit(lat, config.occupation).ops
        self.step = build_trotter_step(lat, config.dt).ops
        self.ops = self.prep + self.step * config.max_steps
        self.frame = FrameSimulator(lat.n_qubits, self.prep, [Pauli.from_factors(g.paulis) for g in self.step])
        self.sites = list(range(lat.n_sites))
        # checkpoint op index -> step count
        self.checkpoints = {len(self.prep) - 1 + n * len(self.step): n for n in range(config.max_steps + 1)}
        self._clean: dict[int, FrameState] | None = None

    def clean_states(self) -> dict[int, FrameState]:
        if self._clean is None:
            states: dict[int, FrameState] = {}

            def keep(g: int, st: FrameState) -> None:
                states[self.checkpoints[g]] = st.copy()

            self.frame.run(self.ops, NoiseModel(0.0), None, self.checkpoints, keep)
            self._clean = states
        return self._clean

    def exact_z(self) -> np.ndarray:
        """Noiseless ``<Z_j>`` after each step count, shape ``(T+1, L)``."""
        clean = self.clean_states()
        return np.array([self.frame.z_expectations(clean[n], self.sites) for n in range(self.config.max_steps + 1)])

    def run(self, seed: int, shots: int | None = None, noise: NoiseModel | None = None) -> FFResult:
        cfg = self.config
        shots = cfg.shots if shots is None else shots
        noise = NoiseModel(cfg.p) if noise is None else noise
        n_steps = cfg.max_steps + 1
        n_traj = min(cfg.trajectories, shots)
        per_traj = [shots // n_traj + (t < shots % n_traj) for t in range(n_traj)]
        bits = [[] for _ in range(n_steps)]
        clean = self.clean_states()
        step_len = len(self.step)
        n_prep = len(self.prep)
        for t in range(n_traj):
            noise_rng = trajectory_rng(seed, t, 0)
            shot_rng = trajectory_rng(seed, t, 1)
            plan = sample_errors(self.ops, noise, noise_rng)

            def record(g: int, st: FrameState, t_shots=per_traj[t], rng=shot_rng) -> None:
                bits[self.checkpoints[g]].append(self.frame.sample_z(st, self.sites, t_shots, rng))

            first = min(plan.errors) if plan.errors else len(self.ops)
            if first < n_prep:
                self.frame.run(self.ops, noise, None, self.checkpoints, record, plan=plan)
                continue
            # identical to the noiseless trajectory up to the step holding the first error
            n0 = (first - n_prep) // step_len
            for n in range(min(n0, n_steps - 1) + 1):
                record(n_prep - 1 + n * step_len, clean[n])
            if n0 < n_steps - 1:
                state = clean[n0].copy()
                later = {g: v for g, v in self.checkpoints.items() if v > n0}
                self.frame.run(self.ops, noise, None, later, record, plan=plan, state=state, start=n_prep + n0 * step_len)
        f = cfg.weights
        means, errs, zm, zs = [], [], [], []
        for n in range(n_steps):
            b = np.concatenate(bits[n], axis=0).astype(float)
            m, s = mean_stderr(b @ f) if shots > 1 else (float(b @ f), 0.0)
            means.append(m)
            errs.append(s)
            z = 1.0 - 2.0 * b
            zm.append(z.mean(axis=0))
            zs.append(z.std(axis=0, ddof=1) / np.sqrt(shots) if shots > 1 else np.zeros(z.shape[1]))
        return FFResult(list(range(n_steps)), np.array(means), np.array(errs), shots, np.array(zm), np.array(zs))


def estimate_observable(config: FFBenchConfig, n: int, seed: int):
    """Shot estimate of ``sum_j f_j n_j`` after ``n`` Trotter steps: ``(mean, stderr, z_mean)``."""
    if n < 0 or n > config.max_steps:
        raise ValueError("step count out of range")
    res = FFSimulator(config).run(seed)
    return res.mean[n], res.stderr[n], res.z_mean[n]
