"""Low-field NMR benchmark on the seven-spin benzene-13C1 model.

The free induction decay is

    FID(t) = 2^-N tr[Pi^dag S_z(t) Pi S_z],   S_z = sum_j gamma_j Z_j,
    Pi = exp(i tau sum_j gamma_j X_j),

evaluated by pushing all ``2^7`` computational basis states through the
pulse and ``n`` Trotter steps.  With ``Phi_n`` the ``128 x 128`` matrix of
evolved columns, ``FID(n) = 2^-N sum_{x,z} s_x s_z |Phi_n[x, z]|^2`` where
``s`` is the diagonal of ``S_z``.

Noiseless evolution uses the eigen-decomposition ``U = V diag(d) V^dag`` of
one step, so every time point costs ``O(4^N)``.  Noisy trajectories use the
same jump between consecutive error steps and apply error steps gate
segment by gate segment through precomputed prefix products.

Spectra are ``S(w) = dt sum_n exp(i w n dt) exp(-n dt / T2) delta_n FID(n)``
on 1000 points spanning ``[140, 175]`` inclusive, evaluated with a chirp-z
transform; matching uses the real (absorption) part.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
import scipy.linalg
import scipy.signal

from .numstat import mean_stderr
from .simcore import Circuit, NoiseModel, Pauli, PauliRot, StateVector, apply_gate, trajectory_rng
from .simcore.noise import error_pauli

N_SPINS = 7
GAMMA = np.array([67.2828] + [267.522] * 6)
TAU = math.pi / (2 * GAMMA[0])
T_FINAL = 50.0
T2 = 10.0
DB_DT = 0.01
OMEGA_MIN, OMEGA_MAX, N_OMEGA = 140.0, 175.0, 1000

# upper triangle of the coupling table, 1-based spin labels
_J_TABLE = {
    (1, 2): 158.354, (1, 3): 1.133, (1, 4): 7.607, (1, 5): -1.296, (1, 6): 7.607, (1, 7): 1.133,
    (2, 3): 7.540, (2, 4): 1.380, (2, 5): 0.661, (2, 6): 1.380, (2, 7): 7.540,
    (3, 4): 7.543, (3, 5): 1.377, (3, 6): 0.658, (3, 7): 1.373,
    (4, 5): 7.535, (4, 6): 1.382, (4, 7): 0.658,
    (5, 6): 7.535, (5, 7): 1.377,
    (6, 7): 7.543,
}  # fmt: skip

PAIR_ORDER = (
    (1, 2), (3, 4), (5, 6), (1, 7), (2, 3), (4, 5), (6, 7), (1, 3), (4, 6), (2, 7), (3, 5),
    (1, 6), (2, 4), (5, 7), (1, 4), (1, 5), (2, 5), (2, 6), (3, 6), (3, 7), (4, 7),
)  # fmt: skip

PAIRS = tuple(sorted(_J_TABLE))


def reference_couplings() -> np.ndarray:
    """Symmetric ``7 x 7`` coupling matrix (0-based indices)."""
    J = np.zeros((N_SPINS, N_SPINS))
    for (i, j), v in _J_TABLE.items():
        J[i - 1, j - 1] = J[j - 1, i - 1] = v
    return J


def omega_grid() -> np.ndarray:
    return np.linspace(OMEGA_MIN, OMEGA_MAX, N_OMEGA)


@dataclass
class SpinSystem:
    J: np.ndarray = field(default_factory=reference_couplings)
    gamma: np.ndarray = field(default_factory=lambda: GAMMA.copy())
    tau: float = TAU

    def __post_init__(self) -> None:
        self.J = np.asarray(self.J, dtype=float)
        if self.J.shape != (N_SPINS, N_SPINS) or not np.allclose(self.J, self.J.T):
            raise ValueError("J must be a symmetric 7x7 matrix")

    @property
    def n(self) -> int:
        return N_SPINS

    def sz_diagonal(self) -> np.ndarray:
        idx = np.arange(1 << self.n)
        bits = (idx[:, None] >> np.arange(self.n)[None, :]) & 1
        return (1 - 2 * bits) @ self.gamma

    def hamiltonian_matrix(self) -> np.ndarray:
        """Dense ``H = 1/4 sum_{i<j} J_ij (XX + YY + ZZ)`` (real symmetric)."""
        dim = 1 << self.n
        idx = np.arange(dim)
        H = np.zeros((dim, dim))
        for i in range(self.n):
            for j in range(i + 1, self.n):
                Jij = self.J[i, j]
                if Jij == 0:
                    continue
                bi, bj = (idx >> i) & 1, (idx >> j) & 1
                H[idx, idx] += 0.25 * Jij * np.where(bi == bj, 1.0, -1.0)
                differ = idx[bi != bj]
                H[differ ^ ((1 << i) | (1 << j)), differ] += 0.5 * Jij
        return H


def pulse_gates(system: SpinSystem) -> list:
    return [PauliRot(((q, "X"),), float(system.tau * system.gamma[q])) for q in range(system.n)]


def build_nmr_trotter_step(system: SpinSystem, dt: float) -> Circuit:
    """One step: for each pair in the fixed order, ``exp(i J dt/4 PP)`` for ``PP = XX, YY, ZZ``."""
    if dt < 0:
        raise ValueError("dt must be nonnegative")
    circ = Circuit(system.n, [])
    for i, j in PAIR_ORDER:
        angle = system.J[i - 1, j - 1] * dt / 4.0
        for ax in ("X", "Y", "Z"):
            circ.append(PauliRot(((i - 1, ax), (j - 1, ax)), float(angle)))
    return circ


def _gate_matrix_prefixes(n: int, gates: Sequence) -> list[np.ndarray]:
    """Unitaries of the prefixes ``gates[:g+1]`` for every ``g``."""
    state = StateVector.basis_batch(n, np.arange(1 << n))
    out = []
    for gate in gates:
        apply_gate(state, gate)
        out.append(state.amplitudes.copy())
    return out


def gates_unitary(n: int, gates: Sequence) -> np.ndarray:
    state = StateVector.basis_batch(n, np.arange(1 << n))
    for gate in gates:
        apply_gate(state, gate)
    return state.amplitudes.copy()


def _unitary_eig(U: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """``(d, V)`` with ``U = V diag(d) V^dag`` and ``V`` unitary (complex Schur form)."""
    T, Z = scipy.linalg.schur(U, output="complex")
    return np.diag(T).copy(), Z


def _fid_from(Phi: np.ndarray, s: np.ndarray) -> float:
    return float(np.real(s @ (np.abs(Phi) ** 2) @ s)) / Phi.shape[0]


def _fid_series_eig(W: np.ndarray, V: np.ndarray, phases: np.ndarray, s: np.ndarray, m_values: np.ndarray) -> np.ndarray:
    """``FID`` of ``V diag(e^{i m phases}) W`` for each ``m`` in ``m_values``."""
    B = (V.conj().T * s[None, :]) @ V  # V^dag S V
    C = (W * s[None, :]) @ W.conj().T  # W S W^dag
    A = B.T * C / W.shape[0]
    out = np.empty(len(m_values))
    chunk = 2048
    for start in range(0, len(m_values), chunk):
        m = m_values[start : start + chunk]
        P = np.exp(1j * np.outer(m, phases))
        out[start : start + chunk] = np.real(np.sum(P * (P.conj() @ A.T), axis=1))
    return out


class FIDEngine:
    """Noiseless and noisy FID time series for one spin system and Trotter step."""

    def __init__(self, system: SpinSystem, dt: float) -> None:
        self.system = system
        self.dt = float(dt)
        n = system.n
        self.s = system.sz_diagonal().astype(float)
        self.pulse = gates_unitary(n, pulse_gates(system))
        self.step_gates = build_nmr_trotter_step(system, dt).ops
        self.U = gates_unitary(n, self.step_gates)
        d, V = _unitary_eig(self.U)
        self.phases = np.angle(d)
        self.V = V
        self._prefix: list[np.ndarray] | None = None

    @property
    def prefixes(self) -> list[np.ndarray]:
        if self._prefix is None:
            self._prefix = _gate_matrix_prefixes(self.system.n, self.step_gates)
        return self._prefix

    def fid_noiseless(self, n_steps: int) -> np.ndarray:
        W = self.V.conj().T @ self.pulse
        return _fid_series_eig(W, self.V, self.phases, self.s, np.arange(n_steps + 1, dtype=float))

    def _jump(self, Phi: np.ndarray, m: int) -> np.ndarray:
        W = self.V.conj().T @ Phi
        return self.V @ (np.exp(1j * m * self.phases)[:, None] * W)

    def fid_trajectory(self, n_steps: int, noise: NoiseModel, rng: np.random.Generator) -> np.ndarray:
        """One Pauli-insertion trajectory; same RNG layout as :func:`simcore.sample_errors`."""
        per_step = len(self.step_gates)
        n_opp = per_step * n_steps
        fired = np.flatnonzero(rng.random(n_opp) < noise.effective_p) if not noise.noiseless else np.array([], int)
        ks = rng.integers(1, 16, size=len(fired))
        errors: dict[int, list[tuple[int, int]]] = {}
        for g, k in zip(fired, ks):
            errors.setdefault(int(g) // per_step, []).append((int(g) % per_step, int(k)))
        out = np.empty(n_steps + 1)
        Phi = self.pulse.copy()
        out[0] = _fid_from(Phi, self.s)
        n = 0
        for err_step in sorted(errors) + [n_steps]:
            gap = err_step - n  # clean steps n+1 .. err_step (0-based error step index => step number err_step+1)
            if gap > 0:
                W = self.V.conj().T @ Phi
                out[n + 1 : n + gap + 1] = _fid_series_eig(W, self.V, self.phases, self.s, np.arange(1, gap + 1, dtype=float))
                Phi = self._jump(Phi, gap)
                n += gap
            if n == n_steps:
                break
            Phi = self._error_step(Phi, errors[err_step])
            n += 1
            out[n] = _fid_from(Phi, self.s)
        return out

    def _error_step(self, Phi: np.ndarray, errs: list[tuple[int, int]]) -> np.ndarray:
        pre = self.prefixes
        dim = Phi.shape[0]
        last = -1
        for pos, k in sorted(errs):
            if pos != last:
                seg = pre[pos] if last < 0 else pre[pos] @ pre[last].conj().T
                Phi = seg @ Phi
                last = pos
            gate = self.step_gates[pos]
            pair = (gate.paulis[0][0], gate.paulis[1][0])
            Phi = _pauli_rows(error_pauli(pair, k), Phi, dim)
        seg = pre[-1] @ pre[last].conj().T
        return seg @ Phi

    def fid_noisy(self, n_steps: int, noise: NoiseModel, seed: int, trajectories: int = 20) -> tuple[np.ndarray, np.ndarray]:
        """Trajectory-averaged FID and its standard error per time point."""
        if noise.noiseless:
            return self.fid_noiseless(n_steps), np.zeros(n_steps + 1)
        runs = np.array([self.fid_trajectory(n_steps, noise, trajectory_rng(seed, t, 0)) for t in range(trajectories)])
        mean = runs.mean(axis=0)
        err = runs.std(axis=0, ddof=1) / math.sqrt(trajectories) if trajectories > 1 else np.zeros_like(mean)
        return mean, err


def _pauli_rows(p: Pauli, Phi: np.ndarray, dim: int) -> np.ndarray:
    """Left-multiply the columns of ``Phi`` by the Pauli matrix ``p``."""
    idx = np.arange(dim)
    # P|y> = i^phase (-1)^{popcount(z & y)} |y ^ x>  (Z applied before X)
    sign = (1j) ** p.phase * (1 - 2 * (np.bitwise_count(idx & p.z).astype(np.int64) & 1))
    out = np.empty_like(Phi)
    out[idx ^ p.x] = sign[:, None] * Phi
    return out


def exact_fid(system: SpinSystem, times: np.ndarray) -> np.ndarray:
    """Dense-matrix ``FID(t)`` with exact ``exp(i H t)`` evolution."""
    E, V = np.linalg.eigh(system.hamiltonian_matrix())
    pulse = gates_unitary(system.n, pulse_gates(system))
    W = V.T.astype(complex) @ pulse
    return _fid_series_eig(W, V.astype(complex), E, system.sz_diagonal().astype(float), np.asarray(times, dtype=float))


def step_count(dt: float, T: float = T_FINAL) -> int:
    ratio = T / dt
    n = int(round(ratio))
    if dt <= 0 or abs(ratio - n) > 1e-9 * max(1.0, ratio):
        raise ValueError("step_count_not_integer")
    return n


# ---------------------------------------------------------------------------
# spectra and compatibility


def endpoint_weights(n_points: int) -> np.ndarray:
    w = np.ones(n_points)
    w[0] = w[-1] = 0.5
    return w


def spectrum_from_series(fid: Sequence[float], dt: float, rate: float = 1.0 / T2, grid: np.ndarray | None = None, part: str = "real") -> np.ndarray:
    """``dt sum_n exp(i w n dt) exp(-rate n dt) delta_n FID(n)`` on ``grid``.

    ``rate = 1 / T2`` (may be zero or negative).  ``grid`` must be uniformly
    spaced.  ``part`` selects ``"real"``, ``"magnitude"`` or ``"complex"``.
    """
    fid = np.asarray(fid, dtype=float)
    grid = omega_grid() if grid is None else np.asarray(grid, dtype=float)
    n = np.arange(fid.size)
    x = fid * endpoint_weights(fid.size) * np.exp(-rate * n * dt)
    w0 = grid[0]
    dw = grid[1] - grid[0] if grid.size > 1 else 0.0
    # czt evaluates sum_n x_n z_k^-n at z_k = a w^-k; z_k = exp(-i w_k dt) needs
    # a = exp(-i w0 dt) and w = exp(+i dw dt)
    spec = dt * scipy.signal.czt(x, m=grid.size, w=np.exp(1j * dw * dt), a=np.exp(-1j * w0 * dt))
    if part == "real":
        return np.real(spec)
    if part == "magnitude":
        return np.abs(spec)
    if part == "complex":
        return spec
    raise ValueError(f"unknown spectrum part {part!r}")


def overlap(a: np.ndarray, b: np.ndarray) -> float:
    """``F(A, B) = sum A B / sqrt(sum A^2 sum B^2)``."""
    na, nb = float(np.dot(a, a)), float(np.dot(b, b))
    if na == 0 or nb == 0:
        raise ValueError("zero-norm spectrum")
    return float(np.dot(a, b) / math.sqrt(na * nb))


def circular_shift(spec: np.ndarray, shift: int) -> np.ndarray:
    """``S'(w_k) = S(w_{k + shift})`` with periodic wrap on the grid."""
    return np.roll(spec, -int(shift))


def _best_shift(A: np.ndarray, Bhat: np.ndarray, normB: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Max over circular shifts of ``F(roll(A), B)`` for each row of ``Bhat`` (FFT of candidates)."""
    na = math.sqrt(float(np.dot(A, A)))
    if na == 0:
        raise ValueError("zero-norm spectrum")
    # corr[s] = sum_k A[k + s] B[k]
    corr = np.real(np.fft.ifft(np.fft.fft(A)[None, :] * np.conj(Bhat), axis=1))
    best = np.argmax(corr, axis=1)
    vals = corr[np.arange(corr.shape[0]), best] / (na * normB)
    return vals, best


@dataclass
class Match:
    value: float
    rate: float
    shift: int


RATE_BOUNDS = (-0.5, 0.5)
RATE_GRID = 101


def compatibilities(
    fid: Sequence[float],
    dt: float,
    candidates: np.ndarray,
    part: str = "real",
    refine_iters: int = 30,
    refine_top: int = 8,
) -> list[Match]:
    """Best ``F`` over ``1/T2~`` in ``[-0.5, 0.5]`` and circular shifts, per candidate spectrum.

    The rate is scanned on a uniform grid; the ``refine_top`` candidates with
    the highest grid values are then refined by golden-section search in
    the bracket around their best grid rate (the others keep the grid value).
    """
    candidates = np.atleast_2d(np.asarray(candidates, dtype=float))
    normB = np.sqrt(np.sum(candidates**2, axis=1))
    if np.any(normB == 0):
        raise ValueError("zero-norm spectrum")
    Bhat = np.fft.fft(candidates, axis=1)
    rates = np.linspace(*RATE_BOUNDS, RATE_GRID)
    table = np.empty((rates.size, candidates.shape[0]))
    for i, r in enumerate(rates):
        table[i], _ = _best_shift(spectrum_from_series(fid, dt, r, part=part), Bhat, normB)
    step = rates[1] - rates[0]
    grid_best = table.max(axis=0)
    refine = set(np.argsort(-grid_best, kind="stable")[:refine_top].tolist())
    out = []
    for c in range(candidates.shape[0]):
        i0 = int(np.argmax(table[:, c]))
        if c not in refine:
            A = spectrum_from_series(fid, dt, rates[i0], part=part)
            val, shift = _best_shift(A, Bhat[c : c + 1], normB[c : c + 1])
            out.append(Match(float(val[0]), float(rates[i0]), int(shift[0])))
            continue

        def f(r: float, c=c) -> float:
            return float(_best_shift(spectrum_from_series(fid, dt, r, part=part), Bhat[c : c + 1], normB[c : c + 1])[0][0])

        lo, hi = max(RATE_BOUNDS[0], rates[i0] - step), min(RATE_BOUNDS[1], rates[i0] + step)
        best_r, best_v = rates[i0], table[i0, c]
        g = (math.sqrt(5) - 1) / 2
        a, b = lo, hi
        x1, x2 = b - g * (b - a), a + g * (b - a)
        f1, f2 = f(x1), f(x2)
        for _ in range(refine_iters):
            if f1 >= f2:
                b, x2, f2 = x2, x1, f1
                x1 = b - g * (b - a)
                f1 = f(x1)
            else:
                a, x1, f1 = x1, x2, f2
                x2 = a + g * (b - a)
                f2 = f(x2)
        for r, v in ((x1, f1), (x2, f2)):
            if v > best_v:
                best_r, best_v = r, v
        A = spectrum_from_series(fid, dt, best_r, part=part)
        val, shift = _best_shift(A, Bhat[c : c + 1], normB[c : c + 1])
        out.append(Match(float(val[0]), float(best_r), int(shift[0])))
    return out


def compatibility(fid: Sequence[float], dt: float, candidate: np.ndarray, part: str = "real") -> Match:
    return compatibilities(fid, dt, candidate[None, :], part=part)[0]


# ---------------------------------------------------------------------------
# databases and score


@dataclass
class Database:
    seed: int
    couplings: np.ndarray  # (100, 7, 7)
    spectra: np.ndarray  # (100, 1000)

    @property
    def size(self) -> int:
        return self.couplings.shape[0]


def perturbation_scale(m: int) -> float:
    return 0.01 * 2.0 ** (0.1 * m)


def database_couplings(seed: int) -> np.ndarray:
    """Sample 0 is the reference; sample ``m + 1`` perturbs every ``J_ij`` by ``0.01 2^(0.1 m) xi``."""
    rng = np.random.default_rng(np.random.SeedSequence(int(seed)))
    J0 = reference_couplings()
    out = [J0]
    for m in range(99):
        xi = rng.standard_normal(len(PAIRS))
        J = J0.copy()
        for (i, j), x in zip(PAIRS, xi):
            J[i - 1, j - 1] += perturbation_scale(m) * x
            J[j - 1, i - 1] = J[i - 1, j - 1]
        out.append(J)
    return np.array(out)


def candidate_spectrum(J: np.ndarray, dt: float = DB_DT, part: str = "real") -> np.ndarray:
    """Spectrum of the noiseless Trotterized FID for couplings ``J`` (step ``dt`` up to ``T``)."""
    fid = FIDEngine(SpinSystem(J), dt).fid_noiseless(step_count(dt))
    return spectrum_from_series(fid, dt, 1.0 / T2, part=part)


@functools.lru_cache(maxsize=16)
def generate_database(seed: int, part: str = "real") -> Database:
    couplings = database_couplings(seed)
    spectra = np.array([candidate_spectrum(J, part=part) for J in couplings])
    return Database(int(seed), couplings, spectra)


def delta_j(J_est: np.ndarray, J_ref: np.ndarray | None = None) -> float:
    J_ref = reference_couplings() if J_ref is None else J_ref
    diffs = [J_est[i - 1, j - 1] - J_ref[i - 1, j - 1] for i, j in PAIRS]
    return float(math.sqrt(np.mean(np.square(diffs))))


@dataclass
class Identification:
    database_seed: int
    index: int
    delta_j: float
    match: Match


@dataclass
class NMRScore:
    score: float
    stderr: float
    identifications: list[Identification]


def database_seeds(seed: int, n_databases: int) -> list[int]:
    ss = np.random.SeedSequence(int(seed))
    return [int(c.generate_state(1)[0]) for c in ss.spawn(n_databases)]


def identify(fid: Sequence[float], dt: float, db: Database, part: str = "real") -> Identification:
    matches = compatibilities(fid, dt, db.spectra, part=part)
    vals = np.array([m.value for m in matches])
    best = int(np.argmax(vals))
    return Identification(db.seed, best, delta_j(db.couplings[best]), matches[best])


def score_nmr(fid: Sequence[float], dt: float, n_databases: int = 3, seed: int = 0, part: str = "real") -> NMRScore:
    """``S_NMR = E[Delta J]`` over seeded databases (mean and standard error)."""
    if n_databases < 1:
        raise ValueError("need at least one database")
    fid = np.asarray(fid, dtype=float)
    n = step_count(dt)
    if fid.size != n + 1:
        raise ValueError(f"expected {n + 1} FID values for dt={dt}")
    ids = [identify(fid, dt, generate_database(s, part), part) for s in database_seeds(seed, n_databases)]
    vals = [i.delta_j for i in ids]
    mean, err = mean_stderr(vals) if len(vals) > 1 else (vals[0], float("nan"))
    return NMRScore(mean, err, ids)


def compute_fid(system: SpinSystem, dt: float, n: int, noise: NoiseModel | None = None, seed: int = 0, trajectories: int = 20) -> float:
    """``FID(n dt)`` of the Trotterized circuit (trajectory mean when noisy)."""
    engine = FIDEngine(system, dt)
    if noise is None or noise.noiseless:
        return float(engine.fid_noiseless(n)[n])
    return float(engine.fid_noisy(n, noise, seed, trajectories)[0][n])


def simulate_fid(dt: float, noise: NoiseModel, seed: int, trajectories: int = 20, system: SpinSystem | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Benchmark run: FID at ``n dt`` for ``n = 0..T/dt``."""
    engine = FIDEngine(system or SpinSystem(), dt)
    return engine.fid_noisy(step_count(dt), noise, seed, trajectories)
