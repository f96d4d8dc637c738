"""Dense statevector simulation.

Amplitude ``psi[b]`` belongs to the basis state whose qubit ``q`` is bit
``q`` of ``b``.  Internally the array is viewed as a rank-``N`` tensor of
shape ``(2,)*N`` (plus an optional trailing batch axis); qubit ``q`` then
lives on tensor axis ``N - 1 - q``.  Pauli operators are applied with sign
multiplications and axis reversals, so no gate ever builds a matrix larger
than 2x2.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce

import numpy as np

from .circuit import (
    CX,
    BasisChange,
    Circuit,
    CtrlPauliRot,
    Gate,
    H,
    MeasureAll,
    PauliRot,
    S,
    Sdg,
    X,
)
from .paulis import Pauli, TermSum

MAX_QUBITS = 26
_SQRT_HALF = 1.0 / np.sqrt(2.0)


@dataclass
class StateVector:
    """``amplitudes`` has shape ``(2**N,)`` or ``(2**N, batch)``."""

    n_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        if self.n_qubits > MAX_QUBITS:
            raise ValueError(f"dense simulation supports at most {MAX_QUBITS} qubits")
        if self.amplitudes.shape[0] != 2**self.n_qubits:
            raise ValueError("amplitude count does not match qubit count")

    @classmethod
    def zero(cls, n_qubits: int) -> "StateVector":
        return cls.basis(n_qubits, 0)

    @classmethod
    def basis(cls, n_qubits: int, index: int) -> "StateVector":
        if n_qubits > MAX_QUBITS:
            raise ValueError(f"dense simulation supports at most {MAX_QUBITS} qubits")
        amps = np.zeros(2**n_qubits, dtype=np.complex128)
        amps[index] = 1.0
        return cls(n_qubits, amps)

    @classmethod
    def basis_batch(cls, n_qubits: int, indices) -> "StateVector":
        """One column per basis index; used to propagate many inputs at once."""
        indices = np.asarray(indices)
        amps = np.zeros((2**n_qubits, len(indices)), dtype=np.complex128)
        amps[indices, np.arange(len(indices))] = 1.0
        return cls(n_qubits, amps)

    @property
    def batch_shape(self) -> tuple[int, ...]:
        return self.amplitudes.shape[1:]

    def copy(self) -> "StateVector":
        return StateVector(self.n_qubits, self.amplitudes.copy())

    def tensor(self) -> np.ndarray:
        return self.amplitudes.reshape((2,) * self.n_qubits + self.batch_shape)

    def norm_sq(self) -> np.ndarray | float:
        return np.sum(np.abs(self.amplitudes) ** 2, axis=0)

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2


def _axis(n: int, q: int) -> int:
    return n - 1 - q


def _index(ndim: int, fixed: dict[int, int]) -> tuple:
    return tuple(fixed.get(ax, slice(None)) for ax in range(ndim))


def _sign_array(z_axes: list[int], ndim: int) -> np.ndarray | None:
    if not z_axes:
        return None
    factors = []
    for ax in z_axes:
        shape = [1] * ndim
        shape[ax] = 2
        factors.append(np.array([1.0, -1.0]).reshape(shape))
    return reduce(np.multiply, factors)


def pauli_apply_tensor(t: np.ndarray, x_axes: list[int], z_axes: list[int], phase: int) -> np.ndarray:
    """Return ``i**phase X^x Z^z`` applied to tensor ``t`` (new array)."""
    signs = _sign_array(z_axes, t.ndim)
    out = t * signs if signs is not None else t
    if x_axes:
        sl = tuple(slice(None, None, -1) if ax in x_axes else slice(None) for ax in range(t.ndim))
        out = out[sl]
    coef = 1j**phase
    if coef != 1:
        out = out * coef
    elif np.may_share_memory(out, t):
        out = out.copy()
    return out


def _pauli_axes(n: int, p: Pauli, skip_axis: int | None = None) -> tuple[list[int], list[int]]:
    """Tensor axes carrying X and Z factors; ``skip_axis`` is removed (sub-view indexing)."""

    def axes(mask: int) -> list[int]:
        out = []
        q = 0
        while mask >> q:
            if (mask >> q) & 1:
                ax = _axis(n, q)
                if skip_axis is not None and ax > skip_axis:
                    ax -= 1
                out.append(ax)
            q += 1
        return out

    return axes(p.x), axes(p.z)


def _rotate(t: np.ndarray, x_axes: list[int], z_axes: list[int], phase: int, theta: float) -> np.ndarray:
    """cos(theta) t + i sin(theta) P t"""
    pt = pauli_apply_tensor(t, x_axes, z_axes, phase + 1)
    return np.cos(theta) * t + np.sin(theta) * pt


def rotate_pauli(state: StateVector, p: Pauli, theta: float) -> StateVector:
    """In place ``exp(i theta p)`` for a Hermitian Pauli operator ``p``."""
    if theta != 0.0:
        t = state.tensor()
        x_axes, z_axes = _pauli_axes(state.n_qubits, p)
        t[...] = _rotate(t, x_axes, z_axes, p.phase, theta)
    return state


def apply_pauli(state: StateVector, p: Pauli) -> StateVector:
    """In-place multiplication by the Pauli operator ``p``."""
    n = state.n_qubits
    t = state.tensor()
    x_axes, z_axes = _pauli_axes(n, p)
    t[...] = pauli_apply_tensor(t, x_axes, z_axes, p.phase)
    return state


def _one_qubit(t: np.ndarray, ax: int, m: np.ndarray) -> None:
    i0 = _index(t.ndim, {ax: 0})
    i1 = _index(t.ndim, {ax: 1})
    a = t[i0].copy()
    b = t[i1]
    t[i0] = m[0, 0] * a + m[0, 1] * b
    t[i1] = m[1, 0] * a + m[1, 1] * b


_HADAMARD = np.array([[1, 1], [1, -1]], dtype=np.complex128) * _SQRT_HALF


def apply_gate(state: StateVector, gate: Gate) -> StateVector:
    """Apply ``gate`` in place and return ``state``."""
    n = state.n_qubits
    t = state.tensor()
    if isinstance(gate, H):
        _check(n, gate.q)
        _one_qubit(t, _axis(n, gate.q), _HADAMARD)
    elif isinstance(gate, (S, Sdg)):
        _check(n, gate.q)
        t[_index(t.ndim, {_axis(n, gate.q): 1})] *= 1j if isinstance(gate, S) else -1j
    elif isinstance(gate, X):
        _check(n, gate.q)
        ax = _axis(n, gate.q)
        t[...] = np.flip(t, axis=ax).copy()
    elif isinstance(gate, CX):
        _check(n, gate.control, gate.target)
        ac, at = _axis(n, gate.control), _axis(n, gate.target)
        i0 = _index(t.ndim, {ac: 1, at: 0})
        i1 = _index(t.ndim, {ac: 1, at: 1})
        tmp = t[i0].copy()
        t[i0] = t[i1]
        t[i1] = tmp
    elif isinstance(gate, PauliRot):
        _check(n, *gate.qubits)
        rotate_pauli(state, Pauli.from_factors(gate.paulis), gate.angle)
    elif isinstance(gate, CtrlPauliRot):
        _check(n, gate.ctrl, *gate.qubits)
        p = Pauli.from_factors(gate.paulis)
        if gate.angle != 0.0:
            ac = _axis(n, gate.ctrl)
            idx = _index(t.ndim, {ac: gate.val})
            view = t[idx]
            x_axes, z_axes = _pauli_axes(n, p, skip_axis=ac)
            t[idx] = _rotate(view, x_axes, z_axes, p.phase, gate.angle)
    elif isinstance(gate, BasisChange):
        for q, axis in gate.axes:
            _check(n, q)
            if axis == "Y":
                apply_gate(state, Sdg(q))
            if axis in ("X", "Y"):
                apply_gate(state, H(q))
    elif isinstance(gate, MeasureAll):
        pass
    else:
        raise TypeError(f"unknown gate {gate!r}")
    return state


def _check(n: int, *qubits: int) -> None:
    for q in qubits:
        if not 0 <= q < n:
            raise IndexError(f"qubit {q} out of range for {n} qubits")


def run_circuit(circuit: Circuit, state: StateVector | None = None) -> StateVector:
    """Noiseless evolution (from ``|0...0>`` unless a state is given)."""
    state = StateVector.zero(circuit.n_qubits) if state is None else state
    for gate in circuit.ops:
        apply_gate(state, gate)
    return state


def pauli_expectation(state: StateVector, p: Pauli) -> np.ndarray | float:
    """``<psi| p |psi>`` (complex in general; per batch column)."""
    n = state.n_qubits
    t = state.tensor()
    x_axes, z_axes = _pauli_axes(n, p)
    pt = pauli_apply_tensor(t, x_axes, z_axes, p.phase).reshape(state.amplitudes.shape)
    return np.sum(np.conj(state.amplitudes) * pt, axis=0)


def expectation_pauli(state: StateVector, obs: TermSum) -> np.ndarray | float:
    """Exact ``<psi|O|psi>`` for a real-weighted Pauli sum."""
    total = 0.0
    for term in obs:
        total = total + term.coefficient * np.real(pauli_expectation(state, term.pauli()))
    if np.ndim(total) == 0:
        return float(total)
    return total


def z_expectations(state: StateVector) -> np.ndarray:
    """``<Z_q>`` for every qubit (single column states)."""
    probs = state.probabilities()
    idx = np.arange(probs.shape[0])
    out = np.empty(state.n_qubits)
    for q in range(state.n_qubits):
        bit = (idx >> q) & 1
        out[q] = np.sum(probs * (1.0 - 2.0 * bit))
    return out


def sample_shots(state: StateVector, basis: BasisChange | None, n_shots: int, seed) -> np.ndarray:
    """Draw ``n_shots`` outcomes after rotating into ``basis``.

    Returns integer bitmasks (bit ``q`` = outcome of qubit ``q``).  ``seed``
    may be an int, a SeedSequence or a Generator.
    """
    if n_shots < 1:
        raise ValueError("n_shots must be at least 1")
    work = state
    if basis is not None and basis.axes:
        work = apply_gate(state.copy(), basis)
    probs = work.probabilities()
    if probs.ndim != 1:
        raise ValueError("sampling requires a single (non-batched) state")
    cdf = np.cumsum(probs)
    cdf /= cdf[-1]
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    u = rng.random(n_shots)
    out = np.searchsorted(cdf, u, side="right")
    return np.minimum(out, probs.shape[0] - 1).astype(np.int64)


def outcome_bits(outcomes: np.ndarray, n_qubits: int) -> np.ndarray:
    """``(shots, n_qubits)`` array of 0/1 bits from integer outcomes."""
    outcomes = np.asarray(outcomes, dtype=np.int64)
    return ((outcomes[:, None] >> np.arange(n_qubits)[None, :]) & 1).astype(np.int8)
