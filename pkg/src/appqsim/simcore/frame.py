"""Stabilizer-frame reduced simulation.

Many benchmark circuits start with a Clifford preparation of a stabilizer
state ``|S0>`` followed by Pauli rotations that all commute with a large
subgroup ``K`` of the stabilizer group of ``|S0>``.  Working in a Clifford
frame ``W`` whose first ``k`` generators span ``K``, those ``k`` frame
qubits never leave a computational basis state: they are classical
*syndrome* bits, and only the remaining ``N - k`` frame qubits need dense
amplitudes.

* Frame: ``W Z_i W^dag = g_i`` (stabilizers of ``|S0>``, so ``|S0> = W|0...0>``)
  and ``W X_i W^dag = d_i`` (destabilizers).
* A physical Pauli ``P`` maps to ``W^dag P W = omega X^a Z^b`` with
  ``a_i = [P anticommutes g_i]`` and ``b_i = [P anticommutes d_i]``.
* Pauli errors may flip syndrome bits; they are tracked exactly, so noisy
  trajectories are reproduced without approximation.

The dense simulator remains the reference; this module is checked against
it on small instances using identical error plans.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from .circuit import CX, Gate, H, PauliRot, S, Sdg, X
from .noise import ErrorPlan, NoiseModel, error_pauli, sample_errors
from .paulis import Pauli, conjugate
from .statevector import StateVector, apply_pauli, pauli_expectation, rotate_pauli

_CLIFFORD_KINDS = {H: "H", S: "S", Sdg: "Sdg", X: "X", CX: "CX"}


def _gate_kind(gate: Gate) -> tuple[str, tuple[int, ...]]:
    kind = _CLIFFORD_KINDS.get(type(gate))
    if kind is None:
        raise TypeError(f"preparation must be Clifford, got {gate!r}")
    if isinstance(gate, CX):
        return kind, (gate.control, gate.target)
    return kind, (gate.q,)


def conjugate_through(p: Pauli, gates: Sequence[Gate]) -> Pauli:
    """``U p U^dag`` for ``U`` = the gate sequence (first gate applied first)."""
    for gate in gates:
        kind, qubits = _gate_kind(gate)
        p = conjugate(p, kind, qubits)
    return p


def _popcount(v: int) -> int:
    return bin(v).count("1")


def _symplectic(p: Pauli, n: int) -> int:
    return p.x | (p.z << n)


def _anticommutes(p: Pauli, q: Pauli) -> int:
    return (_popcount(p.x & q.z) + _popcount(p.z & q.x)) & 1


def _hermitian(x: int, z: int) -> Pauli:
    return Pauli(x, z, _popcount(x & z))


class _Span:
    """Incremental GF(2) span of bit vectors with combination tracking."""

    def __init__(self) -> None:
        self.pivots: dict[int, tuple[int, int]] = {}

    def reduce(self, vec: int, combo: int = 0) -> tuple[int, int]:
        while vec:
            top = vec.bit_length() - 1
            if top not in self.pivots:
                break
            pv, pc = self.pivots[top]
            vec ^= pv
            combo ^= pc
        return vec, combo

    def add(self, vec: int, combo: int) -> bool:
        vec, combo = self.reduce(vec, combo)
        if vec == 0:
            return False
        self.pivots[vec.bit_length() - 1] = (vec, combo)
        return True


def _product(paulis: Sequence[Pauli], combo: int) -> Pauli:
    out = Pauli()
    for i, p in enumerate(paulis):
        if (combo >> i) & 1:
            out = out * p
    return out


@dataclass
class FrameState:
    syndrome: int
    reduced: StateVector

    def copy(self) -> "FrameState":
        return FrameState(self.syndrome, self.reduced.copy())


class FrameSimulator:
    """Reduced simulator for ``prep`` (Clifford) followed by rotations about ``paulis``."""

    def __init__(self, n_qubits: int, prep: Sequence[Gate], paulis: Iterable[Pauli]) -> None:
        self.n = n_qubits
        self.prep = list(prep)
        paulis = list(paulis)
        n = n_qubits
        stab = [conjugate_through(Pauli(0, 1 << q), self.prep) for q in range(n)]

        # K: products of stabilizers commuting with every rotation Pauli.
        span = _Span()
        kernel: list[int] = []
        for i, g in enumerate(stab):
            col = 0
            for r, p in enumerate(paulis):
                col |= _anticommutes(g, p) << r
            if not span.add(col, 1 << i):
                kernel.append(span.reduce(col, 1 << i)[1])
        gens = [_product(stab, c) for c in kernel]
        self.k = len(gens)

        # complete to a full stabilizer basis with the original generators
        sspan = _Span()
        for g in gens:
            sspan.add(_symplectic(g, n), 0)
        for g in stab:
            if len(gens) == n:
                break
            if sspan.add(_symplectic(g, n), 0):
                gens.append(g)
        assert len(gens) == n
        for g in gens:
            assert g.hermitian_sign() != 0
        self.gens = gens
        self.destabs = self._destabilizers(gens)
        self._img_x = [self._image_slow(Pauli(1 << q, 0)) for q in range(n)]
        self._img_z = [self._image_slow(Pauli(0, 1 << q)) for q in range(n)]
        self._cache: dict[tuple[int, int, int], Pauli] = {}
        self.syndrome_mask = (1 << self.k) - 1
        for p in paulis:
            if self.image(p).x & self.syndrome_mask:
                raise AssertionError("rotation Pauli anticommutes with a syndrome generator")

    @property
    def reduced_qubits(self) -> int:
        return self.n - self.k

    def _destabilizers(self, gens: list[Pauli]) -> list[Pauli]:
        n = self.n
        # rows: swapped symplectic vectors so that <v, g> = popcount(v & row)
        rows = []
        for j, g in enumerate(gens):
            rows.append([g.z | (g.x << n), 1 << j])
        pivots = []
        r = 0
        for col in range(2 * n):
            sel = next((i for i in range(r, n) if (rows[i][0] >> col) & 1), None)
            if sel is None:
                continue
            rows[r], rows[sel] = rows[sel], rows[r]
            for i in range(n):
                if i != r and (rows[i][0] >> col) & 1:
                    rows[i][0] ^= rows[r][0]
                    rows[i][1] ^= rows[r][1]
            pivots.append(col)
            r += 1
            if r == n:
                break
        destabs: list[Pauli] = []
        mask = (1 << n) - 1
        for i in range(n):
            v = 0
            for row_idx, col in enumerate(pivots):
                if (rows[row_idx][1] >> i) & 1:
                    v |= 1 << col
            d = _hermitian(v & mask, v >> n)
            for j, dj in enumerate(destabs):
                if _anticommutes(d, dj):
                    d = d * gens[j]
            d = _hermitian(d.x, d.z)
            destabs.append(d)
        for i, d in enumerate(destabs):
            for j, g in enumerate(gens):
                assert _anticommutes(d, g) == (i == j)
        return destabs

    def _image_slow(self, p: Pauli) -> Pauli:
        a = b = 0
        for i, (g, d) in enumerate(zip(self.gens, self.destabs)):
            a |= _anticommutes(p, g) << i
            b |= _anticommutes(p, d) << i
        q = _product(self.destabs, a) * _product(self.gens, b)
        assert q.x == p.x and q.z == p.z
        return Pauli(a, b, p.phase - q.phase)

    def image(self, p: Pauli) -> Pauli:
        """Frame image ``W^dag p W``."""
        key = (p.x, p.z, p.phase)
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        out = Pauli(0, 0, p.phase)
        for q in range(self.n):
            if (p.x >> q) & 1:
                out = out * self._img_x[q]
        for q in range(self.n):
            if (p.z >> q) & 1:
                out = out * self._img_z[q]
        self._cache[key] = out
        return out

    # --- state evolution -------------------------------------------------

    def initial_state(self) -> FrameState:
        return FrameState(0, StateVector.zero(self.reduced_qubits))

    def _reduced(self, img: Pauli, syndrome: int) -> Pauli:
        sign = 2 * (_popcount(img.z & syndrome & self.syndrome_mask) & 1)
        return Pauli(img.x >> self.k, img.z >> self.k, img.phase + sign)

    def apply_rotation(self, state: FrameState, p: Pauli, theta: float) -> None:
        img = self.image(p)
        rotate_pauli(state.reduced, self._reduced(img, state.syndrome), theta)

    def apply_error(self, state: FrameState, p: Pauli) -> None:
        img = self.image(p)
        apply_pauli(state.reduced, self._reduced(img, state.syndrome))
        state.syndrome ^= img.x & self.syndrome_mask

    def expectation(self, state: FrameState, p: Pauli) -> complex:
        """Exact ``<psi| p |psi>`` for any Pauli ``p``."""
        img = self.image(p)
        if img.x & self.syndrome_mask:
            return 0.0
        return complex(pauli_expectation(state.reduced, self._reduced(img, state.syndrome)))

    def z_parity_masks(self, qubits: Sequence[int]) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Per measured qubit: (syndrome mask, reduced mask, sign) of its Z image."""
        syn, red, sign = [], [], []
        for q in qubits:
            img = self.image(Pauli(0, 1 << q))
            if img.x:
                raise ValueError(f"Z_{q} is not diagonal in this frame")
            syn.append(img.z & self.syndrome_mask)
            red.append(img.z >> self.k)
            sign.append(1 if img.phase == 0 else -1)
        return np.array(syn, dtype=np.int64), np.array(red, dtype=np.int64), np.array(sign)

    def z_expectations(self, state: FrameState, qubits: Sequence[int]) -> np.ndarray:
        syn, red, sign = self.z_parity_masks(qubits)
        probs = state.reduced.probabilities()
        idx = np.arange(probs.shape[0], dtype=np.int64)
        out = np.empty(len(qubits))
        for i in range(len(qubits)):
            par = np.bitwise_count(idx & red[i]) & 1
            s = sign[i] * (1 - 2 * (_popcount(int(syn[i]) & state.syndrome) & 1))
            out[i] = s * np.sum(probs * (1.0 - 2.0 * par))
        return out

    def sample_z(self, state: FrameState, qubits: Sequence[int], n_shots: int, rng: np.random.Generator) -> np.ndarray:
        """``(shots, len(qubits))`` array of Z outcomes as 0/1 bits."""
        syn, red, sign = self.z_parity_masks(qubits)
        probs = state.reduced.probabilities()
        cdf = np.cumsum(probs)
        cdf /= cdf[-1]
        r = np.minimum(np.searchsorted(cdf, rng.random(n_shots), side="right"), len(probs) - 1)
        r = r.astype(np.int64)
        syn_par = np.array([_popcount(int(s) & state.syndrome) & 1 for s in syn])
        par = np.bitwise_count(r[:, None] & red[None, :]) & 1
        flip = (par + syn_par[None, :] + (sign[None, :] < 0)) & 1
        return flip.astype(np.int8)

    def run(
        self,
        ops: Sequence[Gate],
        noise: NoiseModel,
        rng: np.random.Generator | None,
        checkpoints: Iterable[int] = (),
        callback: Callable[[int, FrameState], None] | None = None,
        plan: ErrorPlan | None = None,
        state: FrameState | None = None,
        start: int = 0,
    ) -> FrameState:
        """Evolve through ``ops`` (which must start with the preparation).

        Errors are drawn exactly as the dense :func:`noise.evolve` would
        draw them for the same gate list.  ``callback(g, state)`` runs after
        op ``g`` for every ``g`` in ``checkpoints``.  Passing ``state`` and
        ``start`` resumes from a stored state taken right before op
        ``start`` (which must lie after the preparation); ``state`` is
        modified in place.
        """
        n_prep = len(self.prep)
        if list(ops[:n_prep]) != self.prep:
            raise ValueError("gate list does not start with the frame preparation")
        if plan is None:
            plan = sample_errors(ops, noise, rng) if rng is not None else ErrorPlan({})
        checkpoints = set(checkpoints)
        if state is None:
            if start != 0:
                raise ValueError("resuming requires a state")
            state = self.initial_state()
            for g in range(n_prep):
                for pair, k in plan.errors.get(g, ()):
                    err = conjugate_through(error_pauli(pair, k), self.prep[g + 1 :])
                    self.apply_error(state, err)
            if n_prep - 1 in checkpoints and callback is not None:
                callback(n_prep - 1, state)
            start = n_prep
        elif start < n_prep:
            raise ValueError("can only resume after the preparation")
        for g in range(start, len(ops)):
            gate = ops[g]
            if not isinstance(gate, PauliRot):
                raise TypeError(f"only Pauli rotations may follow the preparation, got {gate!r}")
            if gate.angle != 0.0:
                self.apply_rotation(state, Pauli.from_factors(gate.paulis), gate.angle)
            for pair, k in plan.errors.get(g, ()):
                self.apply_error(state, error_pauli(pair, k))
            if g in checkpoints and callback is not None:
                callback(g, state)
        return state
