"""Stochastic two-qubit depolarizing noise as Pauli-insertion trajectories.

Each logical two-qubit interaction (see :func:`circuit.noise_pairs`) is an
opportunity: with probability ``p`` a uniformly random non-identity
two-qubit Pauli is applied to the pair right after the gate.  Averaging
trajectories reproduces the depolarizing channel for expectation values.

RNG consumption is fixed so that any simulator walking the same gate list
draws the same errors: first one uniform per opportunity (gate order,
ladder order within a gate), then one integer in ``1..15`` per fired
opportunity.  Index ``k`` encodes ``(P_first, P_second) = divmod(k, 4)``
with ``0, 1, 2, 3 = I, X, Y, Z``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from .circuit import Circuit, Gate, noise_pairs
from .paulis import Pauli
from .statevector import StateVector, apply_gate, apply_pauli

PAULI_CHARS = "IXYZ"


@dataclass(frozen=True)
class NoiseModel:
    """Two-qubit depolarizing probability ``p`` per logical two-qubit gate."""

    p: float = 0.0
    convention: str = "ladder"
    multiplier: float = 1.0

    def __post_init__(self) -> None:
        if not 0.0 <= self.p <= 1.0:
            raise ValueError("noise probability must lie in [0, 1]")
        if self.convention != "ladder":
            raise ValueError(f"unknown gate-cost convention {self.convention!r}")
        if self.multiplier < 1.0:
            raise ValueError("routing multiplier must be >= 1")

    @property
    def effective_p(self) -> float:
        """Per-opportunity probability after the routing-overhead multiplier.

        A multiplier ``m`` models ``m`` native gates per logical gate; the
        composed channel is depolarizing with ``1 - (1 - p)**m``.
        """
        return 1.0 - (1.0 - self.p) ** self.multiplier

    @property
    def noiseless(self) -> bool:
        return self.p == 0.0


NOISELESS = NoiseModel(0.0)


def trajectory_rng(master_seed: int, *index: int) -> np.random.Generator:
    """Per-task generator derived as ``SeedSequence(master_seed, spawn_key=index)``.

    This is a counter-based fan-out: any (seed, index) pair reproduces its
    stream independently of how many other tasks ran before it.
    """
    return np.random.default_rng(np.random.SeedSequence(int(master_seed), spawn_key=tuple(int(i) for i in index)))


def error_pauli(pair: tuple[int, int], k: int) -> Pauli:
    a, b = divmod(int(k), 4)
    factors = []
    if a:
        factors.append((pair[0], PAULI_CHARS[a]))
    if b:
        factors.append((pair[1], PAULI_CHARS[b]))
    return Pauli.from_factors(sorted(factors))


@dataclass
class ErrorPlan:
    """Errors for one pass over a gate list: ``errors[g]`` lists (pair, k) after op ``g``."""

    errors: dict[int, list[tuple[tuple[int, int], int]]]

    @property
    def count(self) -> int:
        return sum(len(v) for v in self.errors.values())


def sample_errors(ops: Sequence[Gate], noise: NoiseModel, rng: np.random.Generator) -> ErrorPlan:
    """Draw the error insertions for ``ops`` (consumes ``rng`` per module docs)."""
    owners: list[int] = []
    pairs: list[tuple[int, int]] = []
    for g, gate in enumerate(ops):
        for pair in noise_pairs(gate):
            owners.append(g)
            pairs.append(pair)
    errors: dict[int, list[tuple[tuple[int, int], int]]] = {}
    if not pairs or noise.noiseless:
        return ErrorPlan(errors)
    fired = np.flatnonzero(rng.random(len(pairs)) < noise.effective_p)
    ks = rng.integers(1, 16, size=len(fired))
    for i, k in zip(fired, ks):
        errors.setdefault(owners[i], []).append((pairs[i], int(k)))
    return ErrorPlan(errors)


def evolve(
    state: StateVector,
    ops: Sequence[Gate],
    noise: NoiseModel,
    rng: np.random.Generator | None,
    checkpoints: Iterable[int] = (),
    callback: Callable[[int, StateVector], None] | None = None,
    plan: ErrorPlan | None = None,
) -> StateVector:
    """Apply ``ops`` to ``state`` in place with sampled Pauli errors.

    ``callback(g, state)`` runs after op ``g`` (and its errors) for each
    ``g`` in ``checkpoints``; this lets one trajectory be read out at
    several depths.
    """
    if plan is None:
        plan = sample_errors(ops, noise, rng) if rng is not None else ErrorPlan({})
    checkpoints = set(checkpoints)
    for g, gate in enumerate(ops):
        apply_gate(state, gate)
        for pair, k in plan.errors.get(g, ()):
            apply_pauli(state, error_pauli(pair, k))
        if g in checkpoints and callback is not None:
            callback(g, state)
    return state


def run_trajectory(
    circuit: Circuit,
    noise: NoiseModel,
    seed: int | np.random.Generator,
    state: StateVector | None = None,
) -> StateVector:
    """One noise realization of ``circuit`` (measurement ops are stripped)."""
    ops = circuit.without_measurement().ops
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    state = StateVector.zero(circuit.n_qubits) if state is None else state
    return evolve(state, ops, noise, rng)
