"""Adiabatic Max-Cut on random 3-regular graphs.

Graphs come from the Steger-Wormald pairing procedure (implemented here):
``3N`` points, three per vertex, are paired by repeatedly drawing two
unpaired points uniformly at random and accepting the pair when it joins
two distinct, not yet adjacent vertices.  Drawing points uniformly picks
vertices with probability proportional to their residual degree.  If no
acceptable pair remains the attempt restarts; disconnected results are
redrawn.

The annealing circuit prepares ``|+...+>`` and applies, for
``k = 1..T/dt`` with ``s = k dt / T``,

    W_s = prod_{<jk>} exp(i s dt Z_j Z_k) prod_j exp(-i (1 - s) dt X_j),

X layer first (it is the rightmost factor).  The top eigenstate of
``(1 - s) sum X - s sum ZZ`` is tracked, which ends in a maximum cut.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .simcore import (
    Circuit,
    H,
    MeasureAll,
    NoiseModel,
    PauliRot,
    StateVector,
    evolve,
    sample_shots,
    trajectory_rng,
)

DT = 0.25
MAX_ENUM = 28


@dataclass
class CutGraph:
    n: int
    edges: list[tuple[int, int]]
    optimum: int | None = None
    method: str = ""

    def __post_init__(self) -> None:
        self.edges = sorted((min(a, b), max(a, b)) for a, b in self.edges)

    def adjacency(self) -> np.ndarray:
        A = np.zeros((self.n, self.n))
        for a, b in self.edges:
            A[a, b] = A[b, a] = 1.0
        return A

    def degrees(self) -> np.ndarray:
        return self.adjacency().sum(axis=1).astype(int)

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.adjacency())

    def is_connected(self) -> bool:
        if self.n == 0:
            return True
        nbrs: list[list[int]] = [[] for _ in range(self.n)]
        for a, b in self.edges:
            nbrs[a].append(b)
            nbrs[b].append(a)
        seen = {0}
        stack = [0]
        while stack:
            v = stack.pop()
            for w in nbrs[v]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return len(seen) == self.n

    def cut_value(self, bits: Sequence[int] | int) -> int:
        if isinstance(bits, (int, np.integer)):
            bits = [(int(bits) >> v) & 1 for v in range(self.n)]
        return sum(1 for a, b in self.edges if bits[a] != bits[b])

    def to_json(self) -> dict:
        out = {"n": self.n, "edges": [list(e) for e in self.edges]}
        if self.optimum is not None:
            out["optimum"] = self.optimum
        return out

    @classmethod
    def from_json(cls, data: dict) -> "CutGraph":
        return cls(int(data["n"]), [tuple(e) for e in data["edges"]], data.get("optimum"), "user" if "optimum" in data else "")

    @classmethod
    def load(cls, path: str | Path) -> "CutGraph":
        return cls.from_json(json.loads(Path(path).read_text()))


def _pairing_attempt(n: int, d: int, rng: np.random.Generator) -> list[tuple[int, int]] | None:
    points = list(np.repeat(np.arange(n), d))
    adj: list[set[int]] = [set() for _ in range(n)]
    edges: list[tuple[int, int]] = []
    while points:
        m = len(points)
        accepted = False
        # random draws first; fall back to an exhaustive check before giving up
        for _ in range(4 * m):
            i, j = rng.integers(0, m, size=2)
            if i == j:
                continue
            u, v = int(points[i]), int(points[j])
            if u != v and v not in adj[u]:
                accepted = True
                break
        if not accepted:
            options = [(i, j) for i in range(m) for j in range(i + 1, m)
                       if points[i] != points[j] and points[j] not in adj[points[i]]]  # fmt: skip
            if not options:
                return None
            i, j = options[int(rng.integers(len(options)))]
            u, v = int(points[i]), int(points[j])
        for k in sorted((i, j), reverse=True):
            points.pop(k)
        adj[u].add(v)
        adj[v].add(u)
        edges.append((min(u, v), max(u, v)))
    return edges


def generate_graph(n: int, seed: int | np.random.Generator, degree: int = 3, max_attempts: int = 10_000) -> CutGraph:
    """Connected random ``degree``-regular graph (Steger-Wormald pairing with restarts)."""
    if n < 4 or n % 2:
        raise ValueError("need an even number of vertices >= 4")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(np.random.SeedSequence(int(seed)))
    for _ in range(max_attempts):
        edges = _pairing_attempt(n, degree, rng)
        if edges is None:
            continue
        g = CutGraph(n, edges)
        if g.is_connected():
            return g
    raise RuntimeError("failed to generate a connected regular graph")


# ---------------------------------------------------------------------------
# typicality


@dataclass
class TypicalityStats:
    n: int
    means: np.ndarray
    vbar: float
    samples: int
    seed: int


def graph_variance(g: CutGraph, means: np.ndarray) -> float:
    return float(np.sum((g.eigenvalues() - means) ** 2))


def build_stats(n: int, samples: int = 200, seed: int = 0) -> TypicalityStats:
    """Per-rank eigenvalue means ``m_j`` and mean variance ``v_bar`` over seeded samples."""
    if samples < 100:
        raise ValueError("need at least 100 samples")
    rng = np.random.default_rng(np.random.SeedSequence(int(seed)))
    eig = np.array([generate_graph(n, rng).eigenvalues() for _ in range(samples)])
    means = eig.mean(axis=0)
    vbar = float(np.mean(np.sum((eig - means) ** 2, axis=1)))
    return TypicalityStats(n, means, vbar, samples, int(seed))


def typicality(g: CutGraph, stats: TypicalityStats) -> bool:
    if g.n != stats.n:
        raise ValueError("stats built for a different size")
    return graph_variance(g, stats.means) <= 2.0 * stats.vbar


# ---------------------------------------------------------------------------
# exact optimum


def cut_values(g: CutGraph, assignments: np.ndarray) -> np.ndarray:
    x = np.asarray(assignments, dtype=np.int64)
    total = np.zeros(x.shape, dtype=np.int64)
    for a, b in g.edges:
        total += ((x >> a) ^ (x >> b)) & 1
    return total


def exact_maxcut(g: CutGraph, chunk: int = 1 << 20) -> int:
    """Maximum cut by enumeration (vertex ``n-1`` fixed to 0 by the complement symmetry)."""
    if g.optimum is not None:
        return int(g.optimum)
    if g.n > MAX_ENUM:
        raise ValueError(f"N={g.n} too large for enumeration; supply the optimum")
    best = 0
    total = 1 << max(g.n - 1, 0)
    for start in range(0, total, chunk):
        idx = np.arange(start, min(total, start + chunk), dtype=np.int64)
        best = max(best, int(cut_values(g, idx).max()))
    return best


# ---------------------------------------------------------------------------
# circuit and protocol


def step_count(T: float, dt: float = DT) -> int:
    ratio = T / dt
    k = int(round(ratio))
    if k < 1 or abs(ratio - k) > 1e-9:
        raise ValueError("step_count_not_integer")
    return k


def build_annealing_circuit(g: CutGraph, T: float, dt: float = DT, measure: bool = True) -> Circuit:
    steps = step_count(T, dt)
    circ = Circuit(g.n, [H(q) for q in range(g.n)])
    for k in range(1, steps + 1):
        s = k * dt / T
        for q in range(g.n):
            circ.append(PauliRot(((q, "X"),), -(1.0 - s) * dt))
        for a, b in g.edges:
            circ.append(PauliRot(((a, "Z"), (b, "Z")), s * dt))
    if measure:
        circ.append(MeasureAll())
    return circ


def linear_routing_multiplier(g: CutGraph) -> float:
    """Native gates per logical ZZ on a line with identity placement.

    A gate between qubits at distance ``d`` needs ``d - 1`` SWAPs in and out,
    three native gates each; averaged over the graph's edges.
    """
    dist = np.array([abs(a - b) for a, b in g.edges])
    return float(np.mean(1 + 6 * (dist - 1)))


def success_probability(g: CutGraph, T: float, dt: float = DT) -> float:
    """Noiseless probability that one shot returns an optimal cut."""
    state = evolve(StateVector.zero(g.n), build_annealing_circuit(g, T, dt, measure=False).ops, NoiseModel(0.0), None)
    probs = state.probabilities()
    opt = exact_maxcut(g)
    return float(probs[cut_values(g, np.arange(probs.size)) == opt].sum())


@dataclass
class ProtocolResult:
    mean: float
    stderr: float
    solved: bool
    groups: list[int] = field(default_factory=list)
    T: float = 0.0
    shots: int = 0


def solve_protocol(
    g: CutGraph,
    T: float,
    n_shots: int,
    groups: int = 10,
    noise: NoiseModel | None = None,
    seed: int = 0,
    trajectories: int = 20,
    dt: float = DT,
) -> ProtocolResult:
    """Groups of ``n_shots`` shots; a group succeeds if any shot is an optimal cut.

    Solved iff ``mean - 2 * sqrt(mean (1 - mean) / groups) > 1/2``.  Group
    ``i`` uses noise streams ``(seed, i, t, 0)`` and shot streams
    ``(seed, i, t, 1)`` over its trajectories ``t``.
    """
    if groups < 10:
        raise ValueError("need at least 10 groups")
    if n_shots < 1:
        raise ValueError("need at least one shot per group")
    noise = noise or NoiseModel(0.0)
    opt = exact_maxcut(g)
    ops = build_annealing_circuit(g, T, dt, measure=False).ops
    clean = None if not noise.noiseless else evolve(StateVector.zero(g.n), ops, noise, None)
    outcomes = []
    for i in range(groups):
        n_traj = 1 if noise.noiseless else min(trajectories, n_shots)
        per = [n_shots // n_traj + (t < n_shots % n_traj) for t in range(n_traj)]
        hit = False
        for t in range(n_traj):
            state = clean if clean is not None else evolve(StateVector.zero(g.n), ops, noise, trajectory_rng(seed, i, t, 0))
            shots = sample_shots(state, None, per[t], trajectory_rng(seed, i, t, 1))
            if np.any(cut_values(g, shots) == opt):
                hit = True
                break
        outcomes.append(int(hit))
    mean = float(np.mean(outcomes))
    stderr = math.sqrt(mean * (1.0 - mean) / groups)
    return ProtocolResult(mean, stderr, mean - 2.0 * stderr > 0.5, outcomes, T, n_shots)


@dataclass
class MaxCutScore:
    score: int
    time_to_solution: float | None
    diagnostics: dict = field(default_factory=dict)


def score_maxcut(results: dict[int, Sequence[dict]]) -> MaxCutScore:
    """Largest solved ``N`` over typical, connected graph attempts.

    ``results[N]`` lists attempts ``{"solved": bool, "typical": bool,
    "connected": bool, "shots": N_S, "shot_runtime": seconds (optional)}``.
    The time-to-solution is ``N_S`` times the mean shot runtime of the best
    solving attempt at the score size (fewest shots).
    """
    best_n, tts = 0, None
    for n in sorted(results):
        ok = [a for a in results[n] if a.get("solved") and a.get("typical", True) and a.get("connected", True)]
        if ok and n > best_n:
            best_n = n
            timed = [a["shots"] * a["shot_runtime"] for a in ok if a.get("shot_runtime") is not None]
            tts = min(timed) if timed else None
    diag = {} if best_n else {"reason": "no typical connected graph solved"}
    return MaxCutScore(best_n, tts, diag)
