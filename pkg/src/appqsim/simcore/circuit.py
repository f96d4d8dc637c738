"""Gate records, circuits, their JSON form, and two-qubit gate accounting."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Iterable, Sequence, Union

from .paulis import AXES, PauliTerm

Factors = tuple[tuple[int, str], ...]


def _factors(paulis: Iterable[Sequence[Any]]) -> Factors:
    return PauliTerm.from_factors((int(q), str(a)) for q, a in paulis).factors


@dataclass(frozen=True)
class H:
    q: int


@dataclass(frozen=True)
class S:
    q: int


@dataclass(frozen=True)
class Sdg:
    q: int


@dataclass(frozen=True)
class X:
    q: int


@dataclass(frozen=True)
class CX:
    control: int
    target: int

    def __post_init__(self) -> None:
        if self.control == self.target:
            raise ValueError("CX control and target must differ")


@dataclass(frozen=True)
class PauliRot:
    """``exp(i * angle * P)`` for the Pauli string ``P``."""

    paulis: Factors
    angle: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "paulis", _factors(self.paulis))
        if not math.isfinite(self.angle):
            raise ValueError("rotation angle must be finite")

    @property
    def qubits(self) -> tuple[int, ...]:
        return tuple(q for q, _ in self.paulis)


@dataclass(frozen=True)
class CtrlPauliRot:
    """``exp(i * angle * P)`` applied only where qubit ``ctrl`` equals ``val``."""

    ctrl: int
    val: int
    paulis: Factors
    angle: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "paulis", _factors(self.paulis))
        if self.val not in (0, 1):
            raise ValueError("control value must be 0 or 1")
        if self.ctrl in [q for q, _ in self.paulis]:
            raise ValueError("control qubit overlaps the rotated Pauli")
        if not math.isfinite(self.angle):
            raise ValueError("rotation angle must be finite")

    @property
    def qubits(self) -> tuple[int, ...]:
        return tuple(q for q, _ in self.paulis)


@dataclass(frozen=True)
class BasisChange:
    """Rotate each listed qubit so that a Z measurement reads out ``axis``."""

    axes: Factors

    def __post_init__(self) -> None:
        object.__setattr__(self, "axes", _factors(self.axes))

    @classmethod
    def uniform(cls, n_qubits: int, axis: str) -> "BasisChange":
        return cls(tuple((q, axis) for q in range(n_qubits)) if axis != "Z" else ())


@dataclass(frozen=True)
class MeasureAll:
    pass


Gate = Union[H, S, Sdg, X, CX, PauliRot, CtrlPauliRot, BasisChange, MeasureAll]
CLIFFORD_1Q = {H: "H", S: "S", Sdg: "Sdg", X: "X"}


def gate_qubits(gate: Gate) -> tuple[int, ...]:
    if isinstance(gate, (H, S, Sdg, X)):
        return (gate.q,)
    if isinstance(gate, CX):
        return (gate.control, gate.target)
    if isinstance(gate, PauliRot):
        return gate.qubits
    if isinstance(gate, CtrlPauliRot):
        return (gate.ctrl,) + gate.qubits
    if isinstance(gate, BasisChange):
        return tuple(q for q, _ in gate.axes)
    return ()


@dataclass
class Circuit:
    n_qubits: int
    ops: list[Gate] = field(default_factory=list)

    def __post_init__(self) -> None:
        if self.n_qubits <= 0:
            raise ValueError("circuit needs at least one qubit")
        self.ops = list(self.ops)
        self.validate()

    def validate(self) -> None:
        for k, gate in enumerate(self.ops):
            for q in gate_qubits(gate):
                if not 0 <= q < self.n_qubits:
                    raise IndexError(f"op {k}: qubit {q} out of range for {self.n_qubits} qubits")
            if isinstance(gate, MeasureAll) and k != len(self.ops) - 1:
                raise ValueError("MeasureAll must be the final op")

    def append(self, gate: Gate) -> "Circuit":
        self.ops.append(gate)
        return self

    def extend(self, gates: Iterable[Gate]) -> "Circuit":
        self.ops.extend(gates)
        self.validate()
        return self

    def __add__(self, other: "Circuit") -> "Circuit":
        n = max(self.n_qubits, other.n_qubits)
        return Circuit(n, self.ops + other.ops)

    def without_measurement(self) -> "Circuit":
        return Circuit(self.n_qubits, [g for g in self.ops if not isinstance(g, (MeasureAll, BasisChange))])

    def two_qubit_cost(self) -> int:
        return sum(two_qubit_gate_cost(g) for g in self.ops)

    def to_json(self) -> dict[str, Any]:
        return {"qubits": self.n_qubits, "ops": [gate_to_json(g) for g in self.ops]}

    @classmethod
    def from_json(cls, data: dict[str, Any]) -> "Circuit":
        return cls(int(data["qubits"]), [gate_from_json(g) for g in data["ops"]])


def ladder_pairs(qubits: Sequence[int]) -> list[tuple[int, int]]:
    """Virtual CX-ladder pairs for a multi-qubit rotation: up, central, down."""
    w = len(qubits)
    if w < 2:
        return []
    up = [(qubits[i], qubits[i + 1]) for i in range(w - 2)]
    return up + [(qubits[w - 2], qubits[w - 1])] + up[::-1]


def noise_pairs(gate: Gate) -> list[tuple[int, int]]:
    """Qubit pairs that receive a depolarizing opportunity after ``gate``."""
    if isinstance(gate, CX):
        return [(gate.control, gate.target)]
    if isinstance(gate, PauliRot):
        return ladder_pairs(gate.qubits)
    if isinstance(gate, CtrlPauliRot):
        # the control is one extra leg at the bottom of the ladder
        return ladder_pairs((gate.ctrl,) + gate.qubits)
    return []


def two_qubit_gate_cost(gate: Gate) -> int:
    """Logical two-qubit gate count of ``gate`` (2w-3 for weight-w rotations)."""
    return len(noise_pairs(gate))


def gate_to_json(gate: Gate) -> dict[str, Any]:
    if isinstance(gate, (H, S, Sdg, X)):
        return {"gate": CLIFFORD_1Q[type(gate)], "q": gate.q}
    if isinstance(gate, CX):
        return {"gate": "CX", "q": [gate.control, gate.target]}
    if isinstance(gate, PauliRot):
        return {"gate": "PR", "paulis": [[q, a] for q, a in gate.paulis], "angle": gate.angle}
    if isinstance(gate, CtrlPauliRot):
        return {
            "gate": "CPR",
            "ctrl": gate.ctrl,
            "val": gate.val,
            "paulis": [[q, a] for q, a in gate.paulis],
            "angle": gate.angle,
        }
    if isinstance(gate, BasisChange):
        return {"gate": "BASIS", "axes": [[q, a] for q, a in gate.axes]}
    if isinstance(gate, MeasureAll):
        return {"gate": "M"}
    raise TypeError(f"unknown gate {gate!r}")


def gate_from_json(data: dict[str, Any]) -> Gate:
    kind = data.get("gate")
    if kind in ("H", "S", "Sdg", "X"):
        return {"H": H, "S": S, "Sdg": Sdg, "X": X}[kind](int(data["q"]))
    if kind == "CX":
        c, t = data["q"]
        return CX(int(c), int(t))
    if kind == "PR":
        return PauliRot(data["paulis"], float(data["angle"]))
    if kind == "CPR":
        return CtrlPauliRot(int(data["ctrl"]), int(data["val"]), data["paulis"], float(data["angle"]))
    if kind == "BASIS":
        axes = data["axes"]
        if any(str(a).upper() not in AXES for _, a in axes):
            raise ValueError(f"bad basis axes {axes}")
        return BasisChange(axes)
    if kind == "M":
        return MeasureAll()
    raise ValueError(f"unknown gate kind {kind!r}")
