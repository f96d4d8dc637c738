"""Pauli strings: user-facing terms and a bitmask algebra used internally.

Two representations live here.  ``PauliTerm``/``TermSum`` are the readable
forms used to write Hamiltonians and observables.  ``Pauli`` is the
bitmask form ``i**phase * X^x Z^z`` (all X factors to the left of all Z
factors, bit ``q`` of ``x``/``z`` refers to qubit ``q``) that the
simulators and the stabilizer machinery operate on.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

AXES = ("X", "Y", "Z")


@dataclass(frozen=True)
class PauliTerm:
    """``coefficient * P`` with ``P`` a tensor product of single-qubit Paulis."""

    coefficient: float
    factors: tuple[tuple[int, str], ...] = ()

    def __post_init__(self) -> None:
        factors = tuple((int(q), str(a).upper()) for q, a in self.factors)
        qubits = [q for q, _ in factors]
        if any(q < 0 for q in qubits):
            raise ValueError(f"negative qubit index in {factors}")
        if any(b <= a for a, b in zip(qubits, qubits[1:])):
            raise ValueError(f"qubit indices must be strictly increasing: {qubits}")
        if any(a not in AXES for _, a in factors):
            raise ValueError(f"unknown Pauli axis in {factors}")
        if not math.isfinite(self.coefficient):
            raise ValueError("coefficient must be finite")
        object.__setattr__(self, "factors", factors)
        object.__setattr__(self, "coefficient", float(self.coefficient))

    @classmethod
    def from_label(cls, label: str, coefficient: float = 1.0) -> "PauliTerm":
        """Parse a dense label such as ``"XZIY"``; character ``k`` acts on qubit ``k``."""
        factors = tuple((q, c) for q, c in enumerate(label.upper()) if c != "I")
        return cls(coefficient, factors)

    @classmethod
    def from_factors(cls, factors: Iterable[tuple[int, str]], coefficient: float = 1.0) -> "PauliTerm":
        return cls(coefficient, tuple(sorted(factors)))

    @property
    def weight(self) -> int:
        return len(self.factors)

    @property
    def qubits(self) -> tuple[int, ...]:
        return tuple(q for q, _ in self.factors)

    def label(self, n_qubits: int) -> str:
        chars = ["I"] * n_qubits
        for q, a in self.factors:
            chars[q] = a
        return "".join(chars)

    def pauli(self) -> "Pauli":
        return Pauli.from_factors(self.factors)

    def scaled(self, factor: float) -> "PauliTerm":
        return PauliTerm(self.coefficient * factor, self.factors)


@dataclass
class TermSum:
    """A real-weighted sum of Pauli strings (Hermitian operator)."""

    terms: list[PauliTerm] = field(default_factory=list)

    def __iter__(self) -> Iterator[PauliTerm]:
        return iter(self.terms)

    def __len__(self) -> int:
        return len(self.terms)

    def __add__(self, other: "TermSum") -> "TermSum":
        return TermSum(list(self.terms) + list(other.terms))

    def add(self, coefficient: float, factors: Sequence[tuple[int, str]]) -> None:
        self.terms.append(PauliTerm.from_factors(factors, coefficient))

    def max_qubit(self) -> int:
        return max((q for t in self.terms for q in t.qubits), default=-1)

    def to_matrix(self, n_qubits: int):
        """Dense matrix, for tests and small oracles only."""
        import numpy as np

        dim = 2**n_qubits
        out = np.zeros((dim, dim), dtype=complex)
        for term in self.terms:
            out += term.coefficient * term.pauli().to_matrix(n_qubits)
        return out


def _popcount(v: int) -> int:
    return bin(v).count("1")


@dataclass(frozen=True)
class Pauli:
    """``i**phase * X^x Z^z`` on qubits encoded as integer bitmasks."""

    x: int = 0
    z: int = 0
    phase: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "phase", self.phase % 4)

    @classmethod
    def from_factors(cls, factors: Iterable[tuple[int, str]]) -> "Pauli":
        x = z = 0
        phase = 0
        for q, a in factors:
            bit = 1 << q
            if a == "X":
                x |= bit
            elif a == "Z":
                z |= bit
            elif a == "Y":
                # Y = i X Z
                x |= bit
                z |= bit
                phase += 1
            else:
                raise ValueError(f"unknown axis {a!r}")
        return cls(x, z, phase)

    @classmethod
    def from_label(cls, label: str) -> "Pauli":
        return cls.from_factors((q, c) for q, c in enumerate(label.upper()) if c != "I")

    @classmethod
    def single(cls, q: int, axis: str) -> "Pauli":
        return cls.from_factors([(q, axis)])

    def __mul__(self, other: "Pauli") -> "Pauli":
        sign = 2 * (_popcount(self.z & other.x) & 1)
        return Pauli(self.x ^ other.x, self.z ^ other.z, self.phase + other.phase + sign)

    def commutes(self, other: "Pauli") -> bool:
        return (_popcount(self.x & other.z) + _popcount(self.z & other.x)) % 2 == 0

    @property
    def support(self) -> int:
        return self.x | self.z

    @property
    def weight(self) -> int:
        return _popcount(self.x | self.z)

    def hermitian_sign(self) -> int:
        """Return s in {+1, -1} with self = s * (Hermitian Pauli string); 0 if anti-Hermitian."""
        e = (self.phase - _popcount(self.x & self.z)) % 4
        return {0: 1, 2: -1}.get(e, 0)

    def factors(self, n_qubits: int | None = None) -> tuple[tuple[int, str], ...]:
        out = []
        support = self.x | self.z
        q = 0
        while support >> q:
            if (support >> q) & 1:
                xb, zb = (self.x >> q) & 1, (self.z >> q) & 1
                out.append((q, "Y" if xb and zb else ("X" if xb else "Z")))
            q += 1
        return tuple(out)

    def to_matrix(self, n_qubits: int):
        import numpy as np

        dim = 2**n_qubits
        idx = np.arange(dim)
        parity = np.bitwise_count(idx & self.z) & 1
        vals = (1j**self.phase) * (1.0 - 2.0 * parity)
        mat = np.zeros((dim, dim), dtype=complex)
        # X^x Z^z |b> = (-1)^{z.b} |b ^ x>
        mat[idx ^ self.x, idx] = vals
        return mat

    def __str__(self) -> str:
        sign = {0: "+", 1: "+i", 2: "-", 3: "-i"}[self.phase]
        return f"{sign}X[{self.x:b}]Z[{self.z:b}]"


# Images of X_q and Z_q under conjugation U P U^dagger for the Clifford gates
# supported by the circuit model.  Each entry maps a local generator to a
# product of (qubit-role, axis) factors plus a phase.
def _conj_generator(kind: str, qubits: tuple[int, ...], gen: str, which: int) -> Pauli:
    if kind == "H":
        q = qubits[0]
        return Pauli.single(q, "Z" if gen == "X" else "X")
    if kind in ("S", "Sdg"):
        q = qubits[0]
        if gen == "Z":
            return Pauli.single(q, "Z")
        y = Pauli.single(q, "Y")
        return y if kind == "S" else Pauli(y.x, y.z, y.phase + 2)
    if kind == "X":
        q = qubits[0]
        p = Pauli.single(q, gen)
        return p if gen == "X" else Pauli(p.x, p.z, 2)
    if kind == "CX":
        c, t = qubits
        q = qubits[which]
        if gen == "X" and q == c:
            return Pauli.from_factors([(min(c, t), "X"), (max(c, t), "X")])
        if gen == "Z" and q == t:
            return Pauli.from_factors([(min(c, t), "Z"), (max(c, t), "Z")])
        return Pauli.single(q, gen)
    raise ValueError(f"not a Clifford gate kind: {kind}")


def conjugate(p: Pauli, kind: str, qubits: tuple[int, ...]) -> Pauli:
    """Return ``U p U^dagger`` for the Clifford gate ``kind`` acting on ``qubits``."""
    touched = 0
    for q in qubits:
        touched |= 1 << q
    rest_x = Pauli(p.x & ~touched, 0, p.phase)
    rest_z = Pauli(0, p.z & ~touched, 0)
    middle = Pauli()
    for which, q in enumerate(qubits):
        if (p.x >> q) & 1:
            middle = middle * _conj_generator(kind, qubits, "X", which)
    for which, q in enumerate(qubits):
        if (p.z >> q) & 1:
            middle = middle * _conj_generator(kind, qubits, "Z", which)
    return rest_x * middle * rest_z
