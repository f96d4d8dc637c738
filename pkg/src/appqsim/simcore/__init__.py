"""Circuit model, dense statevector simulation, noise trajectories and series I/O."""

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
    noise_pairs,
    two_qubit_gate_cost,
)
from .noise import NOISELESS, NoiseModel, evolve, run_trajectory, sample_errors, trajectory_rng
from .paulis import Pauli, PauliTerm, TermSum
from .series import MeasurementSeries, SchemaError, SeriesPoint
from .statevector import (
    StateVector,
    apply_gate,
    apply_pauli,
    expectation_pauli,
    outcome_bits,
    rotate_pauli,
    run_circuit,
    sample_shots,
    z_expectations,
)

__all__ = [
    "BasisChange",
    "CX",
    "Circuit",
    "CtrlPauliRot",
    "Gate",
    "H",
    "MeasureAll",
    "MeasurementSeries",
    "NOISELESS",
    "NoiseModel",
    "Pauli",
    "PauliRot",
    "PauliTerm",
    "S",
    "SchemaError",
    "Sdg",
    "SeriesPoint",
    "StateVector",
    "TermSum",
    "X",
    "apply_gate",
    "apply_pauli",
    "evolve",
    "expectation_pauli",
    "noise_pairs",
    "outcome_bits",
    "rotate_pauli",
    "run_circuit",
    "run_trajectory",
    "sample_errors",
    "sample_shots",
    "trajectory_rng",
    "two_qubit_gate_cost",
    "z_expectations",
]
