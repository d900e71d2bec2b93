"""Simulator for authenticated GHZ-based quantum direct communication."""

from ._kernels import BACKEND
from .qcore import (
    MeasurementBasis,
    OutcomeLabel,
    PauliCode,
    Statevector,
    apply_gate,
    bell_state,
    fidelity,
    ghz_state,
    make_basis_state,
    measure,
    outcome_distribution,
)

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "MeasurementBasis",
    "OutcomeLabel",
    "PauliCode",
    "Statevector",
    "apply_gate",
    "bell_state",
    "fidelity",
    "ghz_state",
    "make_basis_state",
    "measure",
    "outcome_distribution",
]
