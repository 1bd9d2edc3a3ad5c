"""OpenQASM 3 subset: parsing, validation and statevector simulation."""

from .parser import (
    GATES,
    BitRef,
    GateApplication,
    Measurement,
    Program,
    QasmError,
    QasmSemanticError,
    QasmSyntaxError,
    QubitRef,
    parse,
)
from .simulator import (
    MAX_QUBITS,
    SimulationCapacityError,
    Violation,
    apply_gate,
    gate_matrix,
    marginal_probabilities,
    sample_measurements,
    simulate,
    validate,
)

__all__ = [
    "GATES",
    "MAX_QUBITS",
    "BitRef",
    "GateApplication",
    "Measurement",
    "Program",
    "QasmError",
    "QasmSemanticError",
    "QasmSyntaxError",
    "QubitRef",
    "SimulationCapacityError",
    "Violation",
    "apply_gate",
    "gate_matrix",
    "marginal_probabilities",
    "parse",
    "sample_measurements",
    "simulate",
    "validate",
]
