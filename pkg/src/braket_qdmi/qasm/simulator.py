"""Dense statevector simulation and seeded measurement sampling.

Amplitude index convention: qubit 0 is the least significant bit of the
integer basis index. Multi-qubit gate matrices are written with their first
target as the most significant bit (``cx`` control first, ``ccx`` controls
first).
"""

from __future__ import annotations

from collections.abc import Iterable, Sequence
from dataclasses import dataclass

import numpy as np

from braket_qdmi.errors import InvalidArgumentError

from .parser import GateApplication, Program

MAX_QUBITS = 20

_SQ2 = 1 / np.sqrt(2)

_FIXED = {
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "z": np.diag([1, -1]).astype(complex),
    "h": np.array([[_SQ2, _SQ2], [_SQ2, -_SQ2]], dtype=complex),
    "s": np.diag([1, 1j]),
    "sdg": np.diag([1, -1j]),
    "t": np.diag([1, np.exp(1j * np.pi / 4)]),
    "tdg": np.diag([1, np.exp(-1j * np.pi / 4)]),
    "cx": np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex),
    "cz": np.diag([1, 1, 1, -1]).astype(complex),
    "swap": np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex),
}
_CCX = np.eye(8, dtype=complex)
_CCX[6:, 6:] = _FIXED["x"]
_FIXED["ccx"] = _CCX


class SimulationCapacityError(InvalidArgumentError):
    pass


@dataclass(frozen=True)
class Violation:
    code: str  # QUBIT_CAPACITY | GATE_NOT_NATIVE
    message: str


def gate_matrix(name: str, params: Sequence[float] = ()) -> np.ndarray:
    """Unitary for ``name``; rotation gates take one angle in radians."""
    if name in _FIXED:
        return _FIXED[name]
    (theta,) = params
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    if name == "rx":
        return np.array([[c, -1j * s], [-1j * s, c]], dtype=complex)
    if name == "ry":
        return np.array([[c, -s], [s, c]], dtype=complex)
    if name == "rz":
        return np.diag([np.exp(-1j * theta / 2), np.exp(1j * theta / 2)])
    raise InvalidArgumentError(f"unknown gate {name!r}")


def validate(program: Program, qubit_capacity: int, allowed_gates: Iterable[str]) -> list[Violation]:
    """Check capacity and gate nativeness; an empty list means the program is acceptable."""
    allowed = set(allowed_gates)
    violations = []
    if program.num_qubits > qubit_capacity:
        violations.append(
            Violation("QUBIT_CAPACITY", f"program uses {program.num_qubits} qubits, device has {qubit_capacity}")
        )
    for name in dict.fromkeys(g.gate for g in program.gates):
        if name not in allowed:
            violations.append(Violation("GATE_NOT_NATIVE", f"gate {name!r} is not in the native gate set"))
    return violations


def apply_gate(state: np.ndarray, matrix: np.ndarray, targets: Sequence[int], num_qubits: int) -> np.ndarray:
    k = len(targets)
    psi = state.reshape((2,) * num_qubits)
    axes = [num_qubits - 1 - t for t in targets]
    u = matrix.reshape((2,) * (2 * k))
    # contract the input legs of u with the target axes, then put the output legs back
    psi = np.tensordot(u, psi, axes=(list(range(k, 2 * k)), axes))
    psi = np.moveaxis(psi, list(range(k)), axes)
    return psi.reshape(-1)


def simulate(program: Program) -> np.ndarray:
    """Final statevector of ``program`` starting from all zeros; measurements are deferred."""
    n = program.num_qubits
    if n > MAX_QUBITS:
        raise SimulationCapacityError(f"{n} qubits exceeds the simulator limit of {MAX_QUBITS}")
    state = np.zeros(2**n, dtype=complex)
    state[0] = 1.0
    for stmt in program.statements:
        if isinstance(stmt, GateApplication):
            targets = [program.qubit_index(q) for q in stmt.targets]
            state = apply_gate(state, gate_matrix(stmt.gate, stmt.params), targets, n)
    return state


def marginal_probabilities(state: np.ndarray, measured_qubits: Sequence[int]) -> np.ndarray:
    """Outcome probabilities over ``measured_qubits``; the first listed qubit is the top bit."""
    n = int(state.size).bit_length() - 1
    for q in measured_qubits:
        if not 0 <= q < n:
            raise InvalidArgumentError(f"qubit index {q} outside a {n}-qubit state")
    if len(set(measured_qubits)) != len(measured_qubits):
        raise InvalidArgumentError("measured qubits must be distinct")
    probs = (np.abs(state) ** 2).reshape((2,) * n)
    keep = [n - 1 - q for q in measured_qubits]
    drop = tuple(a for a in range(n) if a not in keep)
    marginal = probs.sum(axis=drop) if drop else probs
    # remaining axes are in ascending order; reorder them to follow measured_qubits
    remaining = sorted(keep)
    marginal = np.transpose(marginal, [remaining.index(a) for a in keep])
    return marginal.reshape(-1)


def sample_measurements(
    state: np.ndarray, measured_qubits: Sequence[int], shots: int, seed: int
) -> list[list[int]]:
    """Draw ``shots`` independent outcomes; each row lists bits in ``measured_qubits`` order."""
    if shots < 1:
        raise InvalidArgumentError("shots must be at least 1")
    p = marginal_probabilities(state, measured_qubits)
    p = p / p.sum()
    rng = np.random.default_rng(seed)
    outcomes = rng.choice(p.size, size=shots, p=p)
    m = len(measured_qubits)
    return [[(int(o) >> (m - 1 - j)) & 1 for j in range(m)] for o in outcomes]
