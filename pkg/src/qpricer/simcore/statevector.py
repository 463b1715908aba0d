"""Dense statevector execution of gate lists.

Amplitude ordering: qubit 0 is the least-significant bit of the flat index,
so ``state[5]`` is the amplitude of bitstring q0=1, q1=0, q2=1, ...
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .gates import Gate, matrix

NORM_ATOL = 1e-10


@dataclass
class StateVector:
    """2**q complex amplitudes over q qubits, unit norm."""

    amplitudes: np.ndarray
    num_qubits: int = field(default=0)

    def __post_init__(self):
        self.amplitudes = np.asarray(self.amplitudes, dtype=complex)
        q = int(np.log2(self.amplitudes.size))
        if 2**q != self.amplitudes.size:
            raise ValueError("amplitude count must be a power of two")
        if self.num_qubits == 0:
            self.num_qubits = q
        elif self.num_qubits != q:
            raise ValueError("num_qubits inconsistent with amplitude count")
        if abs(np.linalg.norm(self.amplitudes) - 1.0) > NORM_ATOL:
            raise ValueError("state is not normalized")

    @classmethod
    def zero(cls, q: int) -> "StateVector":
        amp = np.zeros(2**q, dtype=complex)
        amp[0] = 1.0
        return cls(amp, q)

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2


def apply_matrix(state: np.ndarray, mat: np.ndarray, qubits: tuple[int, ...], q: int) -> np.ndarray:
    """Apply a 2^k x 2^k unitary to the listed qubits of a flat statevector."""
    k = len(qubits)
    for qi in qubits:
        if not 0 <= qi < q:
            raise IndexError(f"qubit {qi} out of range for {q}-qubit register")
    tensor = state.reshape([2] * q)
    # tensor axis of qubit j is (q-1-j); first listed qubit = local LSB = last axis
    axes = [q - 1 - qi for qi in reversed(qubits)]
    tensor = np.moveaxis(tensor, axes, range(q - k, q))
    flat = tensor.reshape(-1, 2**k)
    flat = flat @ mat.T
    tensor = flat.reshape([2] * q)
    tensor = np.moveaxis(tensor, range(q - k, q), axes)
    return np.ascontiguousarray(tensor.reshape(-1))


def apply_gate(state: StateVector, gate: Gate) -> StateVector:
    """Return the state with one gate applied; norm is preserved."""
    amp = apply_matrix(state.amplitudes, matrix(gate), gate.qubits, state.num_qubits)
    return StateVector(amp, state.num_qubits)


def run_statevector(gates: list[Gate], q: int, initial: np.ndarray | None = None) -> np.ndarray:
    """Final amplitudes after the whole circuit (starting from |0...0> by default)."""
    if initial is None:
        state = np.zeros(2**q, dtype=complex)
        state[0] = 1.0
    else:
        state = np.array(initial, dtype=complex)
    for g in gates:
        state = apply_matrix(state, matrix(g), g.qubits, q)
    return state


def run_exact(gates: list[Gate], q: int) -> np.ndarray:
    """Noiseless outcome probabilities |amp|^2 over all 2^q bitstrings."""
    return np.abs(run_statevector(gates, q)) ** 2


def circuit_unitary(gates: list[Gate], q: int) -> np.ndarray:
    """Dense 2^q x 2^q unitary of a circuit. Intended for small q (oracles)."""
    if q > 12:
        raise ValueError("circuit_unitary is capped at 12 qubits")
    u = np.eye(2**q, dtype=complex)
    for g in gates:
        u = np.stack([apply_matrix(u[:, j], matrix(g), g.qubits, q) for j in range(u.shape[1])], axis=1)
    return u


def equal_up_to_phase(a: np.ndarray, b: np.ndarray, atol: float = 1e-10) -> bool:
    """Matrix/vector equality modulo a global phase."""
    idx = np.unravel_index(np.argmax(np.abs(b)), b.shape)
    if abs(a[idx]) < atol:
        return False
    phase = a[idx] / b[idx]
    if abs(abs(phase) - 1) > 1e-8:
        return False
    return bool(np.max(np.abs(a - phase * b)) < atol)


def circuit_depth(gates: list[Gate]) -> int:
    """ASAP-scheduled depth: gates on disjoint qubits share a layer."""
    ready: dict[int, int] = {}
    depth = 0
    for g in gates:
        start = max((ready.get(qi, 0) for qi in g.qubits), default=0)
        for qi in g.qubits:
            ready[qi] = start + 1
        depth = max(depth, start + 1)
    return depth


def bits_from_index(indices: np.ndarray, q: int) -> np.ndarray:
    """Outcome indices -> (N, q) bit array with column j = qubit j."""
    indices = np.asarray(indices)
    return ((indices[:, None] >> np.arange(q)) & 1).astype(np.uint8)


def bits_to_str(bits: np.ndarray) -> str:
    """Render one shot as a string with position i = qubit i."""
    return "".join("1" if b else "0" for b in bits)
