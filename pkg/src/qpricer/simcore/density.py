"""Exact density-matrix evolution, the validation oracle for noisy trajectories.

Costs 4^q memory, so it is deliberately capped at small registers. The
depolarizing channel after each gate is applied exactly via its Pauli
decomposition; readout errors become a classical per-qubit confusion of the
outcome distribution.
"""
from __future__ import annotations

import numpy as np

from .gates import Gate, PAULIS_1Q, matrix
from .noise import NoiseModel
from .statevector import apply_matrix

_MAX_QUBITS = 4


def _embed(mat: np.ndarray, qubits: tuple[int, ...], q: int) -> np.ndarray:
    """Expand a local gate matrix to the full 2^q unitary."""
    dim = 2**q
    u = np.eye(dim, dtype=complex)
    return np.stack([apply_matrix(u[:, j], mat, qubits, q) for j in range(dim)], axis=1)


def _depolarize(rho: np.ndarray, qubits: tuple[int, ...], eps: float, q: int) -> np.ndarray:
    if eps == 0.0:
        return rho
    d2 = 4 ** len(qubits)
    acc = np.zeros_like(rho)
    if len(qubits) == 1:
        for p in PAULIS_1Q:
            u = _embed(p, qubits, q)
            acc += u @ rho @ u.conj().T
    else:
        for pa in PAULIS_1Q:
            for pb in PAULIS_1Q:
                # first listed qubit is the local LSB
                u = _embed(np.kron(pb, pa), qubits, q)
                acc += u @ rho @ u.conj().T
    return (1.0 - eps) * rho + (eps / d2) * acc


def evolve_density(gates: list[Gate], q: int, noise: NoiseModel) -> np.ndarray:
    """Final density matrix after the circuit under the depolarizing model."""
    if q > _MAX_QUBITS:
        raise ValueError(f"density oracle is capped at {_MAX_QUBITS} qubits")
    dim = 2**q
    rho = np.zeros((dim, dim), dtype=complex)
    rho[0, 0] = 1.0
    for g in gates:
        if g.arity > 2:
            raise ValueError("density oracle expects 1- and 2-qubit gates")
        u = _embed(matrix(g), g.qubits, q)
        rho = u @ rho @ u.conj().T
        eps = noise.eps1 if g.arity == 1 else noise.eps2
        rho = _depolarize(rho, g.qubits, eps, q)
    return rho


def outcome_distribution(gates: list[Gate], q: int, noise: NoiseModel) -> np.ndarray:
    """Exact probabilities of measured bitstrings, including readout flips."""
    rho = evolve_density(gates, q, noise)
    probs = np.real(np.diag(rho)).copy()
    probs = np.clip(probs, 0.0, None)
    probs /= probs.sum()
    if noise.eps_meas > 0.0:
        e = noise.eps_meas
        flip = np.array([[1 - e, e], [e, 1 - e]])
        t = probs.reshape([2] * q)
        for axis in range(q):
            t = np.moveaxis(np.tensordot(flip, t, axes=([1], [axis])), 0, axis)
        probs = t.reshape(-1)
    return probs
