"""Distribution metrics and empirical-distribution decoding."""
from __future__ import annotations

import numpy as np


def kl_divergence(target, empirical, zero_floor: float = 1e-9) -> float:
    """KL(target || empirical) with floored-and-renormalized empirical zeros.

    Accepts plain probability arrays or BinnedDistribution objects. Bins the
    target itself assigns zero mass contribute nothing.
    """
    t = np.asarray(getattr(target, "probabilities", target), dtype=float)
    e = np.asarray(getattr(empirical, "probabilities", empirical), dtype=float)
    if t.shape != e.shape:
        raise ValueError("distributions must share the bin count")
    e = np.where(e < zero_floor, zero_floor, e)
    e = e / e.sum()
    mask = t > 0
    return float(np.sum(t[mask] * np.log(t[mask] / e[mask])))


def unary_empirical(bits: np.ndarray, n: int) -> tuple[np.ndarray, float]:
    """Post-selected bin frequencies of a unary register; (probs, acceptance).

    Only the first n columns (the distribution register) are constrained.
    """
    register = np.asarray(bits, dtype=np.uint8)[:, :n]
    keep = register.sum(axis=1) == 1
    if not keep.any():
        return np.zeros(n), 0.0
    counts = np.bincount(np.argmax(register[keep], axis=1), minlength=n).astype(float)
    return counts / counts.sum(), float(keep.mean())


def binary_empirical(bits: np.ndarray, n_bits: int) -> np.ndarray:
    """Value-register frequencies of a binary register (every shot counts)."""
    weights = (1 << np.arange(n_bits)).astype(np.int64)
    values = bits[:, :n_bits].astype(np.int64) @ weights
    counts = np.bincount(values, minlength=2**n_bits).astype(float)
    return counts / counts.sum()


def smoothing_floor(shots: int) -> float:
    """Zero-count floor 1/(10 N) used when comparing sampled distributions."""
    return 1.0 / (10.0 * shots)
