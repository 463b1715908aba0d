"""Stochastic Pauli-trajectory simulation of depolarizing + readout noise.

The depolarizing map rho -> (1-eps) rho + eps I/d is realized per gate by
inserting each of the d^2-1 non-identity Pauli strings with probability
eps/d^2 (total insertion probability eps (d^2-1)/d^2). The ensemble average
then equals the channel exactly; the density-matrix oracle test asserts this.

Trajectories sharing the all-clean error pattern are sampled straight from
the noiseless distribution; only shots with at least one Pauli insertion are
evolved individually (from the deepest clean prefix), in a numba kernel.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit, prange

from .gates import Gate, matrix

_PAULI_FRACTION = {1: 3.0 / 4.0, 2: 15.0 / 16.0}  # (d^2-1)/d^2


@dataclass(frozen=True)
class NoiseModel:
    """Depolarizing probabilities per 1q/2q gate plus symmetric readout flips.

    ``eps2`` and ``eps_meas`` default to the device ratios 2*eps1 and 10*eps1.
    """

    eps1: float = 0.0
    eps2: float | None = None
    eps_meas: float | None = None

    def __post_init__(self):
        if self.eps2 is None:
            object.__setattr__(self, "eps2", 2.0 * self.eps1)
        if self.eps_meas is None:
            object.__setattr__(self, "eps_meas", 10.0 * self.eps1)
        for name in ("eps1", "eps2", "eps_meas"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name}={v} outside [0, 1]")

    @property
    def is_noiseless(self) -> bool:
        return self.eps1 == 0.0 and self.eps2 == 0.0 and self.eps_meas == 0.0


NOISELESS = NoiseModel()


def _compile(gates: list[Gate], q: int):
    """Pack a circuit into flat arrays digestible by the kernels."""
    g_count = len(gates)
    arity = np.zeros(g_count, dtype=np.int8)
    qa = np.zeros(g_count, dtype=np.int64)
    qb = np.zeros(g_count, dtype=np.int64)
    m1 = np.zeros((g_count, 2, 2), dtype=np.complex128)
    m2 = np.zeros((g_count, 4, 4), dtype=np.complex128)
    for i, g in enumerate(gates):
        if g.arity > 2:
            raise ValueError(f"trajectory simulation needs 1- and 2-qubit gates, got {g.kind}")
        for qi in g.qubits:
            if not 0 <= qi < q:
                raise IndexError(f"qubit {qi} out of range")
        arity[i] = g.arity
        qa[i] = g.qubits[0]
        qb[i] = g.qubits[1] if g.arity == 2 else 0
        if g.arity == 1:
            m1[i] = matrix(g)
        else:
            m2[i] = matrix(g)
    return arity, qa, qb, m1, m2


@njit(cache=True)
def _apply_1q(state, m, q):
    step = 1 << q
    dim = state.size
    for base in range(0, dim, 2 * step):
        for off in range(step):
            i0 = base + off
            i1 = i0 + step
            a0 = state[i0]
            a1 = state[i1]
            state[i0] = m[0, 0] * a0 + m[0, 1] * a1
            state[i1] = m[1, 0] * a0 + m[1, 1] * a1


@njit(cache=True)
def _apply_2q(state, m, qa, qb):
    sa = 1 << qa
    sb = 1 << qb
    dim = state.size
    for i in range(dim):
        if (i & sa) == 0 and (i & sb) == 0:
            i1 = i | sa
            i2 = i | sb
            i3 = i1 | sb
            a0 = state[i]
            a1 = state[i1]
            a2 = state[i2]
            a3 = state[i3]
            state[i] = m[0, 0] * a0 + m[0, 1] * a1 + m[0, 2] * a2 + m[0, 3] * a3
            state[i1] = m[1, 0] * a0 + m[1, 1] * a1 + m[1, 2] * a2 + m[1, 3] * a3
            state[i2] = m[2, 0] * a0 + m[2, 1] * a1 + m[2, 2] * a2 + m[2, 3] * a3
            state[i3] = m[3, 0] * a0 + m[3, 1] * a1 + m[3, 2] * a2 + m[3, 3] * a3


@njit(cache=True)
def _apply_pauli(state, q, code):
    """code: 1=X, 2=Y, 3=Z on qubit q."""
    step = 1 << q
    dim = state.size
    if code == 1:
        for base in range(0, dim, 2 * step):
            for off in range(step):
                i0 = base + off
                i1 = i0 + step
                tmp = state[i0]
                state[i0] = state[i1]
                state[i1] = tmp
    elif code == 2:
        for base in range(0, dim, 2 * step):
            for off in range(step):
                i0 = base + off
                i1 = i0 + step
                tmp = state[i0]
                state[i0] = -1j * state[i1]
                state[i1] = 1j * tmp
    elif code == 3:
        for base in range(0, dim, 2 * step):
            for off in range(step):
                i1 = base + off + step
                state[i1] = -state[i1]


@njit(cache=True)
def _apply_gate_idx(state, g, arity, qa, qb, m1, m2):
    if arity[g] == 1:
        _apply_1q(state, m1[g], qa[g])
    else:
        _apply_2q(state, m2[g], qa[g], qb[g])


@njit(cache=True)
def _evolve(state, arity, qa, qb, m1, m2, g_start, g_stop):
    for g in range(g_start, g_stop):
        _apply_gate_idx(state, g, arity, qa, qb, m1, m2)


@njit(cache=True)
def _sample_index(state, u):
    acc = 0.0
    dim = state.size
    for i in range(dim):
        a = state[i]
        acc += a.real * a.real + a.imag * a.imag
        if u < acc:
            return i
    return dim - 1


@njit(cache=True, parallel=True)
def _noisy_shots(prefixes, arity, qa, qb, m1, m2, err_ptr, err_gate, err_pa, err_pb, u_meas, out_idx):
    n_gates = arity.size
    for sidx in prange(out_idx.size):
        lo = err_ptr[sidx]
        hi = err_ptr[sidx + 1]
        g0 = err_gate[lo]
        state = prefixes[g0 + 1].copy()
        e = lo
        while e < hi and err_gate[e] == g0:
            if err_pa[e] > 0:
                _apply_pauli(state, qa[g0], err_pa[e])
            if err_pb[e] > 0:
                _apply_pauli(state, qb[g0], err_pb[e])
            e += 1
        for g in range(g0 + 1, n_gates):
            _apply_gate_idx(state, g, arity, qa, qb, m1, m2)
            while e < hi and err_gate[e] == g:
                if err_pa[e] > 0:
                    _apply_pauli(state, qa[g], err_pa[e])
                if err_pb[e] > 0:
                    _apply_pauli(state, qb[g], err_pb[e])
                e += 1
        out_idx[sidx] = _sample_index(state, u_meas[sidx])


def _distinct_ids(rng: np.random.Generator, n: int, k: int) -> np.ndarray:
    """k distinct uniform indices from range(n)."""
    if k <= 0:
        return np.empty(0, dtype=np.int64)
    if k >= n:
        return np.arange(n, dtype=np.int64)
    if k > n // 4:
        return rng.permutation(n)[:k].astype(np.int64)
    pool = np.unique(rng.integers(0, n, size=k + max(8, k // 8)))
    while pool.size < k:
        pool = np.union1d(pool, rng.integers(0, n, size=k))
    return rng.permutation(pool)[:k].astype(np.int64)


def _prefix_states(arity, qa, qb, m1, m2, q: int) -> np.ndarray:
    g_count = arity.size
    prefixes = np.zeros((g_count + 1, 2**q), dtype=np.complex128)
    prefixes[0, 0] = 1.0
    for g in range(g_count):
        state = prefixes[g].copy()
        _apply_gate_idx(state, g, arity, qa, qb, m1, m2)
        prefixes[g + 1] = state
    return prefixes


def run_trajectories(
    gates: list[Gate],
    q: int,
    noise: NoiseModel,
    shots: int,
    seed,
) -> np.ndarray:
    """Simulate ``shots`` independent noisy shots of one circuit.

    Returns a (shots, q) uint8 array; column i is the measured bit of qubit i.
    Deterministic given (circuit, noise, seed).
    """
    if shots <= 0:
        raise ValueError("shots must be positive")
    rng = np.random.default_rng(seed)
    arity, qa, qb, m1, m2 = _compile(gates, q)
    g_count = arity.size
    prefixes = _prefix_states(arity, qa, qb, m1, m2, q)
    final_probs = np.abs(prefixes[g_count]) ** 2
    cdf = np.cumsum(final_probs)
    cdf[-1] = 1.0

    # per-gate Pauli insertion events
    shot_e: list[np.ndarray] = []
    gate_e: list[np.ndarray] = []
    pa_e: list[np.ndarray] = []
    pb_e: list[np.ndarray] = []
    for g in range(g_count):
        eps = noise.eps1 if arity[g] == 1 else noise.eps2
        p_eff = eps * _PAULI_FRACTION[int(arity[g])]
        if p_eff <= 0.0:
            continue
        k = int(rng.binomial(shots, p_eff))
        if k == 0:
            continue
        ids = _distinct_ids(rng, shots, k)
        if arity[g] == 1:
            pa = rng.integers(1, 4, size=k)
            pb = np.zeros(k, dtype=np.int64)
        else:
            code = rng.integers(1, 16, size=k)
            pa = code & 3
            pb = code >> 2
        shot_e.append(ids)
        gate_e.append(np.full(k, g, dtype=np.int64))
        pa_e.append(pa.astype(np.int64))
        pb_e.append(pb.astype(np.int64))

    out_index = np.empty(shots, dtype=np.int64)
    if shot_e:
        shot_arr = np.concatenate(shot_e)
        gate_arr = np.concatenate(gate_e)
        pa_arr = np.concatenate(pa_e)
        pb_arr = np.concatenate(pb_e)
        order = np.lexsort((gate_arr, shot_arr))
        shot_arr, gate_arr = shot_arr[order], gate_arr[order]
        pa_arr, pb_arr = pa_arr[order], pb_arr[order]
        noisy_ids, ptr_start = np.unique(shot_arr, return_index=True)
        err_ptr = np.concatenate([ptr_start, [shot_arr.size]]).astype(np.int64)
        noisy_mask = np.zeros(shots, dtype=bool)
        noisy_mask[noisy_ids] = True
    else:
        noisy_ids = np.empty(0, dtype=np.int64)
        noisy_mask = np.zeros(shots, dtype=bool)

    clean_count = shots - noisy_ids.size
    if clean_count:
        u = rng.random(clean_count)
        out_index[~noisy_mask] = np.searchsorted(cdf, u, side="right")
    if noisy_ids.size:
        u_meas = rng.random(noisy_ids.size)
        noisy_out = np.empty(noisy_ids.size, dtype=np.int64)
        _noisy_shots(prefixes, arity, qa, qb, m1, m2, err_ptr, gate_arr, pa_arr, pb_arr, u_meas, noisy_out)
        out_index[noisy_ids] = noisy_out

    bits = ((out_index[:, None] >> np.arange(q)) & 1).astype(np.uint8)
    if noise.eps_meas > 0.0:
        flips = rng.random((shots, q)) < noise.eps_meas
        bits ^= flips.astype(np.uint8)
    return bits


def run_trajectory(gates: list[Gate], q: int, noise: NoiseModel, seed) -> np.ndarray:
    """One noisy shot; (q,) uint8 bit array."""
    return run_trajectories(gates, q, noise, 1, seed)[0]
