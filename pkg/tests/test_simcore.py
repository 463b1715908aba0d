import math

import numpy as np
import pytest

from qpricer.simcore import gates as G
from qpricer.simcore import (
    NoiseModel,
    StateVector,
    apply_gate,
    outcome_distribution,
    run_exact,
    run_statevector,
    run_trajectories,
    run_trajectory,
)
from qpricer.simcore.density import evolve_density
from qpricer.simcore.statevector import apply_matrix, circuit_unitary


def _random_circuit(rng, q, depth):
    gates = []
    for _ in range(depth):
        kind = rng.integers(0, 6)
        qubits = rng.permutation(q)
        if kind == 0:
            gates.append(G.ry(int(qubits[0]), float(rng.uniform(0, 2 * math.pi))))
        elif kind == 1:
            gates.append(G.h(int(qubits[0])))
        elif kind == 2:
            gates.append(G.cx(int(qubits[0]), int(qubits[1])))
        elif kind == 3:
            gates.append(G.pswap(int(qubits[0]), int(qubits[1]), float(rng.uniform(0, math.pi))))
        elif kind == 4:
            gates.append(G.piswap(int(qubits[0]), int(qubits[1]), float(rng.uniform(0, math.pi))))
        else:
            gates.append(G.rz(int(qubits[0]), float(rng.uniform(0, 2 * math.pi))))
    return gates


def test_apply_gate_matches_matrix_chain(rng):
    # full statevector evolution against the explicit 16x16 matrix product
    for _ in range(5):
        circuit = _random_circuit(rng, 4, 12)
        u = circuit_unitary(circuit, 4)
        state = run_statevector(circuit, 4)
        want = u[:, 0]
        assert np.max(np.abs(state - want)) < 1e-10


def test_apply_gate_statevector_api():
    sv = StateVector.zero(2)
    sv = apply_gate(sv, G.x(1))
    assert sv.probabilities()[2] == pytest.approx(1.0)
    with pytest.raises(IndexError):
        apply_gate(sv, G.x(5))


def test_norm_preserved(rng):
    circuit = _random_circuit(rng, 4, 30)
    state = run_statevector(circuit, 4)
    assert abs(np.linalg.norm(state) - 1.0) < 1e-10


def test_run_exact_trivials():
    probs = run_exact([], 3)
    assert probs[0] == pytest.approx(1.0)
    probs = run_exact([G.x(2)], 3)
    assert probs[4] == pytest.approx(1.0)


def test_run_exact_probabilities_sum(rng):
    for _ in range(3):
        probs = run_exact(_random_circuit(rng, 4, 20), 4)
        assert abs(probs.sum() - 1.0) < 1e-10


def test_trajectories_zero_noise_multinomial(rng):
    circuit = _random_circuit(rng, 3, 10)
    probs = run_exact(circuit, 3)
    shots = 10**5
    bits = run_trajectories(circuit, 3, NoiseModel(), shots, seed=5)
    values = bits @ (1 << np.arange(3))
    counts = np.bincount(values, minlength=8)
    for p, k in zip(probs, counts):
        sigma = math.sqrt(max(p * (1 - p), 1e-12) * shots)
        assert abs(k - p * shots) < 4 * sigma + 1


def test_readout_flip_probability():
    # single X gate, eps_meas = 0.05 -> P(read 1) = 0.95
    shots = 10**5
    noise = NoiseModel(eps1=0.0, eps2=0.0, eps_meas=0.05)
    bits = run_trajectories([G.x(0)], 1, noise, shots, seed=11)
    p_hat = bits[:, 0].mean()
    sigma = math.sqrt(0.95 * 0.05 / shots)
    assert abs(p_hat - 0.95) < 3 * sigma


def test_depolarizing_channel_entrywise_identity(rng):
    # the per-Pauli weights reproduce rho -> (1-eps) rho + eps Tr_hit(rho) x I/d
    # exactly; reference via partial trace over the hit (LSB-side) qubits
    from qpricer.simcore.density import _depolarize

    def reference(rho, n_local, eps):
        dim = rho.shape[0]
        local = 2**n_local
        rest = dim // local
        t = rho.reshape(rest, local, rest, local)
        reduced = np.einsum("albl->ab", t)
        mixed = np.einsum("ab,lm->albm", reduced, np.eye(local) / local).reshape(dim, dim)
        return (1 - eps) * rho + eps * mixed

    eps = 0.13
    for q, qubits in ((1, (0,)), (3, (0,)), (3, (0, 1))):
        dim = 2**q
        state = rng.normal(size=dim) + 1j * rng.normal(size=dim)
        state /= np.linalg.norm(state)
        rho = np.outer(state, state.conj())
        got = _depolarize(rho, qubits, eps, q)
        want = reference(rho, len(qubits), eps)
        assert np.max(np.abs(got - want)) < 1e-12


def test_depolarizing_single_qubit_channel_identity():
    # trajectory ensemble must average to (1-eps) rho + eps I/2
    eps = 0.2
    shots = 10**6
    circuit = [G.ry(0, 1.1)]
    noise = NoiseModel(eps1=eps, eps2=0.0, eps_meas=0.0)
    bits = run_trajectories(circuit, 1, noise, shots, seed=3)
    p1_hat = bits[:, 0].mean()
    amp = run_statevector(circuit, 1)
    p1_exact = (1 - eps) * abs(amp[1]) ** 2 + eps / 2
    sigma = math.sqrt(p1_exact * (1 - p1_exact) / shots)
    assert abs(p1_hat - p1_exact) < 4 * sigma


@pytest.mark.parametrize("q,depth", [(3, 8), (4, 6)])
def test_trajectories_match_density_oracle(rng, q, depth):
    circuit = _random_circuit(rng, q, depth)
    noise = NoiseModel(eps1=0.01, eps2=0.02, eps_meas=0.05)
    probs = outcome_distribution(circuit, q, noise)
    shots = 10**6
    bits = run_trajectories(circuit, q, noise, shots, seed=17)
    values = bits @ (1 << np.arange(q))
    counts = np.bincount(values, minlength=2**q)
    for p, k in zip(probs, counts):
        sigma = math.sqrt(max(p * (1 - p), 1e-12) * shots)
        assert abs(k - p * shots) < 4 * sigma + 1


def test_density_oracle_noiseless_consistency(rng):
    circuit = _random_circuit(rng, 3, 10)
    rho = evolve_density(circuit, 3, NoiseModel())
    probs = run_exact(circuit, 3)
    assert np.max(np.abs(np.real(np.diag(rho)) - probs)) < 1e-10


def test_trajectory_determinism(rng):
    circuit = _random_circuit(rng, 3, 12)
    noise = NoiseModel(0.01)
    a = run_trajectory(circuit, 3, noise, seed=99)
    b = run_trajectory(circuit, 3, noise, seed=99)
    np.testing.assert_array_equal(a, b)
    batch1 = run_trajectories(circuit, 3, noise, 500, seed=77)
    batch2 = run_trajectories(circuit, 3, noise, 500, seed=77)
    np.testing.assert_array_equal(batch1, batch2)


def test_trajectories_reject_three_qubit_gates():
    with pytest.raises(ValueError):
        run_trajectories([G.ccx(0, 1, 2)], 3, NoiseModel(), 10, seed=0)


def test_noise_model_defaults():
    nm = NoiseModel(0.005)
    assert nm.eps2 == pytest.approx(0.01)
    assert nm.eps_meas == pytest.approx(0.05)
    custom = NoiseModel(0.005, eps2=0.001, eps_meas=0.0)
    assert custom.eps2 == pytest.approx(0.001)
    with pytest.raises(ValueError):
        NoiseModel(1.5)


def test_apply_matrix_out_of_range():
    state = np.zeros(4, dtype=complex)
    state[0] = 1
    with pytest.raises(IndexError):
        apply_matrix(state, np.eye(2, dtype=complex), (2,), 2)
