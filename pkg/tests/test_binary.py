import math

import numpy as np
import pytest

from qpricer.market import BinnedDistribution, binned_payoff, discretize
from qpricer.simcore import Native, NoiseModel, run_exact, x
from qpricer import binary as B


def _dist(probs, lo=1.0, hi=2.0):
    probs = np.asarray(probs, dtype=float)
    return BinnedDistribution(np.linspace(lo, hi, probs.size), probs)


def _payoff_prob(circuit, layout):
    probs = run_exact(circuit, layout.num_qubits)
    idx = np.arange(probs.size)
    return probs[(idx >> layout.payoff) & 1 == 1].sum()


def test_rescale_strike_endpoints(dist8):
    lo = float(dist8.bin_centers[0])
    hi = float(dist8.bin_centers[-1])
    assert B.rescale_strike(dist8, lo) == 0
    assert B.rescale_strike(dist8, hi) == 8
    assert B.rescale_strike(dist8, lo - 1.0) == 0      # clamped below
    assert B.rescale_strike(dist8, hi + 1.0) == 8      # clamped above


def test_rescale_strike_matches_classical_comparison(scenario, dist8):
    kp = B.rescale_strike(dist8, scenario.strike)
    want = {i for i, s in enumerate(dist8.bin_centers) if s > scenario.strike}
    got = {e for e in range(8) if e >= kp}
    assert got == want


def test_rescale_strike_random_strikes(rng, dist8):
    for _ in range(100):
        strike = float(rng.uniform(dist8.bin_centers[0], dist8.bin_centers[-1]))
        kp = B.rescale_strike(dist8, strike)
        want = {i for i, s in enumerate(dist8.bin_centers) if s > strike}
        assert {e for e in range(8) if e >= kp} == want


def test_loader_uniform_is_plain_rotations():
    gates = B.load_distribution_exact(np.full(8, 1 / 8))
    assert [g.kind for g in gates] == ["ry", "ry", "ry"]
    assert all(g.angle == pytest.approx(math.pi / 2) for g in gates)


def test_loader_delta_basis_state():
    probs = run_exact(B.load_distribution_exact(np.eye(8)[5]), 3)
    assert probs[5] == pytest.approx(1.0, abs=1e-12)


def test_loader_kl_paper_distribution(dist8):
    from qpricer.bench.metrics import kl_divergence

    probs = run_exact(B.load_distribution_exact(dist8.probabilities), 3)
    assert np.max(np.abs(probs - dist8.probabilities)) < 1e-10
    assert kl_divergence(dist8.probabilities, probs, zero_floor=1e-300) < 1e-12


@pytest.mark.parametrize("n_bits", [1, 2, 3, 4])
def test_loader_random_distributions(rng, n_bits):
    for _ in range(20):
        p = rng.dirichlet(np.ones(2**n_bits))
        probs = run_exact(B.load_distribution_exact(p), n_bits)
        assert np.max(np.abs(probs - p)) < 1e-10


@pytest.mark.parametrize("n_bits", [2, 3, 4])
def test_comparator_exhaustive(n_bits):
    for kp in range(1, 2**n_bits):
        lay = B.BinaryLayout(n_bits, kp, float(kp))
        comp = B.build_comparator(lay)
        for e in range(2**n_bits):
            prep = [x(j) for j in range(n_bits) if (e >> j) & 1]
            probs = run_exact(prep + comp, lay.num_qubits)
            out = int(np.argmax(probs))
            assert probs[out] > 1 - 1e-12  # classical circuit: single outcome
            assert (out >> lay.flag) & 1 == (1 if e >= kp else 0)


def test_or_gate_truth_table():
    from qpricer.binary import _or_gate
    from qpricer.simcore.statevector import circuit_unitary

    got = circuit_unitary(_or_gate(0, 1, 2), 3)
    want = np.zeros((8, 8), dtype=complex)
    for i in range(8):
        j = i ^ 4 if (i & 1) or (i & 2) else i
        want[j, i] = 1
    assert np.max(np.abs(got - want)) < 1e-12


def test_comparator_threshold_one_is_or_of_bits():
    lay = B.BinaryLayout(3, 1, 1.0)
    comp = B.build_comparator(lay)
    for e in range(8):
        prep = [x(j) for j in range(3) if (e >> j) & 1]
        probs = run_exact(prep + comp, lay.num_qubits)
        out = int(np.argmax(probs))
        assert (out >> lay.flag) & 1 == (1 if e >= 1 else 0)


def test_comparator_degenerate_thresholds():
    lay0 = B.BinaryLayout(3, 0, 0.0)
    gates = B.build_comparator(lay0)
    assert [g.kind for g in gates] == ["x"]  # constant flag, no chain
    lay_full = B.BinaryLayout(3, 8, 8.0)
    assert B.build_comparator(lay_full) == []


def test_comparator_carries_stay_classical(dist8, scenario):
    # carries are deterministic per basis state: no amplitude leaks
    lay = B.layout_for(dist8, scenario.strike)
    circ = B.load_distribution_exact(dist8.probabilities) + B.build_comparator(lay)
    probs = run_exact(circ, lay.num_qubits)
    nonzero = np.flatnonzero(probs > 1e-14)
    for out in nonzero:
        e = out & (2**lay.n - 1)
        assert probs[out] == pytest.approx(dist8.probabilities[e], abs=1e-10)


def test_payoff_all_mass_below_strike():
    p = np.eye(8)[0]  # all mass on e=0
    dist = _dist(p)
    lay = B.BinaryLayout(3, 5, 5.0, c=0.1)
    circ = B.load_distribution_exact(p) + B.build_comparator(lay) + B.build_payoff_binary(lay)
    got = _payoff_prob(circ, lay)
    assert got == pytest.approx(math.sin(math.pi / 4 - 0.1) ** 2, abs=1e-12)


def test_payoff_closed_form_uniform():
    p = np.full(8, 1 / 8)
    lay = B.BinaryLayout(3, 3, 3.0, c=0.1)
    circ = B.load_distribution_exact(p) + B.build_comparator(lay) + B.build_payoff_binary(lay)
    assert _payoff_prob(circ, lay) == pytest.approx(B.closed_form_p1(lay, p), abs=1e-9)


def test_payoff_max_bin_angle(dist8, scenario):
    lay = B.layout_for(dist8, scenario.strike)
    slope = B.payoff_slope(lay)
    g_max = slope * (lay.e_max - lay.strike_scaled)
    assert g_max == pytest.approx(2 * lay.c, abs=1e-12)


def test_payoff_closed_form_random(rng):
    for _ in range(25):
        p = rng.dirichlet(np.ones(8))
        kp = int(rng.integers(1, 8))
        lay = B.BinaryLayout(3, kp, kp - rng.uniform(0, 1), c=0.1)
        circ = B.load_distribution_exact(p) + B.build_comparator(lay) + B.build_payoff_binary(lay)
        assert _payoff_prob(circ, lay) == pytest.approx(B.closed_form_p1(lay, p), abs=1e-9)


def test_invert_payoff_trivial():
    lay = B.BinaryLayout(3, 3, 3.0, c=0.1)
    dist = _dist(np.full(8, 1 / 8))
    assert B.invert_payoff(0.5 - lay.c, lay, dist) == pytest.approx(0.0, abs=1e-12)


def test_invert_payoff_paper_scenario(scenario, dist8):
    lay = B.layout_for(dist8, scenario.strike, c=0.1)
    circ = B.build_pricing_circuit(lay, dist8)
    p1 = _payoff_prob(circ, lay)
    got = B.invert_payoff(p1, lay, dist8)
    want = binned_payoff(dist8, scenario.strike)
    assert abs(got - want) / want < 0.02  # measured Taylor bias at c=0.1


def test_taylor_bias_decreases_with_c(scenario, dist8):
    want = binned_payoff(dist8, scenario.strike)
    biases = []
    for c in (0.2, 0.1, 0.05):
        lay = B.layout_for(dist8, scenario.strike, c=c)
        p1 = _payoff_prob(B.build_pricing_circuit(lay, dist8), lay)
        biases.append(abs(B.invert_payoff(p1, lay, dist8) - want))
    assert biases[0] > biases[1] > biases[2]


@pytest.mark.parametrize("m", [0, 1, 2])
def test_q_power_law_binary(scenario, dist8, m):
    lay = B.layout_for(dist8, scenario.strike, c=0.1)
    base = _payoff_prob(B.build_ae_circuit(lay, dist8, 0), lay)
    theta = math.asin(math.sqrt(base))
    got = _payoff_prob(B.build_ae_circuit(lay, dist8, m), lay)
    assert got == pytest.approx(math.sin((2 * m + 1) * theta) ** 2, abs=1e-8)


def test_q_power_law_zero_amplitude():
    p = np.eye(8)[0].astype(float)
    dist = _dist(p)
    # threshold above every bin plus c -> g0 rotation only; force a = 0 by
    # zeroing the base rotation instead: use k'=8 so the flag never fires and
    # pick c -> pi/4 so g0 = 0
    lay = B.BinaryLayout(3, 8, 8.0, c=math.pi / 4)
    circ = B.build_ae_circuit(lay, dist, 2)
    assert _payoff_prob(circ, lay) < 1e-12


def test_total_qubits(dist8, scenario):
    lay = B.layout_for(dist8, scenario.strike)
    assert lay.num_qubits == 2 * lay.n + 2


@pytest.mark.parametrize("native", [Native.CNOT, Native.ISWAP, Native.MIXED])
def test_native_compilation_preserves_p1(scenario, dist8, native):
    lay = B.layout_for(dist8, scenario.strike)
    circ = B.build_pricing_circuit(lay, dist8, native)
    assert all(g.arity <= 2 for g in circ)
    assert _payoff_prob(circ, lay) == pytest.approx(
        B.closed_form_p1(lay, dist8.probabilities), abs=1e-9)


def test_estimate_payoff_binary_noiseless(scenario, dist8):
    shots = 2 * 10**4
    got = B.estimate_payoff_binary(scenario, 8, NoiseModel(), shots, seed=5)
    lay = B.layout_for(dist8, scenario.strike)
    p1 = B.closed_form_p1(lay, dist8.probabilities)
    sigma_payoff = (math.sqrt(p1 * (1 - p1) / shots) / (2 * lay.c)
                    * (lay.e_max - lay.strike_scaled) * dist8.step)
    want = B.invert_payoff(p1, lay, dist8)
    assert abs(got - want) < 4 * sigma_payoff


def test_layout_validation():
    with pytest.raises(ValueError):
        B.BinaryLayout(3, 9, 9.0)
    with pytest.raises(ValueError):
        B.BinaryLayout(3, 3, 3.0, c=1.5)
    with pytest.raises(ValueError):
        B.rescale_strike(_dist(np.full(6, 1 / 6)), 1.5)  # not a power of two
