"""Binary-encoded pricing pipeline: exact loader, comparator, Taylor payoff, AE block.

Register layout for n precision qubits (bins = 2^n):
  qubits 0..n-1      value register e (little-endian)
  qubits n..2n-1     comparator carries a_0..a_{n-1}
  qubit  2n          comparator flag
  qubit  2n+1        payoff ancilla
for 2n+2 qubits total.

The comparator flags e >= K' via the two's-complement carry chain; carries
are never uncomputed (the surrounding AE structure undoes them for free).
The payoff rotations keep the exact real-valued rescaled strike so that the
encoded quantity is sum_i p_i (S_i - K) over flagged bins, with only the
O(c^3) Taylor remainder as bias.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .market import BinnedDistribution, MarketScenario, discretize
from .simcore import (
    Gate,
    Native,
    NoiseModel,
    ccry,
    ccx,
    compile_circuit,
    cry,
    cx,
    dagger_circuit,
    h,
    run_trajectories,
    ry,
    x,
    z,
)


@dataclass(frozen=True)
class BinaryLayout:
    """Qubit roles, rescaled strike, and the Taylor constant c."""

    n: int                 # precision qubits; bins = 2^n
    k_threshold: int       # integer K': flag fires on e >= K'
    strike_scaled: float   # real-valued rescaled strike used in the angles
    c: float = 0.1

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("need at least 1 precision qubit")
        if not 0 <= self.k_threshold <= 2**self.n:
            raise ValueError("K' out of [0, 2^n]")
        if not 0.0 < self.c < 1.0:
            raise ValueError("c must lie in (0, 1)")

    @property
    def bins(self) -> int:
        return 2**self.n

    @property
    def e_max(self) -> int:
        return 2**self.n - 1

    @property
    def carries(self) -> tuple[int, ...]:
        return tuple(range(self.n, 2 * self.n))

    @property
    def flag(self) -> int:
        return 2 * self.n

    @property
    def payoff(self) -> int:
        return 2 * self.n + 1

    @property
    def num_qubits(self) -> int:
        return 2 * self.n + 2


def rescale_strike(dist: BinnedDistribution, strike: float) -> int:
    """Integer threshold K' with {e >= K'} = {S_e > K} on the bin-center lattice.

    Ceiling of the rescaled strike (K - S_min) / step, clamped to [0, 2^n];
    strikes outside [S_min, S_max] are clamped to the degenerate thresholds.
    """
    n_bits = int(math.log2(dist.n))
    if 2**n_bits != dist.n:
        raise ValueError("binary encoding needs a power-of-two bin count")
    lo, hi = float(dist.bin_centers[0]), float(dist.bin_centers[-1])
    if strike < lo:
        return 0
    if strike >= hi:
        return dist.n  # no bin lies strictly above the strike
    scaled = (strike - lo) / dist.step
    return int(min(dist.n, max(0, math.ceil(scaled - 1e-12))))


def layout_for(dist: BinnedDistribution, strike: float, c: float = 0.1) -> BinaryLayout:
    n_bits = int(math.log2(dist.n))
    if 2**n_bits != dist.n:
        raise ValueError("binary encoding needs a power-of-two bin count")
    lo = float(dist.bin_centers[0])
    scaled = (strike - lo) / dist.step
    return BinaryLayout(n_bits, rescale_strike(dist, strike), scaled, c)


# -- distribution loading ------------------------------------------------------

def _multiplexed_ry(controls: list[int], target: int, angles: np.ndarray) -> list[Gate]:
    """Uniformly controlled RY: rotation angles[i] when the controls read i."""
    if not controls:
        if abs(angles[0]) < 1e-14:
            return []
        return [ry(target, float(angles[0]))]
    half = angles.size // 2
    low, high = angles[:half], angles[half:]
    plus, minus = (low + high) / 2, (low - high) / 2
    top = controls[-1]
    rest = controls[:-1]
    gates = _multiplexed_ry(rest, target, plus)
    gates.append(cx(top, target))
    gates += _multiplexed_ry(rest, target, minus)
    gates.append(cx(top, target))
    return gates


def _cancel_adjacent_cx(gates: list[Gate]) -> list[Gate]:
    out: list[Gate] = []
    for g in gates:
        if out and g.kind == "cx" and out[-1] == g:
            out.pop()
        else:
            out.append(g)
    return out


def load_distribution_exact(probabilities: np.ndarray, native: Native | None = None) -> list[Gate]:
    """Prepare sum_i sqrt(p_i) |i> with a binary tree of multiplexed RY rotations.

    Replaces adversarial training for distribution loading: the state is exact
    by construction, which is what the robustness comparison needs.
    """
    p = np.asarray(probabilities, dtype=float)
    n_bits = int(math.log2(p.size))
    if 2**n_bits != p.size:
        raise ValueError("need a power-of-two number of bins")
    if abs(p.sum() - 1.0) > 1e-9 or np.any(p < 0):
        raise ValueError("not a probability vector")
    gates: list[Gate] = []
    idx = np.arange(p.size)
    # level l rotates qubit (n-1-l), controlled on the l more significant qubits
    for level in range(n_bits):
        target = n_bits - 1 - level
        controls = [n_bits - 1 - j for j in range(level)]
        angles = np.zeros(2**level)
        for branch in range(2**level):
            mask = np.ones(p.size, dtype=bool)
            for j, ctrl in enumerate(controls):
                mask &= ((idx >> ctrl) & 1) == ((branch >> j) & 1)
            upper = p[mask & (((idx >> target) & 1) == 1)].sum()
            lower = p[mask].sum() - upper
            angles[branch] = 2 * math.atan2(math.sqrt(max(upper, 0.0)), math.sqrt(max(lower, 0.0)))
        gates += _multiplexed_ry(controls, target, angles)
    gates = _cancel_adjacent_cx(gates)
    if native is not None:
        return compile_circuit(gates, native)
    return gates


# -- comparator ----------------------------------------------------------------

def twos_complement_bits(k_threshold: int, n: int) -> list[int]:
    """Bits t[0..n-1] (LSB first) of 2^n - K'."""
    value = (2**n - k_threshold) % 2**n
    return [(value >> j) & 1 for j in range(n)]


def _or_gate(a: int, b: int, out: int) -> list[Gate]:
    """out ^= (a OR b), De Morgan form: X-conjugated Toffoli plus an X on out."""
    return [x(a), x(b), ccx(a, b, out), x(out), x(a), x(b)]


def build_comparator(layout: BinaryLayout, native: Native | None = None) -> list[Gate]:
    """Carry-chain comparator: flag <- [e >= K'] via the two's complement of K'.

    t[0]=1 contributes a CNOT; t[j]=0 a Toffoli (carry AND bit); t[j]=1 an OR
    gate. The last carry drives the flag. Degenerate thresholds short-circuit
    to a constant flag with no chain at all.
    """
    n = layout.n
    if layout.k_threshold == 0:
        gates = [x(layout.flag)]
        return compile_circuit(gates, native) if native is not None else gates
    if layout.k_threshold == layout.bins:
        return []
    t = twos_complement_bits(layout.k_threshold, n)
    carries = layout.carries
    gates: list[Gate] = []
    if t[0] == 1:
        gates.append(cx(0, carries[0]))
    for j in range(1, n):
        if t[j] == 0:
            gates.append(ccx(j, carries[j - 1], carries[j]))
        else:
            gates += _or_gate(j, carries[j - 1], carries[j])
    gates.append(cx(carries[n - 1], layout.flag))
    if native is not None:
        return compile_circuit(gates, native)
    return gates


# -- payoff rotations ----------------------------------------------------------

def payoff_slope(layout: BinaryLayout) -> float:
    """2c / (e_max - K'), the per-unit-of-e rotation amplitude.

    Degenerates to 0 when the strike sits on the top bin: the only flagged
    bin then contributes zero payoff and no rotation is needed.
    """
    span = layout.e_max - layout.strike_scaled
    if span <= 0:
        return 0.0
    return 2 * layout.c / span


def build_payoff_binary(layout: BinaryLayout, native: Native | None = None) -> list[Gate]:
    """Rotation block: base RY(2 g0), flag-controlled offset, per-bit ccRY ladder.

    Produces P(payoff=1) = sum_i p_i sin^2(g0 + g(i) [e_i >= K']) with
    g0 = pi/4 - c and g(i) = 2c (e_i - K') / (e_max - K'), K' kept real-valued
    in the angles.
    """
    g0 = math.pi / 4 - layout.c
    slope = payoff_slope(layout)
    gates: list[Gate] = [ry(layout.payoff, 2 * g0)]
    gates.append(cry(layout.flag, layout.payoff, -2 * slope * layout.strike_scaled))
    for j in range(layout.n):
        gates += ccry(layout.flag, j, layout.payoff, 2 * slope * 2**j)
    if native in (Native.CNOT, Native.MIXED):
        return compile_circuit(gates, Native.CNOT)
    if native is Native.ISWAP:
        return compile_circuit(gates, Native.ISWAP)
    return gates


def closed_form_p1(layout: BinaryLayout, probabilities: np.ndarray) -> float:
    """Exact (un-Taylored) P(payoff=1) the circuit should produce."""
    g0 = math.pi / 4 - layout.c
    slope = payoff_slope(layout)
    total = 0.0
    for e, p in enumerate(probabilities):
        g = slope * (e - layout.strike_scaled) if e >= layout.k_threshold else 0.0
        total += p * math.sin(g0 + g) ** 2
    return total


def invert_payoff(p1: float, layout: BinaryLayout, dist: BinnedDistribution) -> float:
    """Recover the expected payoff from P(payoff=1), first-order Taylor inversion."""
    scaled_sum = (p1 - 0.5 + layout.c) / (2 * layout.c) * (layout.e_max - layout.strike_scaled)
    return scaled_sum * dist.step


def build_pricing_circuit(
    layout: BinaryLayout,
    dist: BinnedDistribution,
    native: Native | None = None,
) -> list[Gate]:
    """A = loader + comparator + payoff rotations."""
    return (
        load_distribution_exact(dist.probabilities, native)
        + build_comparator(layout, native)
        + build_payoff_binary(layout, native)
    )


# -- amplitude estimation operators --------------------------------------------

def build_spsi0(layout: BinaryLayout) -> list[Gate]:
    return [z(layout.payoff)]


def _mcx_chain(controls: list[int], scratch: list[int], target: int) -> list[Gate]:
    """Multi-controlled X from a Toffoli ladder; 2c-3 Toffolis with c-2 scratch."""
    c = len(controls)
    if c == 1:
        return [cx(controls[0], target)]
    if c == 2:
        return [ccx(controls[0], controls[1], target)]
    if len(scratch) < c - 2:
        raise ValueError("need c-2 scratch qubits")
    compute = [ccx(controls[0], controls[1], scratch[0])]
    for i in range(c - 3):
        compute.append(ccx(controls[i + 2], scratch[i], scratch[i + 1]))
    top = ccx(controls[-1], scratch[c - 3], target)
    return compute + [top] + list(reversed(compute))


def build_s0_binary(layout: BinaryLayout, native: Native | None = None) -> list[Gate]:
    """Reflection about |0...0> of the value register and payoff ancilla.

    Comparator carries are provably |0> at this point in Q, so they double as
    the scratch for the Toffoli ladder and nothing needs uncomputing besides
    the ladder itself.
    """
    value = list(range(layout.n))
    involved = value + [layout.payoff]
    gates: list[Gate] = [x(q) for q in involved]
    gates.append(h(layout.payoff))
    gates += _mcx_chain(value, list(layout.carries), layout.payoff)
    gates.append(h(layout.payoff))
    gates += [x(q) for q in involved]
    if native is not None:
        return compile_circuit(gates, native)
    return gates


def build_q_binary(
    layout: BinaryLayout,
    a_gates: list[Gate],
    native: Native | None = None,
) -> list[Gate]:
    """Q = A S0 A^dag S_psi0 up to a global sign."""
    return (
        build_spsi0(layout)
        + dagger_circuit(a_gates)
        + build_s0_binary(layout, native)
        + list(a_gates)
    )


def build_ae_circuit(
    layout: BinaryLayout,
    dist: BinnedDistribution,
    power: int,
    native: Native | None = None,
) -> list[Gate]:
    """Full measured circuit A . Q^m."""
    a_gates = build_pricing_circuit(layout, dist, native)
    gates = list(a_gates)
    if power > 0:
        q_block = build_q_binary(layout, a_gates, native)
        for _ in range(power):
            gates.extend(q_block)
    return gates


def ae_problem(
    scenario: MarketScenario,
    n_bins: int,
    c: float = 0.1,
    native: Native | None = Native.CNOT,
    width_sigmas: float = 3.0,
):
    """Package the binary pricing circuits for the amplitude-estimation runner.

    Every bitstring is a valid outcome (no post-selection exists here), so
    accepted always equals shots.
    """
    from .estimation import AEProblem

    dist = discretize(scenario, n_bins, width_sigmas)
    layout = layout_for(dist, scenario.strike, c)
    a_gates = build_pricing_circuit(layout, dist, native)
    q_block = build_q_binary(layout, a_gates, native)
    cache: dict[int, list[Gate]] = {}

    def circuit_for_power(m: int) -> list[Gate]:
        if m not in cache:
            gates = list(a_gates)
            for _ in range(m):
                gates.extend(q_block)
            cache[m] = gates
        return cache[m]

    def count_good(bits: np.ndarray) -> tuple[int, int]:
        return int(bits[:, layout.payoff].sum()), bits.shape[0]

    return AEProblem(
        circuit_for_power=circuit_for_power,
        num_qubits=layout.num_qubits,
        count_good=count_good,
        rescale=lambda a: invert_payoff(a, layout, dist),
    )


def estimate_payoff_binary(
    scenario: MarketScenario,
    n_bins: int,
    noise: NoiseModel,
    shots: int,
    seed,
    c: float = 0.1,
    native: Native | None = Native.CNOT,
    width_sigmas: float = 3.0,
) -> float:
    """Sample the pricing circuit and invert P(payoff=1) to a payoff estimate."""
    if shots <= 0:
        raise ValueError("shots must be positive")
    dist = discretize(scenario, n_bins, width_sigmas)
    layout = layout_for(dist, scenario.strike, c)
    circuit = build_pricing_circuit(dist=dist, layout=layout, native=native)
    bits = run_trajectories(circuit, layout.num_qubits, noise, shots, seed)
    p1 = float(bits[:, layout.payoff].mean())
    return invert_payoff(p1, layout, dist)
