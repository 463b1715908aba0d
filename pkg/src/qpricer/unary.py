"""One-hot (unary) encoding: distributor, payoff rotations, AE operators, post-selection.

Layout: bins 0..n-1 live on qubits 0..n-1 ("qubit i = bin i"), the payoff
ancilla is qubit n, and amplitude is seeded on the start qubit floor(n/2).
The distributor cascades partial-SWAP gates from the start qubit outward;
edge j carries the gate between qubits j and j+1.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import AllShotsRejectedError
from .market import BinnedDistribution, MarketScenario, discretize
from .simcore import (
    Gate,
    Native,
    NoiseModel,
    compile_circuit,
    cry,
    cx,
    cz,
    dagger_circuit,
    h,
    piswap,
    pswap,
    run_trajectories,
    x,
    z,
)


@dataclass(frozen=True)
class UnaryLayout:
    """Qubit roles for an n-bin unary register plus one payoff ancilla."""

    n: int
    strike_index: int  # smallest i with S_i > K

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("need at least 2 bins")
        if not 0 <= self.strike_index <= self.n:
            raise ValueError("strike index out of range")

    @property
    def ancilla(self) -> int:
        return self.n

    @property
    def start(self) -> int:
        return self.n // 2

    @property
    def num_qubits(self) -> int:
        return self.n + 1


def strike_index(dist: BinnedDistribution, strike: float) -> int:
    """Smallest bin index whose center lies strictly above the strike."""
    return int(np.searchsorted(dist.bin_centers, strike, side="right"))


def layout_for(dist: BinnedDistribution, strike: float) -> UnaryLayout:
    return UnaryLayout(dist.n, strike_index(dist, strike))


@dataclass(frozen=True)
class DistributorAngles:
    """Partial-SWAP angles; ``thetas[j]`` drives edge (j, j+1)."""

    thetas: np.ndarray

    def __post_init__(self):
        th = np.asarray(self.thetas, dtype=float)
        object.__setattr__(self, "thetas", th)
        if np.any(th < -1e-12) or np.any(th > math.pi + 1e-12):
            raise ValueError("angles must lie in [0, pi]")

    @property
    def n(self) -> int:
        return self.thetas.size + 1


def solve_angles(dist: BinnedDistribution) -> DistributorAngles:
    """Solve the cascade angles so the distributor reproduces the target bins.

    Equivalent to back-substituting the amplitude-ratio relations from both
    edges inward (tan^2(theta/2) = p_edge/p_neighbor at the rims, one cos^2
    factor per interior step), but written in terms of cumulative masses:
    each partial swap splits the amplitude reaching it into a kept share and
    an outward share, so tan(theta/2) = sqrt(outward mass / kept mass).
    atan2 keeps the solver total, with exact 0 or pi angles at empty bins.
    """
    p = dist.probabilities
    n = dist.n
    s = n // 2
    left_cum = np.cumsum(p)                 # C_j = p_0 + ... + p_j
    right_cum = np.cumsum(p[::-1])[::-1]    # D_j = p_j + ... + p_{n-1}
    thetas = np.zeros(n - 1)
    for j in range(s):  # left edges (j, j+1), receiver j
        kept = right_cum[s] if j == s - 1 else p[j + 1]
        thetas[j] = 2 * math.atan2(math.sqrt(left_cum[j]), math.sqrt(kept))
    for j in range(s, n - 1):  # right edges (j, j+1), receiver j+1
        thetas[j] = 2 * math.atan2(math.sqrt(right_cum[j + 1]), math.sqrt(p[j]))
    return DistributorAngles(thetas)


def _distributor_edges(n: int) -> list[tuple[int, int]]:
    """(edge, receiver) pairs in firing order, interleaving the two arms."""
    s = n // 2
    left = [(j, j) for j in range(s - 1, -1, -1)]      # edge (j, j+1), receiver j
    right = [(j, j + 1) for j in range(s, n - 1)]      # edge (j, j+1), receiver j+1
    order: list[tuple[int, int]] = []
    for layer in range(max(len(left), len(right) + 1)):
        if layer < len(left):
            order.append(left[layer])
        if 0 <= layer - 1 < len(right):
            order.append(right[layer - 1])
    assert len(order) == n - 1
    return order


def build_distributor(
    angles: DistributorAngles,
    native: Native | None = None,
    include_seed_x: bool = True,
) -> list[Gate]:
    """Amplitude distributor D: X on the start qubit, then cascaded partial swaps.

    Under the iSWAP and mixed native sets the partial swaps are emitted as
    partial-iSWAPs directly; the extra -i phases per hop leave every measured
    probability (and the AE dynamics) unchanged while saving the single-qubit
    corrections.
    """
    n = angles.n
    s = n // 2
    gates: list[Gate] = [x(s)] if include_seed_x else []
    use_iswap = native in (Native.ISWAP, Native.MIXED)
    for edge, receiver in _distributor_edges(n):
        giver = edge + 1 if receiver == edge else edge
        if use_iswap:
            gates.append(piswap(receiver, giver, angles.thetas[edge]))
        else:
            gates.append(pswap(receiver, giver, angles.thetas[edge]))
    if native is Native.CNOT:
        return compile_circuit(gates, Native.CNOT)
    return gates


def payoff_angle(center: float, strike: float, s_max: float) -> float:
    """phi_i = 2 arcsin sqrt((S_i - K)/(S_max - K))."""
    ratio = (center - strike) / (s_max - strike)
    return 2 * math.asin(math.sqrt(min(max(ratio, 0.0), 1.0)))


def build_payoff(
    layout: UnaryLayout,
    dist: BinnedDistribution,
    strike: float,
    native: Native | None = None,
) -> list[Gate]:
    """Controlled-RY ladder writing each above-strike bin's payoff onto the ancilla."""
    s_max = float(dist.bin_centers[-1])
    if layout.strike_index >= layout.n or s_max <= strike:
        return []  # strike above every bin: empty rotation list, payoff 0
    gates = [
        cry(i, layout.ancilla, payoff_angle(float(dist.bin_centers[i]), strike, s_max))
        for i in range(layout.strike_index, layout.n)
    ]
    if native in (Native.CNOT, Native.MIXED):
        return compile_circuit(gates, Native.CNOT)
    if native is Native.ISWAP:
        return compile_circuit(gates, Native.ISWAP)
    return gates


def build_spsi0(layout: UnaryLayout) -> list[Gate]:
    """Oracle reflection: sign flip on the bad (ancilla=0) branch, as Z on the ancilla."""
    return [z(layout.ancilla)]


def build_s0(layout: UnaryLayout, native: Native | None = None) -> list[Gate]:
    """Reflection about the unary seed state |1_start, 0_anc>: X CZ X on (start, ancilla)."""
    anc = layout.ancilla
    gates = [x(anc), cz(layout.start, anc), x(anc)]
    if native in (Native.CNOT, Native.MIXED):
        return [x(anc), h(anc), cx(layout.start, anc), h(anc), x(anc)]
    if native is Native.ISWAP:
        return compile_circuit(gates, Native.ISWAP)
    return gates


def build_q(
    layout: UnaryLayout,
    angles: DistributorAngles,
    payoff_gates: list[Gate],
    native: Native | None = None,
) -> list[Gate]:
    """One Grover-like AE block Q = A S0 A^dag S_psi0 (global sign dropped).

    A excludes the initial X: the reflection S0 is taken about the unary seed
    state the algorithm actually starts from.
    """
    a_gates = build_distributor(angles, native, include_seed_x=False) + list(payoff_gates)
    return (
        build_spsi0(layout)
        + dagger_circuit(a_gates)
        + build_s0(layout, native)
        + a_gates
    )


def build_ae_circuit(
    layout: UnaryLayout,
    angles: DistributorAngles,
    payoff_gates: list[Gate],
    power: int,
    native: Native | None = None,
) -> list[Gate]:
    """Full measured circuit X . A . Q^m."""
    a_gates = build_distributor(angles, native, include_seed_x=False) + list(payoff_gates)
    gates = [x(layout.start)] + a_gates
    if power > 0:
        q_block = build_q(layout, angles, payoff_gates, native)
        for _ in range(power):
            gates.extend(q_block)
    return gates


@dataclass(frozen=True)
class PostselectResult:
    """Decoded accepted shots: bin index and ancilla bit per shot, plus the rate."""

    bins: np.ndarray
    ancilla: np.ndarray
    acceptance_rate: float

    @property
    def accepted(self) -> int:
        return int(self.bins.size)


def postselect(bits: np.ndarray, layout: UnaryLayout) -> PostselectResult:
    """Keep shots whose first n bits are one-hot; decode bin = position of the 1."""
    bits = np.asarray(bits, dtype=np.uint8)
    if bits.ndim == 1:
        bits = bits[None, :]
    if bits.shape[1] != layout.num_qubits:
        raise ValueError("bitstring length must be n+1")
    register = bits[:, : layout.n]
    keep = register.sum(axis=1) == 1
    bins = np.argmax(register[keep], axis=1)
    anc = bits[keep, layout.ancilla]
    return PostselectResult(bins.astype(np.int64), anc.astype(np.uint8), float(keep.mean()))


def ae_problem(
    scenario: MarketScenario,
    n_bins: int,
    native: Native | None = Native.CNOT,
    width_sigmas: float = 3.0,
):
    """Package the unary pricing circuits for the amplitude-estimation runner.

    Good counts come from post-selected shots only, so the runner's per-round
    uncertainties automatically use accepted counts.
    """
    from .estimation import AEProblem

    dist = discretize(scenario, n_bins, width_sigmas)
    layout = layout_for(dist, scenario.strike)
    angles = solve_angles(dist)
    payoff_gates = build_payoff(layout, dist, scenario.strike, native)
    s_max = float(dist.bin_centers[-1])
    cache: dict[int, list[Gate]] = {}

    def circuit_for_power(m: int) -> list[Gate]:
        if m not in cache:
            cache[m] = build_ae_circuit(layout, angles, payoff_gates, m, native)
        return cache[m]

    def count_good(bits: np.ndarray) -> tuple[int, int]:
        sel = postselect(bits, layout)
        return int(sel.ancilla.sum()), sel.accepted

    return AEProblem(
        circuit_for_power=circuit_for_power,
        num_qubits=layout.num_qubits,
        count_good=count_good,
        rescale=lambda a: a * (s_max - scenario.strike),
    )


def estimate_payoff_unary(
    scenario: MarketScenario,
    n_bins: int,
    noise: NoiseModel,
    shots: int,
    seed,
    native: Native | None = Native.CNOT,
    width_sigmas: float = 3.0,
) -> tuple[float, float]:
    """Run distributor+payoff for ``shots`` trajectories; post-select; rescale.

    Returns (payoff estimate, acceptance rate). Raises AllShotsRejectedError
    when post-selection leaves nothing.
    """
    if shots <= 0:
        raise ValueError("shots must be positive")
    dist = discretize(scenario, n_bins, width_sigmas)
    layout = layout_for(dist, scenario.strike)
    angles = solve_angles(dist)
    payoff_gates = build_payoff(layout, dist, scenario.strike, native)
    circuit = [x(layout.start)] + build_distributor(angles, native, include_seed_x=False) + payoff_gates
    bits = run_trajectories(circuit, layout.num_qubits, noise, shots, seed)
    sel = postselect(bits, layout)
    if sel.accepted == 0:
        raise AllShotsRejectedError("all shots rejected by unary post-selection")
    s_max = float(dist.bin_centers[-1])
    p_one = float(sel.ancilla.mean())
    return p_one * (s_max - scenario.strike), sel.acceptance_rate
