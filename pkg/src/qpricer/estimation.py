"""Iterative amplitude estimation without phase estimation.

Gaussian-weighted folding of per-round estimates: round j measures
sin^2((2 m_j + 1) theta) with N shots, inverts the arcsin against the 2m_j+1
candidate branches, keeps the candidate closest to the running estimate, and
merges by inverse variance. The mandatory m_0 = 0 round anchors the branch
selection.

Per-round theta uncertainty is z / (2 (2 m_j + 1) sqrt(N)) with
z = Phi^{-1}(1 - alpha/2); when unary post-selection is active, N is the
accepted count of that round.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.special import ndtri

from .simcore import Gate, NoiseModel, run_trajectories


@dataclass(frozen=True)
class RoundRecord:
    """Bookkeeping for one AE round."""

    m: int
    shots: int
    accepted: int
    ones: int

    @property
    def a_hat(self) -> float:
        return self.ones / self.accepted if self.accepted else float("nan")


@dataclass(frozen=True)
class AEEstimate:
    """Folded amplitude estimate after some rounds."""

    theta: float
    delta_theta: float
    confidence: float
    rounds: tuple[RoundRecord, ...] = field(default_factory=tuple)

    def __post_init__(self):
        if not 0.0 <= self.theta <= math.pi / 2 + 1e-12:
            raise ValueError("theta outside [0, pi/2]")
        if self.delta_theta <= 0:
            raise ValueError("delta_theta must be positive")

    @property
    def a(self) -> float:
        return math.sin(self.theta) ** 2

    @property
    def delta_a(self) -> float:
        return abs(math.sin(2 * self.theta)) * self.delta_theta

    @property
    def total_applications(self) -> int:
        """A/A^dag call count: each shot of round m uses 2m+1 of them."""
        return sum(r.shots * (2 * r.m + 1) for r in self.rounds)


def z_value(alpha: float) -> float:
    """Two-sided normal quantile Phi^{-1}(1 - alpha/2)."""
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must be in (0, 1)")
    return float(ndtri(1.0 - alpha / 2.0))


def multiple_values_arcsin(a: float, m: int) -> np.ndarray:
    """The 2m+1 candidate angles theta with sin^2((2m+1) theta) = a.

    Candidates are [theta_0, pi - theta_0, pi + theta_0, ...] / (2m+1) with
    theta_0 = arcsin(sqrt(a)); ``a`` is clamped into [0, 1] against float
    noise.
    """
    if m < 0:
        raise ValueError("m must be non-negative")
    a = min(1.0, max(0.0, a))
    theta0 = math.asin(math.sqrt(a))
    out = np.empty(2 * m + 1)
    out[0] = theta0
    for k in range(1, m + 1):
        out[2 * k - 1] = k * math.pi - theta0
        out[2 * k] = k * math.pi + theta0
    return out / (2 * m + 1)


def initial_round(a_hat: float, n_shots: int, alpha: float = 0.05,
                  record: RoundRecord | None = None) -> AEEstimate:
    """The mandatory m=0 anchor round."""
    if n_shots <= 0:
        raise ValueError("need at least one accepted shot")
    theta = math.asin(math.sqrt(min(1.0, max(0.0, a_hat))))
    delta = z_value(alpha) / (2 * math.sqrt(n_shots))
    rounds = (record,) if record is not None else (RoundRecord(0, n_shots, n_shots, round(a_hat * n_shots)),)
    return AEEstimate(theta, delta, 1.0 - alpha, rounds)


def ae_round(prev: AEEstimate, m_j: int, n_shots: int, a_hat: float,
             record: RoundRecord | None = None) -> AEEstimate:
    """Fold one round into the running estimate.

    Candidate selection: the arcsin branch closest to the previous folded
    theta; ties resolve to the smaller angle. Zero accepted shots skip the
    round with a warning, leaving the estimate unchanged.
    """
    if n_shots <= 0:
        warnings.warn(f"AE round m={m_j} had zero accepted shots; skipped", RuntimeWarning)
        rec = record if record is not None else RoundRecord(m_j, 0, 0, 0)
        return AEEstimate(prev.theta, prev.delta_theta, prev.confidence, prev.rounds + (rec,))
    alpha = 1.0 - prev.confidence
    candidates = multiple_values_arcsin(a_hat, m_j)
    gaps = np.abs(candidates - prev.theta)
    best = np.lexsort((candidates, gaps))[0]
    theta_j = float(candidates[best])
    delta_j = z_value(alpha) / (2 * (2 * m_j + 1) * math.sqrt(n_shots))
    w_prev = 1.0 / prev.delta_theta**2
    w_new = 1.0 / delta_j**2
    theta = (theta_j * w_new + prev.theta * w_prev) / (w_new + w_prev)
    delta = (w_new + w_prev) ** -0.5
    theta = min(max(theta, 0.0), math.pi / 2)
    rec = record if record is not None else RoundRecord(m_j, n_shots, n_shots, round(a_hat * n_shots))
    return AEEstimate(theta, delta, prev.confidence, prev.rounds + (rec,))


def schedule(kind: str, rounds: int) -> list[int]:
    """Q powers per round: linear [0..J] or exponential [0, 1, 2, 4, ..., 2^J]."""
    if rounds < 0:
        raise ValueError("J must be non-negative")
    if kind == "linear":
        return list(range(rounds + 1))
    if kind in ("exp", "exponential"):
        return [0] + [2**j for j in range(rounds + 1)]
    raise ValueError(f"unknown schedule kind {kind!r}")


def theoretical_uncertainty(m_schedule: Sequence[int], n_shots: int, alpha: float = 0.05) -> float:
    """Global folded uncertainty z/sqrt(N) (sum (2 m_j + 1)^2)^{-1/2}.

    Diagnostic companion to the executable algorithm above; it omits the
    Wald sqrt(a(1-a)) factor and the per-round 1/2, by construction.
    """
    if not m_schedule or m_schedule[0] != 0:
        raise ValueError("schedule must start with m_0 = 0")
    weight = sum((2 * m + 1) ** 2 for m in m_schedule)
    return z_value(alpha) / math.sqrt(n_shots) * weight**-0.5


def mitigation_bound(n: int, m_last: int, gate_law: tuple[float, float],
                     schedule_kind: str = "linear") -> float:
    """Largest per-gate error that still leaves a quantum advantage.

    p_e < 1 - m_J^{(2 - 4 alpha-hat) / ((a n + b) m_J)} with alpha-hat = 3/4
    for the linear schedule and 1 for the exponential one. Degenerates to 0
    at m_J = 1 (1^x = 1), where the bound carries no information.
    """
    if m_last < 1:
        raise ValueError("m_last must be >= 1")
    a_coef, b_coef = gate_law
    alpha_hat = 0.75 if schedule_kind == "linear" else 1.0
    exponent = (2 - 4 * alpha_hat) / ((a_coef * n + b_coef) * m_last)
    return 1.0 - m_last**exponent


# -- experiment driver ----------------------------------------------------------

@dataclass(frozen=True)
class AEProblem:
    """Everything the schedule runner needs to know about one encoding.

    ``circuit_for_power(m)`` builds the measured circuit for Q^m A;
    ``count_good(bits)`` returns (ones, accepted) after any post-selection.
    """

    circuit_for_power: Callable[[int], list[Gate]]
    num_qubits: int
    count_good: Callable[[np.ndarray], tuple[int, int]]
    rescale: Callable[[float], float] = lambda a: a


def fold_records(records: Sequence[RoundRecord], alpha: float = 0.05) -> list[AEEstimate]:
    """Running folded estimates after each round of measured records."""
    if not records or records[0].m != 0:
        raise ValueError("records must start with the m_0 = 0 anchor")
    if records[0].accepted == 0:
        raise ValueError("anchor round m=0 had zero accepted shots")
    out: list[AEEstimate] = []
    est = initial_round(records[0].a_hat, records[0].accepted, alpha, records[0])
    out.append(est)
    for rec in records[1:]:
        est = ae_round(est, rec.m, rec.accepted, rec.a_hat if rec.accepted else 0.0, rec)
        out.append(est)
    return out


def measure_rounds(problem: AEProblem, noise: NoiseModel, shots: int,
                   m_schedule: Sequence[int], seed=None) -> list[RoundRecord]:
    """Sample every round of the schedule (no folding)."""
    if not m_schedule or m_schedule[0] != 0:
        raise ValueError("schedule must start with m_0 = 0")
    ss = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    seeds = ss.spawn(len(m_schedule))
    records = []
    for j, m in enumerate(m_schedule):
        bits = run_trajectories(problem.circuit_for_power(m), problem.num_qubits,
                                noise, shots, seeds[j])
        ones, accepted = problem.count_good(bits)
        records.append(RoundRecord(m, shots, accepted, ones))
    return records


def run_ae(problem: AEProblem, noise: NoiseModel, shots: int,
           m_schedule: Sequence[int], alpha: float = 0.05, seed=None) -> AEEstimate:
    """Run the full schedule; per-round uncertainties use accepted counts."""
    records = measure_rounds(problem, noise, shots, m_schedule, seed)
    return fold_records(records, alpha)[-1]
