"""Classical Black-Scholes side: log-normal terminal prices, binning, payoff oracles.

All functions here are pure; ``sample_paths`` takes an explicit seed so
parallel callers own disjoint streams.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr

_PRICE_FLOOR = 1e-12


@dataclass(frozen=True)
class MarketScenario:
    """Black-Scholes inputs: spot, volatility, rate, maturity, strike."""

    spot: float
    volatility: float
    rate: float
    maturity: float
    strike: float

    def __post_init__(self):
        if self.spot <= 0:
            raise ValueError("spot must be positive")
        if self.volatility <= 0:
            raise ValueError("volatility must be positive")
        if self.maturity <= 0:
            raise ValueError("maturity must be positive")
        if self.strike < 0:
            raise ValueError("strike must be non-negative")


#: The worked example used throughout the benchmark suite.
PAPER_SCENARIO = MarketScenario(spot=2.0, volatility=0.4, rate=0.05, maturity=0.1, strike=1.9)


@dataclass(frozen=True)
class BinnedDistribution:
    """Equispaced bin centers with a probability for each bin."""

    bin_centers: np.ndarray
    probabilities: np.ndarray

    def __post_init__(self):
        centers = np.asarray(self.bin_centers, dtype=float)
        probs = np.asarray(self.probabilities, dtype=float)
        object.__setattr__(self, "bin_centers", centers)
        object.__setattr__(self, "probabilities", probs)
        if centers.ndim != 1 or centers.size < 2 or centers.size != probs.size:
            raise ValueError("need n >= 2 matching centers and probabilities")
        diffs = np.diff(centers)
        if np.any(diffs <= 0):
            raise ValueError("bin centers must be strictly increasing")
        if not np.allclose(diffs, diffs[0], rtol=1e-9, atol=1e-12 * abs(centers[-1])):
            raise ValueError("bin centers must be equispaced")
        if np.any(probs < 0):
            raise ValueError("probabilities must be non-negative")
        if abs(probs.sum() - 1.0) > 1e-12:
            raise ValueError("probabilities must sum to 1")

    @property
    def n(self) -> int:
        return self.bin_centers.size

    @property
    def step(self) -> float:
        return float(self.bin_centers[1] - self.bin_centers[0])


def lognormal_params(scenario: MarketScenario) -> tuple[float, float]:
    """(mu, sigma) of ln S_T: mu = ln S0 + (r - sigma^2/2) T, sigma = vol sqrt(T)."""
    mu = math.log(scenario.spot) + (scenario.rate - scenario.volatility**2 / 2) * scenario.maturity
    sig = scenario.volatility * math.sqrt(scenario.maturity)
    return mu, sig


def lognormal_moments(scenario: MarketScenario) -> tuple[float, float]:
    """Mean and standard deviation of S_T itself (not of its log)."""
    mu, sig = lognormal_params(scenario)
    mean = math.exp(mu + sig**2 / 2)
    std = mean * math.sqrt(math.expm1(sig**2))
    return mean, std


def sample_paths(scenario: MarketScenario, count: int, seed) -> np.ndarray:
    """``count`` i.i.d. draws of S_T; closed-form, no path discretization."""
    if count <= 0:
        raise ValueError("count must be positive")
    rng = np.random.default_rng(seed)
    mu, sig = lognormal_params(scenario)
    return np.exp(mu + sig * rng.standard_normal(count))


def lognormal_cdf(values: np.ndarray, scenario: MarketScenario) -> np.ndarray:
    mu, sig = lognormal_params(scenario)
    values = np.asarray(values, dtype=float)
    out = np.zeros_like(values)
    pos = values > 0
    out[pos] = ndtr((np.log(values[pos]) - mu) / sig)
    return out


def discretize(scenario: MarketScenario, n_bins: int, width_sigmas: float = 3.0) -> BinnedDistribution:
    """Bin the terminal-price distribution on a symmetric window around its mean.

    Centers span [mean - w*std, mean + w*std] (lower edge floored at a small
    positive value); each bin's probability is the log-normal CDF mass of
    [center - h/2, center + h/2], renormalized to sum to one.
    """
    if n_bins < 2:
        raise ValueError("n_bins must be at least 2")
    mean, std = lognormal_moments(scenario)
    lo = max(_PRICE_FLOOR, mean - width_sigmas * std)
    hi = mean + width_sigmas * std
    centers = np.linspace(lo, hi, n_bins)
    half = (hi - lo) / (n_bins - 1) / 2
    edges = np.concatenate([[centers[0] - half], centers[:-1] + half, [centers[-1] + half]])
    probs = np.diff(lognormal_cdf(edges, scenario))
    probs = np.clip(probs, 0.0, None)
    probs /= probs.sum()
    return BinnedDistribution(centers, probs)


def analytical_payoff(scenario: MarketScenario) -> float:
    """Closed-form European call value S0 Phi(d1) - K e^{-rT} Phi(d2)."""
    s0, sig, r, t_mat, k = (
        scenario.spot, scenario.volatility, scenario.rate, scenario.maturity, scenario.strike,
    )
    if k == 0.0:
        return s0
    sig_sqrt = sig * math.sqrt(t_mat)
    d1 = (math.log(s0 / k) + (r + sig**2 / 2) * t_mat) / sig_sqrt
    d2 = d1 - sig_sqrt
    return float(s0 * ndtr(d1) - k * math.exp(-r * t_mat) * ndtr(d2))


def binned_payoff(dist: BinnedDistribution, strike: float) -> float:
    """Discretized expected payoff: sum_i p_i max(0, S_i - K)."""
    return float(np.sum(dist.probabilities * np.maximum(0.0, dist.bin_centers - strike)))
