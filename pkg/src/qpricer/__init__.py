"""Quantum option pricing at desk scale.

European options under Black-Scholes, priced by two quantum circuit
families — a one-hot (unary) encoding with native post-selection and a
binary encoding with a comparator — simulated exactly or under a
depolarizing + readout noise model, with iterative amplitude estimation
on top. The ``bench`` subpackage reproduces the benchmark figures as CSV.
"""

from .errors import AllShotsRejectedError
from .market import (
    BinnedDistribution,
    MarketScenario,
    PAPER_SCENARIO,
    analytical_payoff,
    binned_payoff,
    discretize,
    lognormal_params,
    sample_paths,
)
from .simcore import Gate, Native, NoiseModel, StateVector

__all__ = [
    "AllShotsRejectedError", "BinnedDistribution", "Gate", "MarketScenario",
    "Native", "NoiseModel", "PAPER_SCENARIO", "StateVector",
    "analytical_payoff", "binned_payoff", "discretize", "lognormal_params",
    "sample_paths",
]

__version__ = "0.1.0"
