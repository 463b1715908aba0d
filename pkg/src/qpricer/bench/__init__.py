"""Benchmark harness: experiment configs, figure runners, metrics, CLI."""

from .config import ExperimentConfig, build_config, parse_config_file
from .figures import FIGURES, reference_payoff, run_figure, write_csv
from .metrics import binary_empirical, kl_divergence, smoothing_floor, unary_empirical

__all__ = [
    "ExperimentConfig", "FIGURES", "binary_empirical", "build_config",
    "kl_divergence", "parse_config_file", "reference_payoff", "run_figure",
    "smoothing_floor", "unary_empirical", "write_csv",
]
