"""Experiment configuration: defaults, config-file parsing, flag merging."""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from pathlib import Path

from ..market import MarketScenario, PAPER_SCENARIO
from ..simcore import Native

DEFAULT_EPS_GRID = (0.0, 0.001, 0.002, 0.003, 0.004, 0.005)


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything a figure runner needs; see the CLI for the matching flags."""

    scenario: MarketScenario = PAPER_SCENARIO
    encoding: str = "both"              # unary | binary | both
    n_bins: int = 8
    eps_grid: tuple[float, ...] = DEFAULT_EPS_GRID
    shots: int = 10_000
    repetitions: int = 100
    schedule: str = "linear"            # linear | exp
    rounds: int = 4                     # J
    c: float = 0.1
    native: Native = Native.CNOT
    seed: int = 1234
    out: str | None = None

    def __post_init__(self):
        if self.repetitions < 1:
            raise ValueError("repetitions must be >= 1")
        if self.shots < 1:
            raise ValueError("shots must be >= 1")
        if self.encoding not in ("unary", "binary", "both"):
            raise ValueError(f"unknown encoding {self.encoding!r}")
        if self.schedule not in ("linear", "exp", "exponential"):
            raise ValueError(f"unknown schedule {self.schedule!r}")

    @property
    def encodings(self) -> tuple[str, ...]:
        return ("unary", "binary") if self.encoding == "both" else (self.encoding,)


_SCENARIO_KEYS = ("spot", "vol", "rate", "maturity", "strike")
_KEYS = (
    "encoding", "bins", "eps", "shots", "reps", "schedule", "rounds",
    "c", "native", "seed", "out",
) + _SCENARIO_KEYS


def parse_config_file(path: str | Path) -> dict[str, str]:
    """Flat ``key = value`` lines; '#' starts a comment; keys mirror the flags."""
    values: dict[str, str] = {}
    for raw in Path(path).read_text().splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"bad config line (need key = value): {raw!r}")
        key, val = (part.strip() for part in line.split("=", 1))
        if key not in _KEYS:
            raise ValueError(f"unknown config key {key!r}")
        values[key] = val
    return values


def build_config(file_values: dict[str, str], flag_values: dict[str, object]) -> ExperimentConfig:
    """Merge config-file values with CLI flags; flags win."""
    merged: dict[str, object] = dict(file_values)
    merged.update({k: v for k, v in flag_values.items() if v is not None})
    scen = PAPER_SCENARIO
    scen_kwargs = {}
    for key, attr in (("spot", "spot"), ("vol", "volatility"), ("rate", "rate"),
                      ("maturity", "maturity"), ("strike", "strike")):
        if key in merged:
            scen_kwargs[attr] = float(merged.pop(key))
    if scen_kwargs:
        scen = replace(scen, **scen_kwargs)
    cfg = ExperimentConfig(scenario=scen)
    mapping = {
        "encoding": ("encoding", str),
        "bins": ("n_bins", int),
        "shots": ("shots", int),
        "reps": ("repetitions", int),
        "schedule": ("schedule", str),
        "rounds": ("rounds", int),
        "c": ("c", float),
        "seed": ("seed", int),
        "out": ("out", str),
    }
    kwargs: dict[str, object] = {}
    for key, (attr, cast) in mapping.items():
        if key in merged:
            kwargs[attr] = cast(merged[key])
    if "eps" in merged:
        raw = merged["eps"]
        if isinstance(raw, str):
            kwargs["eps_grid"] = tuple(float(tok) for tok in raw.split(",") if tok.strip())
        else:
            kwargs["eps_grid"] = tuple(raw)  # type: ignore[arg-type]
    if "native" in merged:
        kwargs["native"] = Native(str(merged["native"]))
    return replace(cfg, **kwargs)
