"""Dense statevector simulator: gates, execution, stochastic noise, oracles."""

from .gates import (
    Gate,
    Native,
    ccry,
    ccx,
    compile_circuit,
    cry,
    cx,
    cz,
    dagger,
    dagger_circuit,
    decompose,
    h,
    matrix,
    piswap,
    pswap,
    rx,
    ry,
    rz,
    s,
    sdg,
    swap,
    t,
    tdg,
    x,
    y,
    z,
)
from .noise import NOISELESS, NoiseModel, run_trajectories, run_trajectory
from .statevector import (
    StateVector,
    apply_gate,
    bits_from_index,
    bits_to_str,
    circuit_depth,
    circuit_unitary,
    equal_up_to_phase,
    run_exact,
    run_statevector,
)
from .density import evolve_density, outcome_distribution

__all__ = [
    "Gate", "Native", "NoiseModel", "NOISELESS", "StateVector",
    "apply_gate", "bits_from_index", "bits_to_str", "ccry", "ccx",
    "circuit_depth", "circuit_unitary", "compile_circuit", "cry", "cx", "cz",
    "dagger", "dagger_circuit", "decompose", "equal_up_to_phase",
    "evolve_density", "h", "matrix", "outcome_distribution", "piswap",
    "pswap", "run_exact", "run_statevector", "run_trajectories",
    "run_trajectory", "rx", "ry", "rz", "s", "sdg", "swap", "t", "tdg",
    "x", "y", "z",
]
