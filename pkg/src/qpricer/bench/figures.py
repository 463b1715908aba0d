"""Experiment runners that reproduce the benchmark figures as CSV files.

Every runner is deterministic given (config, seed): each (grid point,
repetition) task draws its randomness from a counter-keyed child of the
master seed, so repetitions could run in any order or in parallel without
changing the output.

CSV schemas (all files carry a header row, UTF-8, '.' decimals):

  kl_vs_noise     eps, encoding, kl_mean, kl_median, kl_p15, kl_p85, acceptance_mean
  payoff_vs_noise eps, encoding, err_pct_mean, err_pct_median, err_pct_p15,
                  err_pct_p85, acceptance_mean
  bins_error      bins, payoff, rel_err_pct
  ae_convergence  encoding, round, m, cum_m, applications, payoff_mean,
                  payoff_std, unc_mean, sampling_line, optimal_line,
                  sampling_sigma, optimal_sigma
  ae_noise        eps, encoding, M, err_pct_mean, err_pct_median, err_pct_p15,
                  err_pct_p85, unc_mean, acceptance_last
  ae_bins_sweep   bins, M, err_pct_mean, err_pct_p15, err_pct_p85, unc_mean,
                  acceptance_last
  gate_crossover  bins, unary_total, binary_total
"""
from __future__ import annotations

import math
from pathlib import Path

import numpy as np

from .. import binary, unary
from ..estimation import fold_records, measure_rounds, schedule, z_value
from ..market import binned_payoff, discretize
from ..resources import binary_total_continuous, budget
from ..simcore import NoiseModel, Native, run_trajectories, x
from .config import ExperimentConfig
from .metrics import binary_empirical, kl_divergence, smoothing_floor, unary_empirical

FIGURES = (
    "kl_vs_noise", "payoff_vs_noise", "bins_error", "ae_convergence",
    "ae_noise", "ae_bins_sweep", "gate_crossover",
)

REFERENCE_BINS = 10_000


def _seed(cfg: ExperimentConfig, *key: int) -> np.random.SeedSequence:
    return np.random.SeedSequence(cfg.seed, spawn_key=tuple(key))


def _stats(values) -> dict[str, float]:
    arr = np.asarray(values, dtype=float)
    return {
        "mean": float(arr.mean()),
        "median": float(np.median(arr)),
        "p15": float(np.percentile(arr, 15)),
        "p85": float(np.percentile(arr, 85)),
    }


def reference_payoff(cfg: ExperimentConfig) -> float:
    dist = discretize(cfg.scenario, REFERENCE_BINS)
    return binned_payoff(dist, cfg.scenario.strike)


def _loading_circuit(cfg: ExperimentConfig, encoding: str):
    """(circuit, num_qubits, decode) for the bare distribution loader."""
    dist = discretize(cfg.scenario, cfg.n_bins)
    if encoding == "unary":
        angles = unary.solve_angles(dist)
        circ = unary.build_distributor(angles, cfg.native)
        return dist, circ, dist.n, "unary"
    n_bits = int(math.log2(dist.n))
    circ = binary.load_distribution_exact(dist.probabilities, cfg.native)
    return dist, circ, n_bits, "binary"


def fig_kl_vs_noise(cfg: ExperimentConfig) -> tuple[list[str], list[dict]]:
    rows = []
    floor = smoothing_floor(cfg.shots)
    for ei, eps in enumerate(cfg.eps_grid):
        noise = NoiseModel(eps)
        for ci, enc in enumerate(cfg.encodings):
            dist, circ, q, _ = _loading_circuit(cfg, enc)
            kls, accs = [], []
            for rep in range(cfg.repetitions):
                bits = run_trajectories(circ, q, noise, cfg.shots, _seed(cfg, 1, ei, ci, rep))
                if enc == "unary":
                    emp, acc = unary_empirical(bits, dist.n)
                else:
                    emp, acc = binary_empirical(bits, q), 1.0
                kls.append(kl_divergence(dist.probabilities, emp, floor))
                accs.append(acc)
            st = _stats(kls)
            rows.append({"eps": eps, "encoding": enc, "kl_mean": st["mean"],
                         "kl_median": st["median"], "kl_p15": st["p15"],
                         "kl_p85": st["p85"], "acceptance_mean": float(np.mean(accs))})
    return (["eps", "encoding", "kl_mean", "kl_median", "kl_p15", "kl_p85",
             "acceptance_mean"], rows)


def _pricing_setup(cfg: ExperimentConfig, encoding: str):
    dist = discretize(cfg.scenario, cfg.n_bins)
    strike = cfg.scenario.strike
    if encoding == "unary":
        lay = unary.layout_for(dist, strike)
        ang = unary.solve_angles(dist)
        pay = unary.build_payoff(lay, dist, strike, cfg.native)
        circ = [x(lay.start)] + unary.build_distributor(ang, cfg.native, include_seed_x=False) + pay
        s_max = float(dist.bin_centers[-1])

        def estimate(bits):
            sel = unary.postselect(bits, lay)
            if sel.accepted == 0:
                return float("nan"), 0.0
            return float(sel.ancilla.mean()) * (s_max - strike), sel.acceptance_rate

        return circ, lay.num_qubits, estimate
    lay = binary.layout_for(dist, strike, cfg.c)
    circ = binary.build_pricing_circuit(lay, dist, cfg.native)

    def estimate(bits):
        p1 = float(bits[:, lay.payoff].mean())
        return binary.invert_payoff(p1, lay, dist), 1.0

    return circ, lay.num_qubits, estimate


def fig_payoff_vs_noise(cfg: ExperimentConfig) -> tuple[list[str], list[dict]]:
    ref = reference_payoff(cfg)
    rows = []
    for ei, eps in enumerate(cfg.eps_grid):
        noise = NoiseModel(eps)
        for ci, enc in enumerate(cfg.encodings):
            circ, q, estimate = _pricing_setup(cfg, enc)
            errs, accs = [], []
            for rep in range(cfg.repetitions):
                bits = run_trajectories(circ, q, noise, cfg.shots, _seed(cfg, 2, ei, ci, rep))
                est, acc = estimate(bits)
                errs.append(100.0 * (est - ref) / ref)
                accs.append(acc)
            st = _stats(errs)
            rows.append({"eps": eps, "encoding": enc, "err_pct_mean": st["mean"],
                         "err_pct_median": st["median"], "err_pct_p15": st["p15"],
                         "err_pct_p85": st["p85"], "acceptance_mean": float(np.mean(accs))})
    return (["eps", "encoding", "err_pct_mean", "err_pct_median", "err_pct_p15",
             "err_pct_p85", "acceptance_mean"], rows)


DEFAULT_BINS_ERROR_GRID = (4, 8, 16, 24, 32, 48, 64, 96, 128, 192, 256, 512, 1024)


def fig_bins_error(cfg: ExperimentConfig) -> tuple[list[str], list[dict]]:
    ref = reference_payoff(cfg)
    rows = []
    for n in DEFAULT_BINS_ERROR_GRID:
        dist = discretize(cfg.scenario, n)
        val = binned_payoff(dist, cfg.scenario.strike)
        rows.append({"bins": n, "payoff": val,
                     "rel_err_pct": 100.0 * abs(val - ref) / ref})
    return (["bins", "payoff", "rel_err_pct"], rows)


def _ae_problem(cfg: ExperimentConfig, encoding: str):
    if encoding == "unary":
        return unary.ae_problem(cfg.scenario, cfg.n_bins, cfg.native)
    return binary.ae_problem(cfg.scenario, cfg.n_bins, cfg.c, cfg.native)


def fig_ae_convergence(cfg: ExperimentConfig) -> tuple[list[str], list[dict]]:
    """Noiseless AE statistics per round, with sampling and optimal reference lines."""
    rows = []
    m_sched = schedule(cfg.schedule, cfg.rounds)
    alpha = 0.05
    zv = z_value(alpha)
    for ci, enc in enumerate(cfg.encodings):
        problem = _ae_problem(cfg, enc)
        per_stage_payoffs: list[list[float]] = [[] for _ in m_sched]
        per_stage_unc: list[list[float]] = [[] for _ in m_sched]
        for rep in range(cfg.repetitions):
            records = measure_rounds(problem, NoiseModel(), cfg.shots, m_sched,
                                     _seed(cfg, 4, ci, rep))
            for j, est in enumerate(fold_records(records, alpha)):
                per_stage_payoffs[j].append(problem.rescale(est.a))
                per_stage_unc[j].append(problem.rescale(est.a + est.delta_a)
                                        - problem.rescale(est.a))
        # payoff-units conversion slope at the true operating point
        slope = abs(problem.rescale(1.0) - problem.rescale(0.0))
        a_true = _noiseless_amplitude(problem)
        jacobian = abs(math.sin(2 * math.asin(math.sqrt(a_true)))) * slope
        for j, m in enumerate(m_sched):
            calls = cfg.shots * sum(2 * mm + 1 for mm in m_sched[: j + 1])
            weight = sum(2 * mm + 1 for mm in m_sched[: j + 1])
            samp_theta = zv / (2 * math.sqrt(cfg.shots * weight))
            opt_theta = zv / (2 * math.sqrt(cfg.shots) * weight)
            rows.append({
                "encoding": enc, "round": j, "m": m,
                "cum_m": sum(m_sched[: j + 1]),
                "applications": calls,
                "payoff_mean": float(np.mean(per_stage_payoffs[j])),
                "payoff_std": float(np.std(per_stage_payoffs[j], ddof=1)),
                "unc_mean": float(np.mean(per_stage_unc[j])),
                "sampling_line": samp_theta * jacobian,
                "optimal_line": opt_theta * jacobian,
                "sampling_sigma": samp_theta * jacobian / zv,
                "optimal_sigma": opt_theta * jacobian / zv,
            })
    return (["encoding", "round", "m", "cum_m", "applications", "payoff_mean",
             "payoff_std", "unc_mean", "sampling_line", "optimal_line",
             "sampling_sigma", "optimal_sigma"], rows)


def _noiseless_amplitude(problem) -> float:
    from ..simcore import run_exact

    probs = run_exact(problem.circuit_for_power(0), problem.num_qubits)
    bits = ((np.arange(probs.size)[:, None] >> np.arange(problem.num_qubits)) & 1).astype(np.uint8)
    # weight each outcome by its probability through the problem's good-counter
    ones = 0.0
    total = 0.0
    for idx, p in enumerate(probs):
        if p <= 0:
            continue
        o, acc = problem.count_good(bits[idx: idx + 1])
        ones += p * o
        total += p * acc
    return ones / total


def fig_ae_noise(cfg: ExperimentConfig) -> tuple[list[str], list[dict]]:
    """Payoff error under noise for AE depth M = 0..rounds (linear schedule)."""
    ref = reference_payoff(cfg)
    rows = []
    m_sched = schedule("linear", cfg.rounds)
    for ei, eps in enumerate(cfg.eps_grid):
        noise = NoiseModel(eps)
        for ci, enc in enumerate(cfg.encodings):
            problem = _ae_problem(cfg, enc)
            per_m_err: list[list[float]] = [[] for _ in m_sched]
            per_m_unc: list[list[float]] = [[] for _ in m_sched]
            per_m_acc: list[list[float]] = [[] for _ in m_sched]
            for rep in range(cfg.repetitions):
                records = measure_rounds(problem, noise, cfg.shots, m_sched,
                                         _seed(cfg, 5, ei, ci, rep))
                for j, est in enumerate(fold_records(records)):
                    val = problem.rescale(est.a)
                    per_m_err[j].append(100.0 * (val - ref) / ref)
                    per_m_unc[j].append(problem.rescale(est.a + est.delta_a)
                                        - problem.rescale(est.a))
                    per_m_acc[j].append(records[j].accepted / records[j].shots)
            for j, m in enumerate(m_sched):
                st = _stats(per_m_err[j])
                rows.append({"eps": eps, "encoding": enc, "M": m,
                             "err_pct_mean": st["mean"], "err_pct_median": st["median"],
                             "err_pct_p15": st["p15"], "err_pct_p85": st["p85"],
                             "unc_mean": float(np.mean(per_m_unc[j])),
                             "acceptance_last": float(np.mean(per_m_acc[j]))})
    return (["eps", "encoding", "M", "err_pct_mean", "err_pct_median",
             "err_pct_p15", "err_pct_p85", "unc_mean", "acceptance_last"], rows)


DEFAULT_BINS_SWEEP_GRID = (4, 6, 8, 10, 12, 14, 16, 18, 20)


def fig_ae_bins_sweep(cfg: ExperimentConfig) -> tuple[list[str], list[dict]]:
    """Unary AE error versus bin count at fixed noise (eps_grid[-1])."""
    ref = reference_payoff(cfg)
    eps = cfg.eps_grid[-1]
    noise = NoiseModel(eps)
    m_sched = schedule("linear", cfg.rounds)
    rows = []
    for bi, bins in enumerate(DEFAULT_BINS_SWEEP_GRID):
        sub = ExperimentConfig(scenario=cfg.scenario, encoding="unary", n_bins=bins,
                               eps_grid=(eps,), shots=cfg.shots,
                               repetitions=cfg.repetitions, rounds=cfg.rounds,
                               c=cfg.c, native=cfg.native, seed=cfg.seed)
        problem = _ae_problem(sub, "unary")
        per_m_err: list[list[float]] = [[] for _ in m_sched]
        per_m_unc: list[list[float]] = [[] for _ in m_sched]
        per_m_acc: list[list[float]] = [[] for _ in m_sched]
        for rep in range(cfg.repetitions):
            records = measure_rounds(problem, noise, cfg.shots, m_sched,
                                     _seed(cfg, 6, bi, rep))
            for j, est in enumerate(fold_records(records)):
                val = problem.rescale(est.a)
                per_m_err[j].append(100.0 * (val - ref) / ref)
                per_m_unc[j].append(problem.rescale(est.a + est.delta_a)
                                    - problem.rescale(est.a))
                per_m_acc[j].append(records[j].accepted / records[j].shots)
        for j, m in enumerate(m_sched):
            st = _stats(per_m_err[j])
            rows.append({"bins": bins, "M": m, "err_pct_mean": st["mean"],
                         "err_pct_p15": st["p15"], "err_pct_p85": st["p85"],
                         "unc_mean": float(np.mean(per_m_unc[j])),
                         "acceptance_last": float(np.mean(per_m_acc[j]))})
    return (["bins", "M", "err_pct_mean", "err_pct_p15", "err_pct_p85",
             "unc_mean", "acceptance_last"], rows)


def fig_gate_crossover(cfg: ExperimentConfig) -> tuple[list[str], list[dict]]:
    rows = []
    for bins in range(4, 513):
        unary_total = budget("unary", cfg.native, bins, 0.5).total_gates(1)
        bin_native = Native.CNOT if cfg.native is Native.MIXED else cfg.native
        rows.append({"bins": bins, "unary_total": unary_total,
                     "binary_total": binary_total_continuous(bins, 0.5, bin_native, 1)})
    return (["bins", "unary_total", "binary_total"], rows)


_RUNNERS = {
    "kl_vs_noise": fig_kl_vs_noise,
    "payoff_vs_noise": fig_payoff_vs_noise,
    "bins_error": fig_bins_error,
    "ae_convergence": fig_ae_convergence,
    "ae_noise": fig_ae_noise,
    "ae_bins_sweep": fig_ae_bins_sweep,
    "gate_crossover": fig_gate_crossover,
}


def _format_value(v) -> str:
    if isinstance(v, float):
        return format(v, ".10g")
    return str(v)


def write_csv(path: Path, fieldnames: list[str], rows: list[dict]) -> None:
    lines = [",".join(fieldnames)]
    for row in rows:
        lines.append(",".join(_format_value(row[f]) for f in fieldnames))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


def run_figure(name: str, cfg: ExperimentConfig) -> Path:
    """Run one figure and write its CSV; returns the output path."""
    if name not in _RUNNERS:
        raise ValueError(f"unknown figure {name!r}; choose from {FIGURES}")
    fieldnames, rows = _RUNNERS[name](cfg)
    out = Path(cfg.out) if cfg.out else Path(f"{name}.csv")
    out.parent.mkdir(parents=True, exist_ok=True)
    write_csv(out, fieldnames, rows)
    return out
