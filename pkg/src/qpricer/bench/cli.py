"""Command-line front end: price, figure, gatecount, ae."""
from __future__ import annotations

import argparse
import sys

import numpy as np

from .. import binary, unary
from ..estimation import fold_records, measure_rounds, schedule
from ..market import analytical_payoff, binned_payoff, discretize
from ..resources import budget, count_gates, crossover, expected_counts_binary, expected_counts_unary, verify_budget
from ..simcore import NoiseModel, Native, x
from .config import build_config, parse_config_file
from .figures import FIGURES, reference_payoff, run_figure


def _add_common_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="key = value config file; flags override it")
    p.add_argument("--encoding", choices=["unary", "binary", "both"])
    p.add_argument("--bins", type=int, help="number of bins")
    p.add_argument("--shots", type=int)
    p.add_argument("--reps", type=int, help="independent repetitions")
    p.add_argument("--eps", help="comma-separated single-qubit error grid, e.g. 0,0.001")
    p.add_argument("--schedule", choices=["linear", "exp"])
    p.add_argument("--rounds", type=int, help="AE depth J")
    p.add_argument("--c", type=float, help="binary Taylor constant")
    p.add_argument("--seed", type=int)
    p.add_argument("--native", choices=["cnot", "iswap", "mixed"])
    p.add_argument("--out", help="output path")
    p.add_argument("--spot", type=float)
    p.add_argument("--vol", type=float)
    p.add_argument("--rate", type=float)
    p.add_argument("--maturity", type=float)
    p.add_argument("--strike", type=float)


def _config_from(args: argparse.Namespace):
    file_values = parse_config_file(args.config) if args.config else {}
    flag_values = {
        "encoding": args.encoding, "bins": args.bins, "shots": args.shots,
        "reps": args.reps, "eps": args.eps, "schedule": args.schedule,
        "rounds": args.rounds, "c": args.c, "seed": args.seed,
        "native": args.native, "out": args.out, "spot": args.spot,
        "vol": args.vol, "rate": args.rate, "maturity": args.maturity,
        "strike": args.strike,
    }
    return build_config(file_values, flag_values)


def cmd_price(args) -> int:
    cfg = _config_from(args)
    scen = cfg.scenario
    eps = cfg.eps_grid[0]
    noise = NoiseModel(eps)
    dist = discretize(scen, cfg.n_bins)
    ref = reference_payoff(cfg)
    print(f"scenario: S0={scen.spot} sigma={scen.volatility} r={scen.rate} "
          f"T={scen.maturity} K={scen.strike}")
    print(f"analytical (discounted-K) payoff : {analytical_payoff(scen):.6f}")
    print(f"binned reference ({10_000} bins)  : {ref:.6f}")
    print(f"binned at {cfg.n_bins} bins             : {binned_payoff(dist, scen.strike):.6f}")
    rng_seed = cfg.seed
    if "unary" in cfg.encodings:
        val, acc = unary.estimate_payoff_unary(scen, cfg.n_bins, noise, cfg.shots,
                                               rng_seed, cfg.native)
        print(f"unary estimate (eps={eps}, {cfg.shots} shots): {val:.6f}  acceptance={acc:.4f}")
    if "binary" in cfg.encodings:
        val = binary.estimate_payoff_binary(scen, cfg.n_bins, noise, cfg.shots,
                                            rng_seed + 1, cfg.c, cfg.native)
        print(f"binary estimate (eps={eps}, {cfg.shots} shots): {val:.6f}")
    return 0


def cmd_figure(args) -> int:
    from dataclasses import replace

    cfg = _config_from(args)
    # per-figure defaults sized for a laptop-class budget; explicit flags win
    if args.name == "ae_bins_sweep" and args.config is None:
        if args.reps is None:
            cfg = replace(cfg, repetitions=10)
        if args.eps is None:
            cfg = replace(cfg, eps_grid=(0.003,))
    if args.name == "ae_noise" and args.config is None:
        if args.eps is None:
            cfg = replace(cfg, eps_grid=(0.0, 0.001, 0.002, 0.003))
        if args.rounds is None:
            cfg = replace(cfg, rounds=2)
    path = run_figure(args.name, cfg)
    print(f"wrote {path}")
    return 0


def cmd_gatecount(args) -> int:
    cfg = _config_from(args)
    n = cfg.n_bins
    dist = discretize(cfg.scenario, n)
    native = cfg.native
    strike = cfg.scenario.strike

    lay = unary.layout_for(dist, strike)
    ang = unary.solve_angles(dist)
    kappa = (n - lay.strike_index) / n
    blocks = {
        "D": unary.build_distributor(ang, native),
        "CR": unary.build_payoff(lay, dist, strike, native),
        "SPSI0": unary.build_spsi0(lay),
        "S0": unary.build_s0(lay, native),
    }
    print(f"unary encoding, native={native.value}, n={n}, kappa={kappa:.3f}")
    print(verify_budget(blocks, budget("unary", native, n, kappa)).format())
    print()

    n_bits = int(np.log2(n))
    if 2**n_bits == n:
        blay = binary.layout_for(dist, strike, cfg.c)
        kappa_b = bin(blay.k_threshold).count("1") / n_bits
        bnative = Native.CNOT if native is Native.MIXED else native
        bblocks = {
            "D": binary.load_distribution_exact(dist.probabilities, bnative),
            "CR": binary.build_comparator(blay, bnative) + binary.build_payoff_binary(blay, bnative),
            "SPSI0": binary.build_spsi0(blay),
            "S0": binary.build_s0_binary(blay, bnative),
        }
        print(f"binary encoding, native={bnative.value}, n={n_bits} qubits, "
              f"K'={blay.k_threshold}, kappa={kappa_b:.3f}")
        print(verify_budget(bblocks, budget("binary", bnative, n_bits, kappa_b, l=1.0)).format())
        print("(binary D row: exact loader, not the published variational ansatz)")
    print()
    print(f"crossover (mixed native, kappa=1/2, m=1): {crossover(0.5, Native.MIXED)} bins")
    return 0


def cmd_ae(args) -> int:
    cfg = _config_from(args)
    ref = reference_payoff(cfg)
    m_sched = schedule(cfg.schedule, cfg.rounds)
    noise = NoiseModel(cfg.eps_grid[0])
    for enc in cfg.encodings:
        if enc == "unary":
            problem = unary.ae_problem(cfg.scenario, cfg.n_bins, cfg.native)
        else:
            problem = binary.ae_problem(cfg.scenario, cfg.n_bins, cfg.c, cfg.native)
        records = measure_rounds(problem, noise, cfg.shots, m_sched, cfg.seed)
        print(f"[{enc}] schedule={m_sched} shots={cfg.shots} eps={cfg.eps_grid[0]}")
        print(f"  {'m':>3} {'accepted':>9} {'ones':>8} {'a_hat':>9} {'theta':>8} {'delta':>9}")
        for rec, est in zip(records, fold_records(records)):
            print(f"  {rec.m:3d} {rec.accepted:9d} {rec.ones:8d} {rec.a_hat:9.5f} "
                  f"{est.theta:8.5f} {est.delta_theta:9.6f}")
        final = fold_records(records)[-1]
        payoff = problem.rescale(final.a)
        dpay = problem.rescale(final.a + final.delta_a) - problem.rescale(final.a)
        print(f"  payoff = {payoff:.6f} +- {dpay:.6f}  (reference {ref:.6f}, "
              f"err {100*(payoff-ref)/ref:+.2f}%)")
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="qpricer",
                                     description="Quantum option pricing benchmark suite")
    sub = parser.add_subparsers(dest="command", required=True)

    p_price = sub.add_parser("price", help="classical and simulated quantum prices")
    _add_common_flags(p_price)
    p_price.set_defaults(func=cmd_price)

    p_fig = sub.add_parser("figure", help="run a benchmark figure to CSV")
    p_fig.add_argument("name", choices=list(FIGURES))
    _add_common_flags(p_fig)
    p_fig.set_defaults(func=cmd_figure)

    p_gc = sub.add_parser("gatecount", help="gate budgets and built-circuit verification")
    _add_common_flags(p_gc)
    p_gc.set_defaults(func=cmd_gatecount)

    p_ae = sub.add_parser("ae", help="run iterative amplitude estimation once")
    _add_common_flags(p_ae)
    p_ae.set_defaults(func=cmd_ae)

    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
