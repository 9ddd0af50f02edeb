"""Command-line entry point: ``ham-adiabatic {criteria,run,compare,preset}``."""

from __future__ import annotations

import argparse
import logging
import sys

import numpy as np

from .bath import criteria, gamma_rate
from .config import PRESET_NOTES, PRESETS, ConfigError, RunConfig, apply_overrides, load_config, preset
from .io import read_trajectory
from .runner import run_config

log = logging.getLogger("ham_adiabatic")


def _add_config_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--preset", choices=sorted(PRESETS), help="start from a named preset")
    p.add_argument("--config", help="INI-style key = value file")
    p.add_argument("--n-qubits", type=int)
    p.add_argument("--epsilon", type=float)
    p.add_argument("--n-levels", type=int, help="bath levels N1")
    p.add_argument("--delta-eps", type=float, help="band width")
    p.add_argument("--lambda", dest="couplings", help="coupling(s), comma separated")
    p.add_argument("--seed-list", dest="seeds", help="seeds, comma separated")
    p.add_argument("--solver", dest="solvers",
                   help="exact, master, ham, all, or a comma separated list")
    p.add_argument("--dt", type=float)
    p.add_argument("--tau", type=float)
    p.add_argument("--quad-points", type=int)
    p.add_argument("--sample-interval", type=float)
    p.add_argument("--out-dir")


def build_config(args: argparse.Namespace) -> RunConfig:
    cfg = preset(args.preset) if args.preset else RunConfig()
    if args.config:
        cfg = load_config(args.config, base=cfg)
    solvers = args.solvers
    if solvers is not None and solvers.strip() == "all":
        solvers = "exact,master,ham"
    overrides = {
        "n_qubits": args.n_qubits, "epsilon": args.epsilon, "n_levels": args.n_levels,
        "delta_eps": args.delta_eps, "couplings": args.couplings, "seeds": args.seeds,
        "solvers": solvers, "dt": args.dt, "tau": args.tau,
        "quad_points": args.quad_points, "sample_interval": args.sample_interval,
        "out_dir": args.out_dir,
    }
    return apply_overrides(cfg, overrides).validate()


def criteria_report(cfg: RunConfig) -> list[dict]:
    rows = []
    for lam in cfg.couplings:
        p = cfg.bath_params(lam)
        c = criteria(p)
        rows.append({"lambda": lam, "lambda_eff": p.lambda_eff, "c1": c.c1, "c2": c.c2,
                     "c1_ok": c.c1_ok, "c2_ok": c.c2_ok, "gamma": gamma_rate(p),
                     "t_total": cfg.model.t_total})
    return rows


def cmd_criteria(args) -> int:
    cfg = build_config(args)
    print(f"# n={cfg.n_qubits} epsilon={cfg.epsilon} N1={cfg.n_levels} delta_eps={cfg.delta_eps}")
    print("lambda,lambda_eff,c1,c2,c1>=0.5,c2<0.1,gamma,t_total")
    for r in criteria_report(cfg):
        print(f"{r['lambda']:g},{r['lambda_eff']:.6g},{r['c1']:.6g},{r['c2']:.6g},"
              f"{'pass' if r['c1_ok'] else 'fail'},{'pass' if r['c2_ok'] else 'fail'},"
              f"{r['gamma']:.6g},{r['t_total']:.6g}")
    return 0


def cmd_run(args) -> int:
    cfg = build_config(args)
    results = run_config(cfg, workers=args.workers)
    for r in results:
        tr = r.mean
        print(f"{r.solver:6s} lambda={r.coupling:<8g} seeds={len(r.per_seed)} "
              f"P_m(T)={tr.p_success[-1]:.6f} C(T)={tr.coherence[-1]:.6f} "
              f"max|drift|={np.max(np.abs(tr.drift)):.2e}")
        for f in r.files:
            print(f"  wrote {f}")
    return 0


def compare_trajectories(a, b) -> dict:
    """Pointwise deltas between two trajectories of the same scenario."""
    if a.digest != b.digest:
        raise ValueError(f"config digests differ ({a.digest} vs {b.digest}); "
                         "these are different physical scenarios")
    if len(a.times) != len(b.times) or not np.allclose(a.times, b.times, rtol=0, atol=1e-9):
        raise ValueError("time grids differ; rerun with a common --sample-interval")
    dp = np.abs(a.p_success - b.p_success)
    dc = np.abs(a.coherence - b.coherence)
    return {"max_dp": float(dp.max()), "mean_dp": float(dp.mean()),
            "max_dc": float(dc.max()), "mean_dc": float(dc.mean())}


def cmd_compare(args) -> int:
    try:
        stats = compare_trajectories(read_trajectory(args.a), read_trajectory(args.b))
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    for k, v in stats.items():
        print(f"{k}={v:.6g}")
    value = stats["mean_dp" if args.metric == "mean" else "max_dp"]
    ok = value <= args.tol
    print(f"{args.metric} |dP_m| = {value:.6g} {'<=' if ok else '>'} tol {args.tol:g}")
    return 0 if ok else 1


def cmd_preset(args) -> int:
    for name in sorted(PRESETS):
        c = PRESETS[name]
        print(f"{name:8s} {PRESET_NOTES[name]}")
        print(f"         n_qubits={c.n_qubits} epsilon={c.epsilon} n_levels={c.n_levels} "
              f"delta_eps={c.delta_eps} lambda={','.join(f'{x:g}' for x in c.couplings)} "
              f"seeds={len(c.seeds)} solvers={','.join(c.solvers)}")
    return 0


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ham-adiabatic", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("criteria", help="print c1, c2, lambda_eff, Gamma and t_total")
    _add_config_args(p)
    p.set_defaults(func=cmd_criteria)

    p = sub.add_parser("run", help="run solvers and write CSV trajectories")
    _add_config_args(p)
    p.add_argument("--workers", type=int, help="worker processes (default: $HAM_ADIABATIC_WORKERS or CPU count)")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("compare", help="compare two trajectory CSV files")
    p.add_argument("a")
    p.add_argument("b")
    p.add_argument("--tol", type=float, default=0.05)
    p.add_argument("--metric", choices=("mean", "max"), default="mean")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("preset", help="preset utilities")
    psub = p.add_subparsers(dest="preset_command", required=True)
    pl = psub.add_parser("list", help="list shipped presets")
    pl.set_defaults(func=cmd_preset)
    return parser


def main(argv=None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"invalid configuration: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
