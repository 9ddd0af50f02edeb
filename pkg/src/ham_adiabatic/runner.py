"""Seed-averaged batch runs over couplings and solvers."""

from __future__ import annotations

import logging
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from .bath import sample_bath
from .config import RunConfig
from .exact import ExactRunConfig, default_sample_interval
from .exact import propagate_exact
from .ham import ham_propagate
from .io import write_gnuplot_script, write_trajectory
from .master import DEFAULT_DT, dephasing_spec, propagate_master
from .observables import Trajectory, average_trajectories, config_digest

log = logging.getLogger(__name__)

WORKERS_ENV = "HAM_ADIABATIC_WORKERS"


def scenario_digest(cfg: RunConfig, coupling: float) -> str:
    """Digest of the physical scenario; solver, seed and step sizes are excluded."""
    return config_digest({
        "n_qubits": cfg.n_qubits, "epsilon": cfg.epsilon, "n_levels": cfg.n_levels,
        "delta_eps": cfg.delta_eps, "coupling": coupling,
    })


def worker_count(requested: int | None = None) -> int:
    if requested:
        return max(1, requested)
    env = os.environ.get(WORKERS_ENV)
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def _interval(cfg: RunConfig) -> float:
    return cfg.sample_interval or default_sample_interval(cfg.model.t_total)


def run_single(cfg: RunConfig, solver: str, coupling: float, seed: int) -> Trajectory:
    """One realization of one solver; deterministic in its arguments."""
    model = cfg.model
    params = cfg.bath_params(coupling, seed)
    meta = {"digest": scenario_digest(cfg, coupling), "coupling": coupling}
    interval = _interval(cfg)
    if solver == "exact":
        run = ExactRunConfig(model, sample_bath(params), dt=cfg.dt,
                             sample_interval=interval, metadata=meta)
        return propagate_exact(run)
    if solver == "master":
        return propagate_master(model, dephasing_spec(params), cfg.dt or DEFAULT_DT,
                                sample_interval=interval, metadata=meta)
    if solver == "ham":
        return ham_propagate(model, sample_bath(params), cfg.tau, cfg.quad_points,
                             sample_interval=interval, metadata=meta)
    raise ValueError(f"unknown solver {solver!r}")


def _job(args):
    return run_single(*args)


@dataclass
class RunResult:
    solver: str
    coupling: float
    per_seed: dict[int, Trajectory]
    mean: Trajectory
    files: list[Path]


def file_stem(solver: str, coupling: float, digest: str) -> str:
    return f"{solver}_lam{coupling:g}_{digest}"


def run_config(cfg: RunConfig, workers: int | None = None, write: bool = True) -> list[RunResult]:
    """Run every (solver, coupling) pair; exact and ham runs once per seed.

    The master equation does not depend on the coupling realization, so it is
    solved once per coupling and only its averaged file is written. Results
    are merged in seed order, independent of completion order.
    """
    cfg.validate()
    jobs = []
    for coupling in cfg.couplings:
        for solver in cfg.solvers:
            seeds = [cfg.seeds[0]] if solver == "master" else cfg.seeds
            jobs.extend((cfg, solver, coupling, seed) for seed in seeds)
    n = worker_count(workers)
    log.info("running %d jobs on %d worker(s)", len(jobs), n)
    if n == 1 or len(jobs) == 1:
        outputs = [_job(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=n) as pool:
            outputs = list(pool.map(_job, jobs))

    out_dir = Path(cfg.out_dir)
    if write:
        out_dir.mkdir(parents=True, exist_ok=True)
    results: list[RunResult] = []
    curves = []
    for coupling in cfg.couplings:
        for solver in cfg.solvers:
            per_seed = {j[3]: tr for j, tr in zip(jobs, outputs)
                        if j[1] == solver and j[2] == coupling}
            ordered = [per_seed[s] for s in sorted(per_seed)]
            digest = scenario_digest(cfg, coupling)
            meta = {"digest": digest, "solver": solver, "coupling": coupling,
                    "seeds": sorted(per_seed) if solver != "master" else "none"}
            mean = average_trajectories(ordered, meta)
            files = []
            if write:
                stem = file_stem(solver, coupling, digest)
                if solver != "master":
                    for seed, tr in sorted(per_seed.items()):
                        files.append(write_trajectory(out_dir / f"{stem}_seed{seed}.csv", tr))
                files.append(write_trajectory(out_dir / f"{stem}_mean.csv", mean))
                curves.append((files[-1].name, f"{solver} lambda={coupling:g}"))
            results.append(RunResult(solver, coupling, per_seed, mean, files))
    if write:
        write_gnuplot_script(out_dir / "plot.gp", curves)
    return results
