"""Observables of the reduced qubit state and the trajectory container."""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field

import numpy as np


def success_probability(rho: np.ndarray) -> float:
    """Population of the marked state, rho[m, m]."""
    return float(np.real(rho[0, 0]))


def purity(rho: np.ndarray) -> float:
    return float(np.real(np.trace(rho @ rho)))


def coherence_measure(rho: np.ndarray) -> float:
    """sqrt(2 Tr rho^2 - 1), with the radicand floored at zero."""
    return math.sqrt(max(2.0 * purity(rho) - 1.0, 0.0))


def linear_entropy(rho: np.ndarray) -> float:
    """1 - Tr rho^2."""
    return 1.0 - purity(rho)


def config_digest(scenario: dict) -> str:
    """Short stable hash of a physical scenario (order-independent)."""
    blob = json.dumps(scenario, sort_keys=True, separators=(",", ":"), default=repr)
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


@dataclass
class Trajectory:
    """Sampled observables of one run (or of a seed average).

    ``drift`` holds the norm deviation ``|psi|^2 - 1`` for wavefunction runs
    and the trace deviation ``Tr rho - 1`` for density-matrix runs.
    ``rho_mp`` (the m-p coherence) and ``min_eig`` are kept in memory only.
    """

    times: np.ndarray
    p_success: np.ndarray
    coherence: np.ndarray
    purity: np.ndarray
    drift: np.ndarray
    rho_mp: np.ndarray | None = None
    min_eig: np.ndarray | None = None
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        n = len(self.times)
        for name in ("p_success", "coherence", "purity", "drift"):
            if len(getattr(self, name)) != n:
                raise ValueError(f"series {name!r} has length {len(getattr(self, name))}, expected {n}")

    def __len__(self) -> int:
        return len(self.times)

    @property
    def digest(self) -> str | None:
        return self.metadata.get("digest")


class TrajectoryRecorder:
    def __init__(self, metadata: dict | None = None):
        self.metadata = dict(metadata or {})
        self._rows: list[tuple] = []

    def record(self, t: float, rho: np.ndarray, drift: float) -> None:
        herm = 0.5 * (rho + rho.conj().T)
        self._rows.append((
            t,
            success_probability(rho),
            coherence_measure(rho),
            purity(rho),
            drift,
            complex(rho[0, 1]),
            float(np.linalg.eigvalsh(herm)[0]),
        ))

    def finish(self) -> Trajectory:
        cols = list(zip(*self._rows)) if self._rows else [()] * 7
        t, p, c, pur, d, mp, me = (np.asarray(x) for x in cols)
        return Trajectory(
            times=t.astype(float), p_success=p.astype(float),
            coherence=c.astype(float), purity=pur.astype(float),
            drift=d.astype(float), rho_mp=mp.astype(complex),
            min_eig=me.astype(float), metadata=self.metadata,
        )


def average_trajectories(trajs: list[Trajectory], metadata: dict | None = None) -> Trajectory:
    """Pointwise seed average; all inputs must share one time grid.

    Drift and minimum eigenvalue keep the worst seed instead of the mean.
    """
    if not trajs:
        raise ValueError("nothing to average")
    times = trajs[0].times
    for tr in trajs[1:]:
        if len(tr.times) != len(times) or not np.allclose(tr.times, times, rtol=0, atol=1e-9):
            raise ValueError("trajectories do not share a time grid")
    mean = lambda name: np.mean([getattr(tr, name) for tr in trajs], axis=0)  # noqa: E731
    return Trajectory(
        times=times.copy(),
        p_success=mean("p_success"),
        coherence=mean("coherence"),
        purity=mean("purity"),
        drift=np.max([np.abs(tr.drift) for tr in trajs], axis=0),
        rho_mp=None if trajs[0].rho_mp is None else mean("rho_mp"),
        min_eig=None if trajs[0].min_eig is None else np.min([tr.min_eig for tr in trajs], axis=0),
        metadata=dict(metadata if metadata is not None else trajs[0].metadata),
    )
