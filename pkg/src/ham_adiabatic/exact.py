"""Exact Schrödinger-picture evolution of the qubit (x) band pure state.

H(t) = H_S(t) (x) I + I (x) H_E + sigma_z (x) C, applied blockwise. The state
vector is laid out as (system index in {m, p}) x (bath level 1..N1), so the
amplitude of |a, k> sits at ``a * N1 + k``. Observables are functions of the
reduced state only, which makes them identical in the Schrödinger picture
used here and in the H_E interaction picture.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .bath import (BathParams, BathRealization, bath_hamiltonian_diagonal,
                   operator_norm_bound, reduced_bath_operator)
from .numerics import rk4_step, sample_grid
from .observables import Trajectory, TrajectoryRecorder
from .schedule import SearchModel, hamiltonian_at, initial_system_state

NORM_ABORT = 1e-6


class NormDriftError(RuntimeError):
    pass


@dataclass
class FullState:
    amplitudes: np.ndarray
    time: float = 0.0

    @property
    def n_levels(self) -> int:
        return self.amplitudes.size // 2

    def blocks(self) -> np.ndarray:
        """View of the amplitudes as a (2, N1) array."""
        return self.amplitudes.reshape(2, -1)

    def norm_sq(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)


def default_dt(params: BathParams) -> float:
    return min(0.02, 0.05 / (1.0 + params.band_width + operator_norm_bound(params)))


def default_sample_interval(t_final: float) -> float:
    return float(math.ceil(t_final / 500.0))


@dataclass
class ExactRunConfig:
    """One realization of the exact dynamics.

    ``frozen_s`` pins the schedule (H_S constant); ``t_final`` then sets the run
    length, otherwise the run covers [0, t_total]. ``initial_system`` replaces
    the search start state by another normalized qubit vector.
    """

    model: SearchModel
    bath: BathRealization
    dt: float | None = None
    sample_interval: float | None = None
    frozen_s: float | None = None
    t_final: float | None = None
    initial_system: np.ndarray | None = None
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        p = self.bath.params
        if p.n_qubits != self.model.n_qubits:
            raise ValueError("bath and search model disagree on n_qubits")
        limit = 0.05 / (1.0 + p.band_width + operator_norm_bound(p))
        if self.dt is None:
            self.dt = default_dt(p)
        elif not 0 < self.dt <= limit * (1 + 1e-12):
            raise ValueError(f"dt={self.dt} violates dt <= 0.05/(1 + de + ||C||) = {limit:.4g}")
        if self.frozen_s is None and self.t_final is not None:
            raise ValueError("t_final may only be set for a frozen schedule")
        if self.frozen_s is not None and self.t_final is None:
            raise ValueError("a frozen schedule needs t_final")
        if self.sample_interval is None:
            self.sample_interval = default_sample_interval(self.run_length)

    @property
    def run_length(self) -> float:
        return self.t_final if self.t_final is not None else self.model.t_total


def initial_full_state(model: SearchModel, params: BathParams,
                       system: np.ndarray | None = None) -> FullState:
    """Product of the system start state with the uniform bath superposition."""
    psi_s = initial_system_state(model) if system is None else np.asarray(system, dtype=complex)
    psi_e = np.full(params.n_levels, 1.0 / math.sqrt(params.n_levels), dtype=complex)
    return FullState(np.kron(psi_s, psi_e), 0.0)


class _Generator:
    """Blockwise H(t) for a fixed configuration."""

    def __init__(self, config: ExactRunConfig):
        self.config = config
        self.energies = bath_hamiltonian_diagonal(config.bath.params)
        if config.bath.params.coupling > 0:
            # psi @ C^T applies C to both system blocks in one product.
            self.c_t = np.ascontiguousarray(reduced_bath_operator(config.bath).T)
        else:
            self.c_t = None
        self._sign = np.array([[1.0], [-1.0]])
        # A constant energy offset only changes the global phase. Centering the
        # spectrum (H_S in [0, 1], H_E in (0, de]) shrinks RK4's amplitude error.
        self.offset = 0.5 * (1.0 + float(self.energies[-1]))

    def system_matrix(self, t: float) -> np.ndarray:
        cfg = self.config
        return hamiltonian_at(t, cfg.model, cfg.frozen_s)

    def apply(self, t: float, psi: np.ndarray) -> np.ndarray:
        blocks = psi.reshape(2, -1)
        out = self.system_matrix(t) @ blocks
        out += blocks * self.energies
        if self.c_t is not None:
            out += self._sign * (blocks @ self.c_t)
        return out.reshape(-1)

    def deriv(self, t: float, psi: np.ndarray) -> np.ndarray:
        return -1j * (self.apply(t, psi) - self.offset * psi)


def apply_hamiltonian(state: FullState, t: float, config: ExactRunConfig) -> np.ndarray:
    return _Generator(config).apply(t, state.amplitudes)


def reduced_density(state: FullState) -> np.ndarray:
    """Partial trace over the bath: rho_ab = sum_k psi_{a,k} psi*_{b,k}."""
    b = state.blocks()
    return b @ b.conj().T


def propagate_exact(config: ExactRunConfig) -> Trajectory:
    """RK4 propagation of one realization, recorded on the shared sample grid."""
    gen = _Generator(config)
    state = initial_full_state(config.model, config.bath.params, config.initial_system)
    times = sample_grid(config.run_length, config.sample_interval)
    rec = TrajectoryRecorder({**config.metadata, "solver": "exact",
                              "seed": config.bath.params.seed, "dt": config.dt})
    psi = state.amplitudes
    rec.record(0.0, reduced_density(state), state.norm_sq() - 1.0)
    for t0, t1 in zip(times[:-1], times[1:]):
        n = max(1, math.ceil((t1 - t0) / config.dt - 1e-9))
        h = (t1 - t0) / n
        for k in range(n):
            psi = rk4_step(gen.deriv, psi, t0 + k * h, h)
        state = FullState(psi, t1)
        drift = state.norm_sq() - 1.0
        if abs(drift) > NORM_ABORT:
            raise NormDriftError(
                f"norm drift {drift:.3e} at t={t1:.4g} exceeds {NORM_ABORT:g}; "
                f"reduce dt (currently {config.dt:.4g})"
            )
        rec.record(t1, reduced_density(state), drift)
    return rec.finish()
