"""Hilbert-space-average machinery.

An effective state alpha = sum_n b_n P_n is fitted to expectation values
Tr[alpha P_n] = p_n; this is the linear-entropy extremum under those
constraints. Short-time propagation uses a symmetric split: half a system
step, the interaction-only propagator expanded to second order in V, half a
system step.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np
from scipy.integrate import simpson
from scipy.linalg import expm

from .bath import BathRealization, bath_hamiltonian_diagonal, reduced_bath_operator
from .numerics import commutator, rk4_step, sample_grid
from .observables import Trajectory, TrajectoryRecorder, linear_entropy  # noqa: F401
from .schedule import SearchModel, hamiltonian_at, initial_system_state

MAX_HAM_LEVELS = 256
SIGMA_Z = np.diag([1.0, -1.0]).astype(complex)

Sampler = Callable[[float], np.ndarray]
SystemH = np.ndarray | Callable[[float], np.ndarray]


class SingularObservableSet(ValueError):
    pass


@dataclass
class ObservableSet:
    operators: Sequence[np.ndarray]

    def __post_init__(self):
        self.operators = [np.asarray(p, dtype=complex) for p in self.operators]
        if not self.operators:
            raise ValueError("empty observable set")
        shape = self.operators[0].shape
        if any(p.shape != shape for p in self.operators):
            raise ValueError("observables must share one shape")

    @property
    def gram(self) -> np.ndarray:
        """gram[m, n] = Tr[P_m P_n]."""
        ops = np.stack(self.operators)
        # Tr[A B] = sum_ij A_ij B_ji
        return np.einsum("mij,nji->mn", ops, ops)

    def expectations(self, alpha: np.ndarray) -> np.ndarray:
        return np.array([np.trace(alpha @ p) for p in self.operators])


@dataclass
class EffectiveState:
    coefficients: np.ndarray
    operators: ObservableSet

    @property
    def matrix(self) -> np.ndarray:
        return np.tensordot(self.coefficients, np.stack(self.operators.operators), axes=1)


def fit_effective_state(obs: ObservableSet, targets) -> EffectiveState:
    """Solve the Gram system for the coefficients of alpha = sum b_n P_n.

    Raises
    ------
    SingularObservableSet
        If the Gram matrix is singular, or if the constraints do not fix
        Tr[alpha] = 1 (the identity, or a trace-fixing combination, must be
        representable through the targets).
    """
    gram = obs.gram
    targets = np.asarray(targets, dtype=complex)
    if targets.shape != (len(obs.operators),):
        raise ValueError("one target per observable required")
    if np.linalg.cond(gram) > 1e12:
        raise SingularObservableSet("Gram matrix is singular; the observable set is degenerate")
    # Tr[alpha P_n] = sum_m b_m Tr[P_m P_n] and the Gram matrix is symmetric.
    b = np.linalg.solve(gram.T, targets)
    state = EffectiveState(b, obs)
    tr = np.trace(state.matrix)
    if abs(tr - 1.0) > 1e-10:
        raise SingularObservableSet(f"fitted state has trace {tr:.12g}; targets are not trace-consistent")
    return state


def _half_step_unitary(H: SystemH, t0: float, t1: float, max_substep: float = 2e-3) -> np.ndarray:
    if not callable(H):
        return expm(-1j * (t1 - t0) * np.asarray(H))
    d = np.asarray(H(t0)).shape[0]
    u = np.eye(d, dtype=complex)
    n = max(1, math.ceil((t1 - t0) / max_substep - 1e-9))
    h = (t1 - t0) / n
    for k in range(n):
        u = rk4_step(lambda t, y: -1j * (H(t) @ y), u, t0 + k * h, h)
    return u


@lru_cache(maxsize=16)
def _unit_simpson_weights(q: int) -> np.ndarray:
    return simpson(np.eye(q), x=np.linspace(0.0, 1.0, q), axis=0)


def second_order_delta_alpha(alpha: np.ndarray, t: float, tau: float, V_sampler: Sampler,
                             quad_points: int = 32) -> np.ndarray:
    """Change of alpha over [t, t + tau] from V alone, to second order in V.

    -i int [V(s), alpha] ds - int ds int_t^s ds' [V(s), [V(s'), alpha]],
    with composite Simpson in both variables (``quad_points`` nodes each).
    """
    if quad_points < 2:
        raise ValueError("quad_points must be at least 2")
    w = _unit_simpson_weights(quad_points)
    u = np.linspace(0.0, 1.0, quad_points)
    nodes = t + tau * u
    first = np.zeros_like(alpha, dtype=complex)
    second = np.zeros_like(alpha, dtype=complex)
    for wi, s in zip(w, nodes):
        v_s = V_sampler(s)
        first += wi * v_s
        span = s - t
        if span == 0.0:
            continue
        inner = np.zeros_like(v_s)
        for wj, uj in zip(w, u):
            inner += wj * V_sampler(t + span * uj)
        inner *= span
        second += wi * commutator(v_s, commutator(inner, alpha))
    first *= tau
    second *= tau
    return -1j * commutator(first, alpha) - second


def suzuki_step(alpha: np.ndarray, t: float, tau: float, H_S: SystemH, V_sampler: Sampler,
                quad_points: int = 32) -> np.ndarray:
    """One symmetric split step of the full-space density matrix.

    ``H_S`` acts on the system factor only. A constant matrix gives the plain
    exponential half steps; a callable ``t -> H_S(t)`` is integrated over
    each half interval, which reduces to the same thing when H_S is constant.
    """
    h0 = np.asarray(H_S(t) if callable(H_S) else H_S)
    dim_e = alpha.shape[0] // h0.shape[0]
    eye_e = np.eye(dim_e)
    u1 = np.kron(_half_step_unitary(H_S, t, t + 0.5 * tau), eye_e)
    u2 = np.kron(_half_step_unitary(H_S, t + 0.5 * tau, t + tau), eye_e)
    a = u1 @ alpha @ u1.conj().T
    a = a + second_order_delta_alpha(a, t, tau, V_sampler, quad_points)
    return u2 @ a @ u2.conj().T


def interaction_sampler(bath: BathRealization) -> Sampler:
    """s -> sigma_z (x) C(s) in the interaction picture of H_E."""
    energies = bath_hamiltonian_diagonal(bath.params)
    C = reduced_bath_operator(bath)

    def sample(s: float) -> np.ndarray:
        ph = np.exp(1j * energies * s)
        return np.kron(SIGMA_Z, ph[:, None] * C * ph.conj()[None, :])

    return sample


def partial_trace_bath(alpha: np.ndarray, dim_s: int = 2) -> np.ndarray:
    dim_e = alpha.shape[0] // dim_s
    return np.einsum("aibi->ab", alpha.reshape(dim_s, dim_e, dim_s, dim_e))


def default_tau(band_width: float) -> float:
    return 2.0 / band_width


def ham_propagate(model: SearchModel, bath: BathRealization, tau: float | None = None,
                  quad_points: int = 32, *, sample_interval: float | None = None,
                  frozen_s: float | None = None, t_final: float | None = None,
                  rho0: np.ndarray | None = None, metadata: dict | None = None) -> Trajectory:
    """Propagate alpha = rho_S (x) I/N1, re-factorizing after every split step.

    Meant as a validation path at toy sizes (N1 <= 256).
    """
    p = bath.params
    if p.n_levels > MAX_HAM_LEVELS:
        raise ValueError(f"ham path limited to N1 <= {MAX_HAM_LEVELS}, got {p.n_levels}")
    if (frozen_s is None) != (t_final is None):
        raise ValueError("frozen_s and t_final must be given together")
    tau = default_tau(p.band_width) if tau is None else tau
    run_length = model.t_total if t_final is None else t_final
    if sample_interval is None:
        sample_interval = float(math.ceil(run_length / 500.0))
    if rho0 is None:
        psi = initial_system_state(model)
        rho = np.outer(psi, psi.conj())
    else:
        rho = np.array(rho0, dtype=complex)

    n1 = p.n_levels
    rho_e = np.eye(n1) / n1
    sampler = interaction_sampler(bath)
    h_sys = lambda t: hamiltonian_at(t, model, frozen_s)  # noqa: E731
    free = p.coupling == 0

    rec = TrajectoryRecorder({**(metadata or {}), "solver": "ham", "seed": p.seed,
                              "tau": tau, "quad_points": quad_points})
    times = sample_grid(run_length, sample_interval)
    rec.record(0.0, rho, float(np.trace(rho).real) - 1.0)
    for t0, t1 in zip(times[:-1], times[1:]):
        n = max(1, math.ceil((t1 - t0) / tau - 1e-9))
        h = (t1 - t0) / n
        for k in range(n):
            tk = t0 + k * h
            if free:
                u = _half_step_unitary(h_sys, tk, tk + h)
                rho = u @ rho @ u.conj().T
                continue
            alpha = np.kron(rho, rho_e)
            alpha = suzuki_step(alpha, tk, h, h_sys, sampler, quad_points)
            rho = partial_trace_bath(alpha)
        rec.record(t1, rho, float(np.trace(rho).real) - 1.0)
    return rec.finish()
