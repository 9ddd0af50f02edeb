"""Complex linear algebra helpers and a fixed-step RK4 integrator."""

from __future__ import annotations

from typing import Callable

import numpy as np

Deriv = Callable[[float, np.ndarray], np.ndarray]


class IntegratorBlowUp(FloatingPointError):
    """Raised when an integration step produces non-finite values."""


def rk4_step(deriv: Deriv, state: np.ndarray, t: float, dt: float) -> np.ndarray:
    """Advance ``state`` by one classical Runge-Kutta step.

    ``deriv(t, y)`` returns dy/dt. The array may have any shape (vectors for
    wavefunctions, 2-d arrays for density matrices).
    """
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt}")
    half = 0.5 * dt
    k1 = deriv(t, state)
    k2 = deriv(t + half, state + half * k1)
    k3 = deriv(t + half, state + half * k2)
    k4 = deriv(t + dt, state + dt * k3)
    out = state + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    if not np.all(np.isfinite(out)):
        raise IntegratorBlowUp(
            f"non-finite state after RK4 step at t={t:.6g} with dt={dt:.3g}; "
            "reduce the time step"
        )
    return out


def rk4_integrate(deriv: Deriv, state: np.ndarray, t0: float, t1: float,
                  dt: float) -> np.ndarray:
    """Integrate from ``t0`` to ``t1`` using equal steps no longer than ``dt``."""
    span = t1 - t0
    if span <= 0:
        return state
    n = max(1, int(np.ceil(span / dt - 1e-12)))
    h = span / n
    for k in range(n):
        state = rk4_step(deriv, state, t0 + k * h, h)
    return state


def matvec_hermitian(M: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Dense product ``M @ v`` with a dimension check.

    ``v`` may be a single vector or a block of column vectors.
    """
    M = np.asarray(M)
    v = np.asarray(v)
    if M.ndim != 2 or M.shape[1] != v.shape[0]:
        raise ValueError(f"dimension mismatch: {M.shape} @ {v.shape}")
    return M @ v


def is_hermitian(M: np.ndarray, rtol: float = 1e-14) -> bool:
    M = np.asarray(M)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        return False
    scale = max(1.0, float(np.max(np.abs(M)))) if M.size else 1.0
    return bool(np.max(np.abs(M - M.conj().T), initial=0.0) <= rtol * scale)


def commutator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a @ b - b @ a


def sample_grid(t_final: float, interval: float) -> np.ndarray:
    """Sample times ``0, h, 2h, ...`` closed by ``t_final`` itself.

    Every solver records on this grid so trajectories can be compared
    point by point.
    """
    if t_final <= 0 or interval <= 0:
        raise ValueError("t_final and interval must be positive")
    n_full = int(np.floor(t_final / interval + 1e-9))
    times = interval * np.arange(n_full + 1, dtype=float)
    if t_final - times[-1] > 1e-9 * max(1.0, t_final):
        times = np.append(times, t_final)
    else:
        times[-1] = t_final
    return times
