"""Second-order master equations for the reduced qubit state.

The generic form is

    drho/dt = -i [H, rho] + 1/2 sum_lk G_lk (A_k rho A_l - A_l A_k rho) + h.c.

where the Hermitian conjugate is taken of the summation only. With the single
operator sigma_z and a real scalar rate it reduces to pure dephasing,
Gamma (sigma_z rho sigma_z - rho).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .bath import BathParams, gamma_rate
from .numerics import rk4_step, sample_grid
from .observables import Trajectory, TrajectoryRecorder
from .schedule import SearchModel, hamiltonian_at, initial_system_state

SIGMA_Z = np.diag([1.0, -1.0]).astype(complex)
POSITIVITY_ABORT = -1e-8
DEFAULT_DT = 0.02


class PositivityError(RuntimeError):
    pass


@dataclass
class DissipatorSpec:
    """System operators A_k and their rate matrix G_lk.

    ``rates`` is either a constant square matrix or a callable ``t -> matrix``.
    """

    operators: Sequence[np.ndarray]
    rates: np.ndarray | Callable[[float], np.ndarray]

    def __post_init__(self):
        self.operators = [np.asarray(a, dtype=complex) for a in self.operators]
        if not callable(self.rates):
            self.rates = np.atleast_2d(np.asarray(self.rates, dtype=complex))
            self._check(self.rates)

    def rate_matrix(self, t: float) -> np.ndarray:
        if callable(self.rates):
            return np.atleast_2d(np.asarray(self.rates(t), dtype=complex))
        return self.rates

    def _check(self, g: np.ndarray) -> None:
        k = len(self.operators)
        if g.shape != (k, k):
            raise ValueError(f"rate matrix shape {g.shape} does not match {k} operators")
        if not np.allclose(g, g.conj().T, atol=1e-12):
            warnings.warn("rate matrix is not Hermitian", RuntimeWarning, stacklevel=3)
        elif np.linalg.eigvalsh(g)[0] < -1e-12:
            warnings.warn("rate matrix is not positive semidefinite", RuntimeWarning,
                          stacklevel=3)


def dephasing_spec(params: BathParams) -> DissipatorSpec:
    return DissipatorSpec([SIGMA_Z], np.array([[gamma_rate(params)]]))


def master_rhs(rho: np.ndarray, t: float, H: np.ndarray, d: DissipatorSpec) -> np.ndarray:
    if rho.shape != H.shape or any(a.shape != rho.shape for a in d.operators):
        raise ValueError("operator dimensions do not match the density matrix")
    out = -1j * (H @ rho - rho @ H)
    g = d.rate_matrix(t)
    if np.any(g):
        ops = d.operators
        acc = np.zeros_like(rho)
        for l, a_l in enumerate(ops):
            for k, a_k in enumerate(ops):
                if g[l, k] != 0:
                    acc += g[l, k] * (a_k @ rho @ a_l - a_l @ a_k @ rho)
        acc *= 0.5
        out += acc + acc.conj().T
    return out


def propagate_master(model: SearchModel, d: DissipatorSpec, dt: float = DEFAULT_DT, *,
                     sample_interval: float | None = None,
                     frozen_s: float | None = None,
                     hamiltonian: Callable[[float], np.ndarray] | None = None,
                     t_final: float | None = None,
                     rho0: np.ndarray | None = None,
                     metadata: dict | None = None) -> Trajectory:
    """RK4 integration from the search start state (or ``rho0``) to ``t_total``.

    The system Hamiltonian follows the search schedule unless ``frozen_s``
    pins it or ``hamiltonian`` (a callable of t) replaces it; both of those
    require an explicit ``t_final``.
    """
    if not 0 < dt <= 0.05:
        raise ValueError(f"dt={dt} outside (0, 0.05]")
    if frozen_s is not None and hamiltonian is not None:
        raise ValueError("give frozen_s or hamiltonian, not both")
    custom = frozen_s is not None or hamiltonian is not None
    if custom != (t_final is not None):
        raise ValueError("t_final is required exactly when the schedule is overridden")
    if hamiltonian is None:
        hamiltonian = lambda t: hamiltonian_at(t, model, frozen_s)  # noqa: E731
    run_length = model.t_total if t_final is None else t_final
    if sample_interval is None:
        sample_interval = float(math.ceil(run_length / 500.0))
    if rho0 is None:
        psi = initial_system_state(model)
        rho = np.outer(psi, psi.conj())
    else:
        rho = np.array(rho0, dtype=complex)

    def deriv(t, r):
        return master_rhs(r, t, hamiltonian(t), d)

    rec = TrajectoryRecorder({**(metadata or {}), "solver": "master", "dt": dt})
    times = sample_grid(run_length, sample_interval)
    rec.record(0.0, rho, float(np.trace(rho).real) - 1.0)
    for t0, t1 in zip(times[:-1], times[1:]):
        n = max(1, math.ceil((t1 - t0) / dt - 1e-9))
        h = (t1 - t0) / n
        for k in range(n):
            rho = rk4_step(deriv, rho, t0 + k * h, h)
        min_eig = np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))[0]
        if min_eig < POSITIVITY_ABORT:
            raise PositivityError(
                f"density matrix eigenvalue {min_eig:.3e} at t={t1:.4g}; "
                "reduce dt or check the rate matrix"
            )
        rec.record(t1, rho, float(np.trace(rho).real) - 1.0)
    return rec.finish()
