"""Local-adiabatic Grover search reduced to the {|m>, |p>} plane.

Basis ordering is (|m>, |p>) everywhere: index 0 is the marked item, index 1
the normalized uniform superposition of the N - 1 unmarked items.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class SearchModel:
    """Register size and accuracy parameter of the adiabatic search.

    Parameters
    ----------
    n_qubits : int
        Number of qubits n; the search space has N = 2**n items.
    epsilon : float
        Local adiabaticity parameter, 0 < epsilon < 1.
    """

    n_qubits: int
    epsilon: float = 0.1
    N: int = field(init=False)
    t_total: float = field(init=False)

    def __post_init__(self):
        if int(self.n_qubits) != self.n_qubits or self.n_qubits < 1:
            raise ValueError(f"n_qubits must be a positive integer, got {self.n_qubits}")
        if not 0.0 < self.epsilon < 1.0:
            raise ValueError(f"epsilon must lie in (0, 1), got {self.epsilon}")
        N = 2 ** int(self.n_qubits)
        object.__setattr__(self, "N", N)
        # Runtime chosen so that the tan argument of s(t) ends at +arctan(sqrt N):
        # s(t_total) = 1 exactly, and t_total -> pi sqrt(N) / (2 epsilon) for large N.
        sqrt_n = math.sqrt(N)
        object.__setattr__(self, "t_total", sqrt_n / self.epsilon * math.atan(sqrt_n))


def _check_s(s: float) -> None:
    if not 0.0 <= s <= 1.0:
        raise ValueError(f"s must lie in [0, 1], got {s}")


def s_of_t(t: float, model: SearchModel) -> float:
    """Interpolation parameter s(t) of the local-adiabatic schedule."""
    tol = 1e-12 * model.t_total
    if t < -tol or t > model.t_total + tol:
        raise ValueError(f"t={t} outside [0, {model.t_total}]")
    if t <= 0.0:
        return 0.0
    if t >= model.t_total:
        return 1.0
    sqrt_n = math.sqrt(model.N)
    # 2 eps t / sqrt(N) - arctan(sqrt N), measured from the midpoint of the run
    arg = 2.0 * model.epsilon * (t - 0.5 * model.t_total) / sqrt_n
    s = 0.5 + math.tan(arg) / (2.0 * sqrt_n)
    return min(1.0, max(0.0, s))


def ds_dt(t: float, model: SearchModel) -> float:
    sqrt_n = math.sqrt(model.N)
    arg = 2.0 * model.epsilon * (t - 0.5 * model.t_total) / sqrt_n
    return model.epsilon / model.N / math.cos(arg) ** 2


def system_hamiltonian(s: float, model: SearchModel) -> np.ndarray:
    """(1 - s)(I - |psi0><psi0|) + s (I - |m><m|) in the (|m>, |p>) basis."""
    _check_s(s)
    N = model.N
    f = 1.0 - s
    off = -f * math.sqrt(N - 1) / N
    return np.array(
        [[f * (1.0 - 1.0 / N), off],
         [off, f / N + s]],
        dtype=complex,
    )


def gap(s: float, model: SearchModel) -> float:
    """Spectral gap of the 2x2 search Hamiltonian at interpolation ``s``."""
    _check_s(s)
    radicand = 1.0 - 4.0 * s * (1.0 - s) * (1.0 - 1.0 / model.N)
    return math.sqrt(max(radicand, 0.0))


def initial_system_state(model: SearchModel) -> np.ndarray:
    N = model.N
    return np.array([1.0 / math.sqrt(N), math.sqrt((N - 1) / N)], dtype=complex)


def hamiltonian_at(t: float, model: SearchModel, frozen_s: float | None = None) -> np.ndarray:
    """System Hamiltonian at time ``t``, or at a pinned ``frozen_s`` if given."""
    s = frozen_s if frozen_s is not None else s_of_t(t, model)
    return system_hamiltonian(s, model)
