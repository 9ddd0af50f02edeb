"""Adiabatic Grover search coupled to a random-band bath.

Three dynamics paths are provided and cross-checked: exact propagation of the
qubit (x) bath pure state, the dephasing master equation, and the
Hilbert-space-average second-order propagator.
"""

from .bath import (BathParams, BathRealization, correlation_analytic,
                   correlation_empirical, criteria, gamma_rate, sample_bath)
from .exact import ExactRunConfig, propagate_exact
from .ham import ham_propagate
from .master import DissipatorSpec, dephasing_spec, propagate_master
from .observables import Trajectory, coherence_measure, purity, success_probability
from .schedule import SearchModel, gap, s_of_t, system_hamiltonian

__all__ = [
    "BathParams", "BathRealization", "DissipatorSpec", "ExactRunConfig", "SearchModel",
    "Trajectory", "coherence_measure", "correlation_analytic", "correlation_empirical",
    "criteria", "dephasing_spec", "gamma_rate", "gap", "ham_propagate", "propagate_exact",
    "propagate_master", "purity", "s_of_t", "sample_bath", "success_probability",
    "system_hamiltonian",
]

__version__ = "0.1.0"
