"""Random-band environment coupled to the search register.

The band has N1 equally spaced levels ``E_k = (delta_eps / N1) k``, k = 1..N1.
All qubits share one coupling matrix ``c(n1, n2)`` (n2 > n1) of complex
Gaussians with Re, Im ~ Normal(0, 1/2), so that <c> = 0, <c c> = 0 and
<|c|^2> = 1.

Random numbers come from numpy's counter-based ``Philox`` bit generator keyed
by the seed. Couplings are drawn in a single pass in lexicographic
(n1, n2) order, real and imaginary parts interleaved, which makes a
realization reproducible across platforms.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

BATH_FILE_VERSION = 1


@dataclass(frozen=True)
class BathParams:
    n_levels: int
    band_width: float
    coupling: float
    n_qubits: int
    seed: int = 0

    def __post_init__(self):
        if int(self.n_levels) != self.n_levels or self.n_levels < 2:
            raise ValueError(f"n_levels must be an integer >= 2, got {self.n_levels}")
        if not self.band_width > 0:
            raise ValueError(f"band_width must be positive, got {self.band_width}")
        if not self.coupling >= 0:
            raise ValueError(f"coupling must be non-negative, got {self.coupling}")
        if int(self.n_qubits) != self.n_qubits or self.n_qubits < 1:
            raise ValueError(f"n_qubits must be a positive integer, got {self.n_qubits}")
        if not 0 <= int(self.seed) < 2 ** 64:
            raise ValueError("seed must fit in 64 bits")

    @property
    def lambda_eff(self) -> float:
        return self.n_qubits * self.coupling / 4.0

    def with_seed(self, seed: int) -> "BathParams":
        return BathParams(self.n_levels, self.band_width, self.coupling,
                          self.n_qubits, seed)


@dataclass(frozen=True)
class BathRealization:
    """A sampled coupling matrix, stored as the packed strict upper triangle."""

    params: BathParams
    c: np.ndarray = field(repr=False)

    def dense_couplings(self) -> np.ndarray:
        """N1 x N1 array with c(n1, n2) on the strict upper triangle."""
        n1 = self.params.n_levels
        out = np.zeros((n1, n1), dtype=complex)
        out[np.triu_indices(n1, k=1)] = self.c
        return out


def rng_for(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(int(seed)))


def sample_bath(params: BathParams) -> BathRealization:
    m = params.n_levels * (params.n_levels - 1) // 2
    draws = rng_for(params.seed).standard_normal(2 * m)
    c = (draws[0::2] + 1j * draws[1::2]) * math.sqrt(0.5)
    return BathRealization(params, c)


def bath_hamiltonian_diagonal(params: BathParams) -> np.ndarray:
    k = np.arange(1, params.n_levels + 1, dtype=float)
    return params.band_width / params.n_levels * k


def reduced_bath_operator(r: BathRealization) -> np.ndarray:
    """Schrödinger-picture bath operator C entering V = sigma_z (x) C."""
    upper = -r.params.lambda_eff * r.dense_couplings()
    return upper + upper.conj().T


def interaction_picture_operator(r: BathRealization, t: float) -> np.ndarray:
    """C(t) = exp(i H_E t) C exp(-i H_E t)."""
    phase = np.exp(1j * bath_hamiltonian_diagonal(r.params) * t)
    C = reduced_bath_operator(r)
    return phase[:, None] * C * phase.conj()[None, :]


def operator_norm_bound(params: BathParams) -> float:
    """Conservative bound on ||C||, (n lambda / 4) * 2 sqrt(2 N1)."""
    return params.lambda_eff * 2.0 * math.sqrt(2.0 * params.n_levels)


def correlation_analytic(s, params: BathParams):
    """Large-N1 bath correlation G(s) = N1 (n lambda / (2 de s))^2 sin^2(de s / 2).

    Works on scalars or arrays; the s = 0 limit N1 * lambda_eff**2 is exact.
    """
    s = np.asarray(s, dtype=float)
    x = params.band_width * s / 2.0
    # np.sinc(y) = sin(pi y) / (pi y)
    sinc = np.sinc(x / np.pi)
    out = params.n_levels * params.lambda_eff ** 2 * sinc ** 2
    return out if out.ndim else float(out)


def correlation_empirical(r: BathRealization, s, rho_E: str = "identity"):
    """Tr_E{C(s) C(0) rho_E} for one realization, with rho_E = I / N1.

    Only the maximally mixed bath state is supported (``rho_E="identity"``).
    """
    if rho_E != "identity":
        raise ValueError(f"unsupported bath state {rho_E!r}; only 'identity' (I/N1)")
    p = r.params
    rows, cols = np.triu_indices(p.n_levels, k=1)
    omega_unit = p.band_width / p.n_levels
    # Aggregate |c|^2 by level separation d = n2 - n1 so the cost in s is O(N1).
    weights = np.bincount(cols - rows, weights=np.abs(r.c) ** 2, minlength=p.n_levels)[1:]
    d = np.arange(1, p.n_levels, dtype=float)
    s_arr = np.atleast_1d(np.asarray(s, dtype=float))
    vals = (2.0 * p.lambda_eff ** 2 / p.n_levels) * (
        np.cos(np.outer(s_arr, d) * omega_unit) @ weights
    )
    return vals if np.ndim(s) else float(vals[0])


def gamma_rate(params: BathParams) -> float:
    """Markovian dephasing rate n^2 lambda^2 pi N1 / (8 delta_eps)."""
    if not params.band_width > 0:
        raise ValueError("band_width must be positive")
    return (params.n_qubits ** 2 * params.coupling ** 2 * math.pi
            * params.n_levels / (8.0 * params.band_width))


@dataclass(frozen=True)
class Criteria:
    c1: float
    c2: float
    c1_ok: bool
    c2_ok: bool

    @property
    def satisfied(self) -> bool:
        return self.c1_ok and self.c2_ok


C2_THRESHOLD = 0.1


def criteria(params: BathParams) -> Criteria:
    """Validity numbers c1 = l_eff N1 / de (>= 1/2) and c2 = l_eff^2 N1 / de^2 (<< 1)."""
    if not params.band_width > 0:
        raise ValueError("band_width must be positive")
    le = params.lambda_eff
    c1 = le * params.n_levels / params.band_width
    c2 = le ** 2 * params.n_levels / params.band_width ** 2
    return Criteria(c1, c2, c1 >= 0.5, c2 < C2_THRESHOLD)


def save_bath(params: BathParams, path) -> None:
    """Persist a realization as its parameters and seed; couplings are re-derived."""
    payload = {"format": "ham-adiabatic-bath", "version": BATH_FILE_VERSION,
               **asdict(params)}
    Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def load_bath(path) -> BathRealization:
    payload = json.loads(Path(path).read_text())
    if payload.get("format") != "ham-adiabatic-bath":
        raise ValueError(f"{path}: not a bath file")
    if payload.get("version") != BATH_FILE_VERSION:
        raise ValueError(f"{path}: unsupported bath file version {payload.get('version')}")
    params = BathParams(
        n_levels=int(payload["n_levels"]),
        band_width=float(payload["band_width"]),
        coupling=float(payload["coupling"]),
        n_qubits=int(payload["n_qubits"]),
        seed=int(payload["seed"]),
    )
    return sample_bath(params)
