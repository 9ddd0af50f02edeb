"""Run configuration, presets and INI-style config files."""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

from .bath import BathParams, operator_norm_bound
from .ham import MAX_HAM_LEVELS
from .schedule import SearchModel

SOLVERS = ("exact", "master", "ham")


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    n_qubits: int = 12
    epsilon: float = 0.1
    n_levels: int = 2000
    delta_eps: float = 0.5
    couplings: list[float] = field(default_factory=lambda: [1e-4])
    seeds: list[int] = field(default_factory=lambda: [0])
    solvers: list[str] = field(default_factory=lambda: ["exact", "master"])
    dt: float | None = None
    tau: float | None = None
    quad_points: int = 32
    sample_interval: float | None = None
    out_dir: str = "out"

    def validate(self) -> "RunConfig":
        """Check every module precondition up front; raise naming the first violation."""
        try:
            SearchModel(self.n_qubits, self.epsilon)
            for lam in self.couplings:
                BathParams(self.n_levels, self.delta_eps, lam, self.n_qubits, 0)
            for s in self.seeds:
                BathParams(self.n_levels, self.delta_eps, 0.0, self.n_qubits, s)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        if not self.couplings:
            raise ConfigError("at least one coupling (lambda) is required")
        if not self.seeds:
            raise ConfigError("at least one seed is required")
        if len(set(self.seeds)) != len(self.seeds):
            raise ConfigError("seed list contains duplicates")
        bad = [s for s in self.solvers if s not in SOLVERS]
        if bad or not self.solvers:
            raise ConfigError(f"unknown solver(s) {bad}; choose from {', '.join(SOLVERS)}")
        if "ham" in self.solvers and self.n_levels > MAX_HAM_LEVELS:
            raise ConfigError(f"ham solver requires n_levels <= {MAX_HAM_LEVELS}, got {self.n_levels}")
        if self.dt is not None and not 0 < self.dt <= 0.05:
            raise ConfigError(f"dt must lie in (0, 0.05], got {self.dt}")
        if self.dt is not None and "exact" in self.solvers:
            for lam in self.couplings:
                p = BathParams(self.n_levels, self.delta_eps, lam, self.n_qubits, 0)
                limit = 0.05 / (1.0 + p.band_width + operator_norm_bound(p))
                if self.dt > limit:
                    raise ConfigError(f"dt={self.dt} exceeds the exact-solver limit "
                                      f"0.05/(1 + de + ||C||) = {limit:.4g} at lambda={lam:g}")
        if self.tau is not None and not self.tau > 0:
            raise ConfigError(f"tau must be positive, got {self.tau}")
        if self.quad_points < 2:
            raise ConfigError(f"quad_points must be >= 2, got {self.quad_points}")
        if self.sample_interval is not None and not self.sample_interval > 0:
            raise ConfigError(f"sample_interval must be positive, got {self.sample_interval}")
        return self

    @property
    def model(self) -> SearchModel:
        return SearchModel(self.n_qubits, self.epsilon)

    def bath_params(self, coupling: float, seed: int = 0) -> BathParams:
        return BathParams(self.n_levels, self.delta_eps, coupling, self.n_qubits, seed)


PRESETS: dict[str, RunConfig] = {
    "figure1": RunConfig(
        n_qubits=12, epsilon=0.1, n_levels=2000, delta_eps=0.5,
        couplings=[0.0, 1e-4, 5e-4], seeds=[0], solvers=["exact", "master"],
    ),
    # lambda_eff = 8 * 6.25e-4 / 4 = 1.25e-3, so c1 = 0.5 and c2 = 1.25e-3.
    "desk": RunConfig(
        n_qubits=8, epsilon=0.1, n_levels=200, delta_eps=0.5,
        couplings=[6.25e-4], seeds=list(range(10)), solvers=["exact", "master"],
    ),
    # Wide band so that 1/de << t_total and tau = 2/de stays short; c1 = 0.5.
    "toy": RunConfig(
        n_qubits=4, epsilon=0.1, n_levels=32, delta_eps=4.0,
        couplings=[0.0625], seeds=[0], solvers=["exact", "master", "ham"],
    ),
}

PRESET_NOTES = {
    "figure1": "full scale, n=12, N1=2000, lambda in {0, 1e-4, 5e-4}",
    "desk": "n=8, N1=200, lambda_eff=1.25e-3, 10 seeds",
    "toy": "n=4, N1=32, de=4, all three solvers",
}


def preset(name: str) -> RunConfig:
    try:
        base = PRESETS[name]
    except KeyError:
        raise ConfigError(f"unknown preset {name!r}; available: {', '.join(PRESETS)}") from None
    return replace(base, couplings=list(base.couplings), seeds=list(base.seeds),
                   solvers=list(base.solvers))


def _parse_list(text: str, conv) -> list:
    return [conv(x) for x in text.replace(",", " ").split()]


_CONVERTERS = {
    "n_qubits": int, "epsilon": float, "n_levels": int, "delta_eps": float,
    "couplings": lambda v: _parse_list(v, float),
    "seeds": lambda v: _parse_list(v, int),
    "solvers": lambda v: _parse_list(v, str),
    "dt": float, "tau": float, "quad_points": int, "sample_interval": float,
    "out_dir": str,
}
_ALIASES = {"lambda": "couplings", "coupling": "couplings", "n1": "n_levels",
            "solver": "solvers", "seed_list": "seeds"}


def apply_overrides(cfg: RunConfig, values: dict) -> RunConfig:
    """Return ``cfg`` with string- or typed-valued overrides applied."""
    known = {f.name for f in fields(RunConfig)}
    updates = {}
    for key, value in values.items():
        key = _ALIASES.get(key, key)
        if key not in known:
            raise ConfigError(f"unknown config key {key!r}")
        if value is None:
            continue
        updates[key] = _CONVERTERS[key](value) if isinstance(value, str) else value
    return replace(cfg, **updates)


def load_config(path, base: RunConfig | None = None) -> RunConfig:
    """Read a flat ``key = value`` file (an optional ``[run]`` header is allowed).

    A ``preset`` key selects the starting point; the remaining keys override it.
    """
    text = Path(path).read_text()
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    if not text.lstrip().startswith("["):
        text = "[run]\n" + text
    parser.read_string(text)
    section = parser["run"] if parser.has_section("run") else parser[parser.sections()[0]]
    values = dict(section)
    name = values.pop("preset", None)
    start = preset(name) if name else (base or RunConfig())
    return apply_overrides(start, values)
