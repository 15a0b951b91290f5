"""Run configuration: INI files with one section per component.

Example::

    [hamiltonian]
    mass = 1
    hbar = 1
    potential = 0.5 * q^2 + 0.1 * q^4

    [basis]
    order = 5
    coarsest = 3
    finest = 6
    half_width_q = 4.5
    half_width_p = 4.5

Unknown sections or keys are rejected so that typos do not silently fall
back to defaults.  A run manifest (JSON) written by the command line tool
can be loaded in place of an INI file.
"""

from __future__ import annotations

import configparser
import json
import math
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

from .diagnostics import Thresholds
from .mra.basis import MraBasis
from .mra.filters import MAX_ORDER
from .operators import HamiltonianSpec
from .symbols import parse_symbol

__all__ = ["ConfigError", "RunConfig", "load_config", "HamiltonianConfig", "BasisConfig", "SolverConfig",
           "SuperpositionConfig", "SplitConfig", "DiagnosticsConfig", "StarCheckConfig", "OutputConfig"]


class ConfigError(ValueError):
    pass


@dataclass
class HamiltonianConfig:
    mass: float = 1.0
    hbar: float = 1.0
    potential: str = "0.5 * q^2"
    symbol: str = ""

    def validate(self):
        _positive(self, "mass", "hbar")
        try:
            self.build()
        except ValueError as exc:
            raise ConfigError(f"[hamiltonian] {exc}") from exc

    def build(self) -> HamiltonianSpec:
        potential = parse_symbol(self.potential)
        symbol = parse_symbol(self.symbol) if self.symbol.strip() else None
        return HamiltonianSpec(mass=self.mass, potential=potential, hbar=self.hbar, symbol=symbol)


@dataclass
class BasisConfig:
    order: int = 5
    coarsest: int = 3
    finest: int = 6
    half_width_q: float = 4.5
    half_width_p: float = 4.5

    def validate(self):
        _positive(self, "half_width_q", "half_width_p")
        if not 1 <= self.order <= MAX_ORDER:
            raise ConfigError(f"[basis] order must lie in 1..{MAX_ORDER}")
        if not 1 <= self.coarsest <= self.finest <= 12:
            raise ConfigError("[basis] need 1 <= coarsest <= finest <= 12")

    def build(self) -> MraBasis:
        return MraBasis.create(self.order, (self.half_width_q, self.half_width_p), self.coarsest, self.finest)


@dataclass
class SolverConfig:
    n_modes: int = 6
    tau: float = 1e-3
    cluster_gap: float = 0.05
    dt: float = 0.01
    t_end: float = 2.0 * math.pi
    q0: float = 1.0
    p0: float = 0.5
    snapshot_every: int = 1

    def validate(self):
        _positive(self, "n_modes", "tau", "cluster_gap", "dt", "snapshot_every")
        if self.t_end < 0:
            raise ConfigError("[solver] t_end must be non-negative")


@dataclass
class SuperpositionConfig:
    weights: str = ""

    def validate(self):
        self.values(1)

    def values(self, n_modes: int) -> list[float]:
        """Explicit weights, or equal weights ``1/sqrt(n)`` when none are given."""
        if not self.weights.strip():
            return [1.0 / math.sqrt(n_modes)] * n_modes
        try:
            return [float(w) for w in self.weights.replace(",", " ").split()]
        except ValueError as exc:
            raise ConfigError(f"[superposition] bad weights: {self.weights!r}") from exc


@dataclass
class SplitConfig:
    N: int = 3
    M: int = 4

    def validate(self):
        if self.N < 0 or self.M < 0:
            raise ConfigError("[split] N and M must be non-negative")


@dataclass
class DiagnosticsConfig:
    waveleton_entropy: float = 0.4
    chaotic_entropy: float = 0.8
    top_level_fraction: float = 0.10
    resolution: int = 0

    def validate(self):
        try:
            self.thresholds()
        except ValueError as exc:
            raise ConfigError(f"[diagnostics] {exc}") from exc
        if self.resolution < 0 or (self.resolution & (self.resolution - 1)):
            raise ConfigError("[diagnostics] resolution must be 0 (automatic) or a power of two")

    def thresholds(self) -> Thresholds:
        return Thresholds(self.waveleton_entropy, self.chaotic_entropy, self.top_level_fraction)


@dataclass
class StarCheckConfig:
    n_triples: int = 200
    max_degree: int = 4
    hbars: str = "0.5 1 2"
    exact: bool = True
    float_tol: float = 1e-12

    def validate(self):
        _positive(self, "n_triples", "float_tol")
        if self.max_degree < 0:
            raise ConfigError("[star_check] max_degree must be non-negative")
        vals = self.hbar_values()
        if not vals or any(h <= 0 for h in vals):
            raise ConfigError("[star_check] hbars must be positive numbers")

    def hbar_values(self) -> list[float]:
        try:
            return [float(h) for h in self.hbars.replace(",", " ").split()]
        except ValueError as exc:
            raise ConfigError(f"[star_check] bad hbars: {self.hbars!r}") from exc


@dataclass
class OutputConfig:
    directory: str = "out"
    grid_resolution: int = 0

    def validate(self):
        if self.grid_resolution < 0 or (self.grid_resolution & (self.grid_resolution - 1)):
            raise ConfigError("[output] grid_resolution must be 0 (basis size) or a power of two")


@dataclass
class RunConfig:
    hamiltonian: HamiltonianConfig = field(default_factory=HamiltonianConfig)
    basis: BasisConfig = field(default_factory=BasisConfig)
    solver: SolverConfig = field(default_factory=SolverConfig)
    superposition: SuperpositionConfig = field(default_factory=SuperpositionConfig)
    split: SplitConfig = field(default_factory=SplitConfig)
    diagnostics: DiagnosticsConfig = field(default_factory=DiagnosticsConfig)
    star_check: StarCheckConfig = field(default_factory=StarCheckConfig)
    output: OutputConfig = field(default_factory=OutputConfig)

    def validate(self) -> "RunConfig":
        for f in fields(self):
            getattr(self, f.name).validate()
        if not self.basis.coarsest <= self.split.M <= self.basis.finest:
            raise ConfigError("[split] M must lie between the coarsest and finest levels")
        return self

    def to_dict(self, *, include_output: bool = True) -> dict:
        d = asdict(self)
        if not include_output:
            d.pop("output")
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "RunConfig":
        cfg = cls()
        for section, values in d.items():
            _apply(cfg, section, values.items())
        return cfg.validate()


def _positive(obj, *names):
    for n in names:
        if not getattr(obj, n) > 0:
            section = type(obj).__name__.replace("Config", "").lower()
            raise ConfigError(f"[{section}] {n} must be positive, got {getattr(obj, n)!r}")


def _section_names() -> dict[str, str]:
    return {f.name: f.name for f in fields(RunConfig)}


def _apply(cfg: RunConfig, section: str, items) -> None:
    if section not in _section_names():
        raise ConfigError(f"unknown section [{section}]")
    target = getattr(cfg, section)
    types = {f.name: f.type for f in fields(target)}
    for key, raw in items:
        if key not in types:
            raise ConfigError(f"unknown key {key!r} in [{section}]")
        setattr(target, key, _convert(raw, types[key], section, key))


def _convert(raw, typ: str, section: str, key: str):
    try:
        if typ == "bool":
            if isinstance(raw, bool):
                return raw
            low = str(raw).strip().lower()
            if low in ("1", "true", "yes", "on"):
                return True
            if low in ("0", "false", "no", "off"):
                return False
            raise ValueError(raw)
        if typ == "int":
            if isinstance(raw, float) and not raw.is_integer():
                raise ValueError(raw)
            return int(str(raw).strip()) if not isinstance(raw, (int, float)) else int(raw)
        if typ == "float":
            val = float(raw)
            if not math.isfinite(val):
                raise ValueError(raw)
            return val
        return str(raw)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"[{section}] {key}: cannot read {raw!r} as {typ}") from exc


def load_config(path: str | Path | None) -> RunConfig:
    """Read an INI file or a run manifest; ``None`` gives the validated defaults."""
    if path is None:
        return RunConfig().validate()
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    if path.suffix == ".json":
        try:
            data = json.loads(path.read_text())
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: invalid JSON ({exc})") from exc
        if "config" not in data:
            raise ConfigError(f"{path}: manifest has no 'config' entry")
        return RunConfig.from_dict(data["config"])
    parser = configparser.ConfigParser(interpolation=None)
    parser.optionxform = str  # keep key case (N, M)
    try:
        parser.read(path, encoding="utf-8")
    except configparser.Error as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    cfg = RunConfig()
    for section in parser.sections():
        _apply(cfg, section, parser.items(section))
    return cfg.validate()
