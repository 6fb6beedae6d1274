"""Run configuration: one JSON document with ``model``, ``sweep``, ``ed`` and ``output`` blocks."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path
from typing import Any

from .errors import ValidationError
from .lattice import HoppingSpec, uniform_chain
from .meanfield import ModelParams

SWEEPABLE = ("omega_z", "g", "Delta", "t")


class ConfigError(ValidationError):
    pass


@dataclass(frozen=True)
class ModelConfig:
    omega_z: float = 1.0
    g: float = 1.0
    Delta: float = 1.0
    t: float = 0.5
    N: int = 100
    lattice_kind: str = "nn-periodic"
    onsite: tuple[float, ...] | None = None
    hopping_matrix: tuple[tuple[float, ...], ...] | None = None

    def __post_init__(self):
        if self.lattice_kind not in ("nn-periodic", "explicit"):
            raise ConfigError(f"lattice_kind must be 'nn-periodic' or 'explicit', got {self.lattice_kind!r}")
        if self.lattice_kind == "explicit" and self.hopping_matrix is None:
            raise ConfigError("explicit lattice needs hopping_matrix")
        if int(self.N) != self.N or self.N < 1:
            raise ConfigError(f"N must be a positive integer, got {self.N}")

    def lattice(self) -> HoppingSpec:
        """Nearest-neighbour chains follow the band convention Delta + 2t(1 - cos k)
        (see :func:`uniform_chain`); with explicit ``onsite`` values the amplitude is -t."""
        if self.lattice_kind == "explicit":
            m = self.hopping_matrix
            onsite = self.onsite if self.onsite is not None else (self.Delta,) * len(m)
            return HoppingSpec.explicit(onsite, m)
        if self.onsite is not None:
            if len(self.onsite) != self.N:
                raise ConfigError(f"onsite has {len(self.onsite)} entries, expected N={self.N}")
            return HoppingSpec.nearest_neighbor(self.N, self.onsite, -self.t)
        return uniform_chain(int(self.N), self.Delta, self.t)

    def params(self) -> ModelParams:
        return ModelParams(omega_z=self.omega_z, g=self.g, lattice=self.lattice())


@dataclass(frozen=True)
class SweepConfig:
    parameter: str
    start: float
    stop: float
    points: int
    quantity: str = "meanfield"

    def __post_init__(self):
        if self.parameter not in SWEEPABLE:
            raise ConfigError(f"sweep parameter must be one of {SWEEPABLE}, got {self.parameter!r}")
        if self.points < 1:
            raise ConfigError("sweep needs at least one point")
        if self.quantity not in ("meanfield", "gaps"):
            raise ConfigError(f"sweep quantity must be 'meanfield' or 'gaps', got {self.quantity!r}")


@dataclass(frozen=True)
class EDConfig:
    n_max: int = 10
    N_sites: int = 1
    num_levels: int = 6
    scheme: str = "total"


@dataclass(frozen=True)
class OutputConfig:
    format: str = "csv"
    path: str | None = None
    precision: int = 12

    def __post_init__(self):
        if self.format not in ("csv", "json"):
            raise ConfigError(f"output format must be 'csv' or 'json', got {self.format!r}")
        if not 6 <= self.precision <= 17:
            raise ConfigError(f"precision must lie in [6, 17], got {self.precision}")


@dataclass(frozen=True)
class RunConfig:
    model: ModelConfig = field(default_factory=ModelConfig)
    sweep: SweepConfig | None = None
    ed: EDConfig | None = None
    output: OutputConfig = field(default_factory=OutputConfig)
    units: str = "g"

    def __post_init__(self):
        if self.units not in ("g", "absolute"):
            raise ConfigError(f"units must be 'g' or 'absolute', got {self.units!r}")


def _tupleize(value):
    if isinstance(value, list):
        return tuple(_tupleize(v) for v in value)
    return value


def _build(cls, data: Any, where: str):
    if not isinstance(data, dict):
        raise ConfigError(f"{where} must be a JSON object")
    known = {f.name for f in fields(cls)}
    unknown = set(data) - known
    if unknown:
        raise ConfigError(f"unknown keys in {where}: {sorted(unknown)}")
    try:
        return cls(**{k: _tupleize(v) for k, v in data.items()})
    except TypeError as exc:
        raise ConfigError(f"bad {where} block: {exc}") from exc


def config_from_dict(data: dict) -> RunConfig:
    if not isinstance(data, dict):
        raise ConfigError("configuration must be a JSON object")
    unknown = set(data) - {"model", "sweep", "ed", "output", "units"}
    if unknown:
        raise ConfigError(f"unknown top-level keys: {sorted(unknown)}")
    return RunConfig(
        model=_build(ModelConfig, data.get("model", {}), "model"),
        sweep=_build(SweepConfig, data["sweep"], "sweep") if data.get("sweep") is not None else None,
        ed=_build(EDConfig, data["ed"], "ed") if data.get("ed") is not None else None,
        output=_build(OutputConfig, data.get("output", {}), "output"),
        units=data.get("units", "g"),
    )


def load_config(path: str | Path | None) -> RunConfig:
    if path is None:
        return RunConfig()
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    return config_from_dict(data)


def apply_overrides(config: RunConfig, overrides: list[str]) -> RunConfig:
    """Apply ``block.key=value`` strings; values are parsed as JSON when possible."""
    data = config_to_dict(config)
    for item in overrides:
        if "=" not in item:
            raise ConfigError(f"override {item!r} is not of the form key=value")
        key, raw = item.split("=", 1)
        try:
            value = json.loads(raw)
        except json.JSONDecodeError:
            value = raw
        parts = key.split(".")
        node = data
        for p in parts[:-1]:
            if node.get(p) is None:
                node[p] = {}
            node = node[p]
        node[parts[-1]] = value
    return config_from_dict(data)


def config_to_dict(config: RunConfig) -> dict:
    return json.loads(json.dumps(asdict(config)))


def with_model(config: RunConfig, **changes) -> RunConfig:
    return replace(config, model=replace(config.model, **changes))
