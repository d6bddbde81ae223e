"""Run configuration: a YAML document with model, scenario, engine,
calibration and paths blocks.

Every block is optional and falls back to the built-in defaults; unknown
keys anywhere are rejected. ``AGROBIO_CONFIG`` names the file used when no
path is given explicitly.
"""
from __future__ import annotations

import dataclasses
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping

import yaml

from .calibration import CalibrationSpec
from .core import ConfigurationError, ModelParams
from .policy import ScenarioConfig

CONFIG_ENV = "AGROBIO_CONFIG"


@dataclass(frozen=True)
class EngineConfig:
    """Replica seeds and execution settings.

    Replica ``i`` uses seed ``seed + i``.
    """

    seed: int = 0
    replicas: int = 10
    n_jobs: int = 1
    desk_scale: bool = False
    theta_grid: tuple[float, ...] = (0.0, 0.001, 0.002, 0.003, 0.005, 0.01)

    def __post_init__(self):
        if self.replicas < 1:
            raise ConfigurationError("replicas must be at least 1")
        if self.n_jobs < 1:
            raise ConfigurationError("n_jobs must be at least 1")
        if not 0 <= self.seed < 2**64:
            raise ConfigurationError("seed must be a non-negative 64-bit integer")

    @property
    def seeds(self) -> list[int]:
        return [self.seed + i for i in range(self.replicas)]


@dataclass(frozen=True)
class PathsConfig:
    reference_dir: str | None = None  # None: the fixtures bundled with the package
    output_dir: str = "results"


@dataclass(frozen=True)
class RunConfig:
    model: ModelParams = field(default_factory=ModelParams)
    scenario: ScenarioConfig = field(default_factory=ScenarioConfig)
    engine: EngineConfig = field(default_factory=EngineConfig)
    calibration: CalibrationSpec = field(default_factory=CalibrationSpec)
    paths: PathsConfig = field(default_factory=PathsConfig)

    def params(self) -> ModelParams:
        """Model parameters, shrunk to desk scale if the engine block asks for it."""
        return self.model.desk_scale() if self.engine.desk_scale else self.model

    def replace(self, **blocks) -> "RunConfig":
        return dataclasses.replace(self, **blocks)

    def to_dict(self) -> dict[str, Any]:
        return {name: _block_to_dict(getattr(self, name)) for name in _BLOCKS}

    def to_yaml(self) -> str:
        return yaml.safe_dump(self.to_dict(), sort_keys=False)

    @classmethod
    def from_dict(cls, data: Mapping[str, Any] | None) -> "RunConfig":
        data = {} if data is None else data
        if not isinstance(data, Mapping):
            raise ConfigurationError("configuration must be a mapping of blocks")
        unknown = set(data) - set(_BLOCKS)
        if unknown:
            raise ConfigurationError(f"unknown configuration block(s): {', '.join(sorted(unknown))}")
        blocks = {}
        for name, kind in _BLOCKS.items():
            blocks[name] = _block_from_dict(kind, data.get(name) or {}, name)
        return cls(**blocks)

    @classmethod
    def from_yaml(cls, text: str) -> "RunConfig":
        try:
            data = yaml.safe_load(text)
        except yaml.YAMLError as exc:
            raise ConfigurationError(f"invalid YAML: {exc}") from None
        return cls.from_dict(data)


_BLOCKS = {
    "model": ModelParams,
    "scenario": ScenarioConfig,
    "engine": EngineConfig,
    "calibration": CalibrationSpec,
    "paths": PathsConfig,
}


def _plain(value):
    if isinstance(value, tuple):
        return [_plain(v) for v in value]
    if isinstance(value, Mapping):
        return {k: _plain(v) for k, v in value.items()}
    return value


def _block_to_dict(block) -> dict[str, Any]:
    return {f.name: _plain(getattr(block, f.name)) for f in dataclasses.fields(block)}


def _coerce(kind, name: str, value):
    """Turn YAML lists back into the tuples the dataclasses hold."""
    if kind is CalibrationSpec and name == "ranges":
        if not isinstance(value, Mapping):
            raise ConfigurationError("calibration.ranges must be a mapping")
        return {k: tuple(float(x) for x in v) for k, v in value.items()}
    if isinstance(value, list):
        return tuple(value)
    default = _defaults(kind).get(name)
    if isinstance(default, float) and isinstance(value, (int, str)) and not isinstance(value, bool):
        # YAML reads 1e7 (no dot) as a string
        try:
            return float(value)
        except ValueError:
            raise ConfigurationError(f"{name}: expected a number, got {value!r}") from None
    return value


def _defaults(kind) -> dict[str, Any]:
    return {f.name: f.default for f in dataclasses.fields(kind) if f.default is not dataclasses.MISSING}


def _block_from_dict(kind, data, block_name: str):
    if not isinstance(data, Mapping):
        raise ConfigurationError(f"block {block_name!r} must be a mapping")
    names = {f.name for f in dataclasses.fields(kind)}
    unknown = set(data) - names
    if unknown:
        raise ConfigurationError(f"unknown key(s) in {block_name!r}: {', '.join(sorted(unknown))}")
    try:
        return kind(**{k: _coerce(kind, k, v) for k, v in data.items()})
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ConfigurationError):
            raise
        raise ConfigurationError(f"{block_name}: {exc}") from None


def load_config(path: str | os.PathLike | None = None) -> RunConfig:
    """Read a run configuration.

    With no ``path``, the file named by ``AGROBIO_CONFIG`` is used if set,
    otherwise the built-in defaults.
    """
    if path is None:
        path = os.environ.get(CONFIG_ENV) or None
    if path is None:
        return RunConfig()
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigurationError(f"{path}: {exc.strerror or exc}") from None
    return RunConfig.from_yaml(text)


def save_config(config: RunConfig, path: str | os.PathLike) -> None:
    Path(path).write_text(config.to_yaml())
