"""Experiment configuration loaded from JSON.

Unknown keys are rejected so typos surface as configuration errors rather
than silently falling back to defaults.
"""
from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass, field, fields
from pathlib import Path

from .errors import ConfigError, ResourceError
from .geometry import MODELS

MAX_DEPTH = 8          # cylinder depth cap for tables (m^(2d+1) entries)
MAX_TABLE = 2 ** 17    # largest table the CLI will build
MAX_INSTANCES = 10 ** 6


@dataclass
class Tolerances:
    geometry: float = 1e-8
    ppo: float = 1e-9
    livsic: float = 1e-8
    factor: float = 1e-7
    invariance: float = 1e-6
    gauge: float = 1e-5
    isometry: float = 1e-6


@dataclass
class GeneratorSpec:
    """Synthetic cocycle source.

    ``kind`` is ``coboundary`` (hidden transfer function of ``depth``),
    ``identity``, ``constant`` (one random isometry everywhere) or ``random``.
    """
    kind: str = "coboundary"
    depth: int = 2
    scale: float = 1.0


@dataclass
class ExperimentConfig:
    schema_version: int = 1
    model: str = "halfplane"
    alphabet: int = 2
    seed: int = 42
    eps: float = 1.0
    tau: float = 1.0
    tolerances: Tolerances = field(default_factory=Tolerances)
    generator: GeneratorSpec = field(default_factory=GeneratorSpec)
    cocycle_file: str | None = None
    instance_file: str | None = None
    psi_file: str | None = None
    livsic_perturbation: float = 0.0
    base_point: list | str | None = None
    depth: int = 6
    livsic_depth: int = 6
    livsic_source_depth: int = 2
    orbit_budget: int | None = None
    max_period: int | None = None
    instances: int = 100
    triples: int = 10_000
    samples: int = 1000
    anchors: int = 3
    out_dir: str = "out"

    def __post_init__(self):
        if isinstance(self.tolerances, dict):
            self.tolerances = _build(Tolerances, self.tolerances, "tolerances")
        if isinstance(self.generator, dict):
            self.generator = _build(GeneratorSpec, self.generator, "generator")
        self.validate()

    def validate(self) -> None:
        if self.schema_version != 1:
            raise ConfigError(f"unsupported schema_version {self.schema_version!r}")
        if self.model not in MODELS:
            raise ConfigError(f"unknown model {self.model!r}; expected one of {sorted(MODELS)}")
        for name in ("alphabet", "seed", "depth", "livsic_depth", "livsic_source_depth",
                     "instances", "triples", "samples", "anchors"):
            v = getattr(self, name)
            if not isinstance(v, int) or isinstance(v, bool) or v < 0:
                raise ConfigError(f"{name} must be a non-negative integer, got {v!r}")
        if self.alphabet < 2:
            raise ConfigError("alphabet must have at least 2 symbols")
        if not 0 <= self.seed < 2 ** 64:
            raise ConfigError("seed must fit in 64 bits")
        if not isinstance(self.livsic_perturbation, (int, float)) or isinstance(self.livsic_perturbation, bool):
            raise ConfigError("livsic_perturbation must be a number")
        for name in ("eps", "tau"):
            v = getattr(self, name)
            if not isinstance(v, (int, float)) or not v > 0:
                raise ConfigError(f"{name} must be positive, got {v!r}")
        for f in fields(Tolerances):
            v = getattr(self.tolerances, f.name)
            if not isinstance(v, (int, float)) or isinstance(v, bool) or not v > 0:
                raise ConfigError(f"tolerance {f.name} must be positive, got {v!r}")
        if self.generator.kind not in ("coboundary", "identity", "constant", "random"):
            raise ConfigError(f"unknown generator kind {self.generator.kind!r}")
        if not isinstance(self.generator.depth, int) or self.generator.depth < 0:
            raise ConfigError("generator depth must be a non-negative integer")
        if not self.generator.scale > 0:
            raise ConfigError("generator scale must be positive")
        for name in ("orbit_budget", "max_period"):
            v = getattr(self, name)
            if v is not None and (not isinstance(v, int) or v < 1):
                raise ConfigError(f"{name} must be a positive integer or null")
        self.check_resources()

    def check_resources(self) -> None:
        """Depths and counts must stay within the desk-scale caps."""
        for name in ("depth", "livsic_depth"):
            d = getattr(self, name)
            if d > MAX_DEPTH or self.alphabet ** (2 * d + 1) > MAX_TABLE:
                raise ResourceError(f"{name}={d} exceeds the table cap for alphabet {self.alphabet}")
        if self.generator.depth + 1 > self.depth or self.livsic_source_depth > self.livsic_depth:
            raise ConfigError("generator depth must be below the working cylinder depth")
        for name in ("instances", "triples", "samples"):
            if getattr(self, name) > MAX_INSTANCES:
                raise ResourceError(f"{name} exceeds the cap {MAX_INSTANCES}")

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    def replace(self, **changes) -> "ExperimentConfig":
        return dataclasses.replace(self, **changes)


def _build(cls, data, where):
    if not isinstance(data, dict):
        raise ConfigError(f"{where} must be a JSON object")
    known = {f.name for f in fields(cls)}
    unknown = sorted(set(data) - known)
    if unknown:
        raise ConfigError(f"unknown keys in {where}: {unknown}")
    try:
        return cls(**data)
    except TypeError as exc:
        raise ConfigError(f"bad {where}: {exc}") from exc


def config_from_dict(data) -> ExperimentConfig:
    return _build(ExperimentConfig, data, "config")


def load_config(path) -> ExperimentConfig:
    try:
        data = json.loads(Path(path).read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    return config_from_dict(data)


__all__ = ["ExperimentConfig", "Tolerances", "GeneratorSpec", "config_from_dict",
           "load_config", "MAX_DEPTH", "MAX_TABLE"]
