"""Experiment configuration: a flat, strictly validated YAML schema.

Unknown keys are hard errors so typos never silently fall back to defaults.
Loading materializes every default, and serialize/parse round-trips to an
equal config, which is what makes --describe output reusable as an input.
"""

from __future__ import annotations

from dataclasses import dataclass, fields
from typing import Any

import yaml

from .dynamics import (
    BetaSchedule,
    ConstantSchedule,
    DynamicsParams,
    ShockSchedule,
    SinusoidalSchedule,
    UpdateRule,
    _coerce_rule,
)
from .errors import ConfigError, ParameterError
from .experiments import DEFAULT_ALPHA_GRID, DEFAULT_STEADY_TOL, DEFAULT_STEADY_WINDOW
from .metrics import EntropyMeasure

KINDS = ("single", "sweep", "phase", "irreversibility", "universality", "sensitivity")

_SCHEDULES = ("constant", "sinusoidal", "shock")


def _as_int(key: str, value: Any) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{key} must be an integer, got {value!r}")
    return value


def _as_float(key: str, value: Any) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{key} must be a number, got {value!r}")
    return float(value)


def _as_str(key: str, value: Any) -> str:
    if not isinstance(value, str):
        raise ConfigError(f"{key} must be a string, got {value!r}")
    return value


def _as_float_tuple(key: str, value: Any) -> tuple[float, ...]:
    if not isinstance(value, (list, tuple)) or not value:
        raise ConfigError(f"{key} must be a non-empty list of numbers, got {value!r}")
    return tuple(_as_float(f"{key}[{i}]", v) for i, v in enumerate(value))


@dataclass(frozen=True)
class ExperimentConfig:
    kind: str
    n_states: int = 100
    horizon: int = 500
    rule: str = "multiplicative"
    alpha: float | None = None
    beta: float = 0.003
    noise_sigma: float = 0.0
    replicates: int = 10
    master_seed: int = 42
    out_dir: str = "out"
    measure: str = "shannon"
    renyi_q: float = 2.0
    beta_schedule: str = "constant"
    schedule_amplitude: float = 0.5
    schedule_period: float | None = None
    shock_start: int = 50
    shock_end: int = 100
    shock_multiplier: float = 15.0
    replicate: int = 0
    alphas: tuple[float, ...] | None = None
    betas: tuple[float, ...] | None = None
    window: int = DEFAULT_STEADY_WINDOW
    tol: float = DEFAULT_STEADY_TOL
    grid_points: int = 200

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise ConfigError(f"kind must be one of {', '.join(KINDS)}, got {self.kind!r}")
        _coerce_rule(self.rule)
        if self.n_states < 2:
            raise ParameterError(f"n_states must be >= 2, got {self.n_states}")
        if self.horizon < 1:
            raise ParameterError(f"horizon must be >= 1, got {self.horizon}")
        if not 0.0 <= self.beta <= 1.0:
            raise ParameterError(f"beta must be in [0, 1], got {self.beta}")
        if self.noise_sigma < 0.0:
            raise ParameterError(f"noise_sigma must be >= 0, got {self.noise_sigma}")
        if self.replicates < 1:
            raise ParameterError(f"replicates must be >= 1, got {self.replicates}")
        if self.master_seed < 0:
            raise ParameterError(f"master_seed must be >= 0, got {self.master_seed}")
        if self.replicate < 0:
            raise ParameterError(f"replicate must be >= 0, got {self.replicate}")
        if self.measure not in ("shannon", "renyi"):
            raise ConfigError(f"measure must be shannon or renyi, got {self.measure!r}")
        if not self.renyi_q > 0.0:
            raise ParameterError(f"renyi_q must be > 0, got {self.renyi_q}")
        if self.beta_schedule not in _SCHEDULES:
            raise ConfigError(
                f"beta_schedule must be one of {', '.join(_SCHEDULES)}, got {self.beta_schedule!r}"
            )
        if self.window < 2:
            raise ParameterError(f"window must be >= 2, got {self.window}")
        if not self.tol > 0.0:
            raise ParameterError(f"tol must be > 0, got {self.tol}")
        if self.grid_points < 10:
            raise ParameterError(f"grid_points must be >= 10, got {self.grid_points}")
        if self.alpha is not None and (self.alpha < 0.0):
            raise ParameterError(f"alpha must be >= 0, got {self.alpha}")

        # Materialize per-kind defaults so serialization round-trips exactly.
        if self.alpha is None and self.kind == "universality":
            object.__setattr__(self, "alpha", 1.5)
        if self.alphas is None and self.kind in ("sweep", "sensitivity"):
            object.__setattr__(self, "alphas", DEFAULT_ALPHA_GRID)

        if self.kind in ("single", "irreversibility") and self.alpha is None:
            raise ConfigError(f"alpha is required for kind={self.kind}")
        if self.kind == "phase":
            if self.alphas is None:
                raise ConfigError("alphas is required for kind=phase")
            if self.betas is None:
                raise ConfigError("betas is required for kind=phase")
        if self.alphas is not None and len(self.alphas) < 1:
            raise ConfigError("alphas must not be empty")

    def schedule(self) -> BetaSchedule:
        if self.beta_schedule == "constant":
            return ConstantSchedule()
        if self.beta_schedule == "sinusoidal":
            return SinusoidalSchedule(amplitude=self.schedule_amplitude, period=self.schedule_period)
        return ShockSchedule(
            start=self.shock_start, end=self.shock_end, multiplier=self.shock_multiplier
        )

    def dynamics_params(self, alpha: float | None = None) -> DynamicsParams:
        a = self.alpha if alpha is None else alpha
        if a is None:
            raise ConfigError(f"alpha is required for kind={self.kind}")
        return DynamicsParams(
            alpha=a,
            beta=self.beta,
            rule=UpdateRule(self.rule),
            noise_sigma=self.noise_sigma,
            schedule=self.schedule(),
        )

    def entropy_measure(self) -> EntropyMeasure:
        if self.measure == "shannon":
            return EntropyMeasure("shannon")
        return EntropyMeasure("renyi", self.renyi_q)


_FIELD_NAMES = tuple(f.name for f in fields(ExperimentConfig))


def config_from_dict(data: dict[str, Any]) -> ExperimentConfig:
    if not isinstance(data, dict):
        raise ConfigError(f"config must be a mapping, got {type(data).__name__}")
    for key in data:
        if key not in _FIELD_NAMES:
            raise ConfigError(f"unknown config key {key!r}")
    if "kind" not in data:
        raise ConfigError("kind is required")
    kwargs: dict[str, Any] = {"kind": _as_str("kind", data["kind"])}
    for key, value in data.items():
        if key == "kind":
            continue
        if value is None:
            if key in ("alpha", "alphas", "betas", "schedule_period"):
                kwargs[key] = None
                continue
            raise ConfigError(f"{key} must not be null")
        if key in ("n_states", "horizon", "replicates", "master_seed", "replicate",
                   "shock_start", "shock_end", "window", "grid_points"):
            kwargs[key] = _as_int(key, value)
        elif key in ("alpha", "beta", "noise_sigma", "renyi_q", "schedule_amplitude",
                     "schedule_period", "shock_multiplier", "tol"):
            kwargs[key] = _as_float(key, value)
        elif key in ("rule", "out_dir", "measure", "beta_schedule"):
            kwargs[key] = _as_str(key, value)
        elif key in ("alphas", "betas"):
            kwargs[key] = _as_float_tuple(key, value)
        else:
            raise ConfigError(f"unknown config key {key!r}")
    return ExperimentConfig(**kwargs)


def config_to_dict(config: ExperimentConfig) -> dict[str, Any]:
    out: dict[str, Any] = {}
    for f in fields(ExperimentConfig):
        value = getattr(config, f.name)
        if isinstance(value, tuple):
            value = list(value)
        out[f.name] = value
    return out


def serialize_config(config: ExperimentConfig) -> str:
    return yaml.safe_dump(config_to_dict(config), sort_keys=False, default_flow_style=False)


def load_config(path: str) -> ExperimentConfig:
    """Parse and validate a YAML config file.

    Raises ConfigError for schema problems and lets I/O errors propagate.
    """
    with open(path, encoding="utf-8") as fh:
        try:
            data = yaml.safe_load(fh)
        except yaml.YAMLError as exc:
            raise ConfigError(f"config is not valid YAML: {exc}") from None
    if data is None:
        raise ConfigError("config file is empty")
    return config_from_dict(data)
