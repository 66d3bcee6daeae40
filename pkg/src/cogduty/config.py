"""Experiment configuration: presets, flat-key config files, validation.

Config files are plain text, one `key = value` per line, with `#`
comments and blank lines ignored (see README for the grammar).  The
three shipped presets share every parameter except the mean gain from
the secondary transmitter to the primary receiver:

    channel_a   g_sp = 2
    channel_b   g_sp = 0.2
    tiny_gsp    g_sp = 0.002

Precedence: preset defaults, then config-file values, then explicit
overrides (CLI flags).  Unknown keys are rejected by name.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields
from pathlib import Path

from .link import LinkBudget
from .optimizer import GridSpec
from .sensing import SoftMetricModel
from .simulator import SimConfig
from .traffic import TrafficModel

__all__ = ["ConfigError", "ExperimentConfig", "PRESETS", "parse_config", "resolve_config"]


class ConfigError(ValueError):
    """Configuration file or key validation failure."""


_BASE = dict(
    t_on=4.0,
    t_off=5.0,
    t_s=0.05,
    r0=4.5,
    sigma2_s=1.0,
    sigma2_p=1.0,
    p_p=100.0,
    p_max=10.0,
    g_ss=2.0,
    g_pp=3.0,
    g_ps=0.03,
    gamma0=3.0,
    t_cap=20.0,
    power_points=21,
    time_points=21,
    threshold_points=15,
    refine_rounds=2,
    max_grid_evals=50_000_000,
    cycles=100_000,
    seed=0,
    replicas=10,
    sensing_lag=0.0,
    credit_sensing_primary=False,
)

PRESETS = {
    "channel_a": {**_BASE, "g_sp": 2.0},
    "channel_b": {**_BASE, "g_sp": 0.2},
    "tiny_gsp": {**_BASE, "g_sp": 0.002},
}


@dataclass(frozen=True)
class ExperimentConfig:
    """Fully resolved flat-key experiment parameters."""

    preset: str
    t_on: float
    t_off: float
    t_s: float
    r0: float
    sigma2_s: float
    sigma2_p: float
    p_p: float
    p_max: float
    g_ss: float
    g_pp: float
    g_ps: float
    g_sp: float
    gamma0: float
    t_cap: float
    power_points: int
    time_points: int
    threshold_points: int
    refine_rounds: int
    max_grid_evals: int
    cycles: int
    seed: int
    replicas: int
    sensing_lag: float
    credit_sensing_primary: bool
    overridden: tuple[str, ...] = ()

    def traffic(self) -> TrafficModel:
        try:
            return TrafficModel(self.t_on, self.t_off)
        except ValueError as exc:
            raise ConfigError(f"invalid traffic keys t_on/t_off: {exc}") from exc

    def link(self) -> LinkBudget:
        try:
            return LinkBudget(
                p_primary=self.p_p,
                r_primary=self.r0,
                noise_p=self.sigma2_p,
                noise_s=self.sigma2_s,
                mean_gain_pp=self.g_pp,
                mean_gain_ss=self.g_ss,
                mean_gain_ps=self.g_ps,
                mean_gain_sp=self.g_sp,
                p_max=self.p_max,
            )
        except ValueError as exc:
            raise ConfigError(f"invalid link keys: {exc}") from exc

    def metric(self) -> SoftMetricModel:
        try:
            return SoftMetricModel(self.gamma0)
        except ValueError as exc:
            raise ConfigError(f"invalid key gamma0: {exc}") from exc

    def grid(self) -> GridSpec:
        try:
            return GridSpec(
                power_points=self.power_points,
                time_points=self.time_points,
                threshold_points=self.threshold_points,
                refine_rounds=self.refine_rounds,
                t_cap=self.t_cap,
                max_grid_evals=self.max_grid_evals,
            )
        except ValueError as exc:
            raise ConfigError(f"invalid grid keys: {exc}") from exc

    def sim(self) -> SimConfig:
        try:
            return SimConfig(
                cycles=self.cycles,
                seed=self.seed,
                sensing_lag=self.sensing_lag,
                credit_sensing_primary=self.credit_sensing_primary,
                replicas=self.replicas,
            )
        except ValueError as exc:
            raise ConfigError(f"invalid simulation keys: {exc}") from exc

    def items(self):
        for f in fields(self):
            if f.name != "overridden":
                yield f.name, getattr(self, f.name)


_FIELD_TYPES = {
    "t_on": float,
    "t_off": float,
    "t_s": float,
    "r0": float,
    "sigma2_s": float,
    "sigma2_p": float,
    "p_p": float,
    "p_max": float,
    "g_ss": float,
    "g_pp": float,
    "g_ps": float,
    "g_sp": float,
    "gamma0": float,
    "t_cap": float,
    "power_points": int,
    "time_points": int,
    "threshold_points": int,
    "refine_rounds": int,
    "max_grid_evals": int,
    "cycles": int,
    "seed": int,
    "replicas": int,
    "sensing_lag": float,
    "credit_sensing_primary": bool,
}


def _coerce(key: str, raw: str):
    kind = _FIELD_TYPES[key]
    if kind is bool:
        lowered = raw.strip().lower()
        if lowered in ("true", "1", "yes", "on"):
            return True
        if lowered in ("false", "0", "no", "off"):
            return False
        raise ConfigError(f"key {key}: expected a boolean, got {raw!r}")
    try:
        value = kind(raw)
    except ValueError as exc:
        raise ConfigError(f"key {key}: expected {kind.__name__}, got {raw!r}") from exc
    if kind is float and not math.isfinite(value):
        raise ConfigError(f"key {key}: must be finite, got {raw!r}")
    return value


def parse_config(path) -> dict:
    """Read a flat `key = value` config file; unknown keys are rejected."""
    text = Path(path).read_text()
    values: dict = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {line!r}")
        key, raw = (part.strip() for part in stripped.split("=", 1))
        if key == "preset":
            if raw not in PRESETS and raw != "custom":
                raise ConfigError(
                    f"{path}:{lineno}: unknown preset {raw!r}; "
                    f"choose from {sorted(PRESETS)} or custom"
                )
            values["preset"] = raw
        elif key in _FIELD_TYPES:
            if key in values:
                raise ConfigError(f"{path}:{lineno}: duplicate key {key}")
            values[key] = _coerce(key, raw)
        else:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
    return values


def resolve_config(
    preset: str | None = None,
    file_values: dict | None = None,
    overrides: dict | None = None,
) -> ExperimentConfig:
    """Merge preset defaults, config-file values and explicit overrides."""
    file_values = dict(file_values or {})
    overrides = {k: v for k, v in (overrides or {}).items() if v is not None}
    preset = preset or file_values.pop("preset", None) or "custom"

    if preset == "custom":
        base: dict = {}
    elif preset in PRESETS:
        base = dict(PRESETS[preset])
    else:
        raise ConfigError(f"unknown preset {preset!r}; choose from {sorted(PRESETS)} or custom")

    merged = dict(base)
    merged.update(file_values)
    merged.update(overrides)

    missing = [k for k in _FIELD_TYPES if k not in merged]
    if missing:
        raise ConfigError(
            f"preset {preset!r} leaves keys unset: {', '.join(sorted(missing))}"
        )
    overridden = tuple(
        sorted(k for k in set(file_values) | set(overrides) if base.get(k) != merged[k] and k in base)
    )
    config = ExperimentConfig(preset=preset, overridden=overridden, **merged)
    # construct every domain object now so bad values fail at parse time,
    # with the config key named in the message
    config.traffic()
    config.link()
    config.metric()
    config.grid()
    config.sim()
    if config.t_s <= 0:
        raise ConfigError(f"key t_s: must be > 0, got {config.t_s}")
    return config
