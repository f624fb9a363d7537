# SPDX-License-Identifier: Apache-2.0

from __future__ import annotations

import json
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Any

try:
    import tomllib
except ModuleNotFoundError:  # pragma: no cover
    import tomli as tomllib  # type: ignore

from ensemble_cluster.dynamics.params import (
    DEFAULT_COUPLING_HZ,
    DEFAULT_DISPERSIVE_RATIO,
    DEFAULT_DRIVE_DETUNING_FACTOR,
    DEFAULT_LIFETIME_S,
    DEFAULT_OMEGA_0_HZ,
    DEFAULT_OMEGA_1_HZ,
    ParameterError,
    PhysicalParams,
    hz,
    params_from_detunings,
)

DEFAULT_ATOMS = 100


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class PhysicsConfig:
    omega_0_hz: float | None = None
    omega_1_hz: float | None = None
    coupling_hz: float | None = None
    atoms: int | None = None
    cavity_detuning_hz: float | None = None
    omega_c_hz: float | None = None
    dispersive_ratio: float | None = None
    drive_detuning_hz: float | None = None
    omega_L_hz: float | None = None
    drive_detuning_factor: float | None = None
    rabi_hz: float | None = None
    auto_resonance: bool | None = None
    lifetime_s: float | None = None


@dataclass(frozen=True)
class RunSection:
    chain_length: int | None = None
    tier: str | None = None
    mode_truncation: int | None = None
    cavity_truncation: int | None = None
    seed: int | None = None
    out: str | None = None
    leakage_bound: float | None = None
    vacuum_residual_bound: float | None = None
    atom_release_bound: float | None = None
    zone_transit_s: float | None = None
    trace_intermediates: bool | None = None
    embed_states: bool | None = None


@dataclass(frozen=True)
class FusionSection:
    chain_a_length: int | None = None
    chain_b_length: int | None = None
    node_a: int | None = None
    node_b: int | None = None
    trials: int | None = None
    postselect: str | None = None
    chain_a_snapshot: str | None = None
    chain_b_snapshot: str | None = None
    workers: int | None = None


@dataclass(frozen=True)
class ValidateSection:
    atoms: list[int] | None = None
    ratios: list[float] | None = None
    chain_length: int | None = None
    workers: int | None = None


@dataclass(frozen=True)
class RunConfig:
    physics: PhysicsConfig = field(default_factory=PhysicsConfig)
    run: RunSection = field(default_factory=RunSection)
    fusion: FusionSection = field(default_factory=FusionSection)
    validate: ValidateSection = field(default_factory=ValidateSection)

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {}
        for name in ("physics", "run", "fusion", "validate"):
            section = getattr(self, name)
            out[name] = {f.name: getattr(section, f.name) for f in fields(section)}
        return out


_SECTIONS = {
    "physics": PhysicsConfig,
    "run": RunSection,
    "fusion": FusionSection,
    "validate": ValidateSection,
}

_INT_KEYS = {
    "atoms",
    "chain_length",
    "mode_truncation",
    "cavity_truncation",
    "seed",
    "chain_a_length",
    "chain_b_length",
    "node_a",
    "node_b",
    "trials",
    "workers",
}
_BOOL_KEYS = {"auto_resonance", "trace_intermediates", "embed_states"}
_STR_KEYS = {"tier", "out", "postselect", "chain_a_snapshot", "chain_b_snapshot"}


def load_config(path: str | None) -> RunConfig | None:
    if not path:
        return None
    data = _read(Path(path))
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: top level must be a table of sections")
    unknown = sorted(set(data) - set(_SECTIONS))
    if unknown:
        raise ConfigError(f"{path}: unknown section(s) {', '.join(unknown)}")
    sections = {}
    for name, cls in _SECTIONS.items():
        raw = data.get(name, {})
        if not isinstance(raw, dict):
            raise ConfigError(f"{path}: [{name}] must be a table")
        allowed = {f.name for f in fields(cls)}
        extra = sorted(set(raw) - allowed)
        if extra:
            raise ConfigError(f"{path}: unknown key(s) in [{name}]: {', '.join(extra)}")
        sections[name] = cls(**{k: _coerce(path, name, k, v) for k, v in raw.items()})
    return RunConfig(**sections)


def _read(path: Path) -> Any:
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"{path}: {exc.strerror or exc}") from exc
    if path.suffix.lower() == ".json":
        try:
            return json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
    try:
        return tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        # the message already carries "(at line L, column C)"
        raise ConfigError(f"{path}: {exc}") from exc


def _coerce(path: str, section: str, key: str, value: Any) -> Any:
    where = f"{path}: [{section}] {key}"
    if section == "validate" and key in ("atoms", "ratios"):
        if not isinstance(value, list) or not value:
            raise ConfigError(f"{where} must be a non-empty list")
        kind = int if key == "atoms" else float
        return [_scalar(where, kind, v) for v in value]
    if key in _BOOL_KEYS:
        if not isinstance(value, bool):
            raise ConfigError(f"{where} must be true or false")
        return value
    if key in _STR_KEYS:
        if not isinstance(value, str):
            raise ConfigError(f"{where} must be a string")
        return value
    return _scalar(where, int if key in _INT_KEYS else float, value)


def _scalar(where: str, kind: type, value: Any) -> Any:
    if isinstance(value, bool):
        raise ConfigError(f"{where} must be a number, got a boolean")
    if kind is int:
        if isinstance(value, int):
            return value
        if isinstance(value, float) and value.is_integer():
            return int(value)
        raise ConfigError(f"{where} must be an integer, got {value!r}")
    if isinstance(value, (int, float)):
        return float(value)
    raise ConfigError(f"{where} must be a number, got {value!r}")


def _one_of(cfg: PhysicsConfig, *names: str) -> str | None:
    given = [n for n in names if getattr(cfg, n) is not None]
    if len(given) > 1:
        raise ConfigError(f"[physics] sets {', '.join(given)}; choose one")
    return given[0] if given else None


def physical_params(cfg: PhysicsConfig | None) -> PhysicalParams:
    """Station parameters from [physics]; Hz inputs become rad/s here and nowhere else."""
    cfg = cfg or PhysicsConfig()
    atoms = cfg.atoms if cfg.atoms is not None else DEFAULT_ATOMS
    omega_0 = hz(cfg.omega_0_hz if cfg.omega_0_hz is not None else DEFAULT_OMEGA_0_HZ)
    omega_1 = hz(cfg.omega_1_hz if cfg.omega_1_hz is not None else DEFAULT_OMEGA_1_HZ)
    coupling = hz(cfg.coupling_hz if cfg.coupling_hz is not None else DEFAULT_COUPLING_HZ)
    if atoms < 1:
        raise ConfigError(f"[physics] atoms must be >= 1, got {atoms}")

    cavity_key = _one_of(cfg, "cavity_detuning_hz", "omega_c_hz", "dispersive_ratio")
    if cavity_key == "cavity_detuning_hz":
        delta_c = hz(cfg.cavity_detuning_hz or 0.0)
    elif cavity_key == "omega_c_hz":
        delta_c = omega_0 - hz(cfg.omega_c_hz or 0.0)
    else:
        ratio = cfg.dispersive_ratio if cfg.dispersive_ratio is not None else DEFAULT_DISPERSIVE_RATIO
        delta_c = ratio * coupling * atoms**0.5

    drive_key = _one_of(cfg, "drive_detuning_hz", "omega_L_hz", "drive_detuning_factor")
    if drive_key == "drive_detuning_hz":
        delta_L = hz(cfg.drive_detuning_hz or 0.0)
    elif drive_key == "omega_L_hz":
        delta_L = omega_0 - hz(cfg.omega_L_hz or 0.0)
    else:
        factor = cfg.drive_detuning_factor
        delta_L = (factor if factor is not None else DEFAULT_DRIVE_DETUNING_FACTOR) * delta_c

    auto = cfg.auto_resonance if cfg.auto_resonance is not None else cfg.rabi_hz is None
    if auto and cfg.rabi_hz is not None:
        raise ConfigError("[physics] rabi_hz conflicts with auto_resonance = true")
    if not auto and cfg.rabi_hz is None:
        raise ConfigError("[physics] auto_resonance = false needs rabi_hz")
    try:
        return params_from_detunings(
            delta_c=delta_c,
            delta_L=delta_L,
            coupling=coupling,
            atoms=atoms,
            omega_0=omega_0,
            omega_1=omega_1,
            rabi=None if auto else hz(cfg.rabi_hz or 0.0),
        )
    except ParameterError as exc:
        raise ConfigError(f"[physics] {exc}") from exc


def lifetime(cfg: PhysicsConfig | None) -> float:
    value = cfg.lifetime_s if cfg is not None and cfg.lifetime_s is not None else DEFAULT_LIFETIME_S
    if value <= 0:
        raise ConfigError(f"[physics] lifetime_s must be positive, got {value}")
    return value
