# SPDX-License-Identifier: Apache-2.0

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from math import prod
from typing import Iterable, Sequence

from ensemble_cluster.util.limits import limits


class Role(str, Enum):
    CONTROL_ATOM = "ControlAtom"
    COLLECTIVE_MODE = "CollectiveMode"
    CAVITY_MODE = "CavityMode"
    DICKE_LADDER = "DickeLadder"


# Control-atom basis order.
F, G, E = 0, 1, 2
ATOM_LEVELS = {"f": F, "g": G, "e": E}

DEFAULT_MODE_TRUNCATION = 4
DEFAULT_CAVITY_TRUNCATION = 3


class DimensionError(ValueError):
    pass


@dataclass(frozen=True)
class SubsystemSpec:
    role: Role
    dim: int

    def __post_init__(self) -> None:
        if not isinstance(self.role, Role):
            object.__setattr__(self, "role", Role(self.role))
        if int(self.dim) != self.dim or self.dim < 2:
            raise DimensionError(f"{self.role.value} dimension must be an integer >= 2, got {self.dim}")
        if self.role is Role.CONTROL_ATOM and self.dim != 3:
            raise DimensionError(f"ControlAtom dimension must be 3, got {self.dim}")

    @property
    def is_mode(self) -> bool:
        """Modes carry an excitation number n = level index."""
        return self.role is not Role.CONTROL_ATOM

    @property
    def sample_size(self) -> int | None:
        return self.dim - 1 if self.role is Role.DICKE_LADDER else None

    def to_dict(self) -> dict:
        return {"role": self.role.value, "dim": self.dim}

    @classmethod
    def from_dict(cls, data: dict) -> "SubsystemSpec":
        return cls(role=Role(data["role"]), dim=int(data["dim"]))


def control_atom() -> SubsystemSpec:
    return SubsystemSpec(Role.CONTROL_ATOM, 3)


def collective_mode(truncation: int) -> SubsystemSpec:
    return SubsystemSpec(Role.COLLECTIVE_MODE, truncation)


def cavity_mode(truncation: int) -> SubsystemSpec:
    return SubsystemSpec(Role.CAVITY_MODE, truncation)


def dicke_ladder(sample_size: int) -> SubsystemSpec:
    if sample_size < 1:
        raise DimensionError(f"Dicke ladder needs at least one atom, got {sample_size}")
    return SubsystemSpec(Role.DICKE_LADDER, sample_size + 1)


Subsystems = tuple[SubsystemSpec, ...]


def as_subsystems(specs: Iterable[SubsystemSpec]) -> Subsystems:
    out = tuple(specs)
    if not out:
        raise DimensionError("Composite space needs at least one subsystem")
    total = prod(s.dim for s in out)
    cap = limits().max_composite_dim
    if total > cap:
        raise DimensionError(f"Composite dimension {total} exceeds max {cap}")
    return out


def dims(subsystems: Sequence[SubsystemSpec]) -> tuple[int, ...]:
    return tuple(s.dim for s in subsystems)


def composite_dim(subsystems: Sequence[SubsystemSpec]) -> int:
    return prod(s.dim for s in subsystems)


def strides(subsystems: Sequence[SubsystemSpec]) -> tuple[int, ...]:
    # subsystem 0 varies fastest
    out = []
    step = 1
    for s in subsystems:
        out.append(step)
        step *= s.dim
    return tuple(out)


def composite_index(subsystems: Sequence[SubsystemSpec], levels: Sequence[int]) -> int:
    if len(levels) != len(subsystems):
        raise DimensionError(f"Expected {len(subsystems)} levels, got {len(levels)}")
    index = 0
    for level, spec, stride in zip(levels, subsystems, strides(subsystems)):
        if not 0 <= level < spec.dim:
            raise DimensionError(f"Level {level} out of range for {spec.role.value} of dim {spec.dim}")
        index += level * stride
    return index


def check_index(subsystems: Sequence[SubsystemSpec], index: int) -> None:
    if not 0 <= index < len(subsystems):
        raise DimensionError(f"Subsystem index {index} out of range for {len(subsystems)} subsystems")


def mode_indices(subsystems: Sequence[SubsystemSpec]) -> list[int]:
    return [i for i, s in enumerate(subsystems) if s.is_mode]
