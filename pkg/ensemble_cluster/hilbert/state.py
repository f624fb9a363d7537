# SPDX-License-Identifier: Apache-2.0

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from typing import Sequence

import numpy as np

from ensemble_cluster.hilbert.space import (
    DimensionError,
    SubsystemSpec,
    Subsystems,
    as_subsystems,
    check_index,
    composite_dim,
    composite_index,
    dims,
)

NORM_TOLERANCE = 1e-12


@dataclass(frozen=True, eq=False)
class StateVector:
    subsystems: Subsystems
    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        subsystems = as_subsystems(self.subsystems)
        amps = np.asarray(self.amplitudes, dtype=np.complex128).reshape(-1)
        expected = composite_dim(subsystems)
        if amps.shape[0] != expected:
            raise DimensionError(f"State has {amps.shape[0]} amplitudes, expected {expected}")
        amps.setflags(write=False)
        object.__setattr__(self, "subsystems", subsystems)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def dims(self) -> tuple[int, ...]:
        return dims(self.subsystems)

    @property
    def dim(self) -> int:
        return self.amplitudes.shape[0]

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def normalized(self) -> "StateVector":
        n = self.norm()
        if n == 0.0:
            raise ValueError("Cannot normalize the zero vector")
        return StateVector(self.subsystems, self.amplitudes / n)

    def tensor(self) -> np.ndarray:
        """Amplitudes as an array with one axis per subsystem (axis k = subsystem k)."""
        return self.amplitudes.reshape(self.dims, order="F")

    @classmethod
    def from_tensor(cls, subsystems: Sequence[SubsystemSpec], tensor: np.ndarray) -> "StateVector":
        return cls(tuple(subsystems), np.asarray(tensor).reshape(-1, order="F"))

    def with_amplitudes(self, amplitudes: np.ndarray) -> "StateVector":
        return StateVector(self.subsystems, amplitudes)

    def level_populations(self, index: int) -> np.ndarray:
        check_index(self.subsystems, index)
        probs = np.abs(self.tensor()) ** 2
        axes = tuple(i for i in range(len(self.subsystems)) if i != index)
        return probs.sum(axis=axes) if axes else probs

    def mean_excitation(self, index: int) -> float:
        pops = self.level_populations(index)
        return float(np.dot(np.arange(pops.shape[0]), pops))


def basis_state(subsystems: Sequence[SubsystemSpec], levels: Sequence[int]) -> StateVector:
    subs = as_subsystems(subsystems)
    amps = np.zeros(composite_dim(subs), dtype=np.complex128)
    amps[composite_index(subs, levels)] = 1.0
    return StateVector(subs, amps)


def local_state(spec: SubsystemSpec, amplitudes: Sequence[complex]) -> StateVector:
    """Single-subsystem state; amplitudes shorter than dim are zero padded."""
    amps = np.zeros(spec.dim, dtype=np.complex128)
    values = np.asarray(amplitudes, dtype=np.complex128)
    if values.shape[0] > spec.dim:
        raise DimensionError(f"{values.shape[0]} amplitudes do not fit dim {spec.dim}")
    amps[: values.shape[0]] = values
    return StateVector((spec,), amps)


def tensor_product(states: Sequence[StateVector]) -> StateVector:
    if not states:
        raise DimensionError("tensor_product needs at least one state")
    subsystems = tuple(s for state in states for s in state.subsystems)
    # later factors are slower-varying
    amps = reduce(lambda acc, st: np.kron(st.amplitudes, acc), states[1:], states[0].amplitudes)
    return StateVector(subsystems, amps)


def _check_same_space(a: StateVector, b: StateVector) -> None:
    if a.subsystems != b.subsystems:
        raise DimensionError(f"States live on different spaces: {a.dims} vs {b.dims}")


def overlap(a: StateVector, b: StateVector) -> complex:
    _check_same_space(a, b)
    return complex(np.vdot(a.amplitudes, b.amplitudes))


def fidelity(a: StateVector, b: StateVector) -> float:
    value = abs(overlap(a, b)) ** 2
    return float(min(max(value, 0.0), 1.0))


def reduced_density(state: StateVector, keep: Sequence[int]) -> np.ndarray:
    keep = list(keep)
    if not keep:
        raise DimensionError("reduced_density needs at least one kept subsystem")
    if len(set(keep)) != len(keep):
        raise DimensionError(f"Duplicate subsystem indices in {keep}")
    for index in keep:
        check_index(state.subsystems, index)
    kept_dim = int(np.prod([state.subsystems[i].dim for i in keep]))
    moved = np.moveaxis(state.tensor(), keep, list(range(len(keep))))
    matrix = moved.reshape((kept_dim, -1), order="F")
    return matrix @ matrix.conj().T


def purity(rho: np.ndarray) -> float:
    return float(np.real(np.trace(rho @ rho)))


def project_subsystem(state: StateVector, index: int, ket: np.ndarray) -> tuple[StateVector, float]:
    """Contract subsystem `index` with <ket|; returns the normalized remainder and its weight."""
    check_index(state.subsystems, index)
    if len(state.subsystems) < 2:
        raise DimensionError("Cannot remove the only subsystem")
    spec = state.subsystems[index]
    ket = np.asarray(ket, dtype=np.complex128).reshape(-1)
    if ket.shape[0] != spec.dim:
        raise DimensionError(f"Ket of length {ket.shape[0]} does not match dim {spec.dim}")
    remaining = tuple(s for i, s in enumerate(state.subsystems) if i != index)
    reduced = np.tensordot(ket.conj(), state.tensor(), axes=([0], [index]))
    rest = StateVector.from_tensor(remaining, reduced)
    weight = rest.norm() ** 2
    if weight == 0.0:
        return rest, 0.0
    return rest.normalized(), weight


def insert_subsystem(state: StateVector, index: int, local: StateVector) -> StateVector:
    """Tensor a single-subsystem state in at position `index`."""
    if len(local.subsystems) != 1:
        raise DimensionError("insert_subsystem expects a single-subsystem state")
    if not 0 <= index <= len(state.subsystems):
        raise DimensionError(f"Insert position {index} out of range")
    subsystems = list(state.subsystems)
    subsystems.insert(index, local.subsystems[0])
    joined = np.multiply.outer(state.tensor(), local.amplitudes)
    joined = np.moveaxis(joined, -1, index)
    return StateVector.from_tensor(subsystems, joined)


def resize_subsystem(state: StateVector, index: int, spec: SubsystemSpec) -> tuple[StateVector, float]:
    """Re-express subsystem `index` on `spec`, keeping the common low levels.

    Returns the new state (not renormalized) and the population that did not fit.
    """
    check_index(state.subsystems, index)
    old = state.subsystems[index]
    tensor = np.moveaxis(state.tensor(), index, 0)
    keep = min(old.dim, spec.dim)
    resized = np.zeros((spec.dim,) + tensor.shape[1:], dtype=np.complex128)
    resized[:keep] = tensor[:keep]
    dropped = float(np.sum(np.abs(tensor[keep:]) ** 2))
    subsystems = list(state.subsystems)
    subsystems[index] = spec
    return StateVector.from_tensor(subsystems, np.moveaxis(resized, 0, index)), dropped
