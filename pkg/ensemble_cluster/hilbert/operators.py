# SPDX-License-Identifier: Apache-2.0

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Sequence, Union

import numpy as np
from scipy.linalg import eigh

from ensemble_cluster.hilbert.space import (
    DimensionError,
    SubsystemSpec,
    Subsystems,
    as_subsystems,
    check_index,
    composite_dim,
)
from ensemble_cluster.hilbert.state import StateVector
from ensemble_cluster.util.limits import limits


class NonHermitianError(ValueError):
    pass


def hermiticity_defect(matrix: np.ndarray) -> float:
    """Largest |M - M^dagger| entry relative to max(1, largest |M| entry)."""
    if matrix.size == 0:
        return 0.0
    scale = max(1.0, float(np.max(np.abs(matrix))))
    return float(np.max(np.abs(matrix - matrix.conj().T))) / scale


@dataclass(frozen=True, eq=False)
class HermitianOperator:
    subsystems: Subsystems
    matrix: np.ndarray
    label: str = ""

    def __post_init__(self) -> None:
        subsystems = as_subsystems(self.subsystems)
        matrix = np.array(self.matrix, dtype=np.complex128)
        n = composite_dim(subsystems)
        if matrix.shape != (n, n):
            raise DimensionError(f"Operator shape {matrix.shape} does not match composite dim {n}")
        defect = hermiticity_defect(matrix)
        tol = limits().hermitian_tolerance
        if defect > tol:
            raise NonHermitianError(f"Operator {self.label or '<unnamed>'} hermiticity defect {defect:.3e} > {tol:.1e}")
        matrix.setflags(write=False)
        object.__setattr__(self, "subsystems", subsystems)
        object.__setattr__(self, "matrix", matrix)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @cached_property
    def eigensystem(self) -> tuple[np.ndarray, np.ndarray]:
        # Hermitize before diagonalising so eigenvectors are exactly orthonormal
        sym = 0.5 * (self.matrix + self.matrix.conj().T)
        values, vectors = eigh(sym)
        return values, vectors

    def element(self, bra: int, ket: int) -> complex:
        return complex(self.matrix[bra, ket])

    def __add__(self, other: "HermitianOperator") -> "HermitianOperator":
        if other.subsystems != self.subsystems:
            raise DimensionError("Cannot add operators on different spaces")
        return HermitianOperator(self.subsystems, self.matrix + other.matrix, self.label)

    def scaled(self, factor: float) -> "HermitianOperator":
        return HermitianOperator(self.subsystems, float(factor) * self.matrix, self.label)

    def expectation(self, state: StateVector) -> float:
        if state.subsystems != self.subsystems:
            raise DimensionError("Operator and state live on different spaces")
        return float(np.real(np.vdot(state.amplitudes, self.matrix @ state.amplitudes)))


def local_operator(spec: SubsystemSpec, matrix: np.ndarray, label: str = "") -> HermitianOperator:
    return HermitianOperator((spec,), matrix, label)


def embed_matrix(matrix: np.ndarray, subsystems: Sequence[SubsystemSpec], index: int) -> np.ndarray:
    check_index(subsystems, index)
    spec = subsystems[index]
    matrix = np.asarray(matrix, dtype=np.complex128)
    if matrix.shape != (spec.dim, spec.dim):
        raise DimensionError(
            f"Operator of shape {matrix.shape} does not match {spec.role.value} of dim {spec.dim}"
        )
    before = int(np.prod([s.dim for s in subsystems[:index]], dtype=np.int64))
    after = int(np.prod([s.dim for s in subsystems[index + 1 :]], dtype=np.int64))
    # subsystem 0 is fastest, so earlier subsystems sit on the right of the kron
    return np.kron(np.eye(after), np.kron(matrix, np.eye(before)))


def embed_operator(op: HermitianOperator, target: Sequence[SubsystemSpec], index: int) -> HermitianOperator:
    if len(op.subsystems) != 1:
        raise DimensionError("embed_operator expects a single-subsystem operator")
    target = as_subsystems(target)
    check_index(target, index)
    if op.subsystems[0].dim != target[index].dim:
        raise DimensionError(
            f"Operator dim {op.subsystems[0].dim} does not match subsystem dim {target[index].dim}"
        )
    return HermitianOperator(target, embed_matrix(op.matrix, target, index), op.label)


Operand = Union[HermitianOperator, np.ndarray]


def apply(op: Operand, state: StateVector) -> StateVector:
    if isinstance(op, HermitianOperator):
        if op.subsystems != state.subsystems:
            raise DimensionError("Operator and state live on different spaces")
        matrix = op.matrix
    else:
        matrix = np.asarray(op, dtype=np.complex128)
        if matrix.shape != (state.dim, state.dim):
            raise DimensionError(f"Matrix shape {matrix.shape} does not match state dim {state.dim}")
    return state.with_amplitudes(matrix @ state.amplitudes)


def apply_local(matrix: np.ndarray, state: StateVector, indices: Sequence[int]) -> StateVector:
    """Apply `matrix` acting on the subsystems `indices` (first index fastest) of `state`."""
    indices = list(indices)
    for index in indices:
        check_index(state.subsystems, index)
    if len(set(indices)) != len(indices):
        raise DimensionError(f"Duplicate subsystem indices in {indices}")
    local_dim = int(np.prod([state.subsystems[i].dim for i in indices]))
    matrix = np.asarray(matrix, dtype=np.complex128)
    if matrix.shape != (local_dim, local_dim):
        raise DimensionError(f"Local matrix shape {matrix.shape} does not match local dim {local_dim}")
    front = list(range(len(indices)))
    moved = np.moveaxis(state.tensor(), indices, front)
    shape = moved.shape
    flat = moved.reshape((local_dim, -1), order="F")
    out = (matrix @ flat).reshape(shape, order="F")
    return StateVector.from_tensor(state.subsystems, np.moveaxis(out, front, indices))


def is_unitary(matrix: np.ndarray, atol: float = 1e-12) -> bool:
    matrix = np.asarray(matrix)
    return bool(np.allclose(matrix.conj().T @ matrix, np.eye(matrix.shape[0]), atol=atol, rtol=0.0))
