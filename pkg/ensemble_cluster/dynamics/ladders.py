# SPDX-License-Identifier: Apache-2.0

"""Single-subsystem matrices: control-atom spin, Dicke ladder, truncated boson."""

from __future__ import annotations

import numpy as np

from ensemble_cluster.hilbert.space import E, F, G


def atom_raising() -> np.ndarray:
    """S^+ = |e><g|; |f> is dark."""
    m = np.zeros((3, 3), dtype=np.complex128)
    m[E, G] = 1.0
    return m


def atom_lowering() -> np.ndarray:
    return atom_raising().T.copy()


def atom_sz() -> np.ndarray:
    """S_z = (|e><e| - |g><g|)/2, zero on |f>."""
    return np.diag(np.array([0.0, -0.5, 0.5], dtype=np.complex128))


def atom_projector(level: int) -> np.ndarray:
    m = np.zeros((3, 3), dtype=np.complex128)
    m[level, level] = 1.0
    return m


def atom_ge_identity() -> np.ndarray:
    return atom_projector(G) + atom_projector(E)


def dicke_raising(atoms: int, dim: int | None = None) -> np.ndarray:
    """Collective S^+ on Dicke states: S^+|n> = sqrt((n+1)(N-n)) |n+1>.

    `dim` truncates the ladder to its lowest `dim` rungs (default N+1).
    """
    dim = atoms + 1 if dim is None else dim
    n = np.arange(dim - 1)
    elements = np.sqrt(np.clip((n + 1) * (atoms - n), 0, None).astype(float))
    return np.diag(elements.astype(np.complex128), k=-1)


def dicke_lowering(atoms: int, dim: int | None = None) -> np.ndarray:
    return dicke_raising(atoms, dim).T.copy()


def dicke_sz(atoms: int, dim: int | None = None) -> np.ndarray:
    dim = atoms + 1 if dim is None else dim
    return np.diag((np.arange(dim) - atoms / 2.0).astype(np.complex128))


def number(dim: int) -> np.ndarray:
    return np.diag(np.arange(dim).astype(np.complex128))


def annihilation(dim: int) -> np.ndarray:
    """Truncated bosonic a: a|n> = sqrt(n)|n-1>, with a^dagger|dim-1> = 0."""
    return np.diag(np.sqrt(np.arange(1, dim)).astype(np.complex128), k=1)


def creation(dim: int) -> np.ndarray:
    return annihilation(dim).T.copy()


def sigma_z_qubit(dim: int) -> np.ndarray:
    """|0><0| - |1><1| on the qubit subspace of a mode, zero above."""
    m = np.zeros((dim, dim), dtype=np.complex128)
    m[0, 0], m[1, 1] = 1.0, -1.0
    return m


def sigma_x_qubit(dim: int) -> np.ndarray:
    m = np.zeros((dim, dim), dtype=np.complex128)
    m[0, 1] = m[1, 0] = 1.0
    return m


def qubit_phase_flip(dim: int) -> np.ndarray:
    """Diagonal (1, -1) on |0>, |1> and identity on higher levels."""
    m = np.eye(dim, dtype=np.complex128)
    m[1, 1] = -1.0
    return m


__all__ = [
    "E",
    "F",
    "G",
    "annihilation",
    "atom_ge_identity",
    "atom_lowering",
    "atom_projector",
    "atom_raising",
    "atom_sz",
    "creation",
    "dicke_lowering",
    "dicke_raising",
    "dicke_sz",
    "number",
    "qubit_phase_flip",
    "sigma_x_qubit",
    "sigma_z_qubit",
]
