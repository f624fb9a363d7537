# SPDX-License-Identifier: Apache-2.0

from __future__ import annotations

import logging
import math
from typing import Sequence

import numpy as np

from ensemble_cluster.dynamics.params import ParameterError, PhysicalParams
from ensemble_cluster.hilbert.operators import HermitianOperator, apply_local
from ensemble_cluster.hilbert.space import E, G, DimensionError, Role, check_index
from ensemble_cluster.hilbert.state import StateVector

logger = logging.getLogger(__name__)

EDGE_AMPLITUDE = 1e-12


class TruncationEdgeError(ValueError):
    pass


def propagator(h: HermitianOperator, t: float) -> np.ndarray:
    """exp(-iHt) from the operator's cached eigendecomposition."""
    values, vectors = h.eigensystem
    return (vectors * np.exp(-1j * values * t)) @ vectors.conj().T


def evolve(state: StateVector, h: HermitianOperator, t: float) -> StateVector:
    if state.subsystems != h.subsystems:
        raise DimensionError(f"State dims {state.dims} do not match Hamiltonian dims {tuple(s.dim for s in h.subsystems)}")
    values, vectors = h.eigensystem
    coeffs = vectors.conj().T @ state.amplitudes
    return state.with_amplitudes(vectors @ (np.exp(-1j * values * t) * coeffs))


def evolve_times(state: StateVector, h: HermitianOperator, times: Sequence[float]) -> np.ndarray:
    """Amplitudes at each time, shape (len(times), dim)."""
    if state.subsystems != h.subsystems:
        raise DimensionError("State and Hamiltonian live on different spaces")
    values, vectors = h.eigensystem
    coeffs = vectors.conj().T @ state.amplitudes
    phases = np.exp(-1j * np.outer(np.asarray(times, dtype=float), values))
    return (phases * coeffs) @ vectors.T


def frame_rotation(energies: np.ndarray, t: float) -> np.ndarray:
    """exp(+i D t) for the diagonal free energies D."""
    return np.exp(1j * np.asarray(energies) * t)


def interaction_propagator(h: HermitianOperator, t: float, energies: np.ndarray) -> np.ndarray:
    """exp(iDt) exp(-iHt): the evolution seen in the frame rotating with D."""
    return frame_rotation(energies, t)[:, None] * propagator(h, t)


def evolve_local(
    state: StateVector,
    h: HermitianOperator,
    t: float,
    indices: Sequence[int],
    energies: np.ndarray | None = None,
) -> StateVector:
    """Evolve the subsystems `indices` under `h`, leaving the rest as spectators."""
    indices = list(indices)
    local = tuple(state.subsystems[i] for i in indices)
    if local != h.subsystems:
        raise DimensionError("Hamiltonian subsystems do not match the addressed subsystems")
    u = propagator(h, t) if energies is None else interaction_propagator(h, t, energies)
    logger.debug("evolve %s on subsystems %s for t=%.6e s", h.label or "H", indices, t)
    return apply_local(u, state, indices)


def jc_analytic_unitary(params: PhysicalParams, mode_dim: int, t: float) -> np.ndarray:
    """Closed-form resonant JC evolution in the interaction frame on (atom, mode).

    |e,n> -> cos(w_n t)|e,n> - i sin(w_n t)|g,n+1> and the partner, with
    w_n = sqrt((n+1) N) lambda_c; |f,n> and |g,0> are untouched. The
    |e,d-1> column has no partner inside the truncation and is left as identity.
    """
    if not (params.resonant or params.resonance_holds()):
        raise ParameterError("Closed-form JC map requires 2*lambda_L = (N-1)*lambda_c")
    d = mode_dim
    u = np.eye(3 * d, dtype=np.complex128)

    def idx(level: int, n: int) -> int:
        return level + 3 * n

    for n in range(d - 1):
        w = math.sqrt((n + 1) * params.atoms) * params.lambda_c * t
        c, s = math.cos(w), math.sin(w)
        en, gn = idx(E, n), idx(G, n + 1)
        u[en, en] = c
        u[gn, gn] = c
        u[gn, en] = -1j * s
        u[en, gn] = -1j * s
    return u


def jc_analytic_map(
    state: StateVector,
    t: float,
    params: PhysicalParams,
    atom_index: int = 0,
    mode_index: int = 1,
) -> StateVector:
    check_index(state.subsystems, atom_index)
    check_index(state.subsystems, mode_index)
    if state.subsystems[atom_index].role is not Role.CONTROL_ATOM:
        raise DimensionError(f"Subsystem {atom_index} is not the control atom")
    mode = state.subsystems[mode_index]
    if not mode.is_mode:
        raise DimensionError(f"Subsystem {mode_index} is not a mode")
    d = mode.dim
    edge = np.moveaxis(state.tensor(), [atom_index, mode_index], [0, 1])[E, d - 1]
    if np.any(np.abs(edge) > EDGE_AMPLITUDE):
        raise TruncationEdgeError(
            f"State has |e>|{d - 1}> support at the truncation edge; the map would leak out of the mode space"
        )
    return apply_local(jc_analytic_unitary(params, d, t), state, [atom_index, mode_index])
