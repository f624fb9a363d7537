# SPDX-License-Identifier: Apache-2.0

"""Fidelity up to diagonal phase rotations.

Tiers differ by frame phases that are diagonal in the excitation basis of
each mode (and in the level basis of the control atom). The reference is
rotated by U(theta) = prod_k exp(i theta_k n_k) (x) exp(i(phi_g P_g + phi_e P_e))
and |<U ref|psi>|^2 is maximized by coordinate ascent.
"""

from __future__ import annotations

import logging
import math
from typing import NamedTuple

import numpy as np
from scipy.optimize import minimize_scalar

from ensemble_cluster.hilbert.space import DimensionError, E, G, Role
from ensemble_cluster.hilbert.state import StateVector
from ensemble_cluster.model import InvariantViolation
from ensemble_cluster.util.limits import limits

logger = logging.getLogger(__name__)

TOLERANCE = 1e-12
FINE_GRID = 64
COARSE_GRID = 16
TWO_PI = 2.0 * math.pi


class PhaseAlignmentError(InvariantViolation):
    pass


class AlignmentResult(NamedTuple):
    fidelity: float
    # one angle per mode in subsystem order, then (phi_g, phi_e) when a control atom is present
    phases: tuple[float, ...]


def _generators(state: StateVector) -> np.ndarray:
    """Integer generator table, shape (dim, coordinates)."""
    levels = [idx.reshape(-1, order="F") for idx in np.indices(state.dims)]
    columns = []
    atom_columns = []
    for i, spec in enumerate(state.subsystems):
        if spec.role is Role.CONTROL_ATOM:
            atom_columns.extend([(levels[i] == G).astype(int), (levels[i] == E).astype(int)])
        else:
            columns.append(levels[i])
    return np.stack(columns + atom_columns, axis=1)


def _overlap(weights: np.ndarray, gens: np.ndarray, theta: np.ndarray) -> complex:
    return complex(np.sum(weights * np.exp(-1j * (gens @ theta))))


def _best_coordinate(weights: np.ndarray, column: np.ndarray, current: float) -> float:
    values = np.unique(column)
    sums = {int(v): complex(np.sum(weights[column == v])) for v in values}
    if set(sums) <= {0, 1}:
        a0, a1 = sums.get(0, 0j), sums.get(1, 0j)
        if abs(a0) == 0.0 or abs(a1) == 0.0:
            return current
        return float(np.angle(a1) - np.angle(a0))

    def objective(t: float) -> float:
        return -abs(sum(a * np.exp(-1j * v * t) for v, a in sums.items()))

    grid = np.linspace(0.0, TWO_PI, FINE_GRID, endpoint=False)
    start = float(grid[int(np.argmin([objective(t) for t in grid]))])
    step = TWO_PI / FINE_GRID
    res = minimize_scalar(objective, bounds=(start - step, start + step), method="bounded", options={"xatol": 1e-13})
    return float(res.x) if res.fun <= objective(current) else current


def _ascend(weights: np.ndarray, gens: np.ndarray, theta: np.ndarray, max_sweeps: int) -> tuple[np.ndarray, float]:
    value = abs(_overlap(weights, gens, theta))
    for sweep in range(max_sweeps):
        for c in range(gens.shape[1]):
            others = theta.copy()
            others[c] = 0.0
            partial = weights * np.exp(-1j * (gens @ others))
            theta[c] = _best_coordinate(partial, gens[:, c], theta[c])
        new = abs(_overlap(weights, gens, theta))
        if new - value <= TOLERANCE:
            logger.debug("phase alignment converged after %d sweeps", sweep + 1)
            return theta, max(new, value)
        value = new
    raise PhaseAlignmentError(f"Phase alignment did not converge in {max_sweeps} sweeps")


def _coarse_improvement(weights: np.ndarray, gens: np.ndarray, theta: np.ndarray, value: float) -> np.ndarray | None:
    grid = np.linspace(0.0, TWO_PI, COARSE_GRID, endpoint=False)
    for c in range(gens.shape[1]):
        for t in grid:
            trial = theta.copy()
            trial[c] = t
            if abs(_overlap(weights, gens, trial)) > value + TOLERANCE:
                return trial
    return None


def phase_aligned_fidelity(state: StateVector, reference: StateVector) -> AlignmentResult:
    if state.subsystems != reference.subsystems:
        raise DimensionError(f"Cannot align states on {state.dims} and {reference.dims}")
    norm = state.norm() * reference.norm()
    gens = _generators(state)
    theta = np.zeros(gens.shape[1])
    if norm == 0.0:
        return AlignmentResult(0.0, tuple(theta))
    weights = np.conj(reference.amplitudes) * state.amplitudes
    max_sweeps = limits().max_alignment_sweeps
    restarts = 0
    while True:
        theta, value = _ascend(weights, gens, theta, max_sweeps)
        better = _coarse_improvement(weights, gens, theta, value)
        if better is None:
            break
        restarts += 1
        if restarts > max_sweeps:
            raise PhaseAlignmentError("Phase alignment kept finding better coarse-grid starts")
        theta = better
    fid = min(1.0, (value / norm) ** 2)
    logger.debug("phase-aligned fidelity %.12f after %d restarts", fid, restarts)
    return AlignmentResult(fid, tuple(float(t) for t in np.mod(theta, TWO_PI)))


def rotate_phases(state: StateVector, phases: tuple[float, ...] | list[float]) -> StateVector:
    """Apply U(theta) with the same coordinate layout as `AlignmentResult.phases`."""
    gens = _generators(state)
    theta = np.asarray(phases, dtype=float)
    if theta.shape != (gens.shape[1],):
        raise DimensionError(f"Expected {gens.shape[1]} phases, got {theta.shape[0]}")
    return state.with_amplitudes(state.amplitudes * np.exp(1j * (gens @ theta)))
