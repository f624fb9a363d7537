# SPDX-License-Identifier: Apache-2.0

"""One cavity station: the control atom crosses cavity k and exchanges an
excitation with the collective mode of sample k.

Every tier returns the state in the interaction frame of the JC tier, so
outputs of different tiers are directly comparable.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from ensemble_cluster.dynamics.evolve import evolve_local, jc_analytic_map
from ensemble_cluster.dynamics.hamiltonians import (
    build_effective_spin_hamiltonian,
    build_full_hamiltonian,
    frame_energies,
    sample_subsystem,
)
from ensemble_cluster.dynamics.params import PhysicalParams
from ensemble_cluster.hilbert.operators import HermitianOperator
from ensemble_cluster.hilbert.space import (
    DEFAULT_CAVITY_TRUNCATION,
    DEFAULT_MODE_TRUNCATION,
    DimensionError,
    Role,
    cavity_mode,
    check_index,
)
from ensemble_cluster.hilbert.state import (
    StateVector,
    insert_subsystem,
    local_state,
    project_subsystem,
    resize_subsystem,
)
from ensemble_cluster.model import ModelTier
from ensemble_cluster.protocol.trace import EXACT_RELEASE_BOUND, LeakageError, VacuumResidualError
from ensemble_cluster.util.limits import limits

logger = logging.getLogger(__name__)

ATOM_INDEX = 0


@dataclass(frozen=True)
class PassSettings:
    mode_truncation: int = DEFAULT_MODE_TRUNCATION
    cavity_truncation: int = DEFAULT_CAVITY_TRUNCATION
    # rungs of the Dicke ladder kept in the spin and full tiers; None keeps all N+1
    ladder_truncation: int | None = None
    leakage_bound: float = field(default_factory=lambda: limits().leakage_bound)
    vacuum_residual_bound: float = field(default_factory=lambda: limits().vacuum_residual_bound)
    # population the spin and full tiers may leave outside |g> once a chain is finished
    atom_release_bound: float = field(default_factory=lambda: limits().atom_release_bound)
    monitor_samples: int = field(default_factory=lambda: limits().cavity_monitor_samples)

    def release_bound(self, tier: ModelTier) -> float:
        return EXACT_RELEASE_BOUND if ModelTier.parse(tier) is ModelTier.ANALYTIC_JC else self.atom_release_bound


@dataclass(frozen=True)
class PassRecord:
    ensemble_index: int
    duration: float
    tier: ModelTier
    leakage: float
    vacuum_residual: float = 0.0
    vacuum_residual_final: float = 0.0


@lru_cache(maxsize=16)
def _tier_operator(
    tier: ModelTier, params: PhysicalParams, cavity_truncation: int, ladder_dim: int | None
) -> tuple[HermitianOperator, np.ndarray]:
    if tier is ModelTier.EFFECTIVE_SPIN:
        h = build_effective_spin_hamiltonian(params, ladder_dim)
    else:
        h = build_full_hamiltonian(params, cavity_truncation, ladder_dim)
    energies = frame_energies(tier, params, cavity_truncation=cavity_truncation, ladder_dim=ladder_dim)
    return h, energies


def _edge_population(state: StateVector, index: int) -> float:
    pops = state.level_populations(index)
    # with d = 2 the edge is the logical |1>; truncation loss then shows up as dropped population
    return float(pops[-1]) if len(pops) > 2 else 0.0


def _cavity_population_trace(
    state: StateVector, h: HermitianOperator, indices: list[int], duration: float, samples: int
) -> np.ndarray:
    """Population outside cavity vacuum at `samples` instants across the pass."""
    local_dim = h.dim
    cav_dim = h.subsystems[-1].dim
    vacuum_rows = local_dim // cav_dim
    moved = np.moveaxis(state.tensor(), indices, list(range(len(indices))))
    flat = moved.reshape((local_dim, -1), order="F")
    values, vectors = h.eigensystem
    coeffs = vectors.conj().T @ flat
    excited = vectors[vacuum_rows:, :]
    out = np.empty(samples)
    for j, t in enumerate(np.linspace(0.0, duration, samples)):
        amps = excited @ (np.exp(-1j * values * t)[:, None] * coeffs)
        out[j] = float(np.sum(np.abs(amps) ** 2))
    return out


def cavity_pass(
    state: StateVector,
    ensemble_index: int,
    duration: float,
    tier: ModelTier,
    params: PhysicalParams,
    settings: PassSettings | None = None,
) -> tuple[StateVector, PassRecord]:
    """Run one pass over sample `ensemble_index` (0-based); the state must carry the atom at 0."""
    settings = settings or PassSettings()
    if duration <= 0:
        raise ValueError(f"Pass duration must be positive, got {duration}")
    mode_index = ensemble_index + 1
    check_index(state.subsystems, mode_index)
    if state.subsystems[ATOM_INDEX].role is not Role.CONTROL_ATOM:
        raise DimensionError("Cavity pass needs the control atom at subsystem 0")
    mode_spec = state.subsystems[mode_index]
    if mode_spec.role is not Role.COLLECTIVE_MODE:
        raise DimensionError(f"Subsystem {mode_index} is {mode_spec.role.value}, expected a collective mode")

    residual_max = residual_final = 0.0
    dropped = 0.0
    if tier is ModelTier.ANALYTIC_JC:
        out = jc_analytic_map(state, duration, params, ATOM_INDEX, mode_index)
    else:
        ladder = sample_subsystem(params.atoms, settings.ladder_truncation)
        # a sample smaller than the mode truncation keeps only the levels it has
        lifted, lost = resize_subsystem(state, mode_index, ladder)
        h, energies = _tier_operator(tier, params, settings.cavity_truncation, settings.ladder_truncation)
        indices = [ATOM_INDEX, mode_index]
        if tier is ModelTier.FULL_DISPERSIVE:
            cav = cavity_mode(settings.cavity_truncation)
            vacuum = np.zeros(cav.dim)
            vacuum[0] = 1.0
            lifted = insert_subsystem(lifted, len(lifted.subsystems), local_state(cav, vacuum))
            indices.append(len(lifted.subsystems) - 1)
            monitor = _cavity_population_trace(lifted, h, indices, duration, settings.monitor_samples)
            residual_max = float(monitor.max())
        evolved = evolve_local(lifted, h, duration, indices, energies)
        if tier is ModelTier.FULL_DISPERSIVE:
            evolved, weight = project_subsystem(evolved, indices[-1], vacuum)
            residual_final = 1.0 - weight
            residual_max = max(residual_max, residual_final)
        out, dropped = resize_subsystem(evolved, mode_index, mode_spec)
        dropped += lost
        out = out.normalized()

    leakage = dropped + _edge_population(out, mode_index)
    record = PassRecord(ensemble_index, duration, tier, leakage, residual_max, residual_final)
    logger.debug(
        "pass %d (%s) t=%.4g s: leakage=%.3e vacuum residual=%.3e",
        ensemble_index,
        tier.value,
        duration,
        leakage,
        residual_max,
    )
    if leakage > settings.leakage_bound:
        raise LeakageError(f"Pass over sample {ensemble_index} leaked {leakage:.3e} > {settings.leakage_bound:.1e}")
    if residual_max > settings.vacuum_residual_bound:
        raise VacuumResidualError(
            f"Cavity population reached {residual_max:.3e} during pass over sample {ensemble_index}, "
            f"bound {settings.vacuum_residual_bound:.1e}"
        )
    return out, record
