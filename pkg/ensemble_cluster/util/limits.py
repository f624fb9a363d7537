# SPDX-License-Identifier: Apache-2.0

from __future__ import annotations

import os
from dataclasses import dataclass


@dataclass(frozen=True)
class NumericLimits:
    max_composite_dim: int
    max_brute_force_atoms: int
    max_alignment_sweeps: int
    cavity_monitor_samples: int
    leakage_bound: float
    vacuum_residual_bound: float
    atom_release_bound: float
    hermitian_tolerance: float


def _env_int(name: str, default: int) -> int:
    raw = os.getenv(name)
    if not raw:
        return default
    try:
        value = int(raw)
    except ValueError:
        return default
    if value <= 0:
        return default
    return value


def _env_float(name: str, default: float) -> float:
    raw = os.getenv(name)
    if not raw:
        return default
    try:
        value = float(raw)
    except ValueError:
        return default
    if not value > 0:
        return default
    return value


def limits() -> NumericLimits:
    return NumericLimits(
        max_composite_dim=_env_int("ENSEMBLE_CLUSTER_MAX_COMPOSITE_DIM", 200_000),
        max_brute_force_atoms=_env_int("ENSEMBLE_CLUSTER_MAX_BRUTE_FORCE_ATOMS", 8),
        max_alignment_sweeps=_env_int("ENSEMBLE_CLUSTER_MAX_ALIGNMENT_SWEEPS", 200),
        cavity_monitor_samples=_env_int("ENSEMBLE_CLUSTER_CAVITY_MONITOR_SAMPLES", 257),
        leakage_bound=_env_float("ENSEMBLE_CLUSTER_LEAKAGE_BOUND", 1e-8),
        vacuum_residual_bound=_env_float("ENSEMBLE_CLUSTER_VACUUM_RESIDUAL_BOUND", 0.05),
        atom_release_bound=_env_float("ENSEMBLE_CLUSTER_ATOM_RELEASE_BOUND", 0.01),
        hermitian_tolerance=_env_float("ENSEMBLE_CLUSTER_HERMITIAN_TOLERANCE", 1e-10),
    )
