# SPDX-License-Identifier: Apache-2.0

from ensemble_cluster.dynamics.evolve import (
    TruncationEdgeError,
    evolve,
    evolve_local,
    evolve_times,
    jc_analytic_map,
    propagator,
)
from ensemble_cluster.dynamics.hamiltonians import (
    build_effective_spin_hamiltonian,
    build_full_hamiltonian,
    build_jc_hamiltonian,
    excitation_operator,
    frame_energies,
)
from ensemble_cluster.dynamics.params import (
    DispersiveRegimeWarning,
    ParameterError,
    PhysicalParams,
    params_for_ratio,
    params_from_detunings,
)
from ensemble_cluster.hilbert.operators import NonHermitianError

__all__ = [
    "DispersiveRegimeWarning",
    "NonHermitianError",
    "ParameterError",
    "PhysicalParams",
    "TruncationEdgeError",
    "build_effective_spin_hamiltonian",
    "build_full_hamiltonian",
    "build_jc_hamiltonian",
    "evolve",
    "evolve_local",
    "evolve_times",
    "excitation_operator",
    "frame_energies",
    "jc_analytic_map",
    "params_for_ratio",
    "params_from_detunings",
    "propagator",
]
