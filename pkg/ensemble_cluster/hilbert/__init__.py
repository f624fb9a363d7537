# SPDX-License-Identifier: Apache-2.0

from ensemble_cluster.hilbert.measure import (
    ImpossibleBranchError,
    MeasurementBasis,
    MeasurementOutcome,
    fg_basis,
    ge_basis,
    measure,
    outcome_probabilities,
)
from ensemble_cluster.hilbert.operators import (
    HermitianOperator,
    NonHermitianError,
    apply,
    apply_local,
    embed_operator,
    local_operator,
)
from ensemble_cluster.hilbert.space import (
    E,
    F,
    G,
    DimensionError,
    Role,
    SubsystemSpec,
    cavity_mode,
    collective_mode,
    control_atom,
    dicke_ladder,
)
from ensemble_cluster.hilbert.state import (
    StateVector,
    basis_state,
    fidelity,
    local_state,
    reduced_density,
    tensor_product,
)

__all__ = [
    "E",
    "F",
    "G",
    "DimensionError",
    "HermitianOperator",
    "ImpossibleBranchError",
    "MeasurementBasis",
    "MeasurementOutcome",
    "NonHermitianError",
    "Role",
    "StateVector",
    "SubsystemSpec",
    "apply",
    "apply_local",
    "basis_state",
    "cavity_mode",
    "collective_mode",
    "control_atom",
    "dicke_ladder",
    "embed_operator",
    "fg_basis",
    "fidelity",
    "ge_basis",
    "local_operator",
    "local_state",
    "measure",
    "outcome_probabilities",
    "reduced_density",
    "tensor_product",
]
