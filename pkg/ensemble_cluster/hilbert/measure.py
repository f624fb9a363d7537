# SPDX-License-Identifier: Apache-2.0

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Mapping, NamedTuple, Sequence

import numpy as np

from ensemble_cluster.hilbert.operators import HermitianOperator, apply_local, local_operator
from ensemble_cluster.hilbert.space import E, F, G, DimensionError, SubsystemSpec, check_index, control_atom
from ensemble_cluster.hilbert.state import StateVector
from ensemble_cluster.model import MeasurementMode, Postselect, Sample

logger = logging.getLogger(__name__)

COMPLETENESS_TOLERANCE = 1e-12
IMPOSSIBLE_BRANCH = 1e-12


class ImpossibleBranchError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class MeasurementBasis:
    subsystem_index: int
    projectors: tuple[HermitianOperator, ...]
    labels: tuple[str, ...]

    def __post_init__(self) -> None:
        projectors = tuple(self.projectors)
        labels = tuple(self.labels)
        if len(projectors) != len(labels) or not projectors:
            raise ValueError("Measurement basis needs one label per projector")
        if len(set(labels)) != len(labels):
            raise ValueError(f"Duplicate outcome labels: {labels}")
        spec = projectors[0].subsystems
        if any(p.subsystems != spec or len(p.subsystems) != 1 for p in projectors):
            raise DimensionError("All projectors must act on the same single subsystem")
        dim = spec[0].dim
        total = np.zeros((dim, dim), dtype=np.complex128)
        for i, p in enumerate(projectors):
            if not np.allclose(p.matrix @ p.matrix, p.matrix, atol=COMPLETENESS_TOLERANCE, rtol=0.0):
                raise ValueError(f"Projector {labels[i]!r} is not idempotent")
            for j in range(i + 1, len(projectors)):
                if not np.allclose(p.matrix @ projectors[j].matrix, 0.0, atol=COMPLETENESS_TOLERANCE):
                    raise ValueError(f"Projectors {labels[i]!r} and {labels[j]!r} are not orthogonal")
            total += p.matrix
        if not np.allclose(total, np.eye(dim), atol=COMPLETENESS_TOLERANCE, rtol=0.0):
            raise ValueError("Projectors do not sum to the identity")
        object.__setattr__(self, "projectors", projectors)
        object.__setattr__(self, "labels", labels)

    @property
    def spec(self) -> SubsystemSpec:
        return self.projectors[0].subsystems[0]

    def projector(self, label: str) -> HermitianOperator:
        try:
            return self.projectors[self.labels.index(label)]
        except ValueError:
            raise KeyError(f"Unknown outcome {label!r}; expected one of {self.labels}") from None

    def ket(self, label: str) -> np.ndarray:
        """The state a rank-one outcome leaves the subsystem in (up to phase)."""
        values, vectors = self.projector(label).eigensystem
        if int(np.sum(values > 0.5)) != 1:
            raise ValueError(f"Outcome {label!r} is not a rank-one projector")
        return vectors[:, -1]

    @classmethod
    def from_kets(
        cls,
        subsystem_index: int,
        spec: SubsystemSpec,
        kets: Mapping[str, Sequence[complex]],
        rest_label: str = "rest",
    ) -> "MeasurementBasis":
        """Rank-one projectors on `kets`, completed by a projector on the orthogonal rest."""
        projectors = []
        labels = []
        total = np.zeros((spec.dim, spec.dim), dtype=np.complex128)
        for label, ket in kets.items():
            v = np.zeros(spec.dim, dtype=np.complex128)
            values = np.asarray(ket, dtype=np.complex128)
            v[: values.shape[0]] = values
            v = v / np.linalg.norm(v)
            p = np.outer(v, v.conj())
            total += p
            projectors.append(local_operator(spec, p, label))
            labels.append(label)
        rest = np.eye(spec.dim) - total
        if np.linalg.norm(rest) > COMPLETENESS_TOLERANCE:
            projectors.append(local_operator(spec, rest, rest_label))
            labels.append(rest_label)
        return cls(subsystem_index, tuple(projectors), tuple(labels))


def fg_basis(subsystem_index: int = 0) -> MeasurementBasis:
    """Detection basis {(|f> +/- |g>)/sqrt2} on the control atom; |e> is the rest outcome."""
    s = 1 / np.sqrt(2)
    kets = {"+": _atom_ket({F: s, G: s}), "-": _atom_ket({F: s, G: -s})}
    return MeasurementBasis.from_kets(subsystem_index, control_atom(), kets, rest_label="e")


def ge_basis(subsystem_index: int = 0) -> MeasurementBasis:
    """Detection basis {(|g> +/- i|e>)/sqrt2} on the control atom; |f> is the rest outcome."""
    s = 1 / np.sqrt(2)
    kets = {"+": _atom_ket({G: s, E: 1j * s}), "-": _atom_ket({G: s, E: -1j * s})}
    return MeasurementBasis.from_kets(subsystem_index, control_atom(), kets, rest_label="f")


def _atom_ket(amps: Mapping[int, complex]) -> np.ndarray:
    v = np.zeros(3, dtype=np.complex128)
    for level, amp in amps.items():
        v[level] = amp
    return v


class MeasurementOutcome(NamedTuple):
    label: str
    probability: float
    post_state: StateVector


def outcome_probabilities(state: StateVector, basis: MeasurementBasis) -> dict[str, float]:
    _check_basis(state, basis)
    probs = {}
    for label, p in zip(basis.labels, basis.projectors):
        projected = apply_local(p.matrix, state, [basis.subsystem_index])
        probs[label] = float(np.real(np.vdot(state.amplitudes, projected.amplitudes)))
    return probs


def measure(state: StateVector, basis: MeasurementBasis, mode: MeasurementMode) -> MeasurementOutcome:
    probs = outcome_probabilities(state, basis)
    if isinstance(mode, Sample):
        label = _draw(basis.labels, probs, mode.seed)
    elif isinstance(mode, Postselect):
        label = mode.outcome
        if label not in probs:
            raise KeyError(f"Unknown outcome {label!r}; expected one of {basis.labels}")
        if probs[label] < IMPOSSIBLE_BRANCH:
            raise ImpossibleBranchError(f"Outcome {label!r} has probability {probs[label]:.3e}")
    else:
        raise TypeError(f"Unsupported measurement mode {mode!r}")

    prob = probs[label]
    projected = apply_local(basis.projector(label).matrix, state, [basis.subsystem_index])
    post = projected.with_amplitudes(projected.amplitudes / np.sqrt(prob))
    logger.debug("measured subsystem %d: %s (p=%.6f)", basis.subsystem_index, label, prob)
    return MeasurementOutcome(label, prob, post)


def _draw(labels: Sequence[str], probs: Mapping[str, float], seed: int) -> str:
    weights = np.clip([probs[label] for label in labels], 0.0, None)
    pick = np.random.default_rng(seed).choice(len(labels), p=weights / weights.sum())
    return labels[int(pick)]


def _check_basis(state: StateVector, basis: MeasurementBasis) -> None:
    check_index(state.subsystems, basis.subsystem_index)
    if state.subsystems[basis.subsystem_index] != basis.spec:
        raise DimensionError(
            f"Basis acts on {basis.spec.role.value} dim {basis.spec.dim}, "
            f"subsystem {basis.subsystem_index} is {state.subsystems[basis.subsystem_index].role.value}"
        )
