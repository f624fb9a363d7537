# SPDX-License-Identifier: Apache-2.0

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Sequence

from ensemble_cluster.hilbert.state import StateVector
from ensemble_cluster.model import InvariantViolation

# the analytic tier leaves the control atom in |g> up to rounding
EXACT_RELEASE_BOUND = 1e-8


class LeakageError(InvariantViolation):
    """Population reached the truncation edge or left the qubit subspace of a mode."""


class VacuumResidualError(InvariantViolation):
    """The cavity did not return to vacuum after a full-model pass."""


class TemplateError(InvariantViolation):
    """Recorded steps do not follow the protocol's step sequence."""


class AtomReleaseError(InvariantViolation):
    """The control atom kept too much population outside |g> when the chain finished."""


class StepKind(str, Enum):
    CAVITY_PASS = "cavity_pass"
    PULSE = "pulse"
    MEASURE = "measure"
    CORRECTION = "correction"


@dataclass(frozen=True)
class ProtocolStep:
    kind: StepKind
    label: str
    # ensemble index for passes and corrections; None for atom-only steps
    target: int | None = None
    duration: float = 0.0
    outcome: str | None = None
    probability: float | None = None

    def signature(self) -> tuple[str, str, int | None]:
        return (self.kind.value, self.label, self.target)

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {"kind": self.kind.value, "label": self.label}
        if self.target is not None:
            out["target"] = self.target
        if self.duration:
            out["duration_s"] = self.duration
        if self.outcome is not None:
            out["outcome"] = self.outcome
            out["probability"] = self.probability
        return out


@dataclass
class ProtocolTrace:
    protocol: str
    steps: list[ProtocolStep] = field(default_factory=list)
    outcomes: list[str] = field(default_factory=list)
    leakage: list[float] = field(default_factory=list)
    vacuum_residuals: list[float] = field(default_factory=list)
    fidelities: dict[str, float] = field(default_factory=dict)
    diagnostics: dict[str, Any] = field(default_factory=dict)
    final_state: StateVector | None = None
    success: bool = False

    def record(self, step: ProtocolStep) -> None:
        self.steps.append(step)
        if step.kind is StepKind.MEASURE and step.outcome is not None:
            self.outcomes.append(step.outcome)

    @property
    def max_leakage(self) -> float:
        return max(self.leakage, default=0.0)

    @property
    def max_vacuum_residual(self) -> float:
        return max(self.vacuum_residuals, default=0.0)

    def signatures(self) -> list[tuple[str, str, int | None]]:
        return [s.signature() for s in self.steps]


def chain_template(ensembles: int) -> list[tuple[str, str, int | None]]:
    """C1, R1, C2, ..., C_{K-1}, R_{K-1}, R_E, C_K with each R_i = (PulseA, PulseB)."""
    steps: list[tuple[str, str, int | None]] = []
    for k in range(ensembles - 1):
        steps.append((StepKind.CAVITY_PASS.value, f"C{k + 1}", k))
        steps.append((StepKind.PULSE.value, "PulseA", None))
        steps.append((StepKind.PULSE.value, "PulseB", None))
    steps.append((StepKind.PULSE.value, "PulseE", None))
    steps.append((StepKind.CAVITY_PASS.value, f"C{ensembles}", ensembles - 1))
    return steps


def check_template(trace: ProtocolTrace, expected: Sequence[tuple[str, str, int | None]]) -> None:
    got = trace.signatures()
    if got != list(expected):
        raise TemplateError(f"{trace.protocol} steps {got} do not follow {list(expected)}")


def fusion_template(completed: bool, corrected: bool) -> list[tuple[str, str, int | None]]:
    """Stage one (two passes, one detection), then stage two when stage one succeeded."""
    steps: list[tuple[str, str, int | None]] = [
        (StepKind.CAVITY_PASS.value, "node_a", None),
        (StepKind.CAVITY_PASS.value, "node_b", None),
        (StepKind.MEASURE.value, "stage1", None),
    ]
    if completed:
        steps.append((StepKind.CAVITY_PASS.value, "node_a", None))
        steps.append((StepKind.MEASURE.value, "stage2", None))
        if corrected:
            steps.append((StepKind.CORRECTION.value, "Z", None))
    return steps


def check_fusion_template(trace: ProtocolTrace, completed: bool, corrected: bool) -> None:
    # targets depend on the chain layout, so only kinds and labels are compared
    got = [(kind, label, None) for kind, label, _ in trace.signatures()]
    expected = fusion_template(completed, corrected)
    if got != expected:
        raise TemplateError(f"fusion steps {got} do not follow {expected}")
