# SPDX-License-Identifier: Apache-2.0

"""Connecting two chains through one node each.

Stage one sends an atom in (|f> + |g>)/sqrt2 through the cavities of both
nodes with a pi pass, which imprints (-1)^(n_a + n_b) on |g>. Detecting
(|f> + |g>)/sqrt2 keeps the even-parity part of the two nodes. Stage two
swaps node_a's excitation into a second atom in |g> and measures it in
(|g> +/- i|e>)/sqrt2, which hands the link over to node_b and leaves node_a
in vacuum.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Union

import numpy as np
from scipy.stats import binomtest

from ensemble_cluster.dynamics.ladders import qubit_phase_flip
from ensemble_cluster.dynamics.params import PhysicalParams
from ensemble_cluster.engine.runner import run_ordered
from ensemble_cluster.hilbert.measure import fg_basis, ge_basis, measure, outcome_probabilities
from ensemble_cluster.hilbert.operators import apply_local
from ensemble_cluster.hilbert.space import G, control_atom, mode_indices
from ensemble_cluster.hilbert.state import StateVector, local_state, project_subsystem, tensor_product
from ensemble_cluster.model import ModelTier, Postselect, Sample
from ensemble_cluster.protocol.passes import PassSettings, cavity_pass
from ensemble_cluster.protocol.trace import (
    ProtocolStep,
    ProtocolTrace,
    StepKind,
    check_fusion_template,
)
from ensemble_cluster.verify.graphs import check_qubit_subspace, release_control_atom

logger = logging.getLogger(__name__)

NODE_SUBSPACE_BOUND = 1e-10
STAGE_OUTCOMES = ("+", "-")


@dataclass(frozen=True)
class FusionPath:
    """Outcomes to keep at stage one and stage two."""

    stage1: str = "+"
    stage2: str = "-"

    def __post_init__(self) -> None:
        if self.stage1 not in fg_basis().labels:
            raise ValueError(f"Unknown stage-1 outcome {self.stage1!r}")
        if self.stage2 not in ge_basis().labels:
            raise ValueError(f"Unknown stage-2 outcome {self.stage2!r}")

    @classmethod
    def parse(cls, text: str) -> "FusionPath":
        """"+,-" style: stage-1 label, comma, stage-2 label."""
        parts = [p.strip() for p in text.replace("−", "-").split(",")]
        if len(parts) != 2 or not all(parts):
            raise ValueError(f"Postselection path must look like '+,-', got {text!r}")
        return cls(parts[0], parts[1])

    def __str__(self) -> str:
        return f"{self.stage1},{self.stage2}"


FusionMode = Union[Sample, FusionPath]


def stage_seeds(seed: int) -> tuple[int, int]:
    """Independent seeds for the two detections of one fusion attempt."""
    first, second = trial_seeds(seed, 2)
    return first, second


def trial_seeds(seed: int, trials: int) -> list[int]:
    return [int(c.generate_state(1, dtype=np.uint64)[0]) for c in np.random.SeedSequence(seed).spawn(trials)]


@dataclass(frozen=True)
class _Layout:
    joint: StateVector
    # ensemble indices (mode subsystem index - 1) inside the joint state
    ens_a: int
    ens_b: int


def _layout(
    chain_a: StateVector,
    chain_b: StateVector,
    node_a: int,
    node_b: int,
    tier: ModelTier,
    settings: PassSettings,
    trace: ProtocolTrace,
) -> _Layout:
    tolerance = settings.release_bound(tier)
    chain_a, weight_a = release_control_atom(chain_a, tolerance)
    chain_b, weight_b = release_control_atom(chain_b, tolerance)
    trace.diagnostics["input_atom_g_weights"] = [weight_a, weight_b]
    modes_a, modes_b = mode_indices(chain_a.subsystems), mode_indices(chain_b.subsystems)
    if len(modes_a) != len(chain_a.subsystems) or len(modes_b) != len(chain_b.subsystems):
        raise ValueError("Fusion inputs must hold only collective modes after the control atom is removed")
    if not 0 <= node_a < len(modes_a):
        raise ValueError(f"node_a={node_a} out of range for a {len(modes_a)}-node chain")
    if not 0 <= node_b < len(modes_b):
        raise ValueError(f"node_b={node_b} out of range for a {len(modes_b)}-node chain")
    # the spin and full tiers leave the nodes slightly outside the qubit code space
    node_bound = max(NODE_SUBSPACE_BOUND, tolerance)
    check_qubit_subspace(chain_a, [node_a], node_bound)
    check_qubit_subspace(chain_b, [node_b], node_bound)
    atom = local_state(control_atom(), np.array([1.0, 1.0, 0.0]) / np.sqrt(2))
    joint = tensor_product([atom, chain_a, chain_b])
    return _Layout(joint, node_a, len(chain_a.subsystems) + node_b)


def _stage_one(
    layout: _Layout, params: PhysicalParams, tier: ModelTier, settings: PassSettings, trace: ProtocolTrace
) -> StateVector:
    state = layout.joint
    duration = params.fusion_pass_time
    for label, ens in (("node_a", layout.ens_a), ("node_b", layout.ens_b)):
        state, record = cavity_pass(state, ens, duration, tier, params, settings)
        trace.record(ProtocolStep(StepKind.CAVITY_PASS, label, ens, duration))
        trace.leakage.append(record.leakage)
        if tier is ModelTier.FULL_DISPERSIVE:
            trace.vacuum_residuals.append(record.vacuum_residual)
    return state


def _stage_two_input(post_one: StateVector) -> StateVector:
    """Drop the detected first atom and bring in the second atom in |g>."""
    rest, _ = project_subsystem(post_one, 0, fg_basis().ket("+"))
    ground = np.zeros(3)
    ground[G] = 1.0
    return tensor_product([local_state(control_atom(), ground), rest])


def _stage_two(
    state: StateVector,
    layout: _Layout,
    params: PhysicalParams,
    tier: ModelTier,
    settings: PassSettings,
    trace: ProtocolTrace,
) -> StateVector:
    duration = params.chain_pass_time
    state, record = cavity_pass(state, layout.ens_a, duration, tier, params, settings)
    trace.record(ProtocolStep(StepKind.CAVITY_PASS, "node_a", layout.ens_a, duration))
    trace.leakage.append(record.leakage)
    if tier is ModelTier.FULL_DISPERSIVE:
        trace.vacuum_residuals.append(record.vacuum_residual)
    return state


def _finish(post_two: StateVector, label: str, layout: _Layout, trace: ProtocolTrace) -> StateVector:
    state = post_two
    b_index = layout.ens_b + 1
    corrected = label == "+"
    if corrected:
        state = apply_local(qubit_phase_flip(state.subsystems[b_index].dim), state, [b_index])
        trace.record(ProtocolStep(StepKind.CORRECTION, "Z", layout.ens_b))
    state, _ = project_subsystem(state, 0, ge_basis().ket(label))
    vacuum = np.zeros(state.subsystems[layout.ens_a].dim)
    vacuum[0] = 1.0
    state, weight = project_subsystem(state, layout.ens_a, vacuum)
    trace.diagnostics["node_a_vacuum_weight"] = weight
    return state


def run_fusion(
    chain_a: StateVector,
    chain_b: StateVector,
    node_a: int,
    node_b: int,
    params: PhysicalParams,
    tier: ModelTier = ModelTier.ANALYTIC_JC,
    mode: FusionMode | None = None,
    settings: PassSettings | None = None,
) -> ProtocolTrace:
    """Fuse chain_a's `node_a` into chain_b's `node_b`.

    The fused state orders modes as chain A without node_a, then chain B.
    A stage-one outcome other than "+" ends the run with success False and
    the post-measurement state kept in the trace.
    """
    tier = ModelTier.parse(tier)
    settings = settings or PassSettings()
    mode = mode if mode is not None else FusionPath()
    trace = ProtocolTrace("fusion")
    layout = _layout(chain_a, chain_b, node_a, node_b, tier, settings, trace)

    if isinstance(mode, Sample):
        seed1, seed2 = stage_seeds(mode.seed)
        first: Sample | Postselect = Sample(seed1)
        second: Sample | Postselect = Sample(seed2)
    elif isinstance(mode, FusionPath):
        first, second = Postselect(mode.stage1), Postselect(mode.stage2)
    else:
        raise TypeError(f"Unsupported fusion mode {mode!r}")

    pre_one = _stage_one(layout, params, tier, settings, trace)
    basis1 = fg_basis()
    trace.diagnostics["stage1_probabilities"] = outcome_probabilities(pre_one, basis1)
    out1 = measure(pre_one, basis1, first)
    trace.record(ProtocolStep(StepKind.MEASURE, "stage1", outcome=out1.label, probability=out1.probability))
    if out1.label != "+":
        logger.info("fusion stage 1 returned %r (p=%.4f); connection failed", out1.label, out1.probability)
        trace.final_state = out1.post_state
        check_fusion_template(trace, completed=False, corrected=False)
        return trace

    pre_two = _stage_two(_stage_two_input(out1.post_state), layout, params, tier, settings, trace)
    basis2 = ge_basis()
    trace.diagnostics["stage2_probabilities"] = outcome_probabilities(pre_two, basis2)
    out2 = measure(pre_two, basis2, second)
    trace.record(ProtocolStep(StepKind.MEASURE, "stage2", outcome=out2.label, probability=out2.probability))
    if out2.label not in STAGE_OUTCOMES:
        logger.warning(
            "fusion stage 2 detected %r (p=%.3e); the second atom left the g/e manifold",
            out2.label,
            out2.probability,
        )
        trace.final_state = out2.post_state
        check_fusion_template(trace, completed=True, corrected=False)
        return trace

    trace.final_state = _finish(out2.post_state, out2.label, layout, trace)
    trace.success = True
    check_fusion_template(trace, completed=True, corrected=out2.label == "+")
    logger.info("fusion succeeded via %s,%s", out1.label, out2.label)
    return trace


@dataclass(frozen=True)
class FusionStatistics:
    trials: int
    successes: int
    stage2_counts: dict[str, int] = field(default_factory=dict)
    confidence: float = 0.95
    ci_low: float = 0.0
    ci_high: float = 1.0

    @property
    def frequency(self) -> float:
        return self.successes / self.trials

    def to_dict(self) -> dict:
        return {
            "trials": self.trials,
            "successes": self.successes,
            "frequency": self.frequency,
            "confidence": self.confidence,
            "ci_low": self.ci_low,
            "ci_high": self.ci_high,
            "stage2_counts": dict(sorted(self.stage2_counts.items())),
        }


def _sample_trial(task: tuple[StateVector, StateVector | None, int]) -> tuple[str, str | None]:
    pre_one, pre_two, seed = task
    seed1, seed2 = stage_seeds(seed)
    label1 = measure(pre_one, fg_basis(), Sample(seed1)).label
    if label1 != "+" or pre_two is None:
        return label1, None
    return label1, measure(pre_two, ge_basis(), Sample(seed2)).label


def sample_fusion(
    chain_a: StateVector,
    chain_b: StateVector,
    node_a: int,
    node_b: int,
    params: PhysicalParams,
    trials: int,
    seed: int,
    tier: ModelTier = ModelTier.ANALYTIC_JC,
    settings: PassSettings | None = None,
    workers: int | None = 1,
    confidence: float = 0.95,
) -> FusionStatistics:
    """Monte-Carlo fusion attempts.

    The dynamics between detections are deterministic, so they are computed
    once; each trial only draws its detections. Trial i draws exactly what
    `run_fusion(..., mode=Sample(trial_seeds(seed, trials)[i]))` draws.
    """
    if trials <= 0:
        raise ValueError(f"Number of trials must be positive, got {trials}")
    tier = ModelTier.parse(tier)
    settings = settings or PassSettings()
    scratch = ProtocolTrace("fusion")
    layout = _layout(chain_a, chain_b, node_a, node_b, tier, settings, scratch)
    pre_one = _stage_one(layout, params, tier, settings, scratch)
    pre_two = None
    if outcome_probabilities(pre_one, fg_basis())["+"] > 0:
        post_one = measure(pre_one, fg_basis(), Postselect("+")).post_state
        pre_two = _stage_two(_stage_two_input(post_one), layout, params, tier, settings, scratch)

    tasks = [(pre_one, pre_two, s) for s in trial_seeds(seed, trials)]
    results = run_ordered(_sample_trial, tasks, workers)
    successes = sum(1 for label1, _ in results if label1 == "+")
    counts: dict[str, int] = {}
    for _, label2 in results:
        if label2 is not None:
            counts[label2] = counts.get(label2, 0) + 1
    ci = binomtest(successes, trials).proportion_ci(confidence_level=confidence, method="exact")
    stats = FusionStatistics(trials, successes, counts, confidence, float(ci.low), float(ci.high))
    logger.info(
        "fusion Monte-Carlo: %d/%d successes (%.4f, %.0f%% CI [%.4f, %.4f])",
        successes,
        trials,
        stats.frequency,
        100 * confidence,
        stats.ci_low,
        stats.ci_high,
    )
    return stats
