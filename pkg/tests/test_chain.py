# SPDX-License-Identifier: Apache-2.0

from __future__ import annotations

import unittest

import numpy as np
import pytest

from ensemble_cluster.dynamics.params import ParameterError, params_for_ratio, params_from_detunings
from ensemble_cluster.hilbert.space import E, F, G, collective_mode, control_atom
from ensemble_cluster.hilbert.state import basis_state, fidelity, local_state, tensor_product
from ensemble_cluster.model import ModelTier
from ensemble_cluster.protocol.chain import chain_modes, initial_chain_state, run_chain
from ensemble_cluster.protocol.passes import PassSettings, cavity_pass
from ensemble_cluster.protocol.pulses import PULSE_A, PULSE_B, PULSE_E, apply_pulse
from ensemble_cluster.protocol.trace import (
    AtomReleaseError,
    LeakageError,
    ProtocolStep,
    ProtocolTrace,
    StepKind,
    TemplateError,
    chain_template,
    check_fusion_template,
    check_template,
)
from ensemble_cluster.verify.graphs import (
    build_reference_cluster,
    literal_chain_state,
    path_graph,
    stabilizer_expectations,
)

PARAMS = params_for_ratio(100, 20.0)


class PulseTests(unittest.TestCase):
    def _atom(self, level: int):
        return basis_state((control_atom(),), [level])

    def test_pulse_a_maps_g_to_ie(self) -> None:
        out, support = apply_pulse(PULSE_A, self._atom(G))
        self.assertAlmostEqual(out.amplitudes[E], 1j)
        self.assertEqual(support, 0.0)

    def test_pulse_b_splits_e(self) -> None:
        out, _ = apply_pulse(PULSE_B, self._atom(E))
        s = 1 / np.sqrt(2)
        self.assertTrue(np.allclose(out.amplitudes, [s, 0, -s]))

    def test_pulse_e_swaps_f_and_g(self) -> None:
        out, _ = apply_pulse(PULSE_E, self._atom(F))
        self.assertAlmostEqual(out.amplitudes[G], -1j)

    def test_completed_level_support_is_reported(self) -> None:
        _, support = apply_pulse(PULSE_B, self._atom(G))
        self.assertAlmostEqual(support, 1.0)

    def test_pulse_e_passes_e_through(self) -> None:
        out, support = apply_pulse(PULSE_E, self._atom(E))
        self.assertAlmostEqual(out.amplitudes[E], 1.0)
        self.assertEqual(support, 0.0)
        self.assertEqual(PULSE_E.completed_levels, ())


class TemplateTests(unittest.TestCase):
    def test_chain_template_order(self) -> None:
        labels = [label for _, label, _ in chain_template(3)]
        self.assertEqual(labels, ["C1", "PulseA", "PulseB", "C2", "PulseA", "PulseB", "PulseE", "C3"])

    def test_out_of_order_trace_rejected(self) -> None:
        trace = ProtocolTrace("chain")
        trace.record(ProtocolStep(StepKind.PULSE, "PulseA"))
        with self.assertRaises(TemplateError):
            check_template(trace, chain_template(2))

    def test_fusion_template_needs_correction_step(self) -> None:
        trace = ProtocolTrace("fusion")
        for kind, label in [
            (StepKind.CAVITY_PASS, "node_a"),
            (StepKind.CAVITY_PASS, "node_b"),
            (StepKind.MEASURE, "stage1"),
            (StepKind.CAVITY_PASS, "node_a"),
            (StepKind.MEASURE, "stage2"),
        ]:
            trace.record(ProtocolStep(kind, label, outcome="+" if kind is StepKind.MEASURE else None))
        check_fusion_template(trace, completed=True, corrected=False)
        with self.assertRaises(TemplateError):
            check_fusion_template(trace, completed=True, corrected=True)
        self.assertEqual(trace.outcomes, ["+", "+"])


class CavityPassTests(unittest.TestCase):
    def test_analytic_pass_moves_excitation(self) -> None:
        state = tensor_product([basis_state((control_atom(),), [E]), local_state(collective_mode(4), [1])])
        out, record = cavity_pass(state, 0, PARAMS.chain_pass_time, ModelTier.ANALYTIC_JC, PARAMS)
        self.assertAlmostEqual(abs(out.amplitudes[G + 3 * 1]) ** 2, 1.0, places=12)
        self.assertEqual(record.leakage, 0.0)

    def test_rejects_non_mode_target(self) -> None:
        state = initial_chain_state(2, 4)
        with self.assertRaises(ValueError):
            cavity_pass(state, 5, PARAMS.chain_pass_time, ModelTier.ANALYTIC_JC, PARAMS)

    def test_leakage_bound_enforced(self) -> None:
        state = tensor_product([basis_state((control_atom(),), [E]), local_state(collective_mode(3), [0, 1])])
        settings = PassSettings(mode_truncation=3, leakage_bound=1e-8)
        # |e,1> -> |g,2> lands on the truncation edge
        with self.assertRaises(LeakageError):
            cavity_pass(state, 0, PARAMS.chain_pass_time, ModelTier.ANALYTIC_JC, PARAMS, settings)


class ChainTests(unittest.TestCase):
    def test_k4_stages_match_closed_forms(self) -> None:
        trace = run_chain(4, PARAMS, ModelTier.ANALYTIC_JC, trace_intermediates=True)
        expected = {"start", "C1", "R1", "C2", "R2", "C3", "R3", "RE", "C4"}
        self.assertEqual(set(trace.fidelities), expected)
        for stage, value in trace.fidelities.items():
            self.assertGreaterEqual(value, 1.0 - 1e-10, stage)

    def test_k4_final_state_is_path_cluster(self) -> None:
        trace = run_chain(4, PARAMS)
        self.assertTrue(trace.success)
        final = trace.final_state
        assert final is not None
        self.assertAlmostEqual(final.level_populations(0)[G], 1.0, places=12)
        modes = chain_modes(trace)
        graph = path_graph(4)
        self.assertGreaterEqual(fidelity(modes, build_reference_cluster(graph)), 1.0 - 1e-9)
        for value in stabilizer_expectations(modes, graph):
            self.assertAlmostEqual(value, 1.0, places=9)

    def test_chain_never_relies_on_completed_pulse_images(self) -> None:
        trace = run_chain(4, PARAMS)
        self.assertLess(trace.diagnostics["max_completed_pulse_support"], 1e-12)
        self.assertAlmostEqual(trace.diagnostics["control_atom_g_weight"], 1.0, places=12)

    def test_two_level_modes(self) -> None:
        settings = PassSettings(mode_truncation=2)
        trace = run_chain(3, PARAMS, settings=settings)
        self.assertEqual(trace.leakage, [0.0, 0.0, 0.0])
        modes = chain_modes(trace)
        self.assertEqual(modes.dims, (2, 2, 2))
        for value in stabilizer_expectations(modes, path_graph(3)):
            self.assertAlmostEqual(value, 1.0, places=9)

    def test_k2_after_first_zone(self) -> None:
        trace = run_chain(2, PARAMS, trace_intermediates=True)
        self.assertGreaterEqual(trace.fidelities["R1"], 1.0 - 1e-10)
        final = trace.final_state
        assert final is not None
        self.assertGreaterEqual(fidelity(final, literal_chain_state(2, "C2")), 1.0 - 1e-10)

    def test_single_sample_rejected(self) -> None:
        with self.assertRaises(ValueError):
            run_chain(1, PARAMS)

    def test_off_resonance_rejected(self) -> None:
        params = params_from_detunings(
            delta_c=PARAMS.delta_c, delta_L=PARAMS.delta_L, atoms=100, rabi=PARAMS.rabi * 1.01
        )
        with self.assertRaises(ParameterError):
            run_chain(3, params)


def test_template_is_recorded() -> None:
    trace = run_chain(3, PARAMS)
    assert trace.signatures() == chain_template(3)
    assert len(trace.leakage) == 3
    assert trace.diagnostics["tier"] == "analytic"


def test_spin_tier_matches_ideal_chain() -> None:
    params = params_for_ratio(20, 20.0)
    trace = run_chain(3, params, ModelTier.EFFECTIVE_SPIN, trace_intermediates=True)
    assert trace.fidelities["C3"] >= 1.0 - 1e-8
    assert trace.success


def test_full_tier_records_cavity_monitor() -> None:
    params = params_for_ratio(4, 40.0)
    settings = PassSettings(cavity_truncation=3, leakage_bound=1e-3, monitor_samples=33)
    trace = run_chain(2, params, ModelTier.FULL_DISPERSIVE, trace_intermediates=True, settings=settings)
    assert len(trace.vacuum_residuals) == 2
    assert 0.0 < trace.max_vacuum_residual < 0.05
    assert trace.fidelities["C2"] > 0.9


def test_full_tier_releases_atom_within_bound() -> None:
    params = params_for_ratio(4, 40.0)
    settings = PassSettings(cavity_truncation=3, leakage_bound=1e-3, monitor_samples=33)
    trace = run_chain(2, params, ModelTier.FULL_DISPERSIVE, settings=settings)
    weight = trace.diagnostics["control_atom_g_weight"]
    assert 1.0 - settings.atom_release_bound <= weight < 1.0
    modes = chain_modes(trace, settings.release_bound(ModelTier.FULL_DISPERSIVE))
    assert modes.norm() == pytest.approx(1.0, abs=1e-12)
    assert len(modes.subsystems) == 2
    with pytest.raises(AtomReleaseError):
        chain_modes(trace)
    strict = PassSettings(cavity_truncation=3, leakage_bound=1e-3, monitor_samples=33, atom_release_bound=1e-12)
    with pytest.raises(AtomReleaseError):
        run_chain(2, params, ModelTier.FULL_DISPERSIVE, settings=strict)


def test_stabilizers_reject_leaky_states() -> None:
    state = local_state(collective_mode(3), [0, 0, 1])
    with pytest.raises(LeakageError):
        stabilizer_expectations(state, path_graph(1))


if __name__ == "__main__":
    unittest.main()
