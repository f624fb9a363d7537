# SPDX-License-Identifier: Apache-2.0

from __future__ import annotations

import math
import unittest

import networkx as nx
import numpy as np
import pytest

from ensemble_cluster.dynamics.ladders import sigma_z_qubit
from ensemble_cluster.dynamics.params import params_for_ratio
from ensemble_cluster.hilbert.operators import apply_local
from ensemble_cluster.hilbert.space import E, G, collective_mode, control_atom, dicke_ladder
from ensemble_cluster.hilbert.state import StateVector, basis_state, fidelity, local_state
from ensemble_cluster.protocol.chain import run_chain
from ensemble_cluster.protocol.trace import AtomReleaseError
from ensemble_cluster.protocol.timing import feasibility, ramsey_zones, total_protocol_time
from ensemble_cluster.verify.alignment import phase_aligned_fidelity, rotate_phases
from ensemble_cluster.verify.approximation import (
    approximation_sweep,
    bosonic_commutator_defect,
    symmetric_basis,
)
from ensemble_cluster.verify.graphs import (
    GraphSpec,
    build_reference_cluster,
    fused_graph,
    literal_chain_state,
    path_graph,
    stabilizer_expectations,
    strip_control_atom,
)


def _qubit_mask(state: StateVector) -> np.ndarray:
    levels = np.stack([idx.reshape(-1, order="F") for idx in np.indices(state.dims)])
    return np.all(levels <= 1, axis=0)


class GraphTests(unittest.TestCase):
    def test_edges_are_normalized(self) -> None:
        graph = GraphSpec(3, ((1, 0), (0, 1), (2, 1)))
        self.assertEqual(graph.edges, ((0, 1), (1, 2)))
        self.assertEqual(graph.neighbors(1), [0, 2])

    def test_invalid_edges_rejected(self) -> None:
        with self.assertRaises(ValueError):
            GraphSpec(2, ((0, 0),))
        with self.assertRaises(ValueError):
            GraphSpec(2, ((0, 2),))

    def test_networkx_round_trip(self) -> None:
        graph = GraphSpec.from_networkx(nx.cycle_graph(4))
        self.assertTrue(nx.is_isomorphic(graph.to_networkx(), nx.cycle_graph(4)))

    def test_reference_cluster_stabilizers(self) -> None:
        for graph in (path_graph(3), GraphSpec.from_networkx(nx.cycle_graph(4)), GraphSpec(2)):
            state = build_reference_cluster(graph, 3)
            self.assertAlmostEqual(state.norm(), 1.0, places=12)
            for value in stabilizer_expectations(state, graph):
                self.assertAlmostEqual(value, 1.0, places=12)

    def test_stabilizers_flag_each_phase_flipped_node(self) -> None:
        graph = path_graph(4)
        state = build_reference_cluster(graph, 3)
        for node in range(graph.nodes):
            flipped = apply_local(sigma_z_qubit(3), state, [node])
            values = stabilizer_expectations(flipped, graph)
            for j, value in enumerate(values):
                self.assertAlmostEqual(value, -1.0 if j == node else 1.0, places=12)

    def test_stabilizers_below_one_off_the_cluster(self) -> None:
        graph = path_graph(3)
        reference = build_reference_cluster(graph, 3)
        rng = np.random.default_rng(8)
        noise = rng.normal(size=reference.dim) + 1j * rng.normal(size=reference.dim)
        # keep the noise inside the qubit code space
        noise[~_qubit_mask(reference)] = 0.0
        corrupted = reference.with_amplitudes(reference.amplitudes + 0.3 * noise).normalized()
        self.assertLess(min(stabilizer_expectations(corrupted, graph)), 1.0 - 1e-6)
        self.assertLess(fidelity(corrupted, reference), 1.0 - 1e-6)

    def test_fused_graph_joins_neighbourhoods(self) -> None:
        graph = fused_graph(path_graph(3), path_graph(3), 1, 1)
        # node a1 removed; b1 inherits a0 and a2
        self.assertEqual(graph.nodes, 5)
        self.assertEqual(sorted(graph.neighbors(3)), [0, 1, 2, 4])


class LiteralChainTests(unittest.TestCase):
    def test_start_and_first_pass(self) -> None:
        start = literal_chain_state(2, "start")
        s = 1 / math.sqrt(2)
        expected = StateVector(
            start.subsystems,
            s * (basis_state(start.subsystems, [0, 0, 0]).amplitudes + basis_state(start.subsystems, [E, 0, 0]).amplitudes),
        )
        self.assertAlmostEqual(fidelity(start, expected), 1.0, places=12)
        after = literal_chain_state(2, "C1")
        g1 = basis_state(after.subsystems, [G, 1, 0])
        self.assertAlmostEqual(abs(np.vdot(g1.amplitudes, after.amplitudes)) ** 2, 0.5, places=12)

    def test_finished_chain_is_atom_times_cluster(self) -> None:
        for k in (2, 3, 4, 5):
            with self.subTest(k=k):
                modes = strip_control_atom(literal_chain_state(k, f"C{k}"))
                self.assertAlmostEqual(fidelity(modes, build_reference_cluster(path_graph(k))), 1.0, places=12)
                simulated = run_chain(k, params_for_ratio(100, 20.0)).final_state
                assert simulated is not None
                self.assertAlmostEqual(fidelity(simulated, literal_chain_state(k, f"C{k}")), 1.0, places=10)

    def test_unknown_stage_rejected(self) -> None:
        with self.assertRaises(ValueError):
            literal_chain_state(3, "R7x")

    def test_unfinished_chain_keeps_atom(self) -> None:
        with self.assertRaises(AtomReleaseError):
            strip_control_atom(literal_chain_state(2, "R1"))


class AlignmentTests(unittest.TestCase):
    def _state(self, seed: int) -> StateVector:
        rng = np.random.default_rng(seed)
        subs = (control_atom(), collective_mode(3), collective_mode(3))
        amps = rng.normal(size=27) + 1j * rng.normal(size=27)
        return StateVector(subs, amps).normalized()

    def test_injected_phases_are_recovered(self) -> None:
        state = self._state(1)
        phases = (0.4, 1.3, 0.0, 2.1)
        rotated = rotate_phases(state, phases)
        self.assertLess(fidelity(rotated, state), 0.999)
        result = phase_aligned_fidelity(rotated, state)
        self.assertAlmostEqual(result.fidelity, 1.0, places=8)
        restored = rotate_phases(state, result.phases)
        self.assertAlmostEqual(fidelity(restored, rotated), 1.0, places=8)

    def test_alignment_never_lowers_fidelity(self) -> None:
        a, b = self._state(2), self._state(3)
        self.assertGreaterEqual(phase_aligned_fidelity(a, b).fidelity, fidelity(a, b) - 1e-12)

    def test_mismatched_spaces_rejected(self) -> None:
        with self.assertRaises(ValueError):
            phase_aligned_fidelity(self._state(1), local_state(control_atom(), [1]))


def test_commutator_defect_vanishes_on_dicke_states() -> None:
    atoms = 12
    for n in (0, 1, 3):
        state = basis_state((dicke_ladder(atoms),), [n])
        check = bosonic_commutator_defect(atoms, state)
        assert check.defect == pytest.approx(0.0, abs=1e-12)
        assert check.gap == pytest.approx(2.0 * n / atoms, abs=1e-12)


@pytest.mark.parametrize("atoms", [2, 10, 100])
def test_commutator_defect_vanishes_on_random_ladder_states(atoms: int) -> None:
    rng = np.random.default_rng(atoms)
    amps = rng.normal(size=atoms + 1) + 1j * rng.normal(size=atoms + 1)
    state = StateVector((dicke_ladder(atoms),), amps).normalized()
    check = bosonic_commutator_defect(atoms, state)
    assert check.defect == pytest.approx(0.0, abs=1e-10)
    assert check.gap == pytest.approx(2.0 * state.mean_excitation(0) / atoms, abs=1e-10)


def test_symmetric_basis_is_orthonormal() -> None:
    p = symmetric_basis(4)
    assert np.allclose(p.T @ p, np.eye(5))


def test_time_budget() -> None:
    params = params_for_ratio(100, 20.0)
    assert ramsey_zones(4) == 4
    assert ramsey_zones(1) == 0
    assert total_protocol_time(4, params) == pytest.approx(4 * params.chain_pass_time)
    assert total_protocol_time(4, params, zone_transit=1e-4) == pytest.approx(
        4 * params.chain_pass_time + 4e-4
    )
    budget = feasibility(4, params)
    assert budget.lifetime == pytest.approx(30e-3)
    assert budget.margin == pytest.approx(30e-3 / budget.total)
    assert budget.feasible
    assert budget.margin > 1.0
    assert budget.to_dict()["feasible"] is True
    assert not feasibility(4, params, lifetime=0.5 * budget.total).feasible
    with pytest.raises(ValueError):
        total_protocol_time(-1, params)


@pytest.mark.slow
def test_sweep_fidelity_improves_with_detuning() -> None:
    reports = approximation_sweep([10], [40.0, 10.0, 20.0], 2)
    assert [r.ratio for r in reports] == [10.0, 20.0, 40.0]
    fidelities = [r.chain_fidelity for r in reports]
    assert fidelities[0] <= fidelities[1] <= fidelities[2]
    residuals = [r.cavity_residual for r in reports]
    assert residuals[0] >= residuals[1] >= residuals[2]
    assert all(0.0 <= r.commutator_gap <= 0.2 + 1e-9 for r in reports)
    assert fidelities[2] > 0.9


def test_sweep_rejects_empty_grid() -> None:
    with pytest.raises(ValueError):
        approximation_sweep([], [10.0], 2)


if __name__ == "__main__":
    unittest.main()
