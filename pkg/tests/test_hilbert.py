# SPDX-License-Identifier: Apache-2.0

from __future__ import annotations

import unittest
from pathlib import Path

import numpy as np
import pytest

from ensemble_cluster.hilbert.measure import (
    ImpossibleBranchError,
    fg_basis,
    ge_basis,
    measure,
    outcome_probabilities,
)
from ensemble_cluster.hilbert.operators import (
    HermitianOperator,
    NonHermitianError,
    apply_local,
    embed_matrix,
    embed_operator,
    is_unitary,
)
from ensemble_cluster.hilbert.snapshot import dumps_snapshot, load_snapshot, write_snapshot
from ensemble_cluster.hilbert.space import (
    E,
    F,
    G,
    DimensionError,
    SubsystemSpec,
    collective_mode,
    composite_index,
    control_atom,
    dicke_ladder,
)
from ensemble_cluster.hilbert.state import (
    StateVector,
    basis_state,
    fidelity,
    insert_subsystem,
    local_state,
    project_subsystem,
    purity,
    reduced_density,
    resize_subsystem,
    tensor_product,
)
from ensemble_cluster.model import Postselect, Sample


def _random_state(subsystems, seed: int) -> StateVector:
    rng = np.random.default_rng(seed)
    dim = int(np.prod([s.dim for s in subsystems]))
    amps = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return StateVector(tuple(subsystems), amps).normalized()


class SpaceTests(unittest.TestCase):
    def test_atom_must_be_three_level(self) -> None:
        with self.assertRaises(DimensionError):
            SubsystemSpec(control_atom().role, 2)

    def test_atom_plus_mode_index_convention(self) -> None:
        subs = (control_atom(), collective_mode(4))
        # (atom level, mode level) -> atom + 3 * n
        self.assertEqual(composite_index(subs, [E, 2]), E + 3 * 2)
        self.assertEqual(composite_index(subs, [F, 0]), 0)

    def test_dicke_ladder_dimension(self) -> None:
        self.assertEqual(dicke_ladder(10).dim, 11)
        self.assertEqual(dicke_ladder(10).sample_size, 10)


class StateTests(unittest.TestCase):
    def test_tensor_product_matches_basis_state(self) -> None:
        atom = local_state(control_atom(), [0, 1, 0])
        mode = local_state(collective_mode(3), [0, 0, 1])
        joint = tensor_product([atom, mode])
        self.assertAlmostEqual(fidelity(joint, basis_state(joint.subsystems, [G, 2])), 1.0, places=14)

    def test_reduced_density_of_product_is_pure(self) -> None:
        a = _random_state((control_atom(),), 1)
        b = _random_state((collective_mode(3),), 2)
        rho = reduced_density(tensor_product([a, b]), [0])
        self.assertAlmostEqual(purity(rho), 1.0, places=12)
        self.assertTrue(np.allclose(rho, np.outer(a.amplitudes, a.amplitudes.conj())))

    def test_reduced_density_of_bell_pair_is_mixed(self) -> None:
        subs = (collective_mode(2), collective_mode(2))
        amps = (basis_state(subs, [0, 0]).amplitudes + basis_state(subs, [1, 1]).amplitudes) / np.sqrt(2)
        rho = reduced_density(StateVector(subs, amps), [1])
        self.assertAlmostEqual(purity(rho), 0.5, places=12)

    def test_project_then_insert_restores_product(self) -> None:
        atom = local_state(control_atom(), [0, 1, 0])
        rest = _random_state((collective_mode(3), collective_mode(2)), 3)
        joint = insert_subsystem(rest, 0, atom)
        back, weight = project_subsystem(joint, 0, atom.amplitudes)
        self.assertAlmostEqual(weight, 1.0, places=12)
        self.assertAlmostEqual(fidelity(back, rest), 1.0, places=12)

    def test_resize_reports_dropped_population(self) -> None:
        state = local_state(collective_mode(4), [0.6, 0, 0, 0.8])
        small, dropped = resize_subsystem(state, 0, collective_mode(2))
        self.assertAlmostEqual(dropped, 0.64, places=12)
        self.assertAlmostEqual(small.norm() ** 2, 0.36, places=12)

    def test_amplitudes_are_read_only(self) -> None:
        state = basis_state((control_atom(),), [G])
        with self.assertRaises(ValueError):
            state.amplitudes[0] = 1.0

    def test_wrong_length_rejected(self) -> None:
        with self.assertRaises(DimensionError):
            StateVector((control_atom(),), np.zeros(4))


class OperatorTests(unittest.TestCase):
    def test_non_hermitian_rejected(self) -> None:
        m = np.zeros((3, 3))
        m[0, 1] = 1.0
        with self.assertRaises(NonHermitianError):
            HermitianOperator((control_atom(),), m)

    def test_apply_local_matches_embedded_matrix(self) -> None:
        subs = (control_atom(), collective_mode(3), collective_mode(2))
        state = _random_state(subs, 4)
        rng = np.random.default_rng(5)
        local = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
        direct = apply_local(local, state, [1])
        embedded = embed_matrix(local, subs, 1) @ state.amplitudes
        self.assertTrue(np.allclose(direct.amplitudes, embedded))

    def test_apply_local_on_two_subsystems_follows_first_index_fastest(self) -> None:
        subs = (collective_mode(2), control_atom())
        state = basis_state(subs, [1, G])
        # swap-like matrix on (atom, mode) ordering: atom fastest
        u = np.eye(6)
        src, dst = G + 3 * 1, E + 3 * 0
        u[[src, dst]] = u[[dst, src]]
        out = apply_local(u, state, [1, 0])
        self.assertAlmostEqual(fidelity(out, basis_state(subs, [0, E])), 1.0, places=14)

    def test_is_unitary(self) -> None:
        self.assertTrue(is_unitary(np.eye(3)))
        self.assertFalse(is_unitary(2 * np.eye(3)))

    def _hermitian(self, rng: np.random.Generator, dim: int) -> np.ndarray:
        m = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
        return m + m.conj().T

    def test_embedding_is_multiplicative(self) -> None:
        rng = np.random.default_rng(21)
        subs = (collective_mode(2), control_atom(), collective_mode(2))
        for _ in range(5):
            a, b = self._hermitian(rng, 3), self._hermitian(rng, 3)
            product = embed_matrix(a, subs, 1) @ embed_matrix(b, subs, 1)
            self.assertTrue(np.allclose(product, embed_matrix(a @ b, subs, 1)))

    def test_embedding_preserves_spectrum(self) -> None:
        rng = np.random.default_rng(22)
        op = HermitianOperator((control_atom(),), self._hermitian(rng, 3))
        subs = (collective_mode(2), control_atom(), collective_mode(3))
        embedded = embed_operator(op, subs, 1)
        # each eigenvalue repeats once per state of the other subsystems
        expected = np.sort(np.repeat(np.linalg.eigvalsh(op.matrix), 6))
        self.assertTrue(np.allclose(np.sort(embedded.eigensystem[0]), expected))

    def test_embedding_rejects_wrong_dimension(self) -> None:
        op = HermitianOperator((control_atom(),), np.eye(3))
        with self.assertRaises(DimensionError):
            embed_operator(op, (collective_mode(2), collective_mode(4)), 1)


class MeasurementTests(unittest.TestCase):
    def test_fg_basis_on_plus_state(self) -> None:
        atom = local_state(control_atom(), np.array([1, 1, 0]) / np.sqrt(2))
        probs = outcome_probabilities(atom, fg_basis())
        self.assertAlmostEqual(probs["+"], 1.0, places=12)
        self.assertAlmostEqual(probs["-"], 0.0, places=12)
        self.assertAlmostEqual(probs["e"], 0.0, places=12)

    def test_ge_basis_probabilities(self) -> None:
        atom = local_state(control_atom(), [0, 1, 0])
        probs = outcome_probabilities(atom, ge_basis())
        self.assertAlmostEqual(probs["+"], 0.5, places=12)
        self.assertAlmostEqual(probs["-"], 0.5, places=12)

    def test_postselect_impossible_branch(self) -> None:
        atom = local_state(control_atom(), np.array([1, 1, 0]) / np.sqrt(2))
        with self.assertRaises(ImpossibleBranchError):
            measure(atom, fg_basis(), Postselect("-"))

    def test_basis_ket_is_eigenvector(self) -> None:
        basis = ge_basis()
        ket = basis.ket("+")
        expected = np.array([0, 1, 1j]) / np.sqrt(2)
        self.assertAlmostEqual(abs(np.vdot(expected, ket)) ** 2, 1.0, places=12)


def test_sampling_is_seeded_and_matches_born_rule() -> None:
    atom = local_state(control_atom(), [0, 1, 0])
    basis = ge_basis()
    first = [measure(atom, basis, Sample(seed)).label for seed in range(400)]
    again = [measure(atom, basis, Sample(seed)).label for seed in range(400)]
    assert first == again
    plus = first.count("+") / len(first)
    assert 0.4 < plus < 0.6
    assert "f" not in first


def test_fidelity_is_symmetric_and_ignores_global_phase() -> None:
    subs = (control_atom(), collective_mode(3))
    for seed in range(5):
        a, b = _random_state(subs, 30 + seed), _random_state(subs, 60 + seed)
        assert fidelity(a, b) == pytest.approx(fidelity(b, a), abs=1e-14)
        rotated = a.with_amplitudes(np.exp(1.234j) * a.amplitudes)
        assert fidelity(rotated, b) == pytest.approx(fidelity(a, b), abs=1e-12)
        assert fidelity(rotated, a) == pytest.approx(1.0, abs=1e-12)


def test_post_state_is_normalized() -> None:
    subs = (control_atom(), collective_mode(3))
    state = _random_state(subs, 11)
    out = measure(state, fg_basis(), Postselect("+"))
    assert out.post_state.norm() == pytest.approx(1.0, abs=1e-12)
    assert out.probability == pytest.approx(outcome_probabilities(state, fg_basis())["+"])


def test_snapshot_round_trip_is_exact(tmp_path: Path) -> None:
    subs = (control_atom(), collective_mode(3), dicke_ladder(2))
    state = _random_state(subs, 12)
    path = tmp_path / "state.json"
    write_snapshot(path, state)
    loaded = load_snapshot(path)
    assert loaded.subsystems == state.subsystems
    assert np.array_equal(loaded.amplitudes, state.amplitudes)
    assert dumps_snapshot(loaded) == path.read_text(encoding="utf-8")


def test_malformed_snapshot_rejected(tmp_path: Path) -> None:
    path = tmp_path / "bad.json"
    path.write_text('{"amplitudes": []}', encoding="utf-8")
    with pytest.raises(ValueError):
        load_snapshot(path)


if __name__ == "__main__":
    unittest.main()
