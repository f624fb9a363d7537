# SPDX-License-Identifier: Apache-2.0

from __future__ import annotations

import math
import tempfile
import unittest
from pathlib import Path

import pytest

from ensemble_cluster.config import ConfigError, PhysicsConfig, lifetime, load_config, physical_params
from ensemble_cluster.dynamics.params import hz


class ConfigTests(unittest.TestCase):
    def test_load_config(self) -> None:
        content = """
[physics]
atoms = 50
coupling_hz = 25e3
dispersive_ratio = 30
drive_detuning_factor = 3
lifetime_s = 0.03

[run]
chain_length = 5
tier = "spin"
mode_truncation = 3
seed = 7
trace_intermediates = true
atom_release_bound = 0.005

[fusion]
node_a = 4
node_b = 0
postselect = "+,-"
workers = 3

[validate]
atoms = [5, 10]
ratios = [10, 20.5]
"""
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / "ensemble-cluster.toml"
            path.write_text(content, encoding="utf-8")
            cfg = load_config(str(path))

        self.assertIsNotNone(cfg)
        assert cfg is not None
        self.assertEqual(cfg.physics.atoms, 50)
        self.assertEqual(cfg.physics.dispersive_ratio, 30.0)
        self.assertEqual(cfg.run.chain_length, 5)
        self.assertEqual(cfg.run.tier, "spin")
        self.assertEqual(cfg.run.seed, 7)
        self.assertTrue(cfg.run.trace_intermediates)
        self.assertEqual(cfg.fusion.postselect, "+,-")
        self.assertEqual(cfg.run.atom_release_bound, 0.005)
        self.assertEqual(cfg.fusion.workers, 3)
        self.assertEqual(cfg.validate.atoms, [5, 10])
        self.assertEqual(cfg.validate.ratios, [10.0, 20.5])

        params = physical_params(cfg.physics)
        self.assertTrue(params.resonance_holds())
        self.assertAlmostEqual(params.dispersive_ratio, 30.0, places=9)
        self.assertAlmostEqual(params.delta_L / params.delta_c, 3.0, places=12)

    def test_no_path_returns_none(self) -> None:
        self.assertIsNone(load_config(None))

    def test_unknown_key_rejected(self) -> None:
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / "cfg.toml"
            path.write_text("[run]\nchain_lenght = 3\n", encoding="utf-8")
            with self.assertRaises(ConfigError) as ctx:
                load_config(str(path))
        self.assertIn("chain_lenght", str(ctx.exception))

    def test_unknown_section_rejected(self) -> None:
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / "cfg.toml"
            path.write_text("[plotting]\nshow = true\n", encoding="utf-8")
            with self.assertRaises(ConfigError):
                load_config(str(path))


def test_malformed_json_reports_position(tmp_path: Path) -> None:
    path = tmp_path / "cfg.json"
    path.write_text('{\n  "run": {"chain_length": 4,}\n}\n', encoding="utf-8")
    with pytest.raises(ConfigError) as exc:
        load_config(str(path))
    assert f"{path}:2:" in str(exc.value)


def test_json_config_is_accepted(tmp_path: Path) -> None:
    path = tmp_path / "cfg.json"
    path.write_text('{"run": {"chain_length": 3, "tier": "analytic"}}', encoding="utf-8")
    cfg = load_config(str(path))
    assert cfg is not None
    assert cfg.run.chain_length == 3


def test_wrong_types_rejected(tmp_path: Path) -> None:
    path = tmp_path / "cfg.toml"
    path.write_text('[run]\nchain_length = "four"\n', encoding="utf-8")
    with pytest.raises(ConfigError):
        load_config(str(path))
    path.write_text("[run]\nchain_length = true\n", encoding="utf-8")
    with pytest.raises(ConfigError):
        load_config(str(path))
    path.write_text("[validate]\natoms = []\n", encoding="utf-8")
    with pytest.raises(ConfigError):
        load_config(str(path))


def test_defaults_are_resonant() -> None:
    params = physical_params(None)
    assert params.atoms == 100
    assert params.resonance_holds()
    assert math.isclose(params.coupling, hz(25e3))
    assert math.isclose(params.dispersive_ratio, 20.0, rel_tol=1e-12)


def test_lab_frequencies_convert_to_detunings() -> None:
    cfg = PhysicsConfig(atoms=100, omega_c_hz=51.1e9 - 50e6, omega_L_hz=51.1e9 - 100e6)
    params = physical_params(cfg)
    assert math.isclose(params.delta_c, hz(50e6), rel_tol=1e-9)
    assert math.isclose(params.delta_L, hz(100e6), rel_tol=1e-9)
    assert params.resonance_holds()


def test_conflicting_keys_rejected() -> None:
    with pytest.raises(ConfigError):
        physical_params(PhysicsConfig(dispersive_ratio=20, cavity_detuning_hz=1e6))
    with pytest.raises(ConfigError):
        physical_params(PhysicsConfig(rabi_hz=1e5, auto_resonance=True))
    with pytest.raises(ConfigError):
        physical_params(PhysicsConfig(auto_resonance=False))
    with pytest.raises(ConfigError):
        physical_params(PhysicsConfig(atoms=0))


def test_lifetime_default_and_validation() -> None:
    assert lifetime(None) == pytest.approx(30e-3)
    assert lifetime(PhysicsConfig(lifetime_s=0.01)) == pytest.approx(0.01)
    with pytest.raises(ConfigError):
        lifetime(PhysicsConfig(lifetime_s=-1.0))


if __name__ == "__main__":
    unittest.main()
