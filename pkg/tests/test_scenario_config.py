"""
シナリオ設定ファイルの読み込みと検証に関するテストコード
"""
import copy
import hashlib
import json
import os
import tempfile
import unittest
from pathlib import Path

import numpy as np

from pulse_gate.tools.scenario_config import (
    SCENARIOS,
    load_scenario_config,
    parse_scenario_config,
)
from pulse_gate.utils.exceptions import ConfigError
from pulse_gate.utils.file_utils import canonical_json

PRESET_DIR = Path(__file__).resolve().parents[1] / "config" / "presets"

BLOCK = {
    "schema_version": 1,
    "scenario": "block",
    "seed": {"G": 2.0, "lambdas": {"geometric": {"ratio": 0.5, "count": 4}}},
    "gate": {"theta_over_pi": 0.5, "matched_orders": [0]},
}


def scenario(**overrides):
    data = copy.deepcopy(BLOCK)
    data.update(overrides)
    return data


class TestPresets(unittest.TestCase):
    """同梱プリセットの検証"""

    def test_all_presets_valid(self):
        presets = sorted(PRESET_DIR.glob("*.json"))
        self.assertGreaterEqual(len(presets), 10)
        for path in presets:
            with self.subTest(preset=path.name):
                config = load_scenario_config(str(path))
                self.assertIn(config.scenario, SCENARIOS)

    def test_preset_names_match_scenarios(self):
        """プリセット名は実行するシナリオを表す"""
        expected = {
            "block.json": "block",
            "theta_sweep.json": "theta-sweep",
            "phase_sweep.json": "phase-sweep",
            "swap.json": "swap",
            "spectrum.json": "spectrum",
            "twin_single.json": "twin",
            "twin_swap.json": "twin",
            "select.json": "select",
            "jsa.json": "jsa",
            "oracle.json": "oracle",
        }
        self.assertEqual({path.name for path in PRESET_DIR.glob("*.json")}, set(expected))
        for name, scenario_name in expected.items():
            with self.subTest(preset=name):
                config = load_scenario_config(str(PRESET_DIR / name))
                self.assertEqual(config.scenario, scenario_name)
        block = load_scenario_config(str(PRESET_DIR / "block.json"))
        self.assertEqual(block.gate.matched_orders, (0,))
        swap = load_scenario_config(str(PRESET_DIR / "swap.json"))
        self.assertEqual(len(swap.gate.matched_orders), 2)
        self.assertAlmostEqual(swap.gate.theta, np.pi, places=12)

    def test_leading_gain(self):
        """leading_gain は先頭モードのスクイーズ量になる"""
        config = load_scenario_config(str(PRESET_DIR / "block.json"))
        spectrum = config.seed.spectrum()
        self.assertAlmostEqual(spectrum.gains[0], 4.39, places=12)
        self.assertEqual(spectrum.mode_count, 10)
        self.assertAlmostEqual(config.gate.theta, np.pi / 2, places=15)

    def test_sweep_values(self):
        config = load_scenario_config(str(PRESET_DIR / "theta_sweep.json"))
        values = config.sweep.values()
        self.assertEqual(values.size, 181)
        self.assertAlmostEqual(values[-1], 2 * np.pi, places=12)
        gate = config.gate.gate_config()
        np.testing.assert_allclose(np.abs(gate.projections) ** 2, [0.5, 0.5])


class TestParseScenarioConfig(unittest.TestCase):
    """parse_scenario_config 関数のテスト"""

    def assert_config_error(self, data, path, fragment=None):
        with self.assertRaises(ConfigError) as cm:
            parse_scenario_config(data)
        self.assertEqual(cm.exception.path, path)
        if fragment is not None:
            self.assertIn(fragment, cm.exception.message)
        return cm.exception

    def test_minimal_block(self):
        config = parse_scenario_config(scenario())
        self.assertEqual(config.scenario, "block")
        self.assertEqual(config.gate.matched_orders, (0,))
        self.assertEqual(config.grid.count, 2048)
        self.assertTrue(config.phase_convention)
        self.assertIsNone(config.workers)

    def test_unknown_keys(self):
        """未知のキーはフィールドパス付きで拒否"""
        data = scenario()
        data["seed"]["colour"] = "blue"
        self.assert_config_error(data, "seed.colour", "unknown key")
        self.assert_config_error(scenario(extra=1), "extra", "unknown key")
        data = scenario()
        data["seed"]["lambdas"]["geometric"]["step"] = 2
        self.assert_config_error(data, "seed.lambdas.geometric.step")

    def test_schema_version(self):
        self.assert_config_error(scenario(schema_version=2), "schema_version")
        data = scenario()
        del data["schema_version"]
        self.assert_config_error(data, "schema_version", "missing")

    def test_unknown_scenario(self):
        self.assert_config_error(scenario(scenario="teleport"), "scenario")

    def test_missing_section(self):
        self.assert_config_error(scenario(scenario="theta-sweep"), "sweep")

    def test_normalization_message(self):
        """規格化条件違反のメッセージ"""
        data = scenario()
        data["gate"] = {"theta": 1.0, "matched_orders": [0, 1], "magnitudes": [0.6, 0.6]}
        error = self.assert_config_error(data, "gate.magnitudes")
        self.assertIn("Σ|μn|² = 1", error.message)

    def test_magnitude_count(self):
        data = scenario()
        data["gate"] = {"theta": 1.0, "matched_orders": [0, 1], "phases": [0.0]}
        self.assert_config_error(data, "gate.phases")

    def test_angle_exclusive(self):
        data = scenario()
        data["gate"]["theta"] = 1.0
        self.assert_config_error(data, "gate", "only one")

    def test_order_exceeds_modes(self):
        data = scenario()
        data["gate"]["matched_orders"] = [4]
        self.assert_config_error(data, "gate.matched_orders", "exceeds")

    def test_duplicate_orders(self):
        data = scenario()
        data["gate"]["matched_orders"] = [1, 1]
        self.assert_config_error(data, "gate.matched_orders", "distinct")

    def test_lambda_values(self):
        data = scenario()
        data["seed"]["lambdas"] = {"values": [0.5, 0.3]}
        self.assert_config_error(data, "seed.lambdas.values", "sum to 1")
        data["seed"]["lambdas"] = {"values": [0.3, 0.7]}
        self.assert_config_error(data, "seed.lambdas.values", "non-increasing")
        data["seed"]["lambdas"] = {"values": [0.7, 0.3]}
        self.assertEqual(parse_scenario_config(data).seed.lambdas, (0.7, 0.3))

    def test_gain_exclusive(self):
        data = scenario()
        data["seed"]["leading_gain"] = 1.0
        self.assert_config_error(data, "seed", "only one")

    def test_type_errors(self):
        data = scenario()
        data["seed"]["G"] = "large"
        self.assert_config_error(data, "seed.G", "number")
        data = scenario()
        data["gate"]["matched_orders"] = [0, True]
        self.assert_config_error(data, "gate.matched_orders[1]")

    def test_select_needs_full_conversion(self):
        """select は完全変換（theta = (k + 1/2) pi）が必要"""
        data = scenario(scenario="select")
        data["gate"]["theta_over_pi"] = 0.25
        self.assert_config_error(data, "gate.theta", "full conversion")
        data["gate"]["theta_over_pi"] = 1.5
        self.assertEqual(parse_scenario_config(data).scenario, "select")

    def test_select_single_order(self):
        data = scenario(scenario="select")
        data["gate"]["matched_orders"] = [0, 1]
        self.assert_config_error(data, "gate.matched_orders")

    def test_gate2_only_for_select(self):
        data = scenario(gate2={"theta_over_pi": 0.5, "matched_orders": [0]})
        self.assert_config_error(data, "gate2")

    def test_twin_needs_twin_seed(self):
        self.assert_config_error(scenario(scenario="twin"), "seed.kind")
        data = scenario()
        data["seed"]["kind"] = "twin"
        self.assert_config_error(data, "seed.kind", "single-mode")

    def test_swap_needs_two_orders(self):
        self.assert_config_error(scenario(scenario="swap"), "gate.matched_orders")

    def test_sweep_axis(self):
        data = scenario(
            scenario="theta-sweep",
            sweep={"axis": "phase", "start": 0.0, "stop_over_pi": 1.0, "count": 3},
        )
        self.assert_config_error(data, "sweep.axis")

    def test_grid_too_narrow(self):
        """グリッドがモード関数を覆わない場合は計算前に拒否"""
        self.assert_config_error(scenario(grid={"count": 256, "half_width": 2.0}), "grid")

    def test_settings_defaults(self):
        config = parse_scenario_config(scenario(), {"grid_count": 1024})
        self.assertEqual(config.grid.count, 1024)
        config = parse_scenario_config(scenario(grid={"count": 4096}), {"grid_count": 1024})
        self.assertEqual(config.grid.count, 4096)

    def test_oracle_section(self):
        data = {
            "schema_version": 1,
            "scenario": "oracle",
            "oracle": {"kind": "single", "gains": [0.7], "thetas": [0.0]},
        }
        self.assert_config_error(data, "oracle.gains")
        data["oracle"]["gains"] = [0.3]
        config = parse_scenario_config(data)
        self.assertEqual(config.oracle.scenario().kind, "single")
        data["oracle"]["kind"] = "twin_swap"
        data["oracle"]["gains"] = [0.3, 0.2]
        data["oracle"]["thetas"] = [1.0]
        self.assert_config_error(data, "oracle", "k pi")

    def test_jsa_section(self):
        data = {
            "schema_version": 1,
            "scenario": "jsa",
            "jsa": {"ratio": 2.0, "approximation": "gaussian", "count": 64},
        }
        config = parse_scenario_config(data)
        self.assertAlmostEqual(config.jsa.dispersion().dispersion_width, 0.5, places=12)
        data["jsa"]["span"] = 3.0
        self.assert_config_error(data, "jsa.span")


class TestConfigHash(unittest.TestCase):
    """設定ハッシュのテスト"""

    def test_hash_is_canonical(self):
        config = parse_scenario_config(scenario())
        expected = hashlib.sha256(canonical_json(scenario()).encode("utf-8")).hexdigest()
        self.assertEqual(config.config_hash, expected)
        reordered = dict(reversed(list(scenario().items())))
        self.assertEqual(parse_scenario_config(reordered).config_hash, expected)

    def test_hash_changes(self):
        data = scenario()
        data["gate"]["theta_over_pi"] = 1.5
        self.assertNotEqual(
            parse_scenario_config(data).config_hash,
            parse_scenario_config(scenario()).config_hash,
        )


class TestLoadScenarioConfig(unittest.TestCase):
    """load_scenario_config 関数のテスト"""

    def setUp(self):
        self.temp_dir = tempfile.TemporaryDirectory()

    def tearDown(self):
        self.temp_dir.cleanup()

    def test_missing_file(self):
        with self.assertRaises(ConfigError):
            load_scenario_config(os.path.join(self.temp_dir.name, "missing.json"))

    def test_invalid_json(self):
        path = os.path.join(self.temp_dir.name, "broken.json")
        with open(path, "w", encoding="utf-8") as f:
            f.write("{not json")
        with self.assertRaises(ConfigError) as cm:
            load_scenario_config(path)
        self.assertIn("not valid JSON", str(cm.exception))

    def test_round_trip(self):
        path = os.path.join(self.temp_dir.name, "block.json")
        with open(path, "w", encoding="utf-8") as f:
            json.dump(scenario(), f)
        config = load_scenario_config(path)
        self.assertEqual(config.config_hash, parse_scenario_config(scenario()).config_hash)


if __name__ == "__main__":
    unittest.main()
