"""
シナリオ実行ツールに関するテストコード
"""
import dataclasses
import json
import os
import tempfile
import unittest
from pathlib import Path

import numpy as np
import pandas as pd
from scipy.integrate import trapezoid

from pulse_gate.tools.scenario_config import SCENARIOS, load_scenario_config
from pulse_gate.tools.scenario_tools import (
    SCENARIO_RUNNERS,
    run,
    select_cascade,
    sweep,
    validate_configs,
)
from pulse_gate.utils.exceptions import ConfigError, InvalidParameter, InvariantViolation
from pulse_gate.utils.file_utils import file_sha256

PRESET_DIR = Path(__file__).resolve().parents[1] / "config" / "presets"

SEED = {"G": 2.0, "lambdas": {"geometric": {"ratio": 0.5, "count": 4}}}
GRID = {"count": 512, "half_width": 8.0}


def gate_scenario(name, gate, **extra):
    data = {
        "schema_version": 1,
        "scenario": name,
        "seed": dict(SEED),
        "gate": gate,
        "grid": dict(GRID),
    }
    data.update(extra)
    return data


class ScenarioTestCase(unittest.TestCase):
    """一時ディレクトリに設定を書き出して実行するための基底クラス"""

    def setUp(self):
        self.temp_dir = tempfile.TemporaryDirectory()

    def tearDown(self):
        self.temp_dir.cleanup()

    def write_config(self, data, name="scenario.json"):
        path = os.path.join(self.temp_dir.name, name)
        with open(path, "w", encoding="utf-8") as f:
            json.dump(data, f)
        return path

    def out_dir(self, name="out"):
        return os.path.join(self.temp_dir.name, name)

    def run_scenario(self, data, **kwargs):
        path = self.write_config(data)
        return run(path, out_dir=kwargs.pop("out_dir", self.out_dir()), **kwargs)

    def file_names(self, result):
        return {entry["path"] for entry in result.files}


class TestRunners(unittest.TestCase):
    """ランナーの登録"""

    def test_every_scenario_has_a_runner(self):
        self.assertEqual(set(SCENARIO_RUNNERS), set(SCENARIOS))


class TestBlock(ScenarioTestCase):
    """block シナリオのテスト"""

    data = gate_scenario("block", {"theta_over_pi": 0.5, "matched_orders": [0]})

    def test_outputs(self):
        result = self.run_scenario(self.data)
        self.assertEqual(
            self.file_names(result),
            {
                "weights.csv",
                "matched_modes.csv",
                "observables.json",
                "conservation.json",
                "spectrum.csv",
                "README.txt",
            },
        )
        self.assertTrue(os.path.exists(os.path.join(result.out_dir, "manifest.json")))

        spectrum = load_scenario_config(self.write_config(self.data)).seed.spectrum()
        self.assertAlmostEqual(
            result.summary["sf_photons_out"] / spectrum.photon_numbers[0], 1.0, places=12
        )
        matched = pd.read_csv(os.path.join(result.out_dir, "matched_modes.csv"))
        self.assertLess(abs(matched["photons_out"][0]), 1e-9)
        self.assertLess(result.summary["max_conservation_residual"], 1e-9)

    def test_readme_and_manifest(self):
        result = self.run_scenario(self.data)
        with open(os.path.join(result.out_dir, "README.txt"), encoding="utf-8") as f:
            readme = f.read()
        self.assertIn("scenario: block", readme)
        self.assertIn("spectrum.csv", readme)
        with open(os.path.join(result.out_dir, "manifest.json"), encoding="utf-8") as f:
            manifest = json.load(f)
        for entry in manifest["files"]:
            digest = file_sha256(os.path.join(result.out_dir, entry["path"]))
            self.assertEqual(entry["sha256"], digest)

    def test_deterministic(self):
        """同じ設定からはバイト単位で同一の成果物"""
        path = self.write_config(self.data)
        first = run(path, out_dir=self.out_dir("first"))
        second = run(path, out_dir=self.out_dir("second"))
        names = sorted(os.listdir(first.out_dir))
        self.assertEqual(names, sorted(os.listdir(second.out_dir)))
        for name in names:
            with self.subTest(file=name):
                self.assertEqual(
                    Path(first.out_dir, name).read_bytes(),
                    Path(second.out_dir, name).read_bytes(),
                )

    def test_json_format(self):
        result = self.run_scenario(self.data, fmt="json")
        self.assertIn("weights.json", self.file_names(result))
        with open(os.path.join(result.out_dir, "weights.json"), encoding="utf-8") as f:
            records = json.load(f)
        self.assertEqual(len(records), 4)

    def test_command_mismatch(self):
        with self.assertRaises(ConfigError):
            self.run_scenario(self.data, command="swap")

    def test_vacuum_seed(self):
        """G = 0 では入出力とも真空"""
        data = gate_scenario("block", {"theta_over_pi": 0.5, "matched_orders": [0]})
        data["seed"]["G"] = 0.0
        result = self.run_scenario(data)
        self.assertEqual(result.summary["sf_photons_out"], 0.0)
        self.assertEqual(result.summary["spectrum"]["normalization"], "none")
        frame = pd.read_csv(os.path.join(result.out_dir, "spectrum.csv"))
        self.assertTrue(np.all(frame["density_out"] == 0.0))
        weights = pd.read_csv(os.path.join(result.out_dir, "weights.csv"))
        self.assertEqual(len(weights), 4)
        self.assertTrue(np.all(weights["weight_out"] == 0.0))

    def test_outputs_filter(self):
        """outputs で書き出す成果物を絞り込める"""
        data = dict(self.data, outputs=["spectrum"])
        result = self.run_scenario(data)
        self.assertEqual(self.file_names(result), {"spectrum.csv", "README.txt"})
        self.assertEqual(
            sorted(os.listdir(result.out_dir)), ["README.txt", "manifest.json", "spectrum.csv"]
        )
        self.assertIn("sf_photons_out", result.summary)

    def test_unknown_output(self):
        with self.assertRaises(ConfigError) as cm:
            self.run_scenario(dict(self.data, outputs=["weights", "histogram"]))
        self.assertEqual(cm.exception.path, "outputs[1]")


class TestSwapAndSpectrum(ScenarioTestCase):
    """swap と spectrum シナリオのテスト"""

    def test_swap_exchanges(self):
        data = gate_scenario("swap", {"theta_over_pi": 1.0, "matched_orders": [0, 1]})
        result = self.run_scenario(data)
        self.assertTrue(result.summary["exchanged"])
        weights = pd.read_csv(os.path.join(result.out_dir, "weights.csv"))
        self.assertAlmostEqual(
            weights["photons_out"][0] / weights["photons_in"][1], 1.0, places=9
        )
        spectrum = pd.read_csv(os.path.join(result.out_dir, "spectrum.csv"))
        self.assertIn("interference", spectrum.columns)

    def test_swap_not_exchanged_off_pi(self):
        data = gate_scenario("swap", {"theta_over_pi": 0.5, "matched_orders": [0, 1]})
        self.assertFalse(self.run_scenario(data).summary["exchanged"])

    def test_spectrum(self):
        data = gate_scenario(
            "spectrum",
            {"theta_over_pi": 0.5, "matched_orders": [0, 1], "phases": [0.0, np.pi / 2]},
        )
        result = self.run_scenario(data)
        self.assertEqual(self.file_names(result), {"spectrum.csv", "README.txt"})
        frame = pd.read_csv(os.path.join(result.out_dir, "spectrum.csv"))
        self.assertEqual(
            list(frame.columns),
            ["omega", "density_in", "density_out", "diagonal_out", "interference"],
        )
        self.assertEqual(len(frame), GRID["count"])
        # 入力密度は入力光子数で割ってあるので積分は 1
        step = frame["omega"][1] - frame["omega"][0]
        self.assertAlmostEqual(float(trapezoid(frame["density_in"], dx=step)), 1.0, places=6)


class TestSweeps(ScenarioTestCase):
    """角度・位相掃引のテスト"""

    def theta_config(self, count=5):
        data = gate_scenario(
            "theta-sweep",
            {"theta_over_pi": 0.5, "matched_orders": [0, 2]},
            sweep={"axis": "theta", "start": 0.0, "stop_over_pi": 1.0, "count": count},
        )
        return load_scenario_config(self.write_config(data))

    def test_theta_sweep_columns(self):
        frame = sweep(self.theta_config(), workers=1)
        self.assertEqual(len(frame), 5)
        for column in ("sf_photons", "photons_A0", "closed_form_A2", "relative_A0"):
            self.assertIn(column, frame.columns)
        self.assertEqual(frame["sf_photons"][0], 0.0)
        np.testing.assert_allclose(frame["photons_A0"], frame["closed_form_A0"], rtol=1e-9)
        np.testing.assert_allclose(frame["photons_A2"], frame["closed_form_A2"], rtol=1e-9)

    def test_worker_count_does_not_change_rows(self):
        config = self.theta_config()
        pd.testing.assert_frame_equal(sweep(config, workers=1), sweep(config, workers=3))

    def test_single_point(self):
        frame = sweep(self.theta_config(count=1), workers=2)
        self.assertEqual(len(frame), 1)
        self.assertEqual(frame["theta"][0], 0.0)

    def test_run_theta_sweep(self):
        data = gate_scenario(
            "theta-sweep",
            {"theta_over_pi": 0.5, "matched_orders": [0]},
            sweep={"axis": "theta", "start": 0.0, "stop_over_pi": 2.0, "count": 9},
        )
        result = self.run_scenario(data, workers=2)
        self.assertEqual(result.summary["points"], 9)
        frame = pd.read_csv(os.path.join(result.out_dir, "theta_sweep.csv"))
        self.assertNotIn("relative_A0", frame.columns)

    def test_run_phase_sweep(self):
        data = gate_scenario(
            "phase-sweep",
            {"theta_over_pi": 0.5, "matched_orders": [0, 1]},
            sweep={"axis": "phase", "start": 0.0, "stop_over_pi": 2.0, "count": 5},
        )
        result = self.run_scenario(data)
        self.assertEqual(
            self.file_names(result), {"phase_map.csv", "phase_peaks.csv", "README.txt"}
        )
        self.assertEqual(result.summary["phases"], 5)
        peaks = pd.read_csv(os.path.join(result.out_dir, "phase_peaks.csv"))
        self.assertEqual(len(peaks), 5)
        # 0 と pi の位相差で鏡像になる
        self.assertAlmostEqual(peaks["peak_omega"][0], -peaks["peak_omega"][2], places=9)

    def test_sweep_without_section(self):
        data = gate_scenario("block", {"theta_over_pi": 0.5, "matched_orders": [0]})
        with self.assertRaises(ConfigError):
            sweep(load_scenario_config(self.write_config(data)))


class TestTwin(ScenarioTestCase):
    """twin シナリオのテスト"""

    def twin_data(self, gate, **extra):
        data = gate_scenario("twin", gate, **extra)
        data["seed"]["kind"] = "twin"
        data["seed"]["G"] = 1.0
        return data

    def test_single_order_sweep(self):
        data = self.twin_data(
            {"theta_over_pi": 0.5, "matched_orders": [0]},
            sweep={"axis": "theta", "start": 0.0, "stop_over_pi": 1.0, "count": 3},
        )
        result = self.run_scenario(data)
        self.assertEqual(result.summary["points"], 3)
        frame = pd.read_csv(os.path.join(result.out_dir, "twin_correlations.csv"))
        np.testing.assert_allclose(
            frame["difference_variance"], frame["closed_form"], rtol=1e-9, atol=1e-12
        )
        self.assertAlmostEqual(frame["difference_variance"][0], 0.0, places=12)

    def test_pair_exchange(self):
        data = self.twin_data({"theta_over_pi": 1.0, "matched_orders": [0, 1]})
        result = self.run_scenario(data)
        self.assertTrue(result.summary["exchanged"])
        frame = pd.read_csv(os.path.join(result.out_dir, "twin_pairs.csv"))
        self.assertEqual(len(frame), 4)


class TestSelect(ScenarioTestCase):
    """select シナリオ（2段ゲートのモード選択）のテスト"""

    def setUp(self):
        super().setUp()
        self.config = load_scenario_config(str(PRESET_DIR / "select.json"))

    def test_cascade_reproduces_squeezed_vacuum(self):
        summary = select_cascade(self.config)
        spectrum = self.config.seed.spectrum()
        self.assertEqual(summary["selected_mode"], "A2")
        self.assertLess(summary["max_deviation"], 1e-9)
        self.assertAlmostEqual(summary["gain"], spectrum.gains[2], places=12)
        sf = summary["intermediate_sf"]
        self.assertAlmostEqual(sf["var_x"] * sf["var_p"], 0.25, places=9)
        remaining = float(np.sum(spectrum.photon_numbers)) - spectrum.photon_numbers[2]
        self.assertAlmostEqual(summary["remaining_seed_photons"] / remaining, 1.0, places=9)

    def test_requires_full_conversion(self):
        gate = dataclasses.replace(self.config.gate, theta=np.pi / 4)
        config = dataclasses.replace(self.config, gate=gate)
        with self.assertRaises(InvalidParameter):
            select_cascade(config)

    def test_run_select(self):
        path = self.write_config(json.loads((PRESET_DIR / "select.json").read_text("utf-8")))
        result = run(path, command="select", out_dir=self.out_dir())
        self.assertEqual(self.file_names(result), {"cascade.json", "README.txt"})
        self.assertEqual(result.summary["selected_mode"], "A2")


class TestJsaAndOracle(ScenarioTestCase):
    """jsa と oracle シナリオのテスト"""

    def test_jsa(self):
        data = {
            "schema_version": 1,
            "scenario": "jsa",
            "jsa": {
                "ratio": 3.0,
                "approximation": "gaussian",
                "count": 64,
                "ratios": [0.5, 5.0],
            },
        }
        result = self.run_scenario(data)
        self.assertEqual(
            self.file_names(result),
            {"jsa_intensity.csv", "jsa_schmidt.json", "purity_sweep.csv", "README.txt"},
        )
        self.assertGreater(result.summary["purity"], 0.0)
        self.assertLessEqual(result.summary["purity"], 1.0 + 1e-12)
        with open(os.path.join(result.out_dir, "jsa_schmidt.json"), encoding="utf-8") as f:
            schmidt = json.load(f)
        self.assertAlmostEqual(schmidt["ratio"], 3.0, places=9)
        self.assertEqual(len(schmidt["singular_values"]), 20)
        sweep_frame = pd.read_csv(os.path.join(result.out_dir, "purity_sweep.csv"))
        self.assertLess(sweep_frame["purity"][0], sweep_frame["purity"][1])

    def oracle_data(self, **overrides):
        oracle = {"kind": "single", "gains": [0.3], "thetas_over_pi": [0.0, 0.5], "cutoff": 20}
        oracle.update(overrides)
        return {"schema_version": 1, "scenario": "oracle", "oracle": oracle}

    def test_oracle_passes(self):
        result = self.run_scenario(self.oracle_data())
        self.assertTrue(result.summary["passed"])
        self.assertEqual(
            self.file_names(result),
            {"oracle_report.json", "oracle_table.csv", "oracle_table.txt", "README.txt"},
        )

    def test_oracle_failure_keeps_report(self):
        """比較に失敗しても報告を書き出してから例外を送出"""
        data = self.oracle_data(rel_tol=1e-300, abs_tol=1e-300)
        with self.assertRaises(InvariantViolation):
            self.run_scenario(data)
        self.assertTrue(os.path.exists(os.path.join(self.out_dir(), "oracle_report.json")))


class TestValidateConfigs(ScenarioTestCase):
    """validate_configs 関数のテスト"""

    def test_presets_and_broken_file(self):
        broken = self.write_config({"schema_version": 1, "scenario": "block"}, "broken.json")
        presets = [str(p) for p in sorted(PRESET_DIR.glob("*.json"))]
        results = validate_configs(presets + [broken])
        self.assertTrue(all(error is None for _, error in results[:-1]))
        path, error = results[-1]
        self.assertEqual(path, broken)
        self.assertIn("seed", error)


if __name__ == "__main__":
    unittest.main()
