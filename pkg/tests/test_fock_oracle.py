"""
切り詰めフォック空間オラクルに関するテストコード
"""
import unittest

import numpy as np

from pulse_gate.oracle.fock_oracle import (
    FockSpace,
    FockState,
    OracleScenario,
    compare_with_gaussian,
    gate_unitary,
    measure,
    squeeze_state,
)
from pulse_gate.utils.exceptions import InvalidParameter, TruncationError


class TestFockSpace(unittest.TestCase):
    """FockSpace と FockState のテスト"""

    def test_dimension_and_index(self):
        space = FockSpace(2, 3)
        self.assertEqual(space.dimension, 16)
        self.assertEqual(space.index((1, 2)), 6)
        np.testing.assert_array_equal(space.occupations[6], [1.0, 2.0])

    def test_invalid_space(self):
        with self.assertRaises(InvalidParameter):
            FockSpace(5, 2)
        with self.assertRaises(InvalidParameter):
            FockSpace(1, 0)
        with self.assertRaises(TruncationError):
            FockSpace(4, 40)

    def test_annihilator(self):
        """a|n> = sqrt(n)|n-1>"""
        space = FockSpace(2, 4)
        state = FockState.basis_state(space, (0, 3))
        lowered = space.annihilator(1) @ state.amplitudes
        self.assertAlmostEqual(lowered[space.index((0, 2))], np.sqrt(3.0))
        with self.assertRaises(InvalidParameter):
            space.annihilator(2)

    def test_vacuum(self):
        space = FockSpace(3, 2)
        vacuum = FockState.vacuum(space)
        self.assertEqual(vacuum.norm(), 1.0)
        obs = measure(vacuum)
        np.testing.assert_allclose(obs.photon_numbers, 0.0, atol=1e-15)
        np.testing.assert_allclose(obs.quadrature_variances, 0.5, atol=1e-15)
        self.assertEqual(obs.labels, ("m0", "m1", "m2"))


class TestSqueezeState(unittest.TestCase):
    """squeeze_state 関数のテスト"""

    def test_single_mode(self):
        """単一モードスクイーズド真空の光子数と分散"""
        g = 0.5
        state = squeeze_state(FockSpace(1, 30), [g])
        obs = measure(state)
        self.assertAlmostEqual(obs.photon_numbers[0], np.sinh(g) ** 2, places=9)
        np.testing.assert_allclose(
            np.sort(obs.quadrature_variances[0]),
            [0.5 * np.exp(-2 * g), 0.5 * np.exp(2 * g)],
            rtol=1e-8,
        )
        self.assertAlmostEqual(state.parity_weight(1), 0.0, places=15)
        self.assertLess(state.leak, 1e-8)

    def test_twin_pair(self):
        """ツインビームは光子数差の分散がゼロ"""
        g = 0.4
        state = squeeze_state(FockSpace(2, 30), [g], "twin")
        obs = measure(state)
        np.testing.assert_allclose(obs.photon_numbers, np.sinh(g) ** 2, rtol=1e-9)
        cov = obs.number_covariance
        self.assertAlmostEqual(cov[0, 0] + cov[1, 1] - 2 * cov[0, 1], 0.0, places=10)

    def test_truncation_error(self):
        """カットオフが小さすぎる場合はエラー"""
        with self.assertRaises(TruncationError):
            squeeze_state(FockSpace(1, 4), [0.5])

    def test_invalid_arguments(self):
        space = FockSpace(2, 10)
        with self.assertRaises(InvalidParameter):
            squeeze_state(space, [-0.1])
        with self.assertRaises(InvalidParameter):
            squeeze_state(space, [0.1], "triple")
        with self.assertRaises(InvalidParameter):
            squeeze_state(space, [0.1, 0.1], modes=[0, 0])


class TestGateUnitary(unittest.TestCase):
    """gate_unitary 関数のテスト"""

    def test_unitary_on_small_space(self):
        """光子総数が切り詰めより小さい部分空間でユニタリ"""
        space = FockSpace(2, 6)
        gate = gate_unitary(space, 0.7, [1.0])
        state = FockState.basis_state(space, (0, 3))
        out = gate.apply(state)
        self.assertAlmostEqual(out.norm(), 1.0, places=12)

    def test_full_conversion(self):
        """theta = pi/2 で信号光子が SF モードへ移る"""
        space = FockSpace(2, 4)
        gate = gate_unitary(space, np.pi / 2, [1.0])
        out = gate.apply(FockState.basis_state(space, (0, 1)))
        self.assertAlmostEqual(abs(out.amplitudes[space.index((1, 0))]), 1.0, places=12)

    def test_gate_without_sf_requires_k_pi(self):
        space = FockSpace(2, 4)
        with self.assertRaises(InvalidParameter):
            gate_unitary(
                space, np.pi / 2, [2**-0.5, 2**-0.5], sf_mode=None, matched_modes=[0, 1]
            )

    def test_overlapping_modes(self):
        space = FockSpace(2, 4)
        with self.assertRaises(InvalidParameter):
            gate_unitary(space, 0.3, [1.0], sf_mode=0, matched_modes=[0])

    def test_dense_limit(self):
        space = FockSpace(3, 20)
        gate = gate_unitary(space, 0.3, [1.0, 0.0])
        with self.assertRaises(TruncationError):
            gate.matrix()


class TestOracleScenario(unittest.TestCase):
    """OracleScenario のバリデーション"""

    def test_invalid_scenarios(self):
        with self.assertRaises(InvalidParameter):
            OracleScenario("three_mode", (0.1,), (0.0,))
        with self.assertRaises(InvalidParameter):
            OracleScenario("single", (0.1, 0.2), (0.0,))
        with self.assertRaises(InvalidParameter):
            OracleScenario("single", (0.6,), (0.0,))
        with self.assertRaises(InvalidParameter):
            OracleScenario("single", (0.1,), ())
        with self.assertRaises(InvalidParameter):
            OracleScenario("single", (0.1,), (0.0,), projections=(1.0, 0.0))
        with self.assertRaises(InvalidParameter):
            OracleScenario("twin_swap", (0.1, 0.2), (np.pi / 2,))

    def test_default_projections(self):
        scenario = OracleScenario("two_mode", (0.1, 0.2), (0.0,))
        np.testing.assert_allclose(scenario.matched_projections(), [2**-0.5, 2**-0.5])


class TestCompareWithGaussian(unittest.TestCase):
    """フォック空間オラクルとガウスエンジンの一致"""

    thetas = (0.0, np.pi / 4, np.pi / 2, np.pi)

    def assert_agrees(self, scenario: OracleScenario):
        report = compare_with_gaussian(scenario, rel_tol=1e-6, abs_tol=1e-8)
        failed = [row for row in report.rows if not row["passed"]]
        self.assertEqual(failed, [])
        self.assertTrue(report.passed)
        return report

    def test_single(self):
        report = self.assert_agrees(OracleScenario("single", (0.5,), self.thetas, cutoff=30))
        frame = report.to_frame()
        self.assertEqual(set(frame["theta"]), set(self.thetas))
        self.assertEqual(report.to_dict()["kind"], "single")

    def test_two_mode(self):
        mu = (2**-0.5, 2**-0.5 * np.exp(0.7j))
        self.assert_agrees(
            OracleScenario("two_mode", (0.5, 0.3), self.thetas, projections=mu, cutoff=30)
        )

    def test_twin_single(self):
        self.assert_agrees(OracleScenario("twin_single", (0.5,), self.thetas))

    def test_twin_swap(self):
        self.assert_agrees(OracleScenario("twin_swap", (0.5, 0.3), (0.0, np.pi), cutoff=16))

    def test_report_flags_disagreement(self):
        """許容誤差ゼロでは不一致が検出される"""
        scenario = OracleScenario("single", (0.5,), (np.pi / 4,), cutoff=24)
        report = compare_with_gaussian(scenario, rel_tol=0.0, abs_tol=0.0)
        self.assertGreater(report.max_abs_deviation, 0.0)
        self.assertFalse(report.passed)


if __name__ == "__main__":
    unittest.main()
