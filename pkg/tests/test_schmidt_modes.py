"""
シュミットモードとスペクトルに関するテストコード
"""
import unittest

import numpy as np

from pulse_gate.modes.schmidt_modes import (
    FrequencyGrid,
    ModeFunction,
    SchmidtSpectrum,
    default_grid,
    geometric_schmidt_weights,
    hermite_gauss_mode,
    mode_photon_number,
    mode_weight_fractions,
    schmidt_basis,
    schmidt_number,
)
from pulse_gate.utils.exceptions import GridError, InvalidParameter


class TestFrequencyGrid(unittest.TestCase):
    """FrequencyGrid クラスのテスト"""

    def test_symmetric_grid(self):
        """対称グリッドの端点と中心をテスト"""
        grid = FrequencyGrid.symmetric(8.0, 2049)
        self.assertAlmostEqual(grid.start, -8.0)
        self.assertAlmostEqual(grid.end, 8.0)
        self.assertAlmostEqual(grid.center, 0.0)
        self.assertAlmostEqual(grid.step, 16.0 / 2048)
        self.assertEqual(len(grid.points), 2049)

    def test_invalid_grid(self):
        """不正なグリッドはエラーになる"""
        with self.assertRaises(GridError):
            FrequencyGrid(start=0.0, count=1, step=0.1)
        with self.assertRaises(GridError):
            FrequencyGrid(start=0.0, count=10, step=0.0)
        with self.assertRaises(GridError):
            FrequencyGrid.symmetric(-1.0, 100)

    def test_same_as_and_covers(self):
        """グリッドの比較と範囲判定をテスト"""
        a = FrequencyGrid.symmetric(4.0, 101)
        b = FrequencyGrid.symmetric(4.0, 101)
        c = FrequencyGrid.symmetric(4.0, 201)
        self.assertTrue(a.same_as(b))
        self.assertFalse(a.same_as(c))
        self.assertTrue(a.covers(-4.0, 4.0))
        self.assertFalse(a.covers(-5.0, 0.0))


class TestHermiteGaussModes(unittest.TestCase):
    """エルミート・ガウスモードのテスト"""

    def setUp(self):
        self.grid = default_grid()

    def test_orthonormality(self):
        """先頭10モードの正規直交性をテスト"""
        modes = [hermite_gauss_mode(n, self.grid) for n in range(10)]
        gram = np.array([[a.overlap(b) for b in modes] for a in modes])
        self.assertLess(np.max(np.abs(gram - np.eye(10))), 1e-9)

    def test_phase_convention(self):
        """i^n の位相因子をテスト"""
        plain = hermite_gauss_mode(3, self.grid, phase_convention=False)
        phased = hermite_gauss_mode(3, self.grid)
        np.testing.assert_allclose(phased.values, -1j * plain.values)
        self.assertEqual(np.max(np.abs(plain.values.imag)), 0.0)

    def test_width_and_center(self):
        """幅と中心を変えてもノルムは1"""
        mode = hermite_gauss_mode(2, self.grid, center=0.25, width=1.2)
        self.assertAlmostEqual(mode.norm(), 1.0, places=9)

    def test_narrow_grid_rejected(self):
        """狭すぎるグリッドはGridErrorになる"""
        narrow = FrequencyGrid.symmetric(2.0, 512)
        with self.assertRaises(GridError):
            hermite_gauss_mode(10, narrow)

    def test_invalid_order(self):
        """負の次数と非正の幅はエラー"""
        with self.assertRaises(InvalidParameter):
            hermite_gauss_mode(-1, self.grid)
        with self.assertRaises(InvalidParameter):
            hermite_gauss_mode(0, self.grid, width=0.0)

    def test_interpolation_at_grid_points(self):
        """グリッド点での補間値は元の値と一致する"""
        mode = hermite_gauss_mode(1, self.grid)
        points = self.grid.points[100:110]
        np.testing.assert_allclose(mode.at(points), mode.values[100:110], atol=1e-12)
        self.assertEqual(mode.at(np.array([100.0]))[0], 0.0)

    def test_overlap_is_conjugate_linear(self):
        """overlap は第一引数について共役線形"""
        mode = hermite_gauss_mode(0, self.grid)
        shifted = mode.with_phase(1j)
        self.assertAlmostEqual(shifted.overlap(mode), -1j, places=9)
        self.assertAlmostEqual(mode.overlap(shifted), 1j, places=9)

    def test_normalized_zero_mode(self):
        """ゼロのモードは正規化できない"""
        zero = ModeFunction(self.grid, np.zeros(self.grid.count))
        with self.assertRaises(InvalidParameter):
            zero.normalized()


class TestSchmidtSpectrum(unittest.TestCase):
    """SchmidtSpectrum クラスのテスト"""

    def test_geometric_weights(self):
        """幾何分布の係数は降順で和が1"""
        weights = geometric_schmidt_weights(0.5, 10)
        self.assertAlmostEqual(sum(weights), 1.0, places=12)
        self.assertTrue(all(b < a for a, b in zip(weights, weights[1:])))
        self.assertAlmostEqual(weights[1] / weights[0], 0.5)
        self.assertEqual(geometric_schmidt_weights(0.0, 3), [1.0, 0.0, 0.0])

    def test_geometric_weights_invalid(self):
        """不正な比率・モード数はエラー"""
        with self.assertRaises(InvalidParameter):
            geometric_schmidt_weights(1.0, 5)
        with self.assertRaises(InvalidParameter):
            geometric_schmidt_weights(0.5, 0)

    def test_leading_gain(self):
        """先頭モードの利得 G√λ0 を指定できる"""
        spectrum = SchmidtSpectrum.with_leading_gain(4.39, geometric_schmidt_weights(0.5, 10))
        self.assertAlmostEqual(spectrum.gains[0], 4.39, places=12)
        self.assertAlmostEqual(spectrum.gains[1], 4.39 * np.sqrt(0.5), places=12)
        self.assertEqual(spectrum.mode_count, 10)

    def test_photon_numbers_and_weights(self):
        """光子数 sinh²(G√λn) と重みをテスト"""
        spectrum = SchmidtSpectrum.from_geometric(G=2.0, ratio=0.3, count=5)
        expected = np.sinh(2.0 * np.sqrt(spectrum.lambdas)) ** 2
        np.testing.assert_allclose(spectrum.photon_numbers, expected)
        self.assertAlmostEqual(sum(spectrum.weights), 1.0, places=12)
        self.assertAlmostEqual(
            mode_photon_number(2.0, spectrum.lambdas[0]), expected[0], places=9
        )

    def test_schmidt_number(self):
        """シュミット数 K = 1/Σλ² をテスト"""
        self.assertAlmostEqual(schmidt_number([1.0]), 1.0)
        self.assertAlmostEqual(schmidt_number([0.5, 0.5]), 2.0)
        spectrum = SchmidtSpectrum.from_geometric(G=1.0, ratio=0.5, count=60)
        self.assertAlmostEqual(spectrum.schmidt_number, 3.0, places=9)

    def test_invalid_spectrum(self):
        """和が1でない・増加する係数はエラー"""
        with self.assertRaises(InvalidParameter):
            SchmidtSpectrum(G=1.0, lambdas=(0.5, 0.4))
        with self.assertRaises(InvalidParameter):
            SchmidtSpectrum(G=1.0, lambdas=(0.4, 0.6))
        with self.assertRaises(InvalidParameter):
            SchmidtSpectrum(G=-1.0, lambdas=(1.0,))

    def test_weight_fractions_of_vacuum(self):
        """全モードが真空なら重みは定義されない"""
        with self.assertRaises(InvalidParameter):
            mode_weight_fractions([0.0, 0.0])

    def test_schmidt_basis(self):
        """基底はモード数ぶんのモード関数を返す"""
        spectrum = SchmidtSpectrum.from_geometric(G=1.0, ratio=0.5, count=4)
        basis = schmidt_basis(spectrum, default_grid())
        self.assertEqual(len(basis), 4)
        self.assertAlmostEqual(basis[3].norm(), 1.0, places=9)


if __name__ == "__main__":
    unittest.main()
