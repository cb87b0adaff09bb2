"""
Schmidt modes of the squeezed-vacuum seed.

このモジュールは、シード光のシュミットモード（エルミート・ガウス関数）、
シュミット係数、モードごとの光子数統計を提供します。
"""

try:
    # インストールされたパッケージとして実行する場合
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
except ImportError:
    # 開発環境で直接実行する場合（相対インポート）
    from .schmidt_modes import (
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

__all__ = [
    "FrequencyGrid",
    "ModeFunction",
    "SchmidtSpectrum",
    "default_grid",
    "geometric_schmidt_weights",
    "hermite_gauss_mode",
    "mode_photon_number",
    "mode_weight_fractions",
    "schmidt_basis",
    "schmidt_number",
]
