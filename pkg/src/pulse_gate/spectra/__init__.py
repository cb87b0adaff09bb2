"""
Output spectra.

このモジュールは、出力スクイーズド光のスペクトル密度、干渉項、
位相掃引、およびシュミットモード重みの再分配表を提供します。
"""

try:
    # インストールされたパッケージとして実行する場合
    from pulse_gate.spectra.spectra import (
        PhaseMap,
        SpectralDensity,
        TwoModeScenario,
        diagonal_density,
        interference_term,
        phase_sweep,
        spectral_density,
        weight_redistribution,
    )
except ImportError:
    # 開発環境で直接実行する場合（相対インポート）
    from .spectra import (
        PhaseMap,
        SpectralDensity,
        TwoModeScenario,
        diagonal_density,
        interference_term,
        phase_sweep,
        spectral_density,
        weight_redistribution,
    )

__all__ = [
    "PhaseMap",
    "SpectralDensity",
    "TwoModeScenario",
    "diagonal_density",
    "interference_term",
    "phase_sweep",
    "spectral_density",
    "weight_redistribution",
]
