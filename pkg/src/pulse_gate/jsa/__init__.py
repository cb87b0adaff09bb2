"""
Two-photon amplitude of the SFG process.

このモジュールは、SFG の二光子振幅（sinc 位相整合およびガウス近似）、
因子化条件、SVD によるシュミット分解を提供します。
"""

try:
    # インストールされたパッケージとして実行する場合
    from pulse_gate.jsa.two_photon import (
        DispersionParams,
        JsaDecomposition,
        JsaGrid,
        default_jsa_grids,
        factorization_ratio,
        pump_envelope,
        purity_sweep,
        schmidt_decompose_jsa,
        sum_frequency_mode,
        two_photon_amplitude,
    )
except ImportError:
    # 開発環境で直接実行する場合（相対インポート）
    from .two_photon import (
        DispersionParams,
        JsaDecomposition,
        JsaGrid,
        default_jsa_grids,
        factorization_ratio,
        pump_envelope,
        purity_sweep,
        schmidt_decompose_jsa,
        sum_frequency_mode,
        two_photon_amplitude,
    )

__all__ = [
    "DispersionParams",
    "JsaDecomposition",
    "JsaGrid",
    "default_jsa_grids",
    "factorization_ratio",
    "pump_envelope",
    "purity_sweep",
    "schmidt_decompose_jsa",
    "sum_frequency_mode",
    "two_photon_amplitude",
]
