"""
SFG pulse gate.

このモジュールは、ゲート行列、シグナルモードの射影、残余モード、
および幾何学的分解を提供します。
"""

try:
    # インストールされたパッケージとして実行する場合
    from pulse_gate.gate.gate_core import (
        GateConfig,
        GateMatrix,
        ProjectionResult,
        decompose_gate,
        gate_from_config,
        multimode_gate,
        normalize_projections,
        projections,
        residual_mode,
        residual_operator_vector,
        single_mode_gate,
    )
except ImportError:
    # 開発環境で直接実行する場合（相対インポート）
    from .gate_core import (
        GateConfig,
        GateMatrix,
        ProjectionResult,
        decompose_gate,
        gate_from_config,
        multimode_gate,
        normalize_projections,
        projections,
        residual_mode,
        residual_operator_vector,
        single_mode_gate,
    )

__all__ = [
    "GateConfig",
    "GateMatrix",
    "ProjectionResult",
    "decompose_gate",
    "gate_from_config",
    "multimode_gate",
    "normalize_projections",
    "projections",
    "residual_mode",
    "residual_operator_vector",
    "single_mode_gate",
]
