"""
Truncated Fock-space oracle.

このモジュールは、切り詰めたフォック空間上でゲートとスクイーズド状態を構成し、
ガウスモーメントエンジンの結果と照合する機能を提供します。
"""

try:
    # インストールされたパッケージとして実行する場合
    from pulse_gate.oracle.fock_oracle import (
        FockGate,
        FockSpace,
        FockState,
        OracleReport,
        OracleScenario,
        compare_with_gaussian,
        gate_unitary,
        measure,
        squeeze_state,
    )
except ImportError:
    # 開発環境で直接実行する場合（相対インポート）
    from .fock_oracle import (
        FockGate,
        FockSpace,
        FockState,
        OracleReport,
        OracleScenario,
        compare_with_gaussian,
        gate_unitary,
        measure,
        squeeze_state,
    )

__all__ = [
    "FockGate",
    "FockSpace",
    "FockState",
    "OracleReport",
    "OracleScenario",
    "compare_with_gaussian",
    "gate_unitary",
    "measure",
    "squeeze_state",
]
