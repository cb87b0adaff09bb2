"""
Pulse gate package for simulating SFG quantum pulse gates on squeezed light.

このパッケージは、多モードのスクイーズド光を種光とする和周波発生（SFG）
量子パルスゲートを二次モーメント表現でシミュレートします。
シュミットモードの構成、ゲート行列、光子数・分散・相関、スペクトル密度、
JSA の分解、および切り詰めたフォック空間による検証を提供します。

Example:
    >>> from pulse_gate import SchmidtSpectrum, squeezed_vacuum_state, multimode_gate, apply_gate
    >>> spectrum = SchmidtSpectrum.from_geometric(G=2.0, ratio=0.5, count=6)
    >>> state = squeezed_vacuum_state(spectrum)
    >>> out = apply_gate(state, multimode_gate(1.5707963, [1.0]), ["SF", "A0"])

    または、シナリオを実行:
    >>> from pulse_gate.app import run_app
    >>> run_app({"command": "run", "config": "config/presets/block.json"})
"""

__version__ = "0.1.0"

# バージョン情報
__author__ = "c8a"
__email__ = ""

try:
    # インストールされたパッケージとして実行する場合
    from pulse_gate.modes import SchmidtSpectrum, hermite_gauss_mode, schmidt_basis
    from pulse_gate.gate import GateConfig, multimode_gate, single_mode_gate
    from pulse_gate.moments import apply_gate, observables, squeezed_vacuum_state, twin_beam_state
    from pulse_gate.app import run_app
except ImportError:
    # 開発環境で直接実行する場合（相対インポート）
    from .modes import SchmidtSpectrum, hermite_gauss_mode, schmidt_basis
    from .gate import GateConfig, multimode_gate, single_mode_gate
    from .moments import apply_gate, observables, squeezed_vacuum_state, twin_beam_state
    from .app import run_app

__all__ = [
    "GateConfig",
    "SchmidtSpectrum",
    "apply_gate",
    "hermite_gauss_mode",
    "multimode_gate",
    "observables",
    "run_app",
    "schmidt_basis",
    "single_mode_gate",
    "squeezed_vacuum_state",
    "twin_beam_state",
]
