"""
Utility functions for the pulse_gate package.

このモジュールは、設定管理、ログ出力、例外、ファイル出力などの
ユーティリティ機能を提供します。
"""

try:
    # インストールされたパッケージとして実行する場合
    from pulse_gate.utils.config import config, get_config, set_config
    from pulse_gate.utils.exceptions import (
        ConfigError,
        DecompositionError,
        GridError,
        InvalidParameter,
        InvalidState,
        InvariantViolation,
        ModeIndexError,
        NormalizationError,
        PulseGateError,
        TruncationError,
        UnsupportedModeCount,
    )
    from pulse_gate.utils.file_utils import ensure_directory_exists
    from pulse_gate.utils.logging_utils import (
        configure_logging,
        log_error,
        log_info,
        log_warning,
    )
except ImportError:
    # 開発環境で直接実行する場合（相対インポート）
    from .config import config, get_config, set_config
    from .exceptions import (
        ConfigError,
        DecompositionError,
        GridError,
        InvalidParameter,
        InvalidState,
        InvariantViolation,
        ModeIndexError,
        NormalizationError,
        PulseGateError,
        TruncationError,
        UnsupportedModeCount,
    )
    from .file_utils import ensure_directory_exists
    from .logging_utils import configure_logging, log_error, log_info, log_warning

__all__ = [
    "config",
    "get_config",
    "set_config",
    "ensure_directory_exists",
    "configure_logging",
    "log_info",
    "log_warning",
    "log_error",
    "PulseGateError",
    "InvalidParameter",
    "GridError",
    "NormalizationError",
    "UnsupportedModeCount",
    "ModeIndexError",
    "InvalidState",
    "DecompositionError",
    "TruncationError",
    "ConfigError",
    "InvariantViolation",
]
