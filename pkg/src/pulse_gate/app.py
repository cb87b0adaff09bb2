#!/usr/bin/env python3
"""
Pulse Gate アプリケーションのメインロジック

このモジュールは CLI から渡された設定に従ってシナリオを実行し、
例外を終了コードに変換します。
"""
import json
from typing import Any, Dict

try:
    # インストールされたパッケージとして実行する場合
    from pulse_gate import __version__
    from pulse_gate.tools import run, validate_configs
    from pulse_gate.utils.exceptions import (
        ConfigError,
        InvalidParameter,
        InvariantViolation,
        PulseGateError,
    )
    from pulse_gate.utils.logging_utils import configure_logging, log_debug, log_error
except ImportError:
    # 開発環境で直接実行する場合（相対インポート）
    from . import __version__
    from .tools import run, validate_configs
    from .utils.exceptions import (
        ConfigError,
        InvalidParameter,
        InvariantViolation,
        PulseGateError,
    )
    from .utils.logging_utils import configure_logging, log_debug, log_error

# 終了コード
EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_INVALID_INPUT = 2
EXIT_INVARIANT = 3


def _validate(paths) -> int:
    results = validate_configs(paths)
    for path, error in results:
        print(f"{path}: {'OK' if error is None else error}")
    return EXIT_OK if all(error is None for _, error in results) else EXIT_INVALID_INPUT


def run_app(config: Dict[str, Any]) -> int:
    """
    Pulse Gate アプリケーションを実行します。

    Args:
        config: アプリケーション設定（command, config, out, format, workers などを含む）

    Returns:
        終了コード（0: 成功、1: 実行エラー、2: 設定・入力エラー、3: 不変量の違反）
    """
    configure_logging(bool(config.get("verbose", False)))
    command = config.get("command")
    log_debug(f"Pulse Gate v{__version__}: {command}")
    try:
        if command == "validate":
            return _validate(config.get("configs") or [])

        result = run(
            config["config"],
            command=None if command == "run" else command,
            out_dir=config.get("out"),
            fmt=config.get("format", "csv"),
            workers=config.get("workers"),
        )
        print(f"{result.scenario}: {result.out_dir}")
        print(json.dumps(result.summary, sort_keys=True, default=float))
        return EXIT_OK
    except (ConfigError, InvalidParameter) as e:
        log_error(f"入力エラー: {e}")
        return EXIT_INVALID_INPUT
    except InvariantViolation as e:
        log_error(f"不変量の検証に失敗しました: {e}")
        return EXIT_INVARIANT
    except (PulseGateError, OSError) as e:
        log_error(f"エラーが発生しました: {e}")
        return EXIT_FAILURE
    except KeyboardInterrupt:
        log_error("中断されました")
        return EXIT_FAILURE
