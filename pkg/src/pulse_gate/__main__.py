#!/usr/bin/env python3
"""
Pulse Gate のメインエントリーポイント

このモジュールは `python -m pulse_gate` コマンドで
実行されたときのエントリーポイントです。
"""
import sys

try:
    # インストールされたパッケージとして実行する場合
    from pulse_gate.cli import main
except ImportError:
    # 開発環境で直接実行する場合（相対インポート）
    from .cli import main

if __name__ == "__main__":
    sys.exit(main())
