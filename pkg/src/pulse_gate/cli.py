#!/usr/bin/env python3
"""
Pulse Gate CLI モジュール

このモジュールはコマンドラインからシナリオを実行・検証するためのインターフェースを提供します。
"""
import argparse
import sys
from typing import Any, Dict, List, Optional

try:
    # インストールされたパッケージとして実行する場合
    from pulse_gate import __version__
    from pulse_gate.app import run_app
except ImportError:
    # 開発環境で直接実行する場合（相対インポート）
    from . import __version__
    from .app import run_app

# サブコマンドと説明（シナリオ名と一致）
SCENARIO_COMMANDS = {
    "block": "1つのシュミットモードに整合したゲート",
    "swap": "2つのシュミットモード間の入れ替え",
    "spectrum": "入出力のスペクトル密度と干渉項",
    "phase-sweep": "射影の位相差に対するスペクトル掃引",
    "theta-sweep": "変換角に対する光子数の掃引",
    "twin": "ツインビームの光子数相関",
    "select": "2段ゲートによるモード選択",
    "jsa": "二光子振幅のシュミット分解",
    "oracle": "フォック空間オラクルとの照合",
}


def parse_args(args: Optional[List[str]] = None) -> Dict[str, Any]:
    """
    コマンドライン引数をパースします

    Args:
        args: コマンドライン引数（Noneの場合はsys.argvを使用）

    Returns:
        パースされた引数を含む辞書
    """
    parser = argparse.ArgumentParser(
        prog="pulse-gate",
        description="Pulse Gate - スクイーズド光のSFG量子パルスゲート・シミュレータ",
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )

    parser.add_argument(
        "--version",
        action="version",
        version=f"Pulse Gate v{__version__}",
    )

    parser.add_argument(
        "--verbose",
        action="store_true",
        help="デバッグログを出力します",
    )

    subparsers = parser.add_subparsers(dest="command", required=True)

    def add_run_options(sub: argparse.ArgumentParser) -> None:
        sub.add_argument("--config", required=True, help="シナリオ設定ファイル（JSON）")
        sub.add_argument("--out", default=None, help="出力ディレクトリ (デフォルト: <output_dir>/<設定名>)")
        sub.add_argument(
            "--format",
            default="csv",
            choices=["csv", "json"],
            help="表形式の出力フォーマット (デフォルト: csv)",
        )
        sub.add_argument("--workers", type=int, default=None, help="掃引のワーカー数")

    for name, help_text in SCENARIO_COMMANDS.items():
        add_run_options(subparsers.add_parser(name, help=help_text))
    add_run_options(subparsers.add_parser("run", help="設定ファイルのシナリオを実行"))

    validate = subparsers.add_parser("validate", help="設定ファイルを検証（計算なし）")
    validate.add_argument("configs", nargs="+", help="シナリオ設定ファイル")

    parsed_args = parser.parse_args(args)
    return vars(parsed_args)  # 名前空間オブジェクトを辞書に変換


def main(args: Optional[List[str]] = None) -> int:
    """
    メインエントリーポイント関数

    Args:
        args: コマンドライン引数（Noneの場合はsys.argvを使用）

    Returns:
        終了コード
    """
    config = parse_args(args)
    return run_app(config)


if __name__ == "__main__":
    sys.exit(main())
