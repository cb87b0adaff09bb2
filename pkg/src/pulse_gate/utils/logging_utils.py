"""
ログユーティリティ

パッケージ全体で共有するロガーと、log_info / log_warning / log_error の
ヘルパー関数を提供します。ハンドラの設定は CLI からのみ行います。
"""
import logging
import sys

LOGGER_NAME = "pulse_gate"

logger = logging.getLogger(LOGGER_NAME)


def configure_logging(verbose: bool = False) -> None:
    """
    CLI 実行時のログ出力を設定します

    Args:
        verbose: True の場合は DEBUG レベルまで出力
    """
    if not any(getattr(h, "_pulse_gate", False) for h in logger.handlers):
        handler = logging.StreamHandler(sys.stderr)
        handler.setFormatter(logging.Formatter("[%(levelname)s] %(message)s"))
        handler._pulse_gate = True
        logger.addHandler(handler)
    logger.setLevel(logging.DEBUG if verbose else logging.INFO)


def log_debug(message: str) -> None:
    """デバッグログを出力します"""
    logger.debug(message)


def log_info(message: str) -> None:
    """情報ログを出力します"""
    logger.info(message)


def log_warning(message: str) -> None:
    """警告ログを出力します"""
    logger.warning(message)


def log_error(message: str) -> None:
    """エラーログを出力します"""
    logger.error(message)
