"""
Scenario tools for the pulse gate simulator.

このモジュールは、シナリオ設定ファイルの検証と、各シナリオの実行・
成果物（CSV/JSON、README.txt、manifest.json）の書き出しを提供します。
"""

try:
    # インストールされたパッケージとして実行する場合
    from pulse_gate.tools.scenario_config import (
        SCENARIOS,
        ScenarioConfig,
        load_scenario_config,
        parse_scenario_config,
    )
    from pulse_gate.tools.scenario_tools import (
        SCENARIO_RUNNERS,
        RunResult,
        run,
        select_cascade,
        sweep,
        validate_configs,
    )
except ImportError:
    # 開発環境で直接実行する場合（相対インポート）
    from .scenario_config import (
        SCENARIOS,
        ScenarioConfig,
        load_scenario_config,
        parse_scenario_config,
    )
    from .scenario_tools import (
        SCENARIO_RUNNERS,
        RunResult,
        run,
        select_cascade,
        sweep,
        validate_configs,
    )

__all__ = [
    "SCENARIOS",
    "SCENARIO_RUNNERS",
    "RunResult",
    "ScenarioConfig",
    "load_scenario_config",
    "parse_scenario_config",
    "run",
    "select_cascade",
    "sweep",
    "validate_configs",
]
