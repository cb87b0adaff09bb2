"""
シナリオ設定ファイルの読み込みと検証

JSON 形式のシナリオ設定（schema_version 1）を読み込み、未知のキーや
各モジュールの前提条件違反を計算前にすべて検出します。エラーは
フィールドパス付きの ConfigError として報告されます。
"""
import hashlib
import json
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..gate.gate_core import NORMALIZATION_TOLERANCE, GateConfig
from ..jsa.two_photon import (
    APPROXIMATIONS,
    DEFAULT_JSA_COUNT,
    DEFAULT_JSA_SPAN,
    SINC_GAUSS_ALPHA,
    DispersionParams,
)
from ..modes.schmidt_modes import (
    DEFAULT_GRID_COUNT,
    DEFAULT_GRID_HALF_WIDTH,
    FrequencyGrid,
    SchmidtSpectrum,
    geometric_schmidt_weights,
    hermite_gauss_mode,
)
from ..oracle.fock_oracle import (
    DEFAULT_CUTOFF,
    LEAK_TOLERANCE,
    MAX_MODES,
    MAX_ORACLE_GAIN,
    SCENARIO_KINDS,
    OracleScenario,
)
from ..utils.exceptions import ConfigError, PulseGateError
from ..utils.file_utils import canonical_json

SCHEMA_VERSION = 1

SCENARIOS = (
    "block",
    "swap",
    "spectrum",
    "phase-sweep",
    "theta-sweep",
    "twin",
    "select",
    "jsa",
    "oracle",
)

# シナリオごとの必須セクション
REQUIRED_SECTIONS = {
    "block": ("seed", "gate"),
    "swap": ("seed", "gate"),
    "spectrum": ("seed", "gate"),
    "phase-sweep": ("seed", "gate", "sweep"),
    "theta-sweep": ("seed", "gate", "sweep"),
    "twin": ("seed", "gate"),
    "select": ("seed", "gate"),
    "jsa": ("jsa",),
    "oracle": ("oracle",),
}

# シナリオごとに書き出せる成果物（拡張子なし）
SCENARIO_ARTIFACTS = {
    "block": ("weights", "matched_modes", "observables", "conservation", "spectrum"),
    "swap": ("weights", "matched_modes", "observables", "conservation", "spectrum"),
    "spectrum": ("spectrum",),
    "phase-sweep": ("phase_map", "phase_peaks"),
    "theta-sweep": ("theta_sweep",),
    "twin": ("twin_correlations", "twin_pairs"),
    "select": ("cascade",),
    "jsa": ("jsa_intensity", "jsa_schmidt", "purity_sweep"),
    "oracle": ("oracle_report", "oracle_table"),
}


class _Reader:
    """Reads the keys of one JSON object and rejects the ones left over."""

    def __init__(self, data: Any, path: str):
        if not isinstance(data, dict):
            raise ConfigError(path, "expected an object")
        self.data = data
        self.path = path
        self.seen = set()

    def _child(self, key: str) -> str:
        return f"{self.path}.{key}" if self.path else key

    def has(self, key: str) -> bool:
        return key in self.data

    def raw(self, key: str, default: Any = None) -> Any:
        self.seen.add(key)
        return self.data.get(key, default)

    def number(
        self,
        key: str,
        default: Optional[float] = None,
        required: bool = False,
        minimum: Optional[float] = None,
        exclusive_minimum: Optional[float] = None,
    ) -> Optional[float]:
        self.seen.add(key)
        if key not in self.data:
            if required:
                raise ConfigError(self._child(key), "missing required key")
            return default
        value = self.data[key]
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(self._child(key), f"expected a number, got {value!r}")
        if not np.isfinite(value):
            raise ConfigError(self._child(key), "must be finite")
        if minimum is not None and value < minimum:
            raise ConfigError(self._child(key), f"must be >= {minimum}, got {value}")
        if exclusive_minimum is not None and value <= exclusive_minimum:
            raise ConfigError(self._child(key), f"must be > {exclusive_minimum}, got {value}")
        return float(value)

    def integer(
        self, key: str, default: Optional[int] = None, required: bool = False, minimum: int = 0
    ) -> Optional[int]:
        self.seen.add(key)
        if key not in self.data:
            if required:
                raise ConfigError(self._child(key), "missing required key")
            return default
        value = self.data[key]
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(self._child(key), f"expected an integer, got {value!r}")
        if value < minimum:
            raise ConfigError(self._child(key), f"must be >= {minimum}, got {value}")
        return int(value)

    def string(
        self,
        key: str,
        choices: Sequence[str],
        default: Optional[str] = None,
        required: bool = False,
    ) -> Optional[str]:
        self.seen.add(key)
        if key not in self.data:
            if required:
                raise ConfigError(self._child(key), "missing required key")
            return default
        value = self.data[key]
        if value not in choices:
            raise ConfigError(self._child(key), f"expected one of {list(choices)}, got {value!r}")
        return value

    def boolean(self, key: str, default: Optional[bool] = None) -> Optional[bool]:
        self.seen.add(key)
        if key not in self.data:
            return default
        value = self.data[key]
        if not isinstance(value, bool):
            raise ConfigError(self._child(key), f"expected true or false, got {value!r}")
        return value

    def numbers(
        self, key: str, default: Optional[List[float]] = None, required: bool = False
    ) -> Optional[List[float]]:
        self.seen.add(key)
        if key not in self.data:
            if required:
                raise ConfigError(self._child(key), "missing required key")
            return default
        value = self.data[key]
        if not isinstance(value, list) or not value:
            raise ConfigError(self._child(key), "expected a non-empty list of numbers")
        for k, item in enumerate(value):
            if isinstance(item, bool) or not isinstance(item, (int, float)) or not np.isfinite(item):
                raise ConfigError(f"{self._child(key)}[{k}]", f"expected a number, got {item!r}")
        return [float(v) for v in value]

    def integers(self, key: str, required: bool = False) -> Optional[List[int]]:
        self.seen.add(key)
        if key not in self.data:
            if required:
                raise ConfigError(self._child(key), "missing required key")
            return None
        value = self.data[key]
        if not isinstance(value, list) or not value:
            raise ConfigError(self._child(key), "expected a non-empty list of integers")
        for k, item in enumerate(value):
            if isinstance(item, bool) or not isinstance(item, int) or item < 0:
                raise ConfigError(
                    f"{self._child(key)}[{k}]", f"expected a non-negative integer, got {item!r}"
                )
        return [int(v) for v in value]

    def section(self, key: str) -> Optional["_Reader"]:
        self.seen.add(key)
        if key not in self.data:
            return None
        return _Reader(self.data[key], self._child(key))

    def exclusive(self, *keys: str, required: bool = True) -> Optional[str]:
        present = [k for k in keys if k in self.data]
        if len(present) > 1:
            raise ConfigError(self.path, f"give only one of {list(keys)}")
        if not present:
            if required:
                raise ConfigError(self.path, f"one of {list(keys)} is required")
            return None
        return present[0]

    def finish(self) -> None:
        for key in self.data:
            if key not in self.seen:
                raise ConfigError(self._child(key), "unknown key")


@dataclass(frozen=True)
class SeedConfig:
    kind: str
    G: float
    lambdas: Tuple[float, ...]
    mode_width: float = 1.0

    def spectrum(self) -> SchmidtSpectrum:
        return SchmidtSpectrum(G=self.G, lambdas=self.lambdas, mode_width=self.mode_width)


@dataclass(frozen=True)
class GateSection:
    theta: float
    matched_orders: Tuple[int, ...]
    magnitudes: Tuple[float, ...]
    phases: Tuple[float, ...]

    def gate_config(self) -> GateConfig:
        return GateConfig.from_polar(
            self.theta, self.magnitudes, self.phases, self.matched_orders
        ).normalized()


@dataclass(frozen=True)
class SweepConfig:
    axis: str
    start: float
    stop: float
    count: int

    def values(self) -> np.ndarray:
        if self.count == 1:
            return np.array([self.start])
        return np.linspace(self.start, self.stop, self.count)


@dataclass(frozen=True)
class GridConfig:
    count: int = DEFAULT_GRID_COUNT
    half_width: float = DEFAULT_GRID_HALF_WIDTH

    def grid(self) -> FrequencyGrid:
        return FrequencyGrid.symmetric(self.half_width, self.count)


@dataclass(frozen=True)
class JsaConfig:
    pump_width: float
    group_delay_mismatch: float
    approximation: str
    count: int
    span: float
    alpha: float
    ratios: Tuple[float, ...] = ()

    def dispersion(self) -> DispersionParams:
        return DispersionParams(
            group_delay_mismatch=self.group_delay_mismatch,
            pump_width=self.pump_width,
            alpha=self.alpha,
        )


@dataclass(frozen=True)
class OracleConfig:
    kind: str
    gains: Tuple[float, ...]
    thetas: Tuple[float, ...]
    projections: Tuple[complex, ...] = ()
    cutoff: int = DEFAULT_CUTOFF
    rel_tol: float = 1e-6
    abs_tol: float = 1e-8
    leak_tolerance: float = LEAK_TOLERANCE

    def scenario(self) -> OracleScenario:
        return OracleScenario(
            kind=self.kind,
            gains=self.gains,
            thetas=self.thetas,
            projections=self.projections,
            cutoff=self.cutoff,
            leak_tolerance=self.leak_tolerance,
        )


@dataclass(frozen=True)
class ScenarioConfig:
    """Validated scenario; ``raw`` keeps the parsed JSON for hashing."""

    scenario: str
    seed: Optional[SeedConfig] = None
    gate: Optional[GateSection] = None
    gate2: Optional[GateSection] = None
    sweep: Optional[SweepConfig] = None
    grid: GridConfig = field(default_factory=GridConfig)
    jsa: Optional[JsaConfig] = None
    oracle: Optional[OracleConfig] = None
    outputs: Tuple[str, ...] = ()
    workers: Optional[int] = None
    phase_convention: bool = True
    raw: Dict[str, Any] = field(default_factory=dict, compare=False, repr=False)

    @property
    def config_hash(self) -> str:
        return hashlib.sha256(canonical_json(self.raw).encode("utf-8")).hexdigest()


def _angle(reader: _Reader, key: str, required: bool = True) -> Optional[float]:
    over_pi = f"{key}_over_pi"
    chosen = reader.exclusive(key, over_pi, required=required)
    if chosen is None:
        return None
    if chosen == key:
        return reader.number(key, required=True)
    return reader.number(over_pi, required=True) * np.pi


def _parse_seed(reader: _Reader) -> SeedConfig:
    kind = reader.string("kind", ("single", "twin"), default="single")
    mode_width = reader.number("mode_width", default=1.0, exclusive_minimum=0.0)

    lambdas_reader = reader.section("lambdas")
    if lambdas_reader is None:
        raise ConfigError(reader._child("lambdas"), "missing required key")
    chosen = lambdas_reader.exclusive("geometric", "values")
    if chosen == "geometric":
        geometric = lambdas_reader.section("geometric")
        ratio = geometric.number("ratio", required=True, minimum=0.0)
        if ratio >= 1.0:
            raise ConfigError(geometric._child("ratio"), f"must lie in [0, 1), got {ratio}")
        count = geometric.integer("count", required=True, minimum=1)
        geometric.finish()
        lambdas = tuple(geometric_schmidt_weights(ratio, count))
    else:
        values = lambdas_reader.numbers("values", required=True)
        path = lambdas_reader._child("values")
        if any(v < 0 for v in values):
            raise ConfigError(path, "Schmidt coefficients must be non-negative")
        if abs(sum(values) - 1.0) > 1e-9:
            raise ConfigError(path, f"Schmidt coefficients must sum to 1, got {sum(values):.12f}")
        if any(b > a for a, b in zip(values, values[1:])):
            raise ConfigError(path, "Schmidt coefficients must be non-increasing")
        lambdas = tuple(values)
    lambdas_reader.finish()

    chosen = reader.exclusive("G", "leading_gain")
    if chosen == "G":
        G = reader.number("G", required=True, minimum=0.0)
    else:
        leading = reader.number("leading_gain", required=True, minimum=0.0)
        if lambdas[0] <= 0:
            raise ConfigError(reader._child("leading_gain"), "leading Schmidt coefficient is zero")
        G = leading / np.sqrt(lambdas[0])
    reader.finish()
    return SeedConfig(kind=kind, G=float(G), lambdas=lambdas, mode_width=mode_width)


def _parse_gate(reader: _Reader, mode_count: Optional[int]) -> GateSection:
    theta = _angle(reader, "theta")
    orders = reader.integers("matched_orders", required=True)
    if len(set(orders)) != len(orders):
        raise ConfigError(reader._child("matched_orders"), "matched orders must be distinct")
    if mode_count is not None and max(orders) >= mode_count:
        raise ConfigError(
            reader._child("matched_orders"),
            f"order {max(orders)} exceeds the {mode_count} Schmidt modes of the seed",
        )
    default_magnitudes = [1.0 / np.sqrt(len(orders))] * len(orders)
    magnitudes = reader.numbers("magnitudes", default=default_magnitudes)
    phases = reader.numbers("phases", default=[0.0] * len(orders))
    for key, values in (("magnitudes", magnitudes), ("phases", phases)):
        if len(values) != len(orders):
            raise ConfigError(
                reader._child(key), f"expected {len(orders)} values, one per matched order"
            )
    if any(m < 0 for m in magnitudes):
        raise ConfigError(reader._child("magnitudes"), "magnitudes must be non-negative")
    total = sum(m**2 for m in magnitudes)
    if abs(total - 1.0) > NORMALIZATION_TOLERANCE:
        raise ConfigError(
            reader._child("magnitudes"),
            f"the normalization condition Σ|μn|² = 1 is violated: Σ|μn|² = {total:.9f}",
        )
    reader.finish()
    return GateSection(
        theta=float(theta),
        matched_orders=tuple(orders),
        magnitudes=tuple(magnitudes),
        phases=tuple(phases),
    )


def _parse_sweep(reader: _Reader) -> SweepConfig:
    axis = reader.string("axis", ("theta", "phase"), required=True)
    start = _angle(reader, "start")
    stop = _angle(reader, "stop")
    count = reader.integer("count", required=True, minimum=1)
    reader.finish()
    return SweepConfig(axis=axis, start=float(start), stop=float(stop), count=count)


def _parse_grid(reader: _Reader, settings: Dict[str, Any]) -> GridConfig:
    count = reader.integer("count", default=int(settings.get("grid_count", DEFAULT_GRID_COUNT)), minimum=2)
    half_width = reader.number(
        "half_width",
        default=float(settings.get("grid_half_width", DEFAULT_GRID_HALF_WIDTH)),
        exclusive_minimum=0.0,
    )
    reader.finish()
    return GridConfig(count=count, half_width=half_width)


def _parse_jsa(reader: _Reader, settings: Dict[str, Any]) -> JsaConfig:
    pump_width = reader.number("pump_width", default=1.0, exclusive_minimum=0.0)
    alpha = reader.number(
        "alpha", default=float(settings.get("sinc_gauss_alpha", SINC_GAUSS_ALPHA)), exclusive_minimum=0.0
    )
    chosen = reader.exclusive("ratio", "group_delay_mismatch")
    if chosen == "ratio":
        ratio = reader.number("ratio", required=True, exclusive_minimum=0.0)
        delay = DispersionParams.from_ratio(ratio, pump_width, alpha).group_delay_mismatch
    else:
        delay = reader.number("group_delay_mismatch", required=True, exclusive_minimum=0.0)
    approximation = reader.string("approximation", APPROXIMATIONS, default="sinc")
    count = reader.integer(
        "count", default=int(settings.get("jsa_grid_count", DEFAULT_JSA_COUNT)), minimum=16
    )
    span = reader.number("span", default=float(settings.get("jsa_span", DEFAULT_JSA_SPAN)))
    if span < DEFAULT_JSA_SPAN:
        raise ConfigError(reader._child("span"), f"must be >= {DEFAULT_JSA_SPAN} widths")
    ratios = reader.numbers("ratios", default=[])
    if any(r <= 0 for r in ratios):
        raise ConfigError(reader._child("ratios"), "ratios must be positive")
    reader.finish()
    return JsaConfig(
        pump_width=pump_width,
        group_delay_mismatch=delay,
        approximation=approximation,
        count=count,
        span=span,
        alpha=alpha,
        ratios=tuple(ratios),
    )


def _parse_oracle(reader: _Reader, settings: Dict[str, Any]) -> OracleConfig:
    kind = reader.string("kind", SCENARIO_KINDS, required=True)
    gains = reader.numbers("gains", required=True)
    if any(not 0.0 <= g <= MAX_ORACLE_GAIN for g in gains):
        raise ConfigError(reader._child("gains"), f"oracle gains must lie in [0, {MAX_ORACLE_GAIN}]")
    chosen = reader.exclusive("thetas", "thetas_over_pi")
    thetas = reader.numbers(chosen, required=True)
    if chosen == "thetas_over_pi":
        thetas = [t * np.pi for t in thetas]
    magnitudes = reader.numbers("magnitudes", default=[])
    phases = reader.numbers("phases", default=[0.0] * len(magnitudes))
    if len(phases) != len(magnitudes):
        raise ConfigError(reader._child("phases"), "expected one phase per magnitude")
    projections = tuple(m * np.exp(1j * p) for m, p in zip(magnitudes, phases))
    if projections and abs(sum(m**2 for m in magnitudes) - 1.0) > NORMALIZATION_TOLERANCE:
        raise ConfigError(
            reader._child("magnitudes"), "the normalization condition Σ|μn|² = 1 is violated"
        )
    cutoff = reader.integer(
        "cutoff", default=int(settings.get("fock_cutoff", DEFAULT_CUTOFF)), minimum=1
    )
    leak_tolerance = reader.number(
        "leak_tolerance",
        default=float(settings.get("fock_leak_tolerance", LEAK_TOLERANCE)),
        exclusive_minimum=0.0,
    )
    rel_tol = reader.number("rel_tol", default=1e-6, exclusive_minimum=0.0)
    abs_tol = reader.number("abs_tol", default=1e-8, exclusive_minimum=0.0)
    modes = {"single": 2, "two_mode": 3, "twin_single": 3, "twin_swap": 4}[kind]
    if modes > MAX_MODES:
        raise ConfigError(reader._child("kind"), f"oracle supports at most {MAX_MODES} modes")
    reader.finish()

    result = OracleConfig(
        kind=kind,
        gains=tuple(gains),
        thetas=tuple(thetas),
        projections=projections,
        cutoff=cutoff,
        rel_tol=rel_tol,
        abs_tol=abs_tol,
        leak_tolerance=leak_tolerance,
    )
    try:
        result.scenario()
    except PulseGateError as e:
        raise ConfigError(reader.path, str(e))
    return result


def _full_conversion(theta: float) -> bool:
    turns = theta / np.pi - 0.5
    return abs(turns - round(turns)) < 1e-9


def _check_scenario(config: ScenarioConfig) -> None:
    """Scenario-specific preconditions on the parsed sections."""
    name = config.scenario
    gate = config.gate
    if name in ("swap", "phase-sweep") and len(gate.matched_orders) != 2:
        raise ConfigError("gate.matched_orders", f"{name} needs exactly two matched orders")
    if name in ("phase-sweep", "theta-sweep"):
        axis = "phase" if name == "phase-sweep" else "theta"
        if config.sweep.axis != axis:
            raise ConfigError("sweep.axis", f"{name} sweeps along {axis!r}")
    if name == "theta-sweep" and len(gate.matched_orders) > 2:
        raise ConfigError("gate.matched_orders", "theta-sweep supports one or two matched orders")
    if name == "twin":
        if config.seed.kind != "twin":
            raise ConfigError("seed.kind", "twin needs a twin seed")
        if len(gate.matched_orders) > 2:
            raise ConfigError("gate.matched_orders", "twin supports one or two matched orders")
        if config.sweep is not None and config.sweep.axis != "theta":
            raise ConfigError("sweep.axis", "twin sweeps along 'theta'")
    elif config.seed is not None and config.seed.kind != "single":
        raise ConfigError("seed.kind", f"{name} needs a single-mode squeezed seed")
    if name == "select":
        if len(gate.matched_orders) != 1:
            raise ConfigError("gate.matched_orders", "select matches exactly one Schmidt order")
        for path, section in (("gate", gate), ("gate2", config.gate2)):
            if section is not None and not _full_conversion(section.theta):
                raise ConfigError(
                    f"{path}.theta",
                    "select needs full conversion, theta = (k + 1/2) pi",
                )
        if config.gate2 is not None and len(config.gate2.matched_orders) != 1:
            raise ConfigError("gate2.matched_orders", "the second gate has one signal mode")
    if name in ("block", "swap", "spectrum", "phase-sweep"):
        # モード関数がグリッドに収まるかを計算前に確認
        try:
            hermite_gauss_mode(
                config.seed.spectrum().mode_count - 1,
                config.grid.grid(),
                width=config.seed.mode_width,
            )
        except PulseGateError as e:
            raise ConfigError("grid", str(e))


def parse_scenario_config(
    data: Dict[str, Any], settings: Optional[Dict[str, Any]] = None
) -> ScenarioConfig:
    """
    Validate a parsed JSON scenario.

    Args:
        data: Parsed JSON object
        settings: User settings supplying defaults (grid, cutoff, ...)

    Returns:
        ScenarioConfig

    Raises:
        ConfigError: with the path of the offending field
    """
    settings = settings or {}
    root = _Reader(data, "")
    version = root.integer("schema_version", required=True, minimum=0)
    if version != SCHEMA_VERSION:
        raise ConfigError("schema_version", f"unsupported schema version {version}")
    scenario = root.string("scenario", SCENARIOS, required=True)
    for section in REQUIRED_SECTIONS[scenario]:
        if not root.has(section):
            raise ConfigError(section, f"required by scenario {scenario!r}")

    seed_reader = root.section("seed")
    seed = _parse_seed(seed_reader) if seed_reader is not None else None
    mode_count = len(seed.lambdas) if seed is not None else None

    gate_reader = root.section("gate")
    gate = _parse_gate(gate_reader, mode_count) if gate_reader is not None else None
    gate2_reader = root.section("gate2")
    gate2 = None
    if gate2_reader is not None:
        if scenario != "select":
            raise ConfigError("gate2", "only the select scenario uses a second gate")
        gate2 = _parse_gate(gate2_reader, None)

    sweep_reader = root.section("sweep")
    sweep = _parse_sweep(sweep_reader) if sweep_reader is not None else None
    grid_reader = root.section("grid")
    grid = _parse_grid(grid_reader if grid_reader is not None else _Reader({}, "grid"), settings)
    jsa_reader = root.section("jsa")
    jsa = _parse_jsa(jsa_reader, settings) if jsa_reader is not None else None
    oracle_reader = root.section("oracle")
    oracle = _parse_oracle(oracle_reader, settings) if oracle_reader is not None else None

    outputs = root.raw("outputs", [])
    if not isinstance(outputs, list) or not all(isinstance(v, str) for v in outputs):
        raise ConfigError("outputs", "expected a list of artifact names")
    known = SCENARIO_ARTIFACTS[scenario]
    for k, name in enumerate(outputs):
        if name not in known:
            raise ConfigError(
                f"outputs[{k}]", f"unknown artifact {name!r}, {scenario} writes {list(known)}"
            )
    workers = root.integer("workers", default=None, minimum=1)
    phase_convention = root.boolean(
        "phase_convention", default=bool(settings.get("phase_convention", True))
    )
    root.finish()

    config = ScenarioConfig(
        scenario=scenario,
        seed=seed,
        gate=gate,
        gate2=gate2,
        sweep=sweep,
        grid=grid,
        jsa=jsa,
        oracle=oracle,
        outputs=tuple(outputs),
        workers=workers,
        phase_convention=phase_convention,
        raw=data,
    )
    try:
        if seed is not None:
            seed.spectrum()
        if gate is not None:
            gate.gate_config()
        if gate2 is not None:
            gate2.gate_config()
        if jsa is not None:
            jsa.dispersion()
    except ConfigError:
        raise
    except PulseGateError as e:
        raise ConfigError("", str(e))
    _check_scenario(config)
    return config


def load_scenario_config(
    path: str, settings: Optional[Dict[str, Any]] = None
) -> ScenarioConfig:
    """
    Read and validate a scenario config file.

    Raises:
        ConfigError: the file is unreadable, not JSON or invalid
    """
    try:
        with open(path, "r", encoding="utf-8") as f:
            data = json.load(f)
    except OSError as e:
        raise ConfigError("", f"cannot read {path}: {e}")
    except json.JSONDecodeError as e:
        raise ConfigError("", f"{path} is not valid JSON: {e}")
    return parse_scenario_config(data, settings)
