"""
シナリオ実行ツールを定義するモジュール。
ゲート通過、スペクトル、位相・角度掃引、ツインビーム、モード選択カスケード、
JSA 分解、フォック空間オラクルの各シナリオを実行し、成果物を書き出す。
"""
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

try:
    # インストールされたパッケージとして実行する場合
    from pulse_gate import __version__
    from pulse_gate.gate.gate_core import GateConfig, gate_from_config, single_mode_gate
    from pulse_gate.jsa.two_photon import (
        default_jsa_grids,
        factorization_ratio,
        pump_envelope,
        purity_sweep,
        schmidt_decompose_jsa,
        two_photon_amplitude,
    )
    from pulse_gate.modes.schmidt_modes import schmidt_basis
    from pulse_gate.moments import closed_forms
    from pulse_gate.moments.moments_engine import (
        SF_LABEL,
        GaussianMoments,
        apply_gate,
        conservation_report,
        default_mode_map,
        idler_label,
        number_difference_variance,
        number_variance,
        observables,
        photon_number,
        quadrature_variances,
        signal_label,
        signal_mode_photon_number,
        squeezed_vacuum_from_gains,
        squeezed_vacuum_state,
        twin_beam_state,
        vacuum_state,
    )
    from pulse_gate.oracle.fock_oracle import compare_with_gaussian
    from pulse_gate.spectra.spectra import (
        TwoModeScenario,
        diagonal_density,
        interference_term,
        phase_sweep,
        spectral_density,
        weight_redistribution,
    )
    from pulse_gate.tools.scenario_config import (
        ScenarioConfig,
        load_scenario_config,
    )
    from pulse_gate.utils.config import config as settings
    from pulse_gate.utils.exceptions import (
        ConfigError,
        InvalidParameter,
        InvariantViolation,
        PulseGateError,
    )
    from pulse_gate.utils.file_utils import (
        ensure_directory_exists,
        sanitize_filename,
        write_json,
        write_manifest,
        write_table,
    )
    from pulse_gate.utils.logging_utils import log_debug, log_info, log_warning
except ImportError:
    # 開発環境で直接実行する場合（相対インポート）
    from .. import __version__
    from ..gate.gate_core import GateConfig, gate_from_config, single_mode_gate
    from ..jsa.two_photon import (
        default_jsa_grids,
        factorization_ratio,
        pump_envelope,
        purity_sweep,
        schmidt_decompose_jsa,
        two_photon_amplitude,
    )
    from ..modes.schmidt_modes import schmidt_basis
    from ..moments import closed_forms
    from ..moments.moments_engine import (
        SF_LABEL,
        GaussianMoments,
        apply_gate,
        conservation_report,
        default_mode_map,
        idler_label,
        number_difference_variance,
        number_variance,
        observables,
        photon_number,
        quadrature_variances,
        signal_label,
        signal_mode_photon_number,
        squeezed_vacuum_from_gains,
        squeezed_vacuum_state,
        twin_beam_state,
        vacuum_state,
    )
    from ..oracle.fock_oracle import compare_with_gaussian
    from ..spectra.spectra import (
        TwoModeScenario,
        diagonal_density,
        interference_term,
        phase_sweep,
        spectral_density,
        weight_redistribution,
    )
    from .scenario_config import ScenarioConfig, load_scenario_config
    from ..utils.config import config as settings
    from ..utils.exceptions import (
        ConfigError,
        InvalidParameter,
        InvariantViolation,
        PulseGateError,
    )
    from ..utils.file_utils import (
        ensure_directory_exists,
        sanitize_filename,
        write_json,
        write_manifest,
        write_table,
    )
    from ..utils.logging_utils import log_debug, log_info, log_warning

# 保存則・閉形式との照合に使う相対許容誤差
INVARIANT_TOLERANCE = 1e-9
# スペクトル密度の積分と光子数の照合
DENSITY_TOLERANCE = 1e-6
# JSA の出力に含める特異値の数
JSA_REPORTED_MODES = 20


@dataclass
class RunResult:
    """Files written by one scenario run and its headline numbers."""

    scenario: str
    out_dir: str
    files: List[Dict[str, str]] = field(default_factory=list)
    summary: Dict[str, Any] = field(default_factory=dict)


class ArtifactWriter:
    """Collects the artifacts of one run and writes README.txt and manifest.json."""

    def __init__(self, config: ScenarioConfig, out_dir: str, fmt: str = "csv"):
        if fmt not in ("csv", "json"):
            raise InvalidParameter(f"unknown table format {fmt!r}, expected 'csv' or 'json'")
        self.config = config
        self.out_dir = os.path.abspath(out_dir)
        self.fmt = fmt
        self.result = RunResult(config.scenario, self.out_dir)
        ensure_directory_exists(self.out_dir)

    def wanted(self, name: str) -> bool:
        """True when ``outputs`` is empty or lists the artifact."""
        stem = os.path.splitext(name)[0]
        if not self.config.outputs or stem in self.config.outputs:
            return True
        log_debug(f"skipping {name}: not in outputs")
        return False

    def _record(self, filename: str, description: str) -> str:
        self.result.files.append({"path": filename, "description": description})
        return filename

    def table(self, name: str, frame: pd.DataFrame, description: str) -> Optional[str]:
        if not self.wanted(name):
            return None
        filename = f"{name}.{self.fmt}"
        write_table(os.path.join(self.out_dir, filename), frame, self.fmt)
        return self._record(filename, description)

    def json(self, name: str, data: Any, description: str) -> Optional[str]:
        if not self.wanted(name):
            return None
        filename = f"{name}.json"
        write_json(os.path.join(self.out_dir, filename), data)
        return self._record(filename, description)

    def text(self, name: str, content: str, description: str) -> Optional[str]:
        if not self.wanted(name):
            return None
        return self._write_text(name, content, description)

    def _write_text(self, name: str, content: str, description: str) -> str:
        with open(os.path.join(self.out_dir, name), "w", encoding="utf-8", newline="\n") as f:
            f.write(content)
        return self._record(name, description)

    def finish(self, summary: Dict[str, Any]) -> RunResult:
        self.result.summary = summary
        lines = [
            f"pulse-gate {__version__}",
            f"scenario: {self.config.scenario}",
            f"config sha256: {self.config.config_hash}",
            "",
            "files:",
        ]
        for entry in sorted(self.result.files, key=lambda e: e["path"]):
            lines.append(f"  {entry['path']}: {entry['description']}")
        lines.append("  manifest.json: file list with SHA-256 digests")
        self._write_text("README.txt", "\n".join(lines) + "\n", "this file")
        write_manifest(
            self.out_dir,
            self.config.scenario,
            self.config.config_hash,
            self.result.files,
            __version__,
        )
        log_info(f"{self.config.scenario}: {len(self.result.files)} files in {self.out_dir}")
        return self.result


def _scale(*values: float) -> float:
    return max([1.0] + [abs(float(v)) for v in values])


def _require(name: str, residual: float, scale: float, tolerance: float = INVARIANT_TOLERANCE):
    if not abs(residual) <= tolerance * scale:
        raise InvariantViolation(
            f"{name}: residual {residual:.3e} exceeds {tolerance:.0e} x {scale:.3e}"
        )


def _workers(config: ScenarioConfig, workers: Optional[int]) -> int:
    if workers is not None:
        return max(1, int(workers))
    if config.workers is not None:
        return config.workers
    return settings.get_workers()


def _ordered_map(function: Callable, values: Sequence, workers: int) -> List:
    # 行の順序は入力順のまま
    if workers > 1 and len(values) > 1:
        with ThreadPoolExecutor(max_workers=workers) as executor:
            return list(executor.map(function, values))
    return [function(v) for v in values]


def _gate_pass(
    config: ScenarioConfig, gate_config: Optional[GateConfig] = None
) -> Tuple[GaussianMoments, GaussianMoments, GateConfig]:
    spectrum = config.seed.spectrum()
    gate_config = gate_config or config.gate.gate_config()
    state_in = squeezed_vacuum_state(spectrum, include_sf_vacuum=True)
    state_out = apply_gate(
        state_in, gate_from_config(gate_config), default_mode_map(gate_config)
    ).validate()
    return state_in, state_out, gate_config


def _check_conservation(state_in, state_out, gate_config, mode_map=None) -> Dict[str, Any]:
    report = conservation_report(state_in, state_out, gate_config, mode_map)
    scale = _scale(np.sum(state_in.normal.diagonal().real))
    _require("signal + SF photon number", report.signal_sf_residual, scale)
    _require("residual-mode photon number", report.residual_mode_residual, scale)
    _require("total photon number", report.total_photon_residual, scale)
    if report.residual_closed_form_residual is not None:
        _require("residual-mode closed form", report.residual_closed_form_residual, scale)
    return report.to_dict()


def _matched_table(
    state_in: GaussianMoments, state_out: GaussianMoments, gate_config: GateConfig
) -> pd.DataFrame:
    """Engine photon numbers of the matched modes next to their closed forms."""
    orders = gate_config.matched_orders
    labels = [signal_label(n) for n in orders]
    n_in = [photon_number(state_in, v) for v in labels]
    rows = []
    for i, label in enumerate(labels):
        if len(orders) == 1:
            expected = closed_forms.remaining_photon_number(gate_config.theta, n_in[0])
        elif len(orders) == 2:
            expected = closed_forms.two_mode_photon_number(
                gate_config.theta, gate_config.projections, n_in, i
            )
        else:
            expected = None
        engine = photon_number(state_out, label)
        if expected is not None:
            _require(f"matched mode {label} photon number", engine - expected, _scale(*n_in))
        rows.append(
            {
                "mode": label,
                "order": orders[i],
                "mu_abs": abs(gate_config.projections[i]),
                "mu_arg": float(np.angle(gate_config.projections[i])),
                "photons_in": n_in[i],
                "photons_out": engine,
                "closed_form": np.nan if expected is None else expected,
            }
        )
    return pd.DataFrame(rows)


def _spectrum_frame(
    config: ScenarioConfig,
    state_in: GaussianMoments,
    state_out: GaussianMoments,
    gate_config: GateConfig,
) -> Tuple[pd.DataFrame, Dict[str, Any]]:
    spectrum = config.seed.spectrum()
    grid = config.grid.grid()
    basis = schmidt_basis(spectrum, grid, config.phase_convention)
    labels = [signal_label(n) for n in range(spectrum.mode_count)]
    input_photons = float(np.sum(spectrum.photon_numbers))

    raw_in = spectral_density(state_in, basis, "none", labels)
    raw_out = spectral_density(state_out, basis, "none", labels)
    photons_out = float(sum(photon_number(state_out, v) for v in labels))
    for name, density, photons in (("input", raw_in, input_photons), ("output", raw_out, photons_out)):
        _require(
            f"{name} density integral", density.integral() - photons, _scale(photons), DENSITY_TOLERANCE
        )

    # 真空入力では正規化せずに書き出す
    normalization = "by_input_photons" if input_photons > 0 else "none"
    divisor = input_photons if input_photons > 0 else 1.0
    frame = pd.DataFrame({"omega": grid.points})
    frame["density_in"] = raw_in.normalized(normalization, input_photons).values
    frame["density_out"] = raw_out.normalized(normalization, input_photons).values
    diagonal = diagonal_density(state_out, basis, "none", labels)
    frame["diagonal_out"] = diagonal.values / divisor

    summary = {
        "input_photons": input_photons,
        "normalization": normalization,
        "output_signal_photons": photons_out,
        "peak_in": list(raw_in.peak()),
        "peak_out": list(raw_out.peak()),
        "center_in": raw_in.value_at_center(),
        "center_out": raw_out.value_at_center(),
    }
    if gate_config.mode_count == 2:
        cross = interference_term(gate_config, spectrum, basis)
        residual = float(np.max(np.abs(raw_out.values - diagonal.values - cross.values)))
        _require(
            "interference term", residual, _scale(np.max(np.abs(raw_out.values))), DENSITY_TOLERANCE
        )
        frame["interference"] = cross.values / divisor
        summary["interference_max"] = float(np.max(np.abs(cross.values)))
    return frame, summary


def _gate_run(config: ScenarioConfig, writer: ArtifactWriter) -> Dict[str, Any]:
    state_in, state_out, gate_config = _gate_pass(config)
    conservation = _check_conservation(state_in, state_out, gate_config)
    matched = _matched_table(state_in, state_out, gate_config)

    writer.table(
        "weights",
        weight_redistribution(state_in, state_out),
        "Schmidt-mode photon numbers and weight fractions before and after the gate",
    )
    writer.table("matched_modes", matched, "matched-mode photon numbers with closed forms")
    writer.json(
        "observables",
        {"input": observables(state_in).to_dict(), "output": observables(state_out).to_dict()},
        "photon numbers, quadrature variances and number covariances",
    )
    writer.json("conservation", conservation, "photon-number conservation residuals")
    spectrum_frame, spectrum_summary = _spectrum_frame(config, state_in, state_out, gate_config)
    writer.table(
        "spectrum",
        spectrum_frame,
        "spectral densities divided by the input photon number",
    )
    return {
        "theta": gate_config.theta,
        "matched_orders": list(gate_config.matched_orders),
        "sf_photons_out": photon_number(state_out, SF_LABEL),
        "max_conservation_residual": conservation["max_residual"],
        "spectrum": spectrum_summary,
    }


def run_block(
    config: ScenarioConfig, out_dir: str, fmt: str = "csv", workers=None
) -> RunResult:
    """
    Gate matched to one Schmidt mode (or a few) of a squeezed seed.

    Writes weights, matched_modes, observables, conservation and spectrum.
    """
    writer = ArtifactWriter(config, out_dir, fmt)
    return writer.finish(_gate_run(config, writer))


def run_swap(
    config: ScenarioConfig, out_dir: str, fmt: str = "csv", workers=None
) -> RunResult:
    """
    Two-mode gate; at theta = pi with balanced projections the modes exchange content.
    """
    writer = ArtifactWriter(config, out_dir, fmt)
    summary = _gate_run(config, writer)
    gate_config = config.gate.gate_config()
    mu = np.abs(gate_config.projections)
    odd_pi = bool(abs(np.cos(gate_config.theta) + 1.0) < 1e-12)
    balanced = bool(abs(mu[0] - mu[1]) < 1e-12)
    if odd_pi and balanced:
        state_in, state_out, _ = _gate_pass(config, gate_config)
        first, second = (signal_label(n) for n in gate_config.matched_orders)
        n1, n2 = photon_number(state_in, first), photon_number(state_in, second)
        _require("swapped photon number", photon_number(state_out, first) - n2, _scale(n1, n2))
        _require("swapped photon number", photon_number(state_out, second) - n1, _scale(n1, n2))
        summary["exchanged"] = True
    else:
        summary["exchanged"] = False
    return writer.finish(summary)


def run_spectrum(
    config: ScenarioConfig, out_dir: str, fmt: str = "csv", workers=None
) -> RunResult:
    """Input and output spectral densities with the diagonal and interference parts."""
    writer = ArtifactWriter(config, out_dir, fmt)
    state_in, state_out, gate_config = _gate_pass(config)
    _check_conservation(state_in, state_out, gate_config)
    frame, summary = _spectrum_frame(config, state_in, state_out, gate_config)
    writer.table("spectrum", frame, "spectral densities divided by the input photon number")
    return writer.finish(summary)


def _two_mode_scenario(config: ScenarioConfig) -> TwoModeScenario:
    gate = config.gate
    return TwoModeScenario(
        spectrum=config.seed.spectrum(),
        orders=gate.matched_orders,
        theta=gate.theta,
        magnitudes=gate.magnitudes,
        grid=config.grid.grid(),
        phase_convention=config.phase_convention,
    )


def _theta_row(config: ScenarioConfig, theta: float) -> Dict[str, Any]:
    base = config.gate.gate_config()
    gate_config = GateConfig(theta, base.projections, base.matched_orders)
    state_in, state_out, _ = _gate_pass(config, gate_config)
    report = _check_conservation(state_in, state_out, gate_config)
    matched = _matched_table(state_in, state_out, gate_config)

    labels = [signal_label(n) for n in gate_config.matched_orders]
    row = {
        "theta": theta,
        "theta_over_pi": theta / np.pi,
        "sf_photons": photon_number(state_out, SF_LABEL),
        "signal_photons": signal_mode_photon_number(state_out, gate_config.projections, labels),
        "max_conservation_residual": report["max_residual"],
    }
    n_in = list(matched["photons_in"])
    for i, label in enumerate(labels):
        row[f"photons_{label}"] = float(matched["photons_out"][i])
        row[f"closed_form_{label}"] = float(matched["closed_form"][i])
        if len(labels) == 2:
            row[f"relative_{label}"] = (
                closed_forms.relative_converted_photons(theta, gate_config.projections, n_in, i)
                if n_in[i] > 0
                else np.nan
            )
    return row


def sweep(
    config: ScenarioConfig, axis: Optional[str] = None, workers: Optional[int] = None
) -> pd.DataFrame:
    """
    Tabulate a scenario along its sweep axis.

    Args:
        config: Scenario with seed, gate and sweep sections
        axis: "theta" or "phase", default the config's sweep axis
        workers: Worker threads; rows keep the sweep order

    Returns:
        theta axis: one row per angle with engine and closed-form photon numbers;
        phase axis: one row per phase difference, one column per frequency
    """
    if config.sweep is None:
        raise ConfigError("sweep", "the scenario has no sweep section")
    axis = axis or config.sweep.axis
    values = config.sweep.values()
    n_workers = _workers(config, workers)
    if axis == "theta":
        rows = _ordered_map(lambda t: _theta_row(config, float(t)), list(values), n_workers)
        return pd.DataFrame(rows)
    if axis == "phase":
        return phase_sweep(_two_mode_scenario(config), values, "by_max", n_workers).to_frame()
    raise InvalidParameter(f"unknown sweep axis {axis!r}")


def run_theta_sweep(
    config: ScenarioConfig, out_dir: str, fmt: str = "csv", workers=None
) -> RunResult:
    """Matched-mode and SF photon numbers against the conversion angle."""
    writer = ArtifactWriter(config, out_dir, fmt)
    frame = sweep(config, "theta", workers)
    writer.table(
        "theta_sweep", frame, "photon numbers against theta with closed forms and relative conversion"
    )
    return writer.finish(
        {
            "points": len(frame),
            "max_conservation_residual": float(frame["max_conservation_residual"].abs().max()),
        }
    )


def run_phase_sweep(
    config: ScenarioConfig, out_dir: str, fmt: str = "csv", workers=None
) -> RunResult:
    """Output spectra of a two-mode gate against the projection phase difference."""
    writer = ArtifactWriter(config, out_dir, fmt)
    scenario = _two_mode_scenario(config)
    phase_map = phase_sweep(scenario, config.sweep.values(), "by_max", _workers(config, workers))
    writer.table(
        "phase_map",
        phase_map.to_frame(),
        "spectral density normalized to its maximum, one row per phase difference",
    )

    peaks = []
    for k, delta_phi in enumerate(phase_map.phases):
        density = phase_map.row(k)
        omega, value = density.peak()
        peaks.append(
            {
                "delta_phi": float(delta_phi),
                "peak_omega": omega,
                "peak_value": value,
                "center_value": density.value_at_center(),
            }
        )
    writer.table("phase_peaks", pd.DataFrame(peaks), "peak position and center value per phase")
    return writer.finish(
        {"phases": len(peaks), "constant_phase": scenario.constant_phase()}
    )


def _twin_single_rows(config: ScenarioConfig, thetas: Sequence[float]) -> List[Dict[str, Any]]:
    spectrum = config.seed.spectrum()
    order = config.gate.matched_orders[0]
    g = float(spectrum.gains[order])
    state_in = twin_beam_state(spectrum, include_sf_vacuum=True)
    signal, idler = signal_label(order), idler_label(order)

    rows = []
    for theta in thetas:
        gate_config = GateConfig(float(theta), (1.0 + 0.0j,), (order,))
        state_out = apply_gate(state_in, gate_from_config(gate_config), default_mode_map(gate_config))
        variance = number_difference_variance(state_out, signal, idler)
        expected = closed_forms.twin_difference_variance(theta, g)
        _require("twin number-difference variance", variance - expected, _scale(expected))
        total = photon_number(state_out, signal) + photon_number(state_out, idler)
        rows.append(
            {
                "theta": float(theta),
                "theta_over_pi": float(theta) / np.pi,
                "photons_signal": photon_number(state_out, signal),
                "photons_idler": photon_number(state_out, idler),
                "photons_sf": photon_number(state_out, SF_LABEL),
                "difference_variance": variance,
                "closed_form": expected,
                "nrf": variance / total if total > 0 else np.nan,
                "sf_number_variance": number_variance(state_out, SF_LABEL),
            }
        )
    return rows


def _twin_pair_rows(config: ScenarioConfig) -> Tuple[List[Dict[str, Any]], bool]:
    spectrum = config.seed.spectrum()
    gate_config = config.gate.gate_config()
    state_in = twin_beam_state(spectrum, include_sf_vacuum=True)
    state_out = apply_gate(state_in, gate_from_config(gate_config), default_mode_map(gate_config))
    orders = gate_config.matched_orders

    rows = []
    for i in orders:
        for j in orders:
            rows.append(
                {
                    "signal": signal_label(i),
                    "idler": idler_label(j),
                    "variance_in": number_difference_variance(state_in, signal_label(i), idler_label(j)),
                    "variance_out": number_difference_variance(state_out, signal_label(i), idler_label(j)),
                }
            )

    mu = np.abs(gate_config.projections)
    exchanged = bool(
        abs(np.cos(gate_config.theta) + 1.0) < 1e-12 and abs(mu[0] - mu[1]) < 1e-12
    )
    if exchanged:
        first, second = orders
        scale = _scale(spectrum.photon_numbers[first], spectrum.photon_numbers[second])
        for a, b in ((first, second), (second, first)):
            _require(
                "exchanged twin correlation",
                number_difference_variance(state_out, signal_label(a), idler_label(b)),
                scale,
            )
    return rows, exchanged


def run_twin(
    config: ScenarioConfig, out_dir: str, fmt: str = "csv", workers=None
) -> RunResult:
    """
    Twin-beam seed: signal/idler number correlations before and after the gate.
    """
    writer = ArtifactWriter(config, out_dir, fmt)
    spectrum = config.seed.spectrum()
    state_in = twin_beam_state(spectrum, include_sf_vacuum=True)
    for n in range(spectrum.mode_count):
        variance = number_difference_variance(state_in, signal_label(n), idler_label(n))
        _require(f"input twin correlation of pair {n}", variance, _scale(spectrum.photon_numbers[n]))

    summary: Dict[str, Any] = {"matched_orders": list(config.gate.matched_orders)}
    if len(config.gate.matched_orders) == 1:
        thetas = config.sweep.values() if config.sweep is not None else [config.gate.theta]
        rows = _twin_single_rows(config, thetas)
        writer.table(
            "twin_correlations",
            pd.DataFrame(rows),
            "signal/idler photon numbers and number-difference variance against theta",
        )
        summary["points"] = len(rows)
    else:
        rows, exchanged = _twin_pair_rows(config)
        writer.table(
            "twin_pairs",
            pd.DataFrame(rows),
            "number-difference variance of every signal/idler pair before and after the gate",
        )
        summary["exchanged"] = exchanged
    return writer.finish(summary)


def select_cascade(
    config: ScenarioConfig,
) -> Dict[str, Any]:
    """
    Two full-conversion gates in series that carve one Schmidt mode out of the seed.

    The first gate moves the matched mode into the SF channel; its SF output
    seeds the second gate, whose empty signal port receives the carved mode.

    Returns:
        Summary with the intermediate SF squeezing and the deviation from the
        directly prepared single-mode squeezed vacuum

    Raises:
        InvalidParameter: a gate is not at full conversion
        InvariantViolation: the carved state differs from the reference
    """
    gate2 = config.gate2 or config.gate
    for theta in (config.gate.theta, gate2.theta):
        if abs(np.sin(theta) ** 2 - 1.0) > 1e-12:
            raise InvalidParameter(f"mode selection needs full conversion, got theta = {theta:.6g}")

    spectrum = config.seed.spectrum()
    order = config.gate.matched_orders[0]
    selected = signal_label(order)
    g = float(spectrum.gains[order])

    first = squeezed_vacuum_state(spectrum, include_sf_vacuum=True)
    first_out = apply_gate(first, single_mode_gate(config.gate.theta), [SF_LABEL, selected])
    sf_marginal = first_out.subset([SF_LABEL])
    var_x, var_p = quadrature_variances(first_out, SF_LABEL)
    expected_x, expected_p = closed_forms.sf_mode_quadratures(config.gate.theta, g)
    scale = _scale(np.exp(2 * g))
    _require("intermediate SF quadrature X", var_x - expected_x, scale)
    _require("intermediate SF quadrature P", var_p - expected_p, scale)

    second = sf_marginal.direct_sum(vacuum_state([selected]))
    second_out = apply_gate(second, single_mode_gate(gate2.theta), [SF_LABEL, selected])
    carved = second_out.subset([selected]).validate()
    reference = squeezed_vacuum_from_gains([g], include_sf_vacuum=False).relabel([selected])

    deviation = max(
        float(np.max(np.abs(carved.normal - reference.normal))),
        float(np.max(np.abs(carved.anomalous - reference.anomalous))),
    )
    _require("carved mode against direct squeezing", deviation, _scale(np.sinh(g) * np.cosh(g)))
    leftover = photon_number(second_out, SF_LABEL)
    _require("SF photons after the second gate", leftover, _scale(np.sinh(g) ** 2))
    log_debug(f"selected {selected} with deviation {deviation:.2e}")

    return {
        "selected_mode": selected,
        "gain": g,
        "theta_1": config.gate.theta,
        "theta_2": gate2.theta,
        "intermediate_sf": {
            "photon_number": photon_number(first_out, SF_LABEL),
            "var_x": var_x,
            "var_p": var_p,
            "squeezing_db": float(-10.0 * np.log10(min(var_x, var_p) / 0.5)),
        },
        "selected_state": observables(carved).to_dict(),
        "reference_state": observables(reference).to_dict(),
        "max_deviation": deviation,
        "remaining_seed_photons": float(
            sum(photon_number(first_out, v) for v in first_out.labels if v != SF_LABEL)
        ),
    }


def run_select(
    config: ScenarioConfig, out_dir: str, fmt: str = "csv", workers=None
) -> RunResult:
    """Mode-selection cascade; writes cascade.json."""
    writer = ArtifactWriter(config, out_dir, fmt)
    summary = select_cascade(config)
    writer.json("cascade", summary, "intermediate SF squeezing and the carved single-mode state")
    return writer.finish({"selected_mode": summary["selected_mode"], "max_deviation": summary["max_deviation"]})


def run_jsa(
    config: ScenarioConfig, out_dir: str, fmt: str = "csv", workers=None
) -> RunResult:
    """Two-photon amplitude, its Schmidt decomposition and an optional purity sweep."""
    writer = ArtifactWriter(config, out_dir, fmt)
    jsa = config.jsa
    disp = jsa.dispersion()
    signal, output = default_jsa_grids(disp, jsa.count, jsa.span)
    pump = pump_envelope(jsa.pump_width, signal, output)
    amplitude = two_photon_amplitude(pump, disp, signal, output, jsa.approximation)
    decomposition = schmidt_decompose_jsa(amplitude, mode_count=JSA_REPORTED_MODES)

    writer.table("jsa_intensity", amplitude.intensity_frame(), "|F|^2, one row per signal frequency")
    schmidt = {
        "approximation": jsa.approximation,
        "ratio": factorization_ratio(disp),
        "group_delay_mismatch": disp.group_delay_mismatch,
        "pump_width": disp.pump_width,
        "dispersion_width": disp.dispersion_width,
        "singular_values": decomposition.singular_values[:JSA_REPORTED_MODES],
        "leading_weight": decomposition.leading_weight,
        "purity": decomposition.purity,
        "schmidt_number": decomposition.schmidt_number,
    }
    writer.json("jsa_schmidt", schmidt, "leading singular values, purity and Schmidt number")
    if jsa.ratios:
        frame = purity_sweep(
            jsa.ratios, jsa.approximation, jsa.pump_width, jsa.count, jsa.span, jsa.alpha
        )
        writer.table("purity_sweep", frame, "leading weight and purity against the factorization ratio")
    return writer.finish(
        {"purity": decomposition.purity, "schmidt_number": decomposition.schmidt_number}
    )


def run_oracle(
    config: ScenarioConfig, out_dir: str, fmt: str = "csv", workers=None
) -> RunResult:
    """
    Compare the moment engine with the truncated Fock-space oracle.

    The report is written before a failed comparison raises InvariantViolation.
    """
    writer = ArtifactWriter(config, out_dir, fmt)
    oracle = config.oracle
    report = compare_with_gaussian(oracle.scenario(), oracle.rel_tol, oracle.abs_tol)
    frame = report.to_frame()
    writer.json("oracle_report", report.to_dict(), "oracle and Gaussian values with deviations")
    writer.table("oracle_table", frame, "comparison rows")
    writer.text("oracle_table.txt", frame.to_string(index=False) + "\n", "human-readable comparison")
    result = writer.finish(
        {"passed": report.passed, "max_abs_deviation": report.max_abs_deviation, "leak": report.leak}
    )
    if not report.passed:
        failed = int((~frame["passed"]).sum())
        raise InvariantViolation(f"oracle comparison failed for {failed} of {len(frame)} values")
    return result


SCENARIO_RUNNERS: Dict[str, Callable[..., RunResult]] = {
    "block": run_block,
    "swap": run_swap,
    "spectrum": run_spectrum,
    "phase-sweep": run_phase_sweep,
    "theta-sweep": run_theta_sweep,
    "twin": run_twin,
    "select": run_select,
    "jsa": run_jsa,
    "oracle": run_oracle,
}


def default_out_dir(config_path: str) -> str:
    stem = os.path.splitext(os.path.basename(config_path))[0]
    return os.path.join(settings.get_output_dir(), sanitize_filename(stem))


def run(
    config_path: str,
    command: Optional[str] = None,
    out_dir: Optional[str] = None,
    fmt: str = "csv",
    workers: Optional[int] = None,
) -> RunResult:
    """
    Load a scenario config and run it.

    Args:
        config_path: Scenario JSON file
        command: Expected scenario name; a config for another scenario is rejected
        out_dir: Output directory, default ``<output_dir>/<config stem>``
        fmt: Table format, "csv" or "json"
        workers: Worker threads for sweeps

    Returns:
        RunResult
    """
    config = load_scenario_config(config_path, settings.config)
    if command is not None and command != config.scenario:
        raise ConfigError("scenario", f"config describes {config.scenario!r}, not {command!r}")
    out_dir = out_dir or default_out_dir(config_path)
    log_info(f"running {config.scenario} from {config_path}")
    return SCENARIO_RUNNERS[config.scenario](config, out_dir, fmt, workers)


def validate_configs(paths: Sequence[str]) -> List[Tuple[str, Optional[str]]]:
    """
    Validate scenario configs without running them.

    Returns:
        (path, error message or None) per file
    """
    results = []
    for path in paths:
        try:
            load_scenario_config(path, settings.config)
            results.append((path, None))
        except PulseGateError as e:
            log_warning(f"{path}: {e}")
            results.append((path, str(e)))
    return results
