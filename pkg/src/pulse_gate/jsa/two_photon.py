"""
SFG two-photon amplitude and its Schmidt decomposition.

Frequencies are offsets: ``s = w_s - w_p`` for the signal and
``o = w_o - 2 w_p`` for the sum-frequency output. The phase mismatch to first
order is ``dk L / 2 = delay * o / 2`` with ``delay = L |k'_p - k'_o|``.
"""
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from scipy.linalg import LinAlgError, svd

from ..modes.schmidt_modes import FrequencyGrid, ModeFunction, hermite_gauss_mode
from ..utils.exceptions import DecompositionError, GridError, InvalidParameter
from ..utils.logging_utils import log_debug, log_warning

# sinc(x) ≈ exp(-alpha x^2)
SINC_GAUSS_ALPHA = 0.193
DEFAULT_JSA_COUNT = 512
DEFAULT_JSA_SPAN = 6.0
APPROXIMATIONS = ("sinc", "gaussian")


@dataclass(frozen=True)
class DispersionParams:
    """Group-delay mismatch and pump bandwidth of the SFG crystal."""

    group_delay_mismatch: float
    pump_width: float
    crystal_length_scale: float = 1.0
    alpha: float = SINC_GAUSS_ALPHA

    def __post_init__(self):
        if not self.group_delay_mismatch > 0:
            raise InvalidParameter(
                f"group delay mismatch must be positive, got {self.group_delay_mismatch}"
            )
        if not self.pump_width > 0:
            raise InvalidParameter(f"pump width must be positive, got {self.pump_width}")
        if not self.crystal_length_scale > 0:
            raise InvalidParameter(
                f"crystal length scale must be positive, got {self.crystal_length_scale}"
            )
        if not self.alpha > 0:
            raise InvalidParameter(f"alpha must be positive, got {self.alpha}")

    @classmethod
    def from_ratio(
        cls, ratio: float, pump_width: float = 1.0, alpha: float = SINC_GAUSS_ALPHA
    ) -> "DispersionParams":
        """Parameters whose pump width is ``ratio`` times the dispersion width."""
        if not ratio > 0:
            raise InvalidParameter(f"factorization ratio must be positive, got {ratio}")
        delay = ratio / (pump_width * np.sqrt(alpha / 2.0))
        return cls(group_delay_mismatch=delay, pump_width=pump_width, alpha=alpha)

    @property
    def delay(self) -> float:
        return self.crystal_length_scale * self.group_delay_mismatch

    @property
    def dispersion_width(self) -> float:
        """Width of the Gaussian that replaces the phase-matching sinc."""
        return np.sqrt(2.0 / self.alpha) / self.delay


def factorization_ratio(disp: DispersionParams) -> float:
    """Pump width over dispersion width; large values mean a separable amplitude."""
    return float(disp.pump_width / disp.dispersion_width)


@dataclass(frozen=True, eq=False)
class JsaGrid:
    """Two-photon amplitude sampled on ``signal_grid x output_grid``."""

    signal_grid: FrequencyGrid
    output_grid: FrequencyGrid
    values: np.ndarray

    def __post_init__(self):
        values = np.array(self.values, dtype=complex)
        expected = (self.signal_grid.count, self.output_grid.count)
        if values.shape != expected:
            raise GridError(f"amplitude has shape {values.shape}, grids expect {expected}")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    def frobenius_norm(self) -> float:
        return float(np.linalg.norm(self.values))

    def normalized(self) -> "JsaGrid":
        norm = self.frobenius_norm()
        if norm == 0.0:
            raise InvalidParameter("two-photon amplitude is identically zero")
        return JsaGrid(self.signal_grid, self.output_grid, self.values / norm)

    def intensity_frame(self) -> pd.DataFrame:
        """|F|^2 as a wide table, one row per signal frequency."""
        columns = [f"{w:.9g}" for w in self.output_grid.points]
        frame = pd.DataFrame(np.abs(self.values) ** 2, columns=columns)
        frame.insert(0, "signal_omega", self.signal_grid.points)
        return frame


@dataclass(frozen=True, eq=False)
class JsaDecomposition:
    """Singular values with the matching signal and output mode functions."""

    singular_values: np.ndarray
    signal_modes: List[ModeFunction]
    output_modes: List[ModeFunction]

    @property
    def weights(self) -> np.ndarray:
        return self.singular_values**2

    @property
    def leading_weight(self) -> float:
        return float(self.weights[0])

    @property
    def purity(self) -> float:
        return float(np.sum(self.weights**2))

    @property
    def schmidt_number(self) -> float:
        return 1.0 / self.purity

    def reconstruct(self) -> np.ndarray:
        """Amplitude rebuilt from the retained terms, in normalized grid units."""
        signal = self.signal_modes[0].grid
        output = self.output_modes[0].grid
        u = np.column_stack([m.values for m in self.signal_modes]) * np.sqrt(signal.step)
        v = np.vstack([m.values for m in self.output_modes]) * np.sqrt(output.step)
        k = len(self.signal_modes)
        return (u * self.singular_values[:k]) @ v


def default_jsa_grids(
    disp: DispersionParams,
    count: int = DEFAULT_JSA_COUNT,
    span: float = DEFAULT_JSA_SPAN,
) -> Tuple[FrequencyGrid, FrequencyGrid]:
    """Signal grid over ``span (sigma + dw)`` and output grid over ``span dw``."""
    dw = disp.dispersion_width
    signal = FrequencyGrid.symmetric(span * (disp.pump_width + dw), count)
    output = FrequencyGrid.symmetric(span * dw, count)
    return signal, output


def pump_envelope(
    pump_width: float, signal_grid: FrequencyGrid, output_grid: FrequencyGrid
) -> ModeFunction:
    """
    Gaussian pump envelope sampled on every difference ``s - o`` of the grids.

    The envelope grid is as fine as the finer of the two grids.
    """
    half_width = signal_grid.half_width + output_grid.half_width
    step = min(signal_grid.step, output_grid.step)
    count = int(np.ceil(2.0 * half_width / step)) + 1
    center = signal_grid.center - output_grid.center
    grid = FrequencyGrid.symmetric(half_width, count, center)
    return hermite_gauss_mode(0, grid, width=pump_width, phase_convention=False)


def _check_coverage(grid: FrequencyGrid, width: float, span: float, name: str) -> None:
    reach = span * width * (1.0 - 1e-9)
    centered = abs(grid.center) <= 1e-9 * max(grid.half_width, width)
    if not centered or not grid.covers(-reach, reach):
        raise GridError(
            f"{name} grid [{grid.start:.4g}, {grid.end:.4g}] must be centered and cover "
            f"±{span:g} widths ({span * width:.4g})"
        )


def two_photon_amplitude(
    pump: ModeFunction,
    disp: DispersionParams,
    signal_grid: FrequencyGrid,
    output_grid: FrequencyGrid,
    approximation: str = "sinc",
) -> JsaGrid:
    """
    Normalized two-photon amplitude ``pump(s - o) * phase-matching(o)``.

    Args:
        pump: Pump envelope, sampled wide enough for every ``s - o``
        disp: Dispersion parameters
        signal_grid: Signal offsets
        output_grid: Output offsets
        approximation: "sinc" for ``exp(i x) sinc(x)`` with ``x = delay o / 2``,
            "gaussian" for ``exp(-o^2 / (2 dw^2))``

    Returns:
        JsaGrid with unit Frobenius norm

    Raises:
        GridError: a grid does not cover the envelope factors
    """
    if approximation not in APPROXIMATIONS:
        raise InvalidParameter(
            f"unknown approximation {approximation!r}, expected one of {APPROXIMATIONS}"
        )
    _check_coverage(signal_grid, disp.pump_width, DEFAULT_JSA_SPAN, "signal")
    _check_coverage(output_grid, disp.dispersion_width, DEFAULT_JSA_SPAN, "output")
    if not pump.grid.covers(
        signal_grid.start - output_grid.end + 1e-9 * pump.grid.step,
        signal_grid.end - output_grid.start - 1e-9 * pump.grid.step,
    ):
        raise GridError("pump envelope grid does not cover every signal-output difference")

    s, o = np.meshgrid(signal_grid.points, output_grid.points, indexing="ij")
    envelope = pump.at(s - o)
    if approximation == "sinc":
        x = 0.5 * disp.delay * output_grid.points
        matching = np.sinc(x / np.pi) * np.exp(1j * x)
    else:
        matching = np.exp(-(output_grid.points**2) / (2.0 * disp.dispersion_width**2))

    log_debug(
        f"two-photon amplitude ({approximation}) on {signal_grid.count}x{output_grid.count}, "
        f"ratio {factorization_ratio(disp):.4g}"
    )
    return JsaGrid(signal_grid, output_grid, envelope * matching[np.newaxis, :]).normalized()


def schmidt_decompose_jsa(jsa: JsaGrid, mode_count: Optional[int] = None) -> JsaDecomposition:
    """
    Singular-value decomposition of a normalized amplitude.

    Args:
        jsa: Amplitude with unit Frobenius norm
        mode_count: Number of mode pairs to keep, default all

    Returns:
        JsaDecomposition with descending singular values

    Raises:
        DecompositionError: the SVD fails or its weights do not sum to 1
    """
    norm = jsa.frobenius_norm()
    if abs(norm - 1.0) > 1e-9:
        raise InvalidParameter(f"amplitude must be normalized, Frobenius norm is {norm:.12f}")

    try:
        u, sigma, vh = svd(jsa.values, full_matrices=False, lapack_driver="gesdd")
    except LinAlgError:
        log_warning("gesdd did not converge, retrying with gesvd")
        try:
            u, sigma, vh = svd(jsa.values, full_matrices=False, lapack_driver="gesvd")
        except LinAlgError as e:
            raise DecompositionError(f"SVD of the two-photon amplitude failed: {e}")

    total = float(np.sum(sigma**2))
    if abs(total - 1.0) > 1e-9:
        raise DecompositionError(f"squared singular values sum to {total:.12f}")

    keep = sigma.size if mode_count is None else min(int(mode_count), sigma.size)
    ds = np.sqrt(jsa.signal_grid.step)
    do = np.sqrt(jsa.output_grid.step)
    signal_modes = [ModeFunction(jsa.signal_grid, u[:, k] / ds) for k in range(keep)]
    output_modes = [ModeFunction(jsa.output_grid, vh[k] / do) for k in range(keep)]
    return JsaDecomposition(sigma, signal_modes, output_modes)


def sum_frequency_mode(disp: DispersionParams, grid: FrequencyGrid) -> ModeFunction:
    """Normalized Gaussian wave packet of width ``dw`` at the output carrier."""
    _check_coverage(grid, disp.dispersion_width, DEFAULT_JSA_SPAN, "output")
    return hermite_gauss_mode(0, grid, width=disp.dispersion_width, phase_convention=False)


def purity_sweep(
    ratios: Sequence[float],
    approximation: str = "gaussian",
    pump_width: float = 1.0,
    count: int = DEFAULT_JSA_COUNT,
    span: float = DEFAULT_JSA_SPAN,
    alpha: float = SINC_GAUSS_ALPHA,
) -> pd.DataFrame:
    """
    Leading weight, purity and Schmidt number of the amplitude per ratio.

    Returns:
        DataFrame with columns ratio, leading_weight, purity, schmidt_number
    """
    rows = []
    for ratio in ratios:
        disp = DispersionParams.from_ratio(ratio, pump_width, alpha)
        signal, output = default_jsa_grids(disp, count, span)
        pump = pump_envelope(pump_width, signal, output)
        decomposition = schmidt_decompose_jsa(
            two_photon_amplitude(pump, disp, signal, output, approximation), mode_count=1
        )
        rows.append(
            {
                "ratio": float(ratio),
                "leading_weight": decomposition.leading_weight,
                "purity": decomposition.purity,
                "schmidt_number": decomposition.schmidt_number,
            }
        )
    return pd.DataFrame(rows, columns=["ratio", "leading_weight", "purity", "schmidt_number"])
