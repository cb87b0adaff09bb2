"""
Spectral densities of the outgoing squeezed light.

出力光のスペクトル密度 N(ω) = Σ u_m*(ω) u_n(ω) <A_m† A_n> を計算し、
独立モード部分と干渉項への分解、位相掃引、モード重みの再分配表を提供します。
"""
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from scipy.integrate import trapezoid

from ..gate.gate_core import GateConfig, gate_from_config
from ..modes.schmidt_modes import (
    FrequencyGrid,
    ModeFunction,
    SchmidtSpectrum,
    default_grid,
    mode_weight_fractions,
    schmidt_basis,
)
from ..moments.moments_engine import (
    SF_LABEL,
    GaussianMoments,
    apply_gate,
    default_mode_map,
    signal_label,
    squeezed_vacuum_state,
)
from ..utils.exceptions import GridError, InvalidParameter, InvalidState, UnsupportedModeCount
from ..utils.logging_utils import log_debug

NORMALIZATIONS = ("none", "by_input_photons", "by_max")

# 浮動小数点誤差による負値の許容幅（最大値に対する相対値）
NEGATIVE_TOLERANCE = 1e-10


@dataclass(frozen=True, eq=False)
class SpectralDensity:
    """Photon-number density on a frequency grid."""

    grid: FrequencyGrid
    values: np.ndarray
    normalization: str = "none"
    signed: bool = False

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        if values.shape != (self.grid.count,):
            raise GridError(
                f"density has {values.shape} samples, grid expects ({self.grid.count},)"
            )
        if self.normalization not in NORMALIZATIONS:
            raise InvalidParameter(
                f"unknown normalization {self.normalization!r}, expected one of {NORMALIZATIONS}"
            )
        if not self.signed and values.size:
            scale = max(float(np.max(np.abs(values))), 1e-300)
            if values.min() < -NEGATIVE_TOLERANCE * scale:
                raise InvalidState(
                    f"spectral density is negative ({values.min():.3e}, peak {scale:.3e})"
                )
            values = np.clip(values, 0.0, None)
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    def integral(self) -> float:
        return float(trapezoid(self.values, dx=self.grid.step))

    def peak(self) -> Tuple[float, float]:
        """(frequency, value) of the maximum."""
        k = int(np.argmax(self.values))
        return float(self.grid.points[k]), float(self.values[k])

    def value_at_center(self) -> float:
        return float(np.interp(self.grid.center, self.grid.points, self.values))

    def normalized(
        self, normalization: str, input_photons: Optional[float] = None
    ) -> "SpectralDensity":
        """
        Rescale an unnormalized density.

        Args:
            normalization: "none", "by_input_photons" or "by_max"
            input_photons: Divisor for "by_input_photons"
        """
        if self.normalization != "none":
            raise InvalidParameter("density is already normalized")
        if normalization == "none":
            return self
        if normalization == "by_input_photons":
            if input_photons is None or not input_photons > 0:
                raise InvalidParameter("by_input_photons needs a positive input photon number")
            divisor = float(input_photons)
        elif normalization == "by_max":
            divisor = float(np.max(np.abs(self.values)))
            if divisor == 0.0:
                raise InvalidParameter("cannot normalize an identically zero density by its maximum")
        else:
            raise InvalidParameter(f"unknown normalization {normalization!r}")
        return SpectralDensity(self.grid, self.values / divisor, normalization, self.signed)

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({"omega": self.grid.points, "density": self.values})


def _mode_labels(modes: Sequence[ModeFunction], mode_labels: Optional[Sequence[str]]):
    labels = list(mode_labels) if mode_labels is not None else [
        signal_label(n) for n in range(len(modes))
    ]
    if len(labels) != len(modes):
        raise InvalidParameter(f"{len(modes)} mode functions given for {len(labels)} modes")
    if not modes:
        raise InvalidParameter("at least one mode function is required")
    grid = modes[0].grid
    for k, mode in enumerate(modes):
        if not mode.grid.same_as(grid):
            raise GridError(f"mode function {k} is sampled on a different grid")
    return labels, grid


def _finish(
    grid: FrequencyGrid,
    values: np.ndarray,
    normalization: str,
    input_photons: Optional[float],
    signed: bool = False,
) -> SpectralDensity:
    density = SpectralDensity(grid, values, "none", signed)
    return density.normalized(normalization, input_photons)


def spectral_density(
    state: GaussianMoments,
    modes: Sequence[ModeFunction],
    normalization: str = "none",
    mode_labels: Optional[Sequence[str]] = None,
    input_photons: Optional[float] = None,
) -> SpectralDensity:
    """
    Density ``sum_{m,n} u_m*(w) u_n(w) M[m][n]`` over the given modes.

    Args:
        state: Gaussian state
        modes: Mode functions of the contributing state modes
        normalization: "none", "by_input_photons" or "by_max"
        mode_labels: State modes the functions belong to, default A0, A1, ...
        input_photons: Divisor for "by_input_photons"

    Returns:
        SpectralDensity; its integral equals the contributing photon number
        when unnormalized
    """
    labels, grid = _mode_labels(modes, mode_labels)
    index = [state.index_of(label) for label in labels]
    block = state.normal[np.ix_(index, index)]
    u = np.array([mode.values for mode in modes])

    # N(w)_k = Σ_mn conj(u_m[k]) M[m,n] u_n[k]
    complex_values = np.einsum("mk,mn,nk->k", u.conj(), block, u)
    scale = max(float(np.max(np.abs(complex_values))), 1e-300)
    if np.max(np.abs(complex_values.imag)) > 1e-10 * scale:
        log_debug("spectral density has a non-negligible imaginary part")
    return _finish(grid, complex_values.real, normalization, input_photons)


def diagonal_density(
    state: GaussianMoments,
    modes: Sequence[ModeFunction],
    normalization: str = "none",
    mode_labels: Optional[Sequence[str]] = None,
    input_photons: Optional[float] = None,
) -> SpectralDensity:
    """Independent-mode part ``sum_n |u_n(w)|^2 M[n][n]``."""
    labels, grid = _mode_labels(modes, mode_labels)
    photons = np.array([state.normal[state.index_of(v), state.index_of(v)].real for v in labels])
    u2 = np.abs(np.array([mode.values for mode in modes])) ** 2
    return _finish(grid, photons @ u2, normalization, input_photons)


def interference_term(
    gate_config: GateConfig,
    spectrum_in: SchmidtSpectrum,
    modes: Sequence[ModeFunction],
) -> SpectralDensity:
    """
    Cross term of the two matched modes after the gate (vacuum SF input).

    ``2 Re{mu_1 mu_2* u_1*(w) u_2(w)} (cos - 1) sum_k (1 + |mu_k|^2 (cos - 1)) N_k``

    Args:
        gate_config: Two-mode gate
        spectrum_in: Seed spectrum giving N_k
        modes: Schmidt basis indexed by order

    Raises:
        UnsupportedModeCount: the gate matches other than two modes
    """
    if gate_config.mode_count != 2:
        raise UnsupportedModeCount(
            f"interference term is defined for two matched modes, got {gate_config.mode_count}"
        )
    n1, n2 = gate_config.matched_orders
    if max(n1, n2) >= len(modes) or max(n1, n2) >= spectrum_in.mode_count:
        raise InvalidParameter(f"matched orders {n1}, {n2} exceed the Schmidt basis")
    mu1, mu2 = gate_config.normalized().projections
    photons = spectrum_in.photon_numbers[[n1, n2]]
    c1 = np.cos(gate_config.theta) - 1.0

    factor = c1 * sum((1.0 + abs(mu) ** 2 * c1) * n for mu, n in zip((mu1, mu2), photons))
    values = 2.0 * np.real(mu1 * np.conj(mu2) * np.conj(modes[n1].values) * modes[n2].values)
    return SpectralDensity(modes[n1].grid, values * factor, "none", signed=True)


@dataclass(frozen=True)
class TwoModeScenario:
    """Squeezed seed passing a gate matched to two Schmidt modes."""

    spectrum: SchmidtSpectrum
    orders: Tuple[int, int]
    theta: float
    magnitudes: Tuple[float, float] = (2**-0.5, 2**-0.5)
    grid: FrequencyGrid = field(default_factory=default_grid)
    phase_convention: bool = True

    def __post_init__(self):
        orders = tuple(int(n) for n in self.orders)
        object.__setattr__(self, "orders", orders)
        object.__setattr__(self, "magnitudes", tuple(float(m) for m in self.magnitudes))
        if len(orders) != 2:
            raise UnsupportedModeCount(f"two matched orders required, got {len(orders)}")
        if orders[0] == orders[1]:
            raise InvalidParameter("matched orders must be distinct")
        if max(orders) >= self.spectrum.mode_count:
            raise InvalidParameter(
                f"matched order {max(orders)} exceeds {self.spectrum.mode_count} Schmidt modes"
            )

    def constant_phase(self) -> float:
        """Phase offset of the second projection from the i^n mode factors."""
        if not self.phase_convention:
            return 0.0
        return (self.orders[1] - self.orders[0]) * np.pi / 2.0

    def gate_config(self, delta_phi: float) -> GateConfig:
        """Gate with ``arg(mu_2) - arg(mu_1)`` set so the cross term goes as ``cos(delta_phi)``."""
        return GateConfig.from_polar(
            self.theta,
            self.magnitudes,
            (0.0, delta_phi + self.constant_phase()),
            self.orders,
        )

    def input_state(self) -> GaussianMoments:
        return squeezed_vacuum_state(self.spectrum, include_sf_vacuum=True)

    def output_state(self, delta_phi: float) -> GaussianMoments:
        gate_config = self.gate_config(delta_phi)
        return apply_gate(
            self.input_state(), gate_from_config(gate_config), default_mode_map(gate_config)
        )

    def basis(self) -> List[ModeFunction]:
        return schmidt_basis(self.spectrum, self.grid, self.phase_convention)

    def density(
        self,
        delta_phi: float,
        normalization: str = "by_max",
        basis: Optional[Sequence[ModeFunction]] = None,
    ) -> SpectralDensity:
        basis = list(basis) if basis is not None else self.basis()
        return spectral_density(
            self.output_state(delta_phi),
            basis,
            normalization,
            input_photons=float(np.sum(self.spectrum.photon_numbers)),
        )


@dataclass(frozen=True, eq=False)
class PhaseMap:
    """Spectral densities, one row per phase difference."""

    phases: np.ndarray
    grid: FrequencyGrid
    values: np.ndarray
    normalization: str

    def row(self, k: int) -> SpectralDensity:
        return SpectralDensity(self.grid, self.values[k], self.normalization)

    def to_frame(self) -> pd.DataFrame:
        """Wide table: one row per phase, one column per frequency."""
        columns = [f"{w:.9g}" for w in self.grid.points]
        frame = pd.DataFrame(self.values, columns=columns)
        frame.insert(0, "delta_phi", self.phases)
        return frame


def phase_sweep(
    scenario: TwoModeScenario,
    phase_grid: Sequence[float],
    normalization: str = "by_max",
    workers: int = 1,
) -> PhaseMap:
    """
    Output spectra of a two-mode scenario as the phase difference varies.

    Args:
        scenario: Two-mode scenario
        phase_grid: Phase differences delta_phi
        normalization: Row normalization
        workers: Number of worker threads; rows keep the input order

    Returns:
        PhaseMap with ``len(phase_grid)`` rows
    """
    phases = np.asarray(phase_grid, dtype=float)
    if phases.ndim != 1 or phases.size == 0:
        raise InvalidParameter("phase sweep needs at least one phase")
    basis = scenario.basis()

    def compute(delta_phi: float) -> np.ndarray:
        return scenario.density(delta_phi, normalization, basis).values

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as executor:
            rows = list(executor.map(compute, phases))
    else:
        rows = [compute(p) for p in phases]

    log_debug(f"phase sweep over {phases.size} phases ({workers} workers)")
    return PhaseMap(phases, scenario.grid, np.vstack(rows), normalization)


def _weights(photons: np.ndarray) -> List[float]:
    # 真空入力では重みをゼロとする
    if not np.sum(photons) > 0:
        return [0.0] * len(photons)
    return mode_weight_fractions(photons)


def weight_redistribution(
    state_in: GaussianMoments,
    state_out: GaussianMoments,
    mode_labels: Optional[Sequence[str]] = None,
) -> pd.DataFrame:
    """
    Schmidt-mode photon numbers and weight fractions before and after a gate.

    Args:
        state_in: State before the gate
        state_out: State after the gate
        mode_labels: Modes to tabulate, default every signal Schmidt mode

    Returns:
        DataFrame with columns mode, order, photons_in, photons_out,
        weight_in, weight_out; the weights are zero when every
        tabulated mode is empty
    """
    if state_in.labels != state_out.labels:
        raise InvalidParameter("input and output states have different mode layouts")
    if mode_labels is None:
        mode_labels = [
            v for v in state_in.labels if v != SF_LABEL and v.startswith("A")
        ]
    index = [state_in.index_of(v) for v in mode_labels]
    photons_in = state_in.normal.diagonal().real[index]
    photons_out = state_out.normal.diagonal().real[index]

    return pd.DataFrame(
        {
            "mode": list(mode_labels),
            "order": [int(v[1:]) if v[1:].isdigit() else -1 for v in mode_labels],
            "photons_in": photons_in,
            "photons_out": photons_out,
            "weight_in": _weights(photons_in),
            "weight_out": _weights(photons_out),
        }
    )
