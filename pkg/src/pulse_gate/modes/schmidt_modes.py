"""
Schmidt-mode profiles and photon statistics of the squeezed-vacuum seed.

All spectral quantities are expressed in units of the seed Schmidt-mode width
and centered at 0 (offset from the pump carrier).
"""
from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np
from scipy.integrate import trapezoid
from scipy.interpolate import interp1d
from scipy.special import eval_hermite, gammaln

from ..utils.exceptions import GridError, InvalidParameter

DEFAULT_GRID_COUNT = 2048
DEFAULT_GRID_HALF_WIDTH = 8.0

# Tail mass of a mode outside its grid above which the grid is rejected.
TAIL_MASS_THRESHOLD = 1e-8
LAMBDA_SUM_TOLERANCE = 1e-9

# i**n without floating error
_I_POWERS = (1.0 + 0.0j, 1.0j, -1.0 + 0.0j, -1.0j)


@dataclass(frozen=True)
class FrequencyGrid:
    """Uniform frequency grid ``start + step * k`` for ``k < count``."""

    start: float
    count: int
    step: float

    def __post_init__(self):
        if int(self.count) != self.count or self.count < 2:
            raise GridError(f"grid needs at least 2 points, got count={self.count}")
        if not self.step > 0:
            raise GridError(f"grid step must be positive, got step={self.step}")

    @classmethod
    def symmetric(
        cls, half_width: float, count: int, center: float = 0.0
    ) -> "FrequencyGrid":
        """Grid spanning ``center ± half_width`` with both end points included."""
        if not half_width > 0:
            raise GridError(f"half_width must be positive, got {half_width}")
        if count < 2:
            raise GridError(f"grid needs at least 2 points, got count={count}")
        return cls(
            start=center - half_width, count=int(count), step=2.0 * half_width / (count - 1)
        )

    @property
    def points(self) -> np.ndarray:
        return self.start + self.step * np.arange(self.count)

    @property
    def end(self) -> float:
        return self.start + self.step * (self.count - 1)

    @property
    def center(self) -> float:
        return 0.5 * (self.start + self.end)

    @property
    def half_width(self) -> float:
        return 0.5 * (self.end - self.start)

    def same_as(self, other: "FrequencyGrid", rtol: float = 1e-12) -> bool:
        return (
            self.count == other.count
            and np.isclose(self.start, other.start, rtol=rtol, atol=rtol)
            and np.isclose(self.step, other.step, rtol=rtol, atol=0.0)
        )

    def covers(self, low: float, high: float) -> bool:
        return self.start <= low and self.end >= high


def default_grid() -> FrequencyGrid:
    """2048 points spanning ±8 mode widths."""
    return FrequencyGrid.symmetric(DEFAULT_GRID_HALF_WIDTH, DEFAULT_GRID_COUNT)


@dataclass(frozen=True, eq=False)
class ModeFunction:
    """Complex spectral amplitude sampled on a frequency grid."""

    grid: FrequencyGrid
    values: np.ndarray

    def __post_init__(self):
        values = np.array(self.values, dtype=complex)
        if values.shape != (self.grid.count,):
            raise GridError(
                f"mode has {values.shape} samples, grid expects ({self.grid.count},)"
            )
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    def norm(self) -> float:
        """L2 norm by trapezoidal quadrature."""
        return float(np.sqrt(trapezoid(np.abs(self.values) ** 2, dx=self.grid.step)))

    def overlap(self, other: "ModeFunction") -> complex:
        """Inner product ``<self|other>`` (conjugate-linear in ``self``)."""
        if not self.grid.same_as(other.grid):
            raise GridError("overlap of modes sampled on different grids")
        return complex(trapezoid(np.conj(self.values) * other.values, dx=self.grid.step))

    def normalized(self) -> "ModeFunction":
        norm = self.norm()
        if norm == 0.0:
            raise InvalidParameter("cannot normalize an identically zero mode")
        return ModeFunction(self.grid, self.values / norm)

    def with_phase(self, phase: complex) -> "ModeFunction":
        return ModeFunction(self.grid, self.values * phase)

    def at(self, points: np.ndarray) -> np.ndarray:
        """Cubic interpolation at arbitrary points, zero outside the grid."""
        grid_points = self.grid.points
        real = interp1d(
            grid_points, self.values.real, kind="cubic", bounds_error=False, fill_value=0.0
        )
        imag = interp1d(
            grid_points, self.values.imag, kind="cubic", bounds_error=False, fill_value=0.0
        )
        return real(points) + 1j * imag(points)


def hermite_gauss_mode(
    n: int,
    grid: FrequencyGrid,
    center: float = 0.0,
    width: float = 1.0,
    phase_convention: bool = True,
) -> ModeFunction:
    """
    Normalized Hermite-Gauss function of order ``n``.

    ``u_n(w) = H_n(x) exp(-x^2/2) / sqrt(2^n n! sqrt(pi) width)`` with
    ``x = (w - center) / width``; with ``phase_convention`` the values carry
    the global factor ``i**n``.

    Raises:
        InvalidParameter: ``n < 0`` or ``width <= 0``
        GridError: the mode's mass outside (or unresolved by) the grid exceeds 1e-8
    """
    if int(n) != n or n < 0:
        raise InvalidParameter(f"Hermite-Gauss order must be a non-negative integer, got {n}")
    if not width > 0:
        raise InvalidParameter(f"mode width must be positive, got {width}")

    n = int(n)
    x = (grid.points - center) / width
    log_norm = 0.5 * (n * np.log(2.0) + gammaln(n + 1) + 0.5 * np.log(np.pi) + np.log(width))
    values = eval_hermite(n, x) * np.exp(-0.5 * x**2 - log_norm)

    tail_mass = abs(1.0 - trapezoid(values**2, dx=grid.step))
    if tail_mass > TAIL_MASS_THRESHOLD:
        raise GridError(
            f"grid [{grid.start:.3g}, {grid.end:.3g}] with step {grid.step:.3g} "
            f"loses mass {tail_mass:.2e} of Hermite-Gauss order {n} "
            f"(width {width:.3g}); widen or refine the grid"
        )

    phase = _I_POWERS[n % 4] if phase_convention else 1.0
    return ModeFunction(grid, values * phase)


def geometric_schmidt_weights(ratio: float, count: int) -> List[float]:
    """
    Truncated geometric Schmidt coefficients ``(1-r) r^n / (1 - r^count)``.

    Args:
        ratio: r in [0, 1)
        count: number of modes kept (>= 1)

    Returns:
        Descending coefficients summing to 1
    """
    if not 0.0 <= ratio < 1.0:
        raise InvalidParameter(f"geometric ratio must lie in [0, 1), got {ratio}")
    if int(count) != count or count < 1:
        raise InvalidParameter(f"mode count must be a positive integer, got {count}")
    n = np.arange(int(count))
    weights = (1.0 - ratio) * ratio**n / (1.0 - ratio ** int(count))
    return [float(w) for w in weights]


def mode_photon_number(G: float, lambda_n: float) -> float:
    """Mean photon number ``sinh^2(G sqrt(lambda_n))`` of one Schmidt mode."""
    if G < 0:
        raise InvalidParameter(f"squeezing parameter must be non-negative, got {G}")
    if not 0.0 <= lambda_n <= 1.0:
        raise InvalidParameter(f"Schmidt coefficient must lie in [0, 1], got {lambda_n}")
    return float(np.sinh(G * np.sqrt(lambda_n)) ** 2)


def mode_weight_fractions(photon_numbers: Sequence[float]) -> List[float]:
    """Weights ``N_n / sum_k N_k`` of the modes."""
    photons = np.asarray(photon_numbers, dtype=float)
    if photons.size == 0:
        raise InvalidParameter("weight fractions of an empty mode list")
    if np.any(photons < 0):
        raise InvalidParameter("photon numbers must be non-negative")
    total = photons.sum()
    if not total > 0:
        raise InvalidParameter("weight fractions are undefined when every mode is empty")
    return [float(v) for v in photons / total]


def schmidt_number(lambdas: Sequence[float]) -> float:
    """Effective number of modes ``1 / sum lambda_n^2``."""
    lambdas = np.asarray(lambdas, dtype=float)
    return float(1.0 / np.sum(lambdas**2))


@dataclass(frozen=True)
class SchmidtSpectrum:
    """Squeezing parameter, Schmidt coefficients and mode geometry of the seed."""

    G: float
    lambdas: Tuple[float, ...]
    mode_center: float = 0.0
    mode_width: float = 1.0

    def __post_init__(self):
        lambdas = tuple(float(v) for v in self.lambdas)
        object.__setattr__(self, "lambdas", lambdas)
        if self.G < 0:
            raise InvalidParameter(f"squeezing parameter must be non-negative, got {self.G}")
        if not lambdas:
            raise InvalidParameter("at least one Schmidt coefficient is required")
        if any(v < 0 for v in lambdas):
            raise InvalidParameter("Schmidt coefficients must be non-negative")
        if abs(sum(lambdas) - 1.0) > LAMBDA_SUM_TOLERANCE:
            raise InvalidParameter(
                f"Schmidt coefficients must sum to 1, got {sum(lambdas):.12f}"
            )
        if any(b > a + 1e-15 for a, b in zip(lambdas, lambdas[1:])):
            raise InvalidParameter("Schmidt coefficients must be non-increasing")
        if not self.mode_width > 0:
            raise InvalidParameter(f"mode width must be positive, got {self.mode_width}")

    @classmethod
    def from_geometric(
        cls, G: float, ratio: float, count: int, **kwargs
    ) -> "SchmidtSpectrum":
        return cls(G=G, lambdas=tuple(geometric_schmidt_weights(ratio, count)), **kwargs)

    @classmethod
    def with_leading_gain(
        cls, leading_gain: float, lambdas: Sequence[float], **kwargs
    ) -> "SchmidtSpectrum":
        """Spectrum whose leading mode has ``G sqrt(lambda_0) = leading_gain``."""
        if not lambdas or lambdas[0] <= 0:
            raise InvalidParameter("leading Schmidt coefficient must be positive")
        return cls(G=leading_gain / np.sqrt(lambdas[0]), lambdas=tuple(lambdas), **kwargs)

    @property
    def mode_count(self) -> int:
        return len(self.lambdas)

    @property
    def gains(self) -> np.ndarray:
        """Per-mode squeezing ``g_n = G sqrt(lambda_n)``."""
        return self.G * np.sqrt(np.asarray(self.lambdas))

    @property
    def photon_numbers(self) -> np.ndarray:
        return np.sinh(self.gains) ** 2

    @property
    def weights(self) -> List[float]:
        return mode_weight_fractions(self.photon_numbers)

    @property
    def schmidt_number(self) -> float:
        return schmidt_number(self.lambdas)


def schmidt_basis(
    spectrum: SchmidtSpectrum, grid: FrequencyGrid, phase_convention: bool = True
) -> List[ModeFunction]:
    """Hermite-Gauss profiles of every Schmidt mode of ``spectrum``."""
    return [
        hermite_gauss_mode(
            n, grid, spectrum.mode_center, spectrum.mode_width, phase_convention
        )
        for n in range(spectrum.mode_count)
    ]
