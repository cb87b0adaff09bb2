"""
SFG pulse-gate mode transformations.

Mode ordering: index 0 is the sum-frequency mode C, the matched Schmidt
modes follow in the order of ``matched_orders``. The gate acts on
annihilation operators as ``a_out = U a_in``.
"""
from dataclasses import dataclass
from typing import List, Sequence, Tuple, Union

import numpy as np

from ..modes.schmidt_modes import ModeFunction
from ..utils.exceptions import (
    GridError,
    InvalidParameter,
    NormalizationError,
    UnsupportedModeCount,
)
from ..utils.logging_utils import log_debug, log_info, log_warning

# |sum |mu|^2 - 1| above which projections are rejected instead of renormalized
NORMALIZATION_TOLERANCE = 1e-6
UNITARITY_TOLERANCE = 1e-12


def normalize_projections(
    projections: Sequence[complex], tolerance: float = NORMALIZATION_TOLERANCE
) -> Tuple[complex, ...]:
    """
    Rescale ``mu`` to unit norm.

    Args:
        projections: Complex projections mu_n of the signal mode
        tolerance: Largest accepted |sum |mu_n|^2 - 1|

    Returns:
        Projections with sum |mu_n|^2 = 1

    Raises:
        NormalizationError: the deviation exceeds ``tolerance``
    """
    mu = np.asarray(projections, dtype=complex)
    if mu.ndim != 1 or mu.size == 0:
        raise InvalidParameter("at least one projection is required")
    total = float(np.sum(np.abs(mu) ** 2))
    if abs(total - 1.0) > tolerance:
        raise NormalizationError(
            "projections violate the normalization condition Σ|μn|² = 1: "
            f"Σ|μn|² = {total:.9f} (tolerance {tolerance:g})"
        )
    if abs(total - 1.0) > 1e-12:
        log_warning(f"projections renormalized (Σ|μn|² = {total:.12f})")
        mu = mu / np.sqrt(total)
    return tuple(complex(v) for v in mu)


@dataclass(frozen=True)
class GateConfig:
    """Conversion angle and signal-mode projections of one gate."""

    theta: float
    projections: Tuple[complex, ...]
    matched_orders: Tuple[int, ...]

    def __post_init__(self):
        projections = tuple(complex(v) for v in self.projections)
        orders = tuple(int(n) for n in self.matched_orders)
        object.__setattr__(self, "projections", projections)
        object.__setattr__(self, "matched_orders", orders)
        object.__setattr__(self, "theta", float(self.theta))

        if not np.isfinite(self.theta):
            raise InvalidParameter(f"theta must be finite, got {self.theta}")
        if len(projections) != len(orders):
            raise InvalidParameter(
                f"{len(projections)} projections given for {len(orders)} matched orders"
            )
        if len(set(orders)) != len(orders):
            raise InvalidParameter(f"matched orders must be distinct, got {list(orders)}")
        if any(n < 0 for n in orders):
            raise InvalidParameter(f"matched orders must be non-negative, got {list(orders)}")
        total = sum(abs(v) ** 2 for v in projections)
        if abs(total - 1.0) > NORMALIZATION_TOLERANCE:
            raise NormalizationError(
                "projections violate the normalization condition Σ|μn|² = 1: "
                f"Σ|μn|² = {total:.9f}"
            )

    @classmethod
    def from_polar(
        cls,
        theta: float,
        magnitudes: Sequence[float],
        phases: Sequence[float],
        matched_orders: Sequence[int],
    ) -> "GateConfig":
        if len(magnitudes) != len(phases):
            raise InvalidParameter("magnitudes and phases must have the same length")
        mu = [m * np.exp(1j * p) for m, p in zip(magnitudes, phases)]
        return cls(theta=theta, projections=tuple(mu), matched_orders=tuple(matched_orders))

    @property
    def mode_count(self) -> int:
        return len(self.projections)

    @property
    def phases(self) -> List[float]:
        return [float(np.angle(v)) for v in self.projections]

    @property
    def magnitudes(self) -> List[float]:
        return [abs(v) for v in self.projections]

    def normalized(self) -> "GateConfig":
        return GateConfig(
            theta=self.theta,
            projections=normalize_projections(self.projections),
            matched_orders=self.matched_orders,
        )


@dataclass(frozen=True, eq=False)
class GateMatrix:
    """Square complex mode-transformation matrix, row/column 0 is the SF mode."""

    entries: np.ndarray

    def __post_init__(self):
        entries = np.array(self.entries, dtype=complex)
        if entries.ndim != 2 or entries.shape[0] != entries.shape[1]:
            raise InvalidParameter(f"gate matrix must be square, got shape {entries.shape}")
        entries.setflags(write=False)
        object.__setattr__(self, "entries", entries)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def is_unitary(self, atol: float = UNITARITY_TOLERANCE) -> bool:
        residual = self.entries @ self.entries.conj().T - np.eye(self.dim)
        return bool(np.max(np.abs(residual)) < atol)

    def dagger(self) -> "GateMatrix":
        return GateMatrix(self.entries.conj().T)

    def __matmul__(self, other: Union["GateMatrix", np.ndarray]):
        if isinstance(other, GateMatrix):
            if other.dim != self.dim:
                raise InvalidParameter(f"cannot compose gates of dim {self.dim} and {other.dim}")
            return GateMatrix(self.entries @ other.entries)
        return self.entries @ np.asarray(other)

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.entries, dtype=dtype)


@dataclass(frozen=True)
class ProjectionResult:
    """Projections ``mu_n = <u_n|Phi>`` and the unmatched remainder ``1 - sum |mu_n|^2``."""

    coefficients: Tuple[complex, ...]
    unmatched: float

    def is_complete(self, tolerance: float = NORMALIZATION_TOLERANCE) -> bool:
        return self.unmatched <= tolerance


def projections(
    signal_mode: ModeFunction,
    schmidt_modes: Sequence[ModeFunction],
    tolerance: float = NORMALIZATION_TOLERANCE,
) -> ProjectionResult:
    """
    Expand the SFG signal mode on Schmidt modes.

    Args:
        signal_mode: Signal-mode profile Phi
        schmidt_modes: Schmidt modes u_n on the same grid
        tolerance: Remainder above which the shortfall is reported

    Returns:
        ProjectionResult with the complex projections in input order

    Raises:
        GridError: a mode is sampled on another grid
    """
    if not schmidt_modes:
        raise InvalidParameter("at least one Schmidt mode is required")
    for k, mode in enumerate(schmidt_modes):
        if not mode.grid.same_as(signal_mode.grid):
            raise GridError(f"Schmidt mode {k} is sampled on a different grid")

    coefficients = tuple(mode.overlap(signal_mode) for mode in schmidt_modes)
    unmatched = 1.0 - sum(abs(v) ** 2 for v in coefficients)
    if unmatched > tolerance:
        log_info(
            f"signal mode not covered by {len(schmidt_modes)} Schmidt modes: "
            f"unmatched remainder {unmatched:.3e}"
        )
    return ProjectionResult(coefficients=coefficients, unmatched=float(unmatched))


def single_mode_gate(theta: float) -> GateMatrix:
    """Beamsplitter rotation ``[[cos, sin], [-sin, cos]]`` on (C, A)."""
    c, s = np.cos(theta), np.sin(theta)
    return GateMatrix(np.array([[c, s], [-s, c]], dtype=complex))


def multimode_gate(
    theta: float,
    projections: Sequence[complex],
    tolerance: float = NORMALIZATION_TOLERANCE,
) -> GateMatrix:
    """
    Gate coupling the SF mode to M matched Schmidt modes.

    Row 0 is ``[cos, mu_1 sin, ..., mu_M sin]``, row n is
    ``[-mu_n* sin, delta_nm + mu_n* mu_m (cos - 1)]``.

    Args:
        theta: Conversion angle
        projections: mu_n of the matched modes
        tolerance: Normalization tolerance for ``projections``

    Returns:
        Unitary GateMatrix of dimension 1 + M
    """
    mu = np.asarray(normalize_projections(projections, tolerance), dtype=complex)
    c, s = np.cos(theta), np.sin(theta)
    dim = 1 + mu.size

    entries = np.zeros((dim, dim), dtype=complex)
    entries[0, 0] = c
    entries[0, 1:] = mu * s
    entries[1:, 0] = -mu.conj() * s
    entries[1:, 1:] = np.eye(mu.size) + np.outer(mu.conj(), mu) * (c - 1.0)
    gate = GateMatrix(entries)
    log_debug(f"multimode gate theta={theta:.6g} M={mu.size}")
    return gate


def gate_from_config(gate_config: GateConfig) -> GateMatrix:
    return multimode_gate(gate_config.theta, gate_config.projections)


def _require_two_modes(projections: Sequence[complex]) -> np.ndarray:
    mu = np.asarray(projections, dtype=complex)
    if mu.shape != (2,):
        raise UnsupportedModeCount(
            f"operation is defined for exactly two matched modes, got {mu.size}"
        )
    return mu


def residual_mode(
    projections: Sequence[complex], schmidt_modes: Sequence[ModeFunction]
) -> ModeFunction:
    """
    Mode ``-mu_2* u_1 + mu_1* u_2`` orthogonal to the signal mode.

    Args:
        projections: (mu_1, mu_2)
        schmidt_modes: (u_1, u_2)

    Raises:
        UnsupportedModeCount: not exactly two matched modes
    """
    mu = _require_two_modes(normalize_projections(projections))
    if len(schmidt_modes) != 2:
        raise UnsupportedModeCount(
            f"residual mode needs exactly two Schmidt modes, got {len(schmidt_modes)}"
        )
    first, second = schmidt_modes
    if not first.grid.same_as(second.grid):
        raise GridError("Schmidt modes are sampled on different grids")
    values = -np.conj(mu[1]) * first.values + np.conj(mu[0]) * second.values
    return ModeFunction(first.grid, values).normalized()


def residual_operator_vector(projections: Sequence[complex]) -> np.ndarray:
    """Coefficients of R = -mu_2* A_1 + mu_1* A_2 in the (C, A_1, A_2) basis."""
    mu = _require_two_modes(normalize_projections(projections))
    return np.array([0.0, -np.conj(mu[1]), np.conj(mu[0])], dtype=complex)


def decompose_gate(
    theta: float, projections: Sequence[complex]
) -> Tuple[GateMatrix, GateMatrix, GateMatrix]:
    """
    Factor the two-mode gate into a basis change, a rotation and its inverse.

    The embedding maps (C, A_1, A_2) to (C, D, R) with D the signal mode and R
    the residual mode; the rotation turns (C, D) by ``theta`` and leaves R
    fixed.

    Returns:
        (embedding, rotation, extraction) with
        ``extraction @ rotation @ embedding == multimode_gate(theta, projections)``
    """
    mu = _require_two_modes(normalize_projections(projections))
    c, s = np.cos(theta), np.sin(theta)

    embedding = np.array(
        [
            [1.0, 0.0, 0.0],
            [0.0, mu[0], mu[1]],
            [0.0, -np.conj(mu[1]), np.conj(mu[0])],
        ],
        dtype=complex,
    )
    rotation = np.array([[c, s, 0.0], [-s, c, 0.0], [0.0, 0.0, 1.0]], dtype=complex)
    return (
        GateMatrix(embedding),
        GateMatrix(rotation),
        GateMatrix(embedding.conj().T),
    )
