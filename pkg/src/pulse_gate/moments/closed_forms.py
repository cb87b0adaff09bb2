"""
Closed-form photon numbers and variances of the SFG gate.

Reference relations used to cross-check the moment engine. ``g`` is the
per-mode squeezing ``G sqrt(lambda_n)`` and ``n_in`` the input photon number
``sinh^2 g`` unless noted otherwise.
"""
from typing import Sequence, Tuple

import numpy as np

from ..utils.exceptions import InvalidParameter


def converted_photon_number(theta: float, n_in: float) -> float:
    """SF photons after a single-mode gate, ``sin^2 theta N``."""
    return float(np.sin(theta) ** 2 * n_in)


def remaining_photon_number(theta: float, n_in: float) -> float:
    """Signal photons left after a single-mode gate, ``cos^2 theta N``."""
    return float(np.cos(theta) ** 2 * n_in)


def squeezed_number_variance(g: float) -> float:
    """``Var(N) = 2 N (N + 1)`` of single-mode squeezed vacuum."""
    n = np.sinh(g) ** 2
    return float(2.0 * n * (n + 1.0))


def single_mode_nrf(theta: float, n_in: float, variance_in: float) -> float:
    """NRF between signal and SF modes after a single-mode gate."""
    if n_in <= 0:
        raise InvalidParameter("NRF needs a non-empty signal mode")
    return float(
        (variance_in * np.cos(2 * theta) ** 2 + n_in * np.sin(2 * theta) ** 2) / n_in
    )


def matched_mode_quadratures(theta: float, g: float) -> Tuple[float, float]:
    c2, s2 = np.cos(theta) ** 2, np.sin(theta) ** 2
    return float(0.5 * (s2 + c2 * np.exp(2 * g))), float(0.5 * (s2 + c2 * np.exp(-2 * g)))


def matched_mode_uncertainty(theta: float, g: float) -> float:
    """Product of the matched-mode quadrature variances, ``(1 + sinh^2 g sin^2 2theta)/4``."""
    return float(0.25 * (1.0 + np.sinh(g) ** 2 * np.sin(2 * theta) ** 2))


def matched_mode_uncertainty_printed(theta: float, g: float) -> float:
    """
    The same product with ``g/2`` inside ``sinh^2``.

    Kept to document that this form disagrees with the product of the
    quadrature variances; nothing in the package uses it for results.
    """
    return float(0.25 * (1.0 + np.sinh(g / 2.0) ** 2 * np.sin(2 * theta) ** 2))


def sf_mode_quadratures(theta: float, g: float) -> Tuple[float, float]:
    c2, s2 = np.cos(theta) ** 2, np.sin(theta) ** 2
    return float(0.5 * (c2 + s2 * np.exp(2 * g))), float(0.5 * (c2 + s2 * np.exp(-2 * g)))


def signal_photon_number_in(projections: Sequence[complex], n_in: Sequence[float]) -> float:
    """``sum_k |mu_k|^2 N_k`` for independent input modes."""
    mu2 = np.abs(np.asarray(projections, dtype=complex)) ** 2
    return float(np.sum(mu2 * np.asarray(n_in, dtype=float)))


def signal_photon_number_out(
    theta: float, projections: Sequence[complex], n_in: Sequence[float]
) -> float:
    return float(np.cos(theta) ** 2 * signal_photon_number_in(projections, n_in))


def sf_photon_number_out(
    theta: float, projections: Sequence[complex], n_in: Sequence[float]
) -> float:
    return float(np.sin(theta) ** 2 * signal_photon_number_in(projections, n_in))


def residual_photon_number(projections: Sequence[complex], n_in: Sequence[float]) -> float:
    """Photons in the matched subspace orthogonal to the signal mode."""
    mu2 = np.abs(np.asarray(projections, dtype=complex)) ** 2
    return float(np.sum((1.0 - mu2) * np.asarray(n_in, dtype=float)))


def _two_mode_args(projections, n_in, i):
    mu = np.asarray(projections, dtype=complex)
    n = np.asarray(n_in, dtype=float)
    if mu.shape != (2,) or n.shape != (2,):
        raise InvalidParameter("two-mode relations need exactly two projections and photon numbers")
    if i not in (0, 1):
        raise InvalidParameter(f"mode index must be 0 or 1, got {i}")
    return mu, n, 1 - i


def two_mode_photon_number(
    theta: float, projections: Sequence[complex], n_in: Sequence[float], i: int
) -> float:
    """
    Photons in matched mode ``i`` after a two-mode gate with vacuum SF input.

    ``(1 - |mu_i|^2) N_i + |mu_i|^2 cos^2 theta N_i - |mu_i mu_j|^2 (cos theta - 1)^2 (N_i - N_j)``
    """
    mu, n, j = _two_mode_args(projections, n_in, i)
    a_i, a_j = abs(mu[i]) ** 2, abs(mu[j]) ** 2
    c = np.cos(theta)
    return float(
        (1.0 - a_i) * n[i] + a_i * c**2 * n[i] - a_i * a_j * (c - 1.0) ** 2 * (n[i] - n[j])
    )


def relative_converted_photons(
    theta: float, projections: Sequence[complex], n_in: Sequence[float], i: int
) -> float:
    """Two-mode photon number without its unconverted part, divided by ``N_i``."""
    mu, n, j = _two_mode_args(projections, n_in, i)
    if n[i] <= 0:
        raise InvalidParameter("relative conversion needs a non-empty input mode")
    a_i, a_j = abs(mu[i]) ** 2, abs(mu[j]) ** 2
    c = np.cos(theta)
    return float((a_i * c**2 * n[i] - a_i * a_j * (c - 1.0) ** 2 * (n[i] - n[j])) / n[i])


def balanced_half_conversion(n_in: Sequence[float]) -> float:
    """Photons per matched mode at ``theta = pi/2`` and ``|mu_1| = |mu_2|``."""
    n = np.asarray(n_in, dtype=float)
    return float(n.sum() / 4.0)


def twin_difference_variance(theta: float, g: float) -> float:
    """Signal/idler number-difference variance after single-mode matching of the signal."""
    s2 = np.sin(theta) ** 2
    return float(s2 * np.sinh(g) ** 2 * (np.cos(theta) ** 2 + s2 * np.cosh(g) ** 2))
