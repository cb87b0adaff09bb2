"""
Gaussian second-moment engine.

A zero-mean Gaussian state is held as the normal moments
``M[m][n] = <a_m^dag a_n>`` and the anomalous moments ``S[m][n] = <a_m a_n>``.
Quadratures are ``X = (a + a^dag)/sqrt(2)`` and ``P = (a - a^dag)/(i sqrt(2))``
with vacuum variance 1/2. Photon-number fluctuations follow from Wick
factorization.
"""
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.linalg import block_diag

from ..gate.gate_core import GateConfig, GateMatrix
from ..modes.schmidt_modes import SchmidtSpectrum
from ..utils.exceptions import InvalidParameter, InvalidState, ModeIndexError
from ..utils.logging_utils import log_debug

SF_LABEL = "SF"
PHYSICALITY_TOLERANCE = 1e-9
HERMITICITY_TOLERANCE = 1e-9

Mode = Union[int, str]


def signal_label(order: int) -> str:
    return f"A{order}"


def idler_label(order: int) -> str:
    return f"B{order}"


@dataclass(frozen=True, eq=False)
class GaussianMoments:
    """Normal and anomalous moment matrices of a zero-mean Gaussian state."""

    normal: np.ndarray
    anomalous: np.ndarray
    labels: Tuple[str, ...]

    def __post_init__(self):
        normal = np.array(self.normal, dtype=complex)
        anomalous = np.array(self.anomalous, dtype=complex)
        labels = tuple(str(v) for v in self.labels)
        n = len(labels)

        if normal.shape != (n, n) or anomalous.shape != (n, n):
            raise InvalidParameter(
                f"moment matrices {normal.shape}/{anomalous.shape} do not match {n} labels"
            )
        if len(set(labels)) != n:
            raise InvalidParameter(f"mode labels must be unique, got {list(labels)}")

        scale = max(1.0, float(np.max(np.abs(normal), initial=0.0)))
        if np.max(np.abs(normal - normal.conj().T), initial=0.0) > HERMITICITY_TOLERANCE * scale:
            raise InvalidState("normal moment matrix is not Hermitian")
        scale = max(1.0, float(np.max(np.abs(anomalous), initial=0.0)))
        if np.max(np.abs(anomalous - anomalous.T), initial=0.0) > HERMITICITY_TOLERANCE * scale:
            raise InvalidState("anomalous moment matrix is not symmetric")

        normal.setflags(write=False)
        anomalous.setflags(write=False)
        object.__setattr__(self, "normal", normal)
        object.__setattr__(self, "anomalous", anomalous)
        object.__setattr__(self, "labels", labels)

    @property
    def mode_count(self) -> int:
        return len(self.labels)

    def index_of(self, mode: Mode) -> int:
        """Resolve a label or an integer index to an index."""
        if isinstance(mode, (int, np.integer)) and not isinstance(mode, bool):
            if not 0 <= mode < self.mode_count:
                raise ModeIndexError(
                    f"mode index {mode} out of range for {self.mode_count} modes"
                )
            return int(mode)
        try:
            return self.labels.index(str(mode))
        except ValueError:
            raise ModeIndexError(f"unknown mode label {mode!r}, known: {list(self.labels)}")

    def subset(self, modes: Sequence[Mode]) -> "GaussianMoments":
        """Reduced state of the listed modes, in the listed order."""
        index = [self.index_of(m) for m in modes]
        if len(set(index)) != len(index):
            raise ModeIndexError(f"repeated modes in subset {list(modes)}")
        ix = np.ix_(index, index)
        return GaussianMoments(
            self.normal[ix], self.anomalous[ix], tuple(self.labels[i] for i in index)
        )

    def direct_sum(self, other: "GaussianMoments") -> "GaussianMoments":
        return GaussianMoments(
            block_diag(self.normal, other.normal),
            block_diag(self.anomalous, other.anomalous),
            self.labels + other.labels,
        )

    def relabel(self, labels: Sequence[str]) -> "GaussianMoments":
        return GaussianMoments(self.normal, self.anomalous, tuple(labels))

    def quadrature_covariance(self) -> np.ndarray:
        """
        Symmetrized quadrature covariance in (x_1..x_n, p_1..p_n) ordering.

        Returns:
            Real 2n x 2n matrix, vacuum is I/2
        """
        n = self.mode_count
        identity = 0.5 * np.eye(n)
        m, s = self.normal, self.anomalous
        v_xx = identity + m.real + s.real
        v_pp = identity + m.real - s.real
        v_xp = s.imag + m.imag
        return np.block([[v_xx, v_xp], [v_xp.T, v_pp]])

    def min_symplectic_eigenvalue(self) -> float:
        n = self.mode_count
        omega = np.block([[np.zeros((n, n)), np.eye(n)], [-np.eye(n), np.zeros((n, n))]])
        eigenvalues = np.linalg.eigvals(1j * omega @ self.quadrature_covariance())
        return float(np.min(np.abs(eigenvalues)))

    def validate(self, tolerance: float = PHYSICALITY_TOLERANCE) -> "GaussianMoments":
        """
        Check positivity and the uncertainty relation.

        Raises:
            InvalidState: the moments do not describe a physical state
        """
        eigenvalues = np.linalg.eigvalsh(self.normal)
        scale = max(1.0, float(np.max(np.abs(eigenvalues))))
        if eigenvalues.min() < -tolerance * scale:
            raise InvalidState(
                f"normal moment matrix has negative eigenvalue {eigenvalues.min():.3e}"
            )
        nu = self.min_symplectic_eigenvalue()
        if nu < 0.5 - tolerance * scale:
            raise InvalidState(
                f"uncertainty relation violated: minimum symplectic eigenvalue {nu:.12f} < 1/2"
            )
        return self


def vacuum_state(labels: Sequence[str]) -> GaussianMoments:
    n = len(labels)
    return GaussianMoments(np.zeros((n, n)), np.zeros((n, n)), tuple(labels))


def squeezed_vacuum_state(
    spectrum: SchmidtSpectrum, include_sf_vacuum: bool = True
) -> GaussianMoments:
    """
    Single-mode squeezed vacuum in every Schmidt mode.

    Args:
        spectrum: Seed squeezing parameter and Schmidt coefficients
        include_sf_vacuum: Prepend the SF mode in vacuum (index 0)

    Returns:
        GaussianMoments labelled [SF,] A0, A1, ...
    """
    return squeezed_vacuum_from_gains(spectrum.gains, include_sf_vacuum)


def squeezed_vacuum_from_gains(
    gains: Sequence[float], include_sf_vacuum: bool = True
) -> GaussianMoments:
    """Single-mode squeezed vacuum with squeezing ``gains[n]`` in mode A_n."""
    gains = np.asarray(gains, dtype=float)
    if gains.ndim != 1 or np.any(gains < 0):
        raise InvalidParameter("gains must be a list of non-negative numbers")
    labels = [signal_label(n) for n in range(gains.size)]
    state = GaussianMoments(
        np.diag(np.sinh(gains) ** 2),
        np.diag(np.sinh(gains) * np.cosh(gains)),
        tuple(labels),
    )
    if include_sf_vacuum:
        state = vacuum_state([SF_LABEL]).direct_sum(state)
    return state


def twin_beam_state(
    spectrum: SchmidtSpectrum, include_sf_vacuum: bool = False
) -> GaussianMoments:
    """
    Two-mode squeezed vacuum pairing signal mode A_n with idler mode B_n.

    Returns:
        GaussianMoments labelled [SF,] A0..A(K-1), B0..B(K-1)
    """
    return twin_beam_from_gains(spectrum.gains, include_sf_vacuum)


def twin_beam_from_gains(
    gains: Sequence[float], include_sf_vacuum: bool = False
) -> GaussianMoments:
    gains = np.asarray(gains, dtype=float)
    if gains.ndim != 1 or np.any(gains < 0):
        raise InvalidParameter("gains must be a list of non-negative numbers")
    k = gains.size
    photons = np.diag(np.sinh(gains) ** 2)
    pair = np.diag(np.sinh(gains) * np.cosh(gains))
    zeros = np.zeros((k, k))

    labels = [signal_label(n) for n in range(k)] + [idler_label(n) for n in range(k)]
    state = GaussianMoments(
        np.block([[photons, zeros], [zeros, photons]]),
        np.block([[zeros, pair], [pair, zeros]]),
        tuple(labels),
    )
    if include_sf_vacuum:
        state = vacuum_state([SF_LABEL]).direct_sum(state)
    return state


def _embed(gate: GateMatrix, index: List[int], mode_count: int) -> np.ndarray:
    full = np.eye(mode_count, dtype=complex)
    full[np.ix_(index, index)] = gate.entries
    return full


def apply_gate(
    state: GaussianMoments, gate: GateMatrix, mode_map: Sequence[Mode]
) -> GaussianMoments:
    """
    Propagate the moments through ``a_out = U a_in`` on the mapped modes.

    Args:
        state: Input state
        gate: Gate matrix, row/column k acts on mode ``mode_map[k]``
        mode_map: State modes (labels or indices) the gate acts on

    Returns:
        New state with ``M -> U* M U^T`` and ``S -> U S U^T``

    Raises:
        ModeIndexError: a mode is unknown or listed twice
        InvalidParameter: gate dimension differs from the map length
    """
    index = [state.index_of(m) for m in mode_map]
    if len(set(index)) != len(index):
        raise ModeIndexError(f"mode map is not injective: {list(mode_map)}")
    if gate.dim != len(index):
        raise InvalidParameter(
            f"gate of dimension {gate.dim} cannot act on {len(index)} mapped modes"
        )
    if np.array_equal(gate.entries, np.eye(gate.dim)):
        return state

    u = _embed(gate, index, state.mode_count)
    normal = u.conj() @ state.normal @ u.T
    anomalous = u @ state.anomalous @ u.T
    log_debug(f"gate of dimension {gate.dim} applied to modes {list(mode_map)}")
    # 数値誤差で崩れたエルミート性・対称性を戻す
    return GaussianMoments(
        0.5 * (normal + normal.conj().T), 0.5 * (anomalous + anomalous.T), state.labels
    )


def photon_number(state: GaussianMoments, mode: Mode) -> float:
    i = state.index_of(mode)
    return float(state.normal[i, i].real)


def operator_photon_number(
    state: GaussianMoments, coefficients: Sequence[complex], modes: Sequence[Mode]
) -> float:
    """Mean photon number of the broadband mode ``sum_k c_k a_k``."""
    index = [state.index_of(m) for m in modes]
    c = np.asarray(coefficients, dtype=complex)
    if c.shape != (len(index),):
        raise InvalidParameter(f"{c.size} coefficients given for {len(index)} modes")
    block = state.normal[np.ix_(index, index)]
    return float(np.real(c.conj() @ block @ c))


def signal_mode_photon_number(
    state: GaussianMoments, projections: Sequence[complex], modes: Sequence[Mode]
) -> float:
    """Photon number ``<D^dag D>`` of the signal mode ``D = sum_k mu_k A_k``."""
    return operator_photon_number(state, projections, modes)


def quadrature_variances(state: GaussianMoments, mode: Mode) -> Tuple[float, float]:
    i = state.index_of(mode)
    m = state.normal[i, i].real
    s = state.anomalous[i, i].real
    return float(0.5 + m + s), float(0.5 + m - s)


def uncertainty_product(state: GaussianMoments, mode: Mode) -> float:
    dx, dp = quadrature_variances(state, mode)
    return dx * dp


def number_variance(state: GaussianMoments, mode: Mode) -> float:
    i = state.index_of(mode)
    m = state.normal[i, i].real
    return float(m + m**2 + abs(state.anomalous[i, i]) ** 2)


def number_covariance(state: GaussianMoments, mode_a: Mode, mode_b: Mode) -> float:
    i, j = state.index_of(mode_a), state.index_of(mode_b)
    if i == j:
        return number_variance(state, i)
    return float(abs(state.normal[i, j]) ** 2 + abs(state.anomalous[i, j]) ** 2)


def number_difference_variance(state: GaussianMoments, mode_a: Mode, mode_b: Mode) -> float:
    """Variance of ``N_a - N_b``."""
    i, j = state.index_of(mode_a), state.index_of(mode_b)
    if i == j:
        raise InvalidParameter("number difference needs two distinct modes")
    return (
        number_variance(state, i)
        + number_variance(state, j)
        - 2.0 * number_covariance(state, i, j)
    )


def nrf(state: GaussianMoments, mode_a: Mode, mode_b: Mode) -> float:
    """
    Noise reduction factor ``Var(N_a - N_b) / (<N_a> + <N_b>)``.

    Raises:
        InvalidParameter: the modes coincide or both are empty
    """
    variance = number_difference_variance(state, mode_a, mode_b)
    total = photon_number(state, mode_a) + photon_number(state, mode_b)
    if total <= 0.0:
        raise InvalidParameter("NRF is undefined when both modes are in vacuum")
    return variance / total


@dataclass(frozen=True, eq=False)
class Observables:
    """Per-mode means and variances plus the pairwise number covariances."""

    labels: Tuple[str, ...]
    photon_numbers: np.ndarray
    quadrature_variances: np.ndarray
    number_covariance: np.ndarray
    normal: np.ndarray = field(repr=False)
    anomalous: np.ndarray = field(repr=False)

    def _index(self, mode: Mode) -> int:
        if isinstance(mode, (int, np.integer)) and not isinstance(mode, bool):
            if not 0 <= mode < len(self.labels):
                raise ModeIndexError(
                    f"mode index {mode} out of range for {len(self.labels)} modes"
                )
            return int(mode)
        try:
            return self.labels.index(str(mode))
        except ValueError:
            raise ModeIndexError(f"unknown mode label {mode!r}, known: {list(self.labels)}")

    def number_difference_variance(self, mode_a: Mode, mode_b: Mode) -> float:
        i, j = self._index(mode_a), self._index(mode_b)
        c = self.number_covariance
        return float(c[i, i] + c[j, j] - 2.0 * c[i, j])

    def nrf(self, mode_a: Mode, mode_b: Mode) -> float:
        i, j = self._index(mode_a), self._index(mode_b)
        total = self.photon_numbers[i] + self.photon_numbers[j]
        if total <= 0.0:
            raise InvalidParameter("NRF is undefined when both modes are in vacuum")
        return self.number_difference_variance(i, j) / float(total)

    def to_dict(self) -> Dict[str, object]:
        modes = []
        for k, label in enumerate(self.labels):
            dx, dp = self.quadrature_variances[k]
            modes.append(
                {
                    "label": label,
                    "photon_number": float(self.photon_numbers[k]),
                    "var_x": float(dx),
                    "var_p": float(dp),
                    "number_variance": float(self.number_covariance[k, k]),
                }
            )
        return {
            "modes": modes,
            "number_covariance": self.number_covariance.tolist(),
            "total_photon_number": float(np.sum(self.photon_numbers)),
        }


def observables(state: GaussianMoments) -> Observables:
    n = state.mode_count
    m_diag = state.normal.diagonal().real
    s_diag = state.anomalous.diagonal().real
    variances = np.column_stack([0.5 + m_diag + s_diag, 0.5 + m_diag - s_diag])
    covariance = np.abs(state.normal) ** 2 + np.abs(state.anomalous) ** 2
    covariance[np.diag_indices(n)] = (
        m_diag + m_diag**2 + np.abs(state.anomalous.diagonal()) ** 2
    )
    return Observables(
        labels=state.labels,
        photon_numbers=m_diag.copy(),
        quadrature_variances=variances,
        number_covariance=covariance,
        normal=state.normal,
        anomalous=state.anomalous,
    )


@dataclass(frozen=True)
class ConservationReport:
    """Residuals of the photon-number conservation laws of one gate pass."""

    signal_photons_in: float
    signal_photons_out: float
    sf_photons_in: float
    sf_photons_out: float
    signal_sf_residual: float
    residual_mode_photons_in: float
    residual_mode_closed_form: Optional[float]
    residual_mode_residual: float
    residual_closed_form_residual: Optional[float]
    total_photon_residual: float

    @property
    def max_residual(self) -> float:
        values = [
            self.signal_sf_residual,
            self.residual_mode_residual,
            self.total_photon_residual,
        ]
        if self.residual_closed_form_residual is not None:
            values.append(self.residual_closed_form_residual)
        return max(abs(v) for v in values)

    def to_dict(self) -> Dict[str, Optional[float]]:
        return {
            "signal_photons_in": self.signal_photons_in,
            "signal_photons_out": self.signal_photons_out,
            "sf_photons_in": self.sf_photons_in,
            "sf_photons_out": self.sf_photons_out,
            "signal_sf_residual": self.signal_sf_residual,
            "residual_mode_photons_in": self.residual_mode_photons_in,
            "residual_mode_closed_form": self.residual_mode_closed_form,
            "residual_mode_residual": self.residual_mode_residual,
            "residual_closed_form_residual": self.residual_closed_form_residual,
            "total_photon_residual": self.total_photon_residual,
            "max_residual": self.max_residual,
        }


def default_mode_map(gate_config: GateConfig) -> List[str]:
    """SF mode followed by the matched signal Schmidt modes."""
    return [SF_LABEL] + [signal_label(n) for n in gate_config.matched_orders]


def conservation_report(
    state_in: GaussianMoments,
    state_out: GaussianMoments,
    gate_config: GateConfig,
    mode_map: Optional[Sequence[Mode]] = None,
) -> ConservationReport:
    """
    Check photon conservation between the input and output of one gate.

    Signal plus SF photons are conserved, and so is the photon number of the
    matched subspace orthogonal to the signal mode. For a diagonal input on the
    matched modes the latter equals ``sum_k (1 - |mu_k|^2) N_k``.
    """
    if state_in.labels != state_out.labels:
        raise InvalidParameter("input and output states have different mode layouts")
    mode_map = list(mode_map) if mode_map is not None else default_mode_map(gate_config)
    sf, matched = mode_map[0], mode_map[1:]
    mu = np.asarray(gate_config.projections, dtype=complex)

    def matched_total(state: GaussianMoments) -> float:
        return sum(photon_number(state, m) for m in matched)

    signal_in = signal_mode_photon_number(state_in, mu, matched)
    signal_out = signal_mode_photon_number(state_out, mu, matched)
    sf_in = photon_number(state_in, sf)
    sf_out = photon_number(state_out, sf)
    residual_in = matched_total(state_in) - signal_in
    residual_out = matched_total(state_out) - signal_out

    index = [state_in.index_of(m) for m in matched]
    block = state_in.normal[np.ix_(index, index)]
    closed_form = None
    closed_form_residual = None
    if np.allclose(block, np.diag(block.diagonal()), atol=1e-12 * max(1.0, np.abs(block).max())):
        closed_form = float(np.sum((1.0 - np.abs(mu) ** 2) * block.diagonal().real))
        closed_form_residual = residual_in - closed_form

    report = ConservationReport(
        signal_photons_in=signal_in,
        signal_photons_out=signal_out,
        sf_photons_in=sf_in,
        sf_photons_out=sf_out,
        signal_sf_residual=(signal_out + sf_out) - (signal_in + sf_in),
        residual_mode_photons_in=residual_in,
        residual_mode_closed_form=closed_form,
        residual_mode_residual=residual_out - residual_in,
        residual_closed_form_residual=closed_form_residual,
        total_photon_residual=float(
            np.trace(state_out.normal).real - np.trace(state_in.normal).real
        ),
    )
    log_debug(f"conservation residual {report.max_residual:.3e}")
    return report
