"""
Truncated Fock-space oracle.

Builds the gate unitary and the squeezed seeds on a truncated multimode Fock
space and evaluates expectations exactly, so that the Gaussian moment engine
can be checked at small squeezing.

Basis ordering: occupation tuples in ``np.ndindex`` order (C order), mode 0
is the most significant digit.
"""
from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from scipy import sparse
from scipy.linalg import expm
from scipy.sparse.linalg import expm_multiply

from ..gate.gate_core import multimode_gate, normalize_projections
from ..moments.moments_engine import (
    SF_LABEL,
    GaussianMoments,
    Observables,
    apply_gate,
    idler_label,
    observables,
    signal_label,
    squeezed_vacuum_from_gains,
    twin_beam_from_gains,
)
from ..utils.exceptions import InvalidParameter, TruncationError
from ..utils.logging_utils import log_debug, log_info

MAX_MODES = 4
MAX_DIMENSION = 10**6
DENSE_LIMIT = 4096
DEFAULT_CUTOFF = 24
LEAK_TOLERANCE = 1e-8
MAX_ORACLE_GAIN = 0.5

SCENARIO_KINDS = ("single", "two_mode", "twin_single", "twin_swap")


def _lowering(cutoff: int) -> sparse.csc_matrix:
    return sparse.diags(np.sqrt(np.arange(1, cutoff + 1, dtype=float)), 1, format="csc")


@dataclass(frozen=True)
class FockSpace:
    """Product of ``mode_count`` oscillators truncated at ``cutoff`` photons each."""

    mode_count: int
    cutoff: int

    def __post_init__(self):
        if not 1 <= self.mode_count <= MAX_MODES:
            raise InvalidParameter(
                f"Fock oracle supports 1 to {MAX_MODES} modes, got {self.mode_count}"
            )
        if self.cutoff < 1:
            raise InvalidParameter(f"cutoff must be at least 1, got {self.cutoff}")
        if self.dimension > MAX_DIMENSION:
            raise TruncationError(
                f"Fock space dimension {self.dimension} exceeds {MAX_DIMENSION}"
            )

    @property
    def dimension(self) -> int:
        return (self.cutoff + 1) ** self.mode_count

    @property
    def shape(self) -> Tuple[int, ...]:
        return (self.cutoff + 1,) * self.mode_count

    def index(self, occupations: Sequence[int]) -> int:
        return int(np.ravel_multi_index(tuple(occupations), self.shape))

    @cached_property
    def occupations(self) -> np.ndarray:
        """(dimension, mode_count) occupation numbers of every basis state."""
        return np.array(list(np.ndindex(*self.shape)), dtype=float).reshape(
            self.dimension, self.mode_count
        )

    @cached_property
    def annihilators(self) -> List[sparse.csc_matrix]:
        single = _lowering(self.cutoff)
        identity = sparse.identity(self.cutoff + 1, format="csc")
        operators = []
        for k in range(self.mode_count):
            op = None
            for j in range(self.mode_count):
                factor = single if j == k else identity
                op = factor if op is None else sparse.kron(op, factor, format="csc")
            operators.append(op)
        return operators

    def annihilator(self, mode: int) -> sparse.csc_matrix:
        if not 0 <= mode < self.mode_count:
            raise InvalidParameter(f"mode {mode} out of range for {self.mode_count} modes")
        return self.annihilators[mode]


@dataclass(frozen=True, eq=False)
class FockState:
    """State vector on a Fock space with the norm lost to truncation."""

    space: FockSpace
    amplitudes: np.ndarray
    leak: float = 0.0

    def __post_init__(self):
        amplitudes = np.asarray(self.amplitudes, dtype=complex)
        if amplitudes.shape != (self.space.dimension,):
            raise InvalidParameter(
                f"state has {amplitudes.shape} amplitudes, space has dimension {self.space.dimension}"
            )
        object.__setattr__(self, "amplitudes", amplitudes)

    @classmethod
    def basis_state(cls, space: FockSpace, occupations: Sequence[int]) -> "FockState":
        amplitudes = np.zeros(space.dimension, dtype=complex)
        amplitudes[space.index(occupations)] = 1.0
        return cls(space, amplitudes)

    @classmethod
    def vacuum(cls, space: FockSpace) -> "FockState":
        return cls.basis_state(space, (0,) * space.mode_count)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def parity_weight(self, parity: int) -> float:
        """Probability of a total photon number with the given parity."""
        total = self.space.occupations.sum(axis=1).astype(int)
        return float(self.probabilities()[total % 2 == parity % 2].sum())


@dataclass(frozen=True, eq=False)
class FockGate:
    """``exp(generator)`` on a Fock space, dense for small dimensions."""

    space: FockSpace
    generator: sparse.csc_matrix = field(repr=False)

    @cached_property
    def _dense(self) -> np.ndarray:
        return expm(self.generator.toarray())

    def apply(self, state: FockState) -> FockState:
        if state.space != self.space:
            raise InvalidParameter("state and gate live on different Fock spaces")
        if self.space.dimension <= DENSE_LIMIT:
            amplitudes = self._dense @ state.amplitudes
        else:
            amplitudes = expm_multiply(self.generator, state.amplitudes)
        return FockState(self.space, amplitudes, state.leak)

    def matrix(self) -> np.ndarray:
        if self.space.dimension > DENSE_LIMIT:
            raise TruncationError(
                f"dense gate matrix of dimension {self.space.dimension} exceeds {DENSE_LIMIT}"
            )
        return self._dense


def gate_unitary(
    space: FockSpace,
    theta: float,
    projections: Sequence[complex],
    sf_mode: Optional[int] = 0,
    matched_modes: Optional[Sequence[int]] = None,
) -> FockGate:
    """
    SFG gate ``exp{theta (D C^dag - D^dag C)}`` with ``D = sum_k mu_k a_k``.

    Args:
        space: Fock space
        theta: Conversion angle
        projections: mu_k of the matched modes
        sf_mode: Index of the SF mode C; None builds the gate without C,
            which is exact for ``theta = k pi`` with C in vacuum and gives
            ``exp(i theta D^dag D)``
        matched_modes: Indices of the matched modes, default the modes after C

    Returns:
        FockGate acting on ``space``
    """
    mu = np.asarray(normalize_projections(projections), dtype=complex)
    if matched_modes is None:
        start = 0 if sf_mode is None else sf_mode + 1
        matched_modes = list(range(start, start + mu.size))
    matched_modes = [int(m) for m in matched_modes]
    if len(matched_modes) != mu.size:
        raise InvalidParameter(f"{mu.size} projections given for {len(matched_modes)} modes")
    used = matched_modes + ([] if sf_mode is None else [int(sf_mode)])
    if len(set(used)) != len(used):
        raise InvalidParameter(f"gate modes overlap: {used}")

    d = sum(m * space.annihilator(k) for m, k in zip(mu, matched_modes))
    if sf_mode is None:
        turns = theta / np.pi
        if abs(turns - round(turns)) > 1e-12:
            raise InvalidParameter(
                f"a gate without SF mode is only defined at theta = k pi, got {theta}"
            )
        generator = 1j * theta * (d.conj().T @ d)
    else:
        c = space.annihilator(int(sf_mode))
        generator = theta * (d @ c.conj().T - d.conj().T @ c)
    return FockGate(space, sparse.csc_matrix(generator))


def _squeezed_factor(g: float, cutoff: int, padded: int) -> np.ndarray:
    a = _lowering(padded).toarray()
    generator = 0.5 * g * (a.T @ a.T - a @ a)
    column = expm(generator)[:, 0]
    return column[: cutoff + 1]


def _twin_factor(g: float, cutoff: int, padded: int) -> np.ndarray:
    # |n, n> 上の一次元鎖で生成子を表現
    n = np.arange(padded)
    generator = np.zeros((padded + 1, padded + 1))
    generator[n + 1, n] = g * (n + 1)
    generator[n, n + 1] = -g * (n + 1)
    column = expm(generator)[:, 0]
    return np.diag(column[: cutoff + 1])


def squeeze_state(
    space: FockSpace,
    gains: Sequence[float],
    pairing: str = "single",
    modes: Optional[Sequence] = None,
    leak_tolerance: float = LEAK_TOLERANCE,
) -> FockState:
    """
    Squeezed vacuum on the truncated space.

    Args:
        space: Fock space
        gains: Squeezing per mode (single) or per pair (twin)
        pairing: "single" applies ``exp{g/2 (a^dag^2 - a^2)}`` to each mode,
            "twin" applies ``exp{g (a^dag b^dag - a b)}`` to each pair
        modes: Mode indices (single) or index pairs (twin) the gains act on;
            default the last modes of the space, pairs (k, k + count)
        leak_tolerance: Largest accepted norm lost to truncation

    Returns:
        Normalized FockState carrying the leak

    Raises:
        TruncationError: the leak exceeds ``leak_tolerance``
    """
    gains = [float(g) for g in gains]
    if any(g < 0 for g in gains):
        raise InvalidParameter("gains must be non-negative")
    if pairing not in ("single", "twin"):
        raise InvalidParameter(f"unknown pairing {pairing!r}, expected 'single' or 'twin'")

    count = len(gains)
    if modes is None:
        if pairing == "single":
            modes = [(space.mode_count - count + k,) for k in range(count)]
        else:
            first = space.mode_count - 2 * count
            modes = [(first + k, first + count + k) for k in range(count)]
    else:
        modes = [(int(m),) if pairing == "single" else tuple(int(v) for v in m) for m in modes]
    if len(modes) != count:
        raise InvalidParameter(f"{count} gains given for {len(modes)} mode groups")
    flat = [m for group in modes for m in group]
    out_of_range = any(not 0 <= m < space.mode_count for m in flat)
    if len(set(flat)) != len(flat) or out_of_range:
        raise InvalidParameter(f"invalid squeezed modes {modes} for {space.mode_count} modes")

    padded = 2 * space.cutoff + 20
    vacuum = np.zeros(space.cutoff + 1)
    vacuum[0] = 1.0

    tensor = np.ones(())
    order: List[int] = []
    kept = 1.0
    for g, group in zip(gains, modes):
        if pairing == "single":
            factor = _squeezed_factor(g, space.cutoff, padded)
        else:
            factor = _twin_factor(g, space.cutoff, padded)
        kept *= float(np.sum(np.abs(factor) ** 2))
        tensor = np.multiply.outer(tensor, factor)
        order.extend(group)
    for k in range(space.mode_count):
        if k not in flat:
            tensor = np.multiply.outer(tensor, vacuum)
            order.append(k)

    leak = max(0.0, 1.0 - kept)
    if leak > leak_tolerance:
        raise TruncationError(
            f"cutoff {space.cutoff} loses norm {leak:.2e} of the squeezed state "
            f"(tolerance {leak_tolerance:g}); raise the cutoff or lower the gain"
        )
    amplitudes = np.transpose(tensor, np.argsort(order)).reshape(-1)
    amplitudes = amplitudes / np.linalg.norm(amplitudes)
    log_debug(f"squeezed {pairing} state on {space.dimension} states, leak {leak:.2e}")
    return FockState(space, amplitudes.astype(complex), leak)


def measure(state: FockState, labels: Optional[Sequence[str]] = None) -> Observables:
    """
    Exact moments, quadrature variances and number covariances.

    Args:
        state: Fock state
        labels: Mode labels, default m0, m1, ...
    """
    space = state.space
    labels = tuple(labels) if labels is not None else tuple(
        f"m{k}" for k in range(space.mode_count)
    )
    if len(labels) != space.mode_count:
        raise InvalidParameter(f"{len(labels)} labels given for {space.mode_count} modes")

    psi = state.amplitudes
    lowered = [a @ psi for a in space.annihilators]
    n = space.mode_count
    normal = np.zeros((n, n), dtype=complex)
    anomalous = np.zeros((n, n), dtype=complex)
    for k in range(n):
        for l in range(n):
            normal[k, l] = np.vdot(lowered[k], lowered[l])
            anomalous[k, l] = np.vdot(psi, space.annihilators[k] @ lowered[l])

    variances = np.zeros((n, 2))
    for k, a in enumerate(space.annihilators):
        raised = a.conj().T @ psi
        x = (lowered[k] + raised) / np.sqrt(2.0)
        p = (lowered[k] - raised) / (1j * np.sqrt(2.0))
        for j, vector in enumerate((x, p)):
            mean = np.vdot(psi, vector).real
            variances[k, j] = np.vdot(vector, vector).real - mean**2

    probabilities = state.probabilities()
    occupations = space.occupations
    means = probabilities @ occupations
    covariance = occupations.T @ (probabilities[:, np.newaxis] * occupations) - np.outer(
        means, means
    )
    return Observables(
        labels=labels,
        photon_numbers=normal.diagonal().real.copy(),
        quadrature_variances=variances,
        number_covariance=covariance,
        normal=normal,
        anomalous=anomalous,
    )


@dataclass(frozen=True)
class OracleScenario:
    """
    Small scenario evaluated by both engines.

    kind:
        single       [SF, A0], one squeezed mode, single-mode gate
        two_mode     [SF, A0, A1], two squeezed modes, two-mode gate
        twin_single  [SF, A0, B0], one twin pair, gate on the signal
        twin_swap    [A0, A1, B0, B1], two twin pairs, theta = k pi gate on the signals
    """

    kind: str
    gains: Tuple[float, ...]
    thetas: Tuple[float, ...]
    projections: Tuple[complex, ...] = ()
    cutoff: int = DEFAULT_CUTOFF
    leak_tolerance: float = LEAK_TOLERANCE

    def __post_init__(self):
        object.__setattr__(self, "gains", tuple(float(g) for g in self.gains))
        object.__setattr__(self, "thetas", tuple(float(t) for t in self.thetas))
        object.__setattr__(self, "projections", tuple(complex(m) for m in self.projections))
        if self.kind not in SCENARIO_KINDS:
            raise InvalidParameter(f"unknown oracle scenario {self.kind!r}, expected {SCENARIO_KINDS}")
        expected = {"single": 1, "two_mode": 2, "twin_single": 1, "twin_swap": 2}[self.kind]
        if len(self.gains) != expected:
            raise InvalidParameter(f"{self.kind} needs {expected} gains, got {len(self.gains)}")
        if any(not 0.0 <= g <= MAX_ORACLE_GAIN for g in self.gains):
            raise InvalidParameter(f"oracle gains must lie in [0, {MAX_ORACLE_GAIN}]")
        if not self.thetas:
            raise InvalidParameter("at least one theta is required")
        single_match = self.kind in ("single", "twin_single")
        if self.projections and (single_match or len(self.projections) != 2):
            raise InvalidParameter(
                f"{self.kind} takes no projections or exactly two for two matched modes"
            )
        if self.kind == "twin_swap" and any(
            abs(t / np.pi - round(t / np.pi)) > 1e-12 for t in self.thetas
        ):
            raise InvalidParameter("twin_swap is defined for theta = k pi only")
        if not self.leak_tolerance > 0:
            raise InvalidParameter(f"leak tolerance must be positive, got {self.leak_tolerance}")

    def matched_projections(self) -> Tuple[complex, ...]:
        if self.kind in ("single", "twin_single"):
            return (1.0 + 0.0j,)
        if self.projections:
            return normalize_projections(self.projections)
        return (2**-0.5 + 0.0j, 2**-0.5 + 0.0j)

    @property
    def labels(self) -> Tuple[str, ...]:
        return {
            "single": (SF_LABEL, signal_label(0)),
            "two_mode": (SF_LABEL, signal_label(0), signal_label(1)),
            "twin_single": (SF_LABEL, signal_label(0), idler_label(0)),
            "twin_swap": (signal_label(0), signal_label(1), idler_label(0), idler_label(1)),
        }[self.kind]

    def fock_seed(self) -> FockState:
        space = FockSpace(len(self.labels), self.cutoff)
        if self.kind in ("single", "two_mode"):
            return squeeze_state(space, self.gains, "single", leak_tolerance=self.leak_tolerance)
        if self.kind == "twin_single":
            return squeeze_state(
                space, self.gains, "twin", modes=[(1, 2)], leak_tolerance=self.leak_tolerance
            )
        return squeeze_state(
            space, self.gains, "twin", modes=[(0, 2), (1, 3)], leak_tolerance=self.leak_tolerance
        )

    def fock_gate(self, space: FockSpace, theta: float) -> FockGate:
        mu = self.matched_projections()
        if self.kind == "twin_swap":
            return gate_unitary(space, theta, mu, sf_mode=None, matched_modes=[0, 1])
        return gate_unitary(space, theta, mu, sf_mode=0, matched_modes=list(range(1, 1 + len(mu))))

    def gaussian_output(self, theta: float) -> GaussianMoments:
        mu = self.matched_projections()
        gate = multimode_gate(theta, mu)
        if self.kind in ("single", "two_mode"):
            state = squeezed_vacuum_from_gains(self.gains, include_sf_vacuum=True)
            return apply_gate(state, gate, self.labels[: 1 + len(mu)])
        state = twin_beam_from_gains(self.gains, include_sf_vacuum=True)
        signals = [signal_label(k) for k in range(len(mu))]
        out = apply_gate(state, gate, [SF_LABEL] + signals)
        return out.subset(self.labels)


@dataclass(frozen=True, eq=False)
class OracleReport:
    """Oracle and Gaussian values side by side with their deviations."""

    scenario: OracleScenario
    rows: List[Dict[str, object]]
    leak: float
    rel_tol: float
    abs_tol: float

    @property
    def passed(self) -> bool:
        return all(bool(row["passed"]) for row in self.rows)

    @property
    def max_abs_deviation(self) -> float:
        return max((float(row["abs_dev"]) for row in self.rows), default=0.0)

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            self.rows,
            columns=["theta", "quantity", "modes", "oracle", "gaussian", "abs_dev", "rel_dev", "passed"],
        )

    def to_dict(self) -> Dict[str, object]:
        return {
            "kind": self.scenario.kind,
            "gains": list(self.scenario.gains),
            "cutoff": self.scenario.cutoff,
            "leak": self.leak,
            "rel_tol": self.rel_tol,
            "abs_tol": self.abs_tol,
            "passed": self.passed,
            "max_abs_deviation": self.max_abs_deviation,
            "rows": self.rows,
        }


def _compare_rows(
    theta: float, oracle: Observables, gaussian: Observables, rel_tol: float, abs_tol: float
) -> List[Dict[str, object]]:
    rows = []

    def add(quantity: str, modes: str, a: float, b: float) -> None:
        deviation = abs(a - b)
        relative = deviation / abs(b) if b != 0 else (0.0 if deviation == 0 else np.inf)
        rows.append(
            {
                "theta": theta,
                "quantity": quantity,
                "modes": modes,
                "oracle": float(a),
                "gaussian": float(b),
                "abs_dev": float(deviation),
                "rel_dev": float(relative),
                "passed": bool(deviation <= max(rel_tol * abs(b), abs_tol)),
            }
        )

    labels = gaussian.labels
    for k, label in enumerate(labels):
        add("photon_number", label, oracle.photon_numbers[k], gaussian.photon_numbers[k])
        add("var_x", label, oracle.quadrature_variances[k, 0], gaussian.quadrature_variances[k, 0])
        add("var_p", label, oracle.quadrature_variances[k, 1], gaussian.quadrature_variances[k, 1])
    for i in range(len(labels)):
        for j in range(i, len(labels)):
            add(
                "number_covariance",
                f"{labels[i]},{labels[j]}",
                oracle.number_covariance[i, j],
                gaussian.number_covariance[i, j],
            )
    return rows


def compare_with_gaussian(
    scenario: OracleScenario, rel_tol: float = 1e-6, abs_tol: float = 1e-8
) -> OracleReport:
    """
    Run a scenario through both engines and tabulate the deviations.

    Every photon number, quadrature variance and photon-number covariance is
    compared for every theta; a row passes when its deviation is within
    ``max(rel_tol |gaussian|, abs_tol)``.
    """
    seed = scenario.fock_seed()
    rows: List[Dict[str, object]] = []
    for theta in scenario.thetas:
        gate = scenario.fock_gate(seed.space, theta)
        oracle = measure(gate.apply(seed), scenario.labels)
        gaussian = observables(scenario.gaussian_output(theta))
        rows.extend(_compare_rows(theta, oracle, gaussian, rel_tol, abs_tol))

    report = OracleReport(scenario, rows, seed.leak, rel_tol, abs_tol)
    log_info(
        f"oracle {scenario.kind}: {len(rows)} values, max deviation "
        f"{report.max_abs_deviation:.2e}, {'passed' if report.passed else 'FAILED'}"
    )
    return report
