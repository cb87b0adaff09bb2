"""
Gaussian moment propagation.

このモジュールは、スクイーズド真空およびツインビームの二次モーメント表現、
ゲートによる伝搬、光子数・分散・相関の評価を提供します。
"""

try:
    # インストールされたパッケージとして実行する場合
    from pulse_gate.moments import closed_forms
    from pulse_gate.moments.moments_engine import (
        SF_LABEL,
        ConservationReport,
        GaussianMoments,
        Observables,
        apply_gate,
        conservation_report,
        default_mode_map,
        idler_label,
        nrf,
        number_covariance,
        number_difference_variance,
        number_variance,
        observables,
        operator_photon_number,
        photon_number,
        quadrature_variances,
        signal_label,
        signal_mode_photon_number,
        squeezed_vacuum_from_gains,
        squeezed_vacuum_state,
        twin_beam_from_gains,
        twin_beam_state,
        uncertainty_product,
        vacuum_state,
    )
except ImportError:
    # 開発環境で直接実行する場合（相対インポート）
    from . import closed_forms
    from .moments_engine import (
        SF_LABEL,
        ConservationReport,
        GaussianMoments,
        Observables,
        apply_gate,
        conservation_report,
        default_mode_map,
        idler_label,
        nrf,
        number_covariance,
        number_difference_variance,
        number_variance,
        observables,
        operator_photon_number,
        photon_number,
        quadrature_variances,
        signal_label,
        signal_mode_photon_number,
        squeezed_vacuum_from_gains,
        squeezed_vacuum_state,
        twin_beam_from_gains,
        twin_beam_state,
        uncertainty_product,
        vacuum_state,
    )

__all__ = [
    "SF_LABEL",
    "ConservationReport",
    "GaussianMoments",
    "Observables",
    "apply_gate",
    "closed_forms",
    "conservation_report",
    "default_mode_map",
    "idler_label",
    "nrf",
    "number_covariance",
    "number_difference_variance",
    "number_variance",
    "observables",
    "operator_photon_number",
    "photon_number",
    "quadrature_variances",
    "signal_label",
    "signal_mode_photon_number",
    "squeezed_vacuum_from_gains",
    "squeezed_vacuum_state",
    "twin_beam_from_gains",
    "twin_beam_state",
    "uncertainty_product",
    "vacuum_state",
]
