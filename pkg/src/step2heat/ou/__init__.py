"""Ornstein-Uhlenbeck kernels, Kalman covariance and the generalised Mehler kernel."""

from step2heat.ou.hormander import (
    covariance_K,
    fourier_hat_oracle,
    hormander_q,
    kalman_check,
    numeric_fourier_q,
)
from step2heat.ou.mehler import (
    classical_mehler,
    mehler_complex,
    mehler_P,
    mehler_via_ou,
    oscillator_from_ou,
    ou_from_oscillator,
    reduction_params,
)

__all__ = [
    "classical_mehler",
    "covariance_K",
    "fourier_hat_oracle",
    "hormander_q",
    "kalman_check",
    "mehler_P",
    "mehler_complex",
    "mehler_via_ou",
    "numeric_fourier_q",
    "oscillator_from_ou",
    "ou_from_oscillator",
    "reduction_params",
]
