"""Hörmander's kernel for Ornstein-Uhlenbeck operators tr(Q∇²) + <Bz, ∇>.

The transition density from z to ζ at time t is Gaussian with mean e^{tB}z and
covariance 2t·K(t), where K(t) = (1/t)∫_0^t e^{sB} Q e^{sB^T} ds is the Kalman
covariance. Fourier transforms use the convention f̂(ξ) = ∫ f(z) e^{-2πi<z,ξ>} dz.
"""

from collections.abc import Callable

import numpy as np
import numpy.typing as npt
from numpy.polynomial.legendre import leggauss
from scipy.integrate import quad_vec
from scipy.linalg import expm

from step2heat.errors import KalmanError
from step2heat.logging import get_logger
from step2heat.models import OUSystem

logger = get_logger(__name__)

FloatArray = npt.NDArray[np.float64]

KALMAN_RELATIVE_THRESHOLD = 1e-12
SYMMETRY_TOLERANCE = 1e-14


def _is_symmetric_drift(sys: OUSystem) -> bool:
    scale = max(1.0, float(np.max(np.abs(sys.B))))
    return bool(
        np.max(np.abs(sys.B - sys.B.T)) <= SYMMETRY_TOLERANCE * scale
        and np.allclose(sys.Q, np.eye(sys.m), rtol=0.0, atol=SYMMETRY_TOLERANCE)
    )


def _closed_covariance(sys: OUSystem, t: float) -> FloatArray:
    # B = -2D with D symmetric and Q = I: K(t) = V diag((1 - e^{-4td}) / (4td)) V^T
    d_values, vectors = np.linalg.eigh(-0.5 * 0.5 * (sys.B + sys.B.T))
    x = 4.0 * t * d_values
    small = np.abs(x) < 1e-8
    safe = np.where(small, 1.0, x)
    factors = np.where(small, 1.0 - 0.5 * x, -np.expm1(-safe) / safe)
    return (vectors * factors) @ vectors.T


def covariance_K(sys: OUSystem, t: float) -> FloatArray:
    """Kalman covariance K(t) = (1/t)∫_0^t e^{sB} Q e^{sB^T} ds.

    Symmetric drifts with Q = I use the closed eigen-form; other systems are
    integrated adaptively with ``scipy.integrate.quad_vec``.

    Raises:
        ValueError: If ``t`` is not positive
    """
    if t <= 0:
        raise ValueError(f"Time must be positive, got {t}")
    if _is_symmetric_drift(sys):
        return _closed_covariance(sys, t)

    def integrand(s: float) -> FloatArray:
        flow = expm(s * sys.B)
        return flow @ sys.Q @ flow.T

    integral, _ = quad_vec(integrand, 0.0, t, epsabs=0.0, epsrel=1e-13)
    covariance = np.asarray(integral, dtype=np.float64) / t
    return 0.5 * (covariance + covariance.T)


def kalman_check(sys: OUSystem, t: float) -> tuple[bool, float]:
    """Check the Kalman condition K(t) ≻ 0.

    Returns:
        Whether the smallest eigenvalue exceeds 1e-12·trace K(t), and that eigenvalue
    """
    covariance = covariance_K(sys, t)
    smallest = float(np.linalg.eigvalsh(covariance)[0])
    return smallest > KALMAN_RELATIVE_THRESHOLD * float(np.trace(covariance)), smallest


def hormander_q(sys: OUSystem, z: npt.ArrayLike, zeta: npt.ArrayLike, t: float) -> float:
    """Transition density q(z, ζ, t) of the OU process.

    q = (4π)^{-m/2} (det tK(t))^{-1/2} exp(-<K(t)⁻¹(ζ - e^{tB}z), ζ - e^{tB}z>/(4t))

    Raises:
        KalmanError: If K(t) is not positive definite
    """
    ok, smallest = kalman_check(sys, t)
    if not ok:
        raise KalmanError(f"K({t}) is not positive definite (smallest eigenvalue {smallest:.3g})")
    covariance = covariance_K(sys, t)
    shift = np.asarray(zeta, dtype=np.float64) - expm(t * sys.B) @ np.asarray(z, dtype=np.float64)
    distance = float(shift @ np.linalg.solve(covariance, shift))
    determinant = float(np.linalg.det(t * covariance))
    return float(
        (4.0 * np.pi) ** (-sys.m / 2.0) / np.sqrt(determinant) * np.exp(-distance / (4.0 * t))
    )


def fourier_hat_oracle(
    sys: OUSystem,
    f_hat: Callable[[FloatArray], complex],
    xi: npt.ArrayLike,
    t: float,
) -> complex:
    """Fourier transform at ξ of the solution with initial datum f.

    û(ξ, t) = e^{-t·trB} e^{-4π²t<K(t)η, η>} f̂(η) with η = e^{-tB^T}ξ.
    """
    if t <= 0:
        raise ValueError(f"Time must be positive, got {t}")
    eta = expm(-t * sys.B.T) @ np.asarray(xi, dtype=np.float64)
    covariance = covariance_K(sys, t)
    gaussian = np.exp(-4.0 * np.pi**2 * t * float(eta @ covariance @ eta))
    return complex(np.exp(-t * np.trace(sys.B)) * gaussian * f_hat(eta))


def numeric_fourier_q(
    sys: OUSystem,
    zeta: npt.ArrayLike,
    xi: npt.ArrayLike,
    t: float,
    half_width: float = 12.0,
    nodes: int = 96,
) -> complex:
    """∫ q(z, ζ, t) e^{-2πi<z, ξ>} dz by tensor Gauss-Legendre on a box.

    The box is centred at e^{-tB}ζ, the point whose image under the mean map is ζ;
    it must cover the Gaussian in z. Intended for small m only.
    """
    zeta_array = np.asarray(zeta, dtype=np.float64)
    xi_array = np.asarray(xi, dtype=np.float64)
    nodes_1d, weights_1d = leggauss(nodes)
    center = expm(-t * sys.B) @ zeta_array
    grids = np.meshgrid(*([nodes_1d * half_width] * sys.m), indexing="ij")
    points = np.stack([grid.ravel() for grid in grids], axis=1) + center
    weight_grids = np.meshgrid(*([weights_1d * half_width] * sys.m), indexing="ij")
    weights = np.prod(np.stack([grid.ravel() for grid in weight_grids], axis=1), axis=1)

    covariance = covariance_K(sys, t)
    flow = expm(t * sys.B)
    shifts = zeta_array - points @ flow.T
    distances = np.einsum("ni,ni->n", shifts, np.linalg.solve(covariance, shifts.T).T)
    density = (
        (4.0 * np.pi) ** (-sys.m / 2.0)
        / np.sqrt(np.linalg.det(t * covariance))
        * np.exp(-distances / (4.0 * t))
    )
    phases = np.exp(-2j * np.pi * (points @ xi_array))
    return complex(np.sum(weights * density * phases))
