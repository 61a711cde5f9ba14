"""Generalised Mehler kernel of the oscillator Δ - |Dz|² and its OU conjugation.

For D symmetric positive semidefinite the heat kernel of Δ - |Dz|² is

    𝒫(z, ζ, t) = (4πt)^{-m/2} (det j(2tD))^{1/2}
                 · exp{-(1/4t)[<Mz, z> + <Mζ, ζ> - 2<j(2tD)z, ζ>]},  M = j(2tD)cosh(2tD),

and it is conjugate to the OU kernel with B = -2D, Q = I through the weight
e^{-(½<Dz,z> + t·trD)}. Quadratic forms are bilinear, so complex arguments are
accepted by :func:`mehler_complex`.
"""

from collections.abc import Callable

import numpy as np
import numpy.typing as npt

from step2heat.linalg.matrix_functions import even_apply, j_function, log_j, spectral, x_coth_x
from step2heat.models import GroupSpec, OscillatorParams, OUSystem
from step2heat.ou.hormander import hormander_q

FloatArray = npt.NDArray[np.float64]
Solution = Callable[[FloatArray, float], complex]


def mehler_complex(p: OscillatorParams, z: npt.ArrayLike, zeta: npt.ArrayLike) -> complex:
    """𝒫(z, ζ, t) with bilinear quadratic forms, for real or complex points."""
    d_values, vectors = np.linalg.eigh(p.D)
    x = 2.0 * p.t * np.maximum(d_values, 0.0)
    m = p.D.shape[0]
    z_rot = vectors.T @ np.asarray(z)
    zeta_rot = vectors.T @ np.asarray(zeta)
    coth_part = x_coth_x(x)
    quadratic = (
        np.sum(coth_part * z_rot * z_rot)
        + np.sum(coth_part * zeta_rot * zeta_rot)
        - 2.0 * np.sum(j_function(x) * z_rot * zeta_rot)
    )
    log_prefactor = -0.5 * m * np.log(4.0 * np.pi * p.t) + 0.5 * float(np.sum(log_j(x)))
    return complex(np.exp(log_prefactor - quadratic / (4.0 * p.t)))


def mehler_P(p: OscillatorParams, z: npt.ArrayLike, zeta: npt.ArrayLike) -> float:
    """Generalised Mehler kernel at real points z, ζ."""
    real_z = np.asarray(z, dtype=np.float64)
    return mehler_complex(p, real_z, np.asarray(zeta, dtype=np.float64)).real


def classical_mehler(
    omega: float, z: npt.ArrayLike, zeta: npt.ArrayLike, t: float
) -> float:
    """Kernel of Δ - ω|z|² written with coth and csch of 2√ω·t.

    (√ω / (2π sinh 2√ωt))^{m/2} exp{-(√ω/2)[coth(2√ωt)(|z|² + |ζ|²) - 2 csch(2√ωt)<z, ζ>]}
    """
    if omega <= 0:
        raise ValueError(f"Frequency must be positive, got {omega}")
    if t <= 0:
        raise ValueError(f"Time must be positive, got {t}")
    z_array = np.asarray(z, dtype=np.float64)
    zeta_array = np.asarray(zeta, dtype=np.float64)
    root = np.sqrt(omega)
    angle = 2.0 * root * t
    m = z_array.size
    exponent = -0.5 * root * (
        (z_array @ z_array + zeta_array @ zeta_array) / np.tanh(angle)
        - 2.0 * (z_array @ zeta_array) / np.sinh(angle)
    )
    return float((root / (2.0 * np.pi * np.sinh(angle))) ** (m / 2.0) * np.exp(exponent))


def _weight(D: FloatArray, z: FloatArray, t: float) -> complex:
    return complex(np.exp(-(0.5 * (z @ D @ z) + t * np.trace(D))))


def oscillator_from_ou(D: npt.ArrayLike, w_solution: Solution) -> Solution:
    """Map an OU solution w to the oscillator solution v = e^{-(½<Dz,z> + t·trD)}·w."""
    matrix = np.asarray(D, dtype=np.float64)

    def v_solution(z: FloatArray, t: float) -> complex:
        return _weight(matrix, z, t) * w_solution(z, t)

    return v_solution


def ou_from_oscillator(D: npt.ArrayLike, v_solution: Solution) -> Solution:
    """Inverse of :func:`oscillator_from_ou`."""
    matrix = np.asarray(D, dtype=np.float64)

    def w_solution(z: FloatArray, t: float) -> complex:
        return v_solution(z, t) / _weight(matrix, z, t)

    return w_solution


def mehler_via_ou(p: OscillatorParams, z: npt.ArrayLike, zeta: npt.ArrayLike) -> float:
    """𝒫(z, ζ, t) through Hörmander's kernel with B = -2D, Q = I.

    The OU solution from the datum δ_ζ·e^{½<Dζ,ζ>} is conjugated back to the oscillator.
    """
    zeta_array = np.asarray(zeta, dtype=np.float64)
    system = OUSystem(Q=np.eye(p.D.shape[0]), B=-2.0 * p.D)
    source_weight = np.exp(0.5 * (zeta_array @ p.D @ zeta_array))

    def w_solution(point: FloatArray, t: float) -> complex:
        return complex(hormander_q(system, point, zeta_array, t) * source_weight)

    v_solution = oscillator_from_ou(p.D, w_solution)
    return v_solution(np.asarray(z, dtype=np.float64), p.t).real


def reduction_params(spec: GroupSpec, lam: npt.ArrayLike, t: float) -> OscillatorParams:
    """Oscillator left after the partial Fourier transform at frequency λ: D = π√A(λ)."""
    root_a = even_apply(spectral(spec, lam), lambda roots: roots)
    return OscillatorParams(D=np.pi * 0.5 * (root_a + root_a.T), t=t)
