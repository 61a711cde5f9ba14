"""Spectral engine for A(λ) = -J(λ)² and its even matrix functions.

Every function of √A(λ) is taken from one symmetric eigendecomposition of A(λ);
√A is never formed. Even functions such as j(x) = x/sinh x and x·coth x are
analytic at 0, so the kernel of A(λ) needs no special treatment.
"""

from collections.abc import Callable

import numpy as np
import numpy.typing as npt
from scipy.optimize import minimize
from scipy.stats import norm, qmc

from step2heat.errors import SpectralError
from step2heat.group.spec import j_of
from step2heat.logging import get_logger
from step2heat.models import DecayEstimate, GroupSpec, SpectralData

logger = get_logger(__name__)

FloatArray = npt.NDArray[np.float64]

SERIES_CUTOFF = 1e-4
CLAMP_TOLERANCE = 1e-12
DEFAULT_SAFETY_FACTOR = 0.9


def j_function(x: npt.ArrayLike) -> FloatArray:
    """Vectorised j(x) = x/sinh x for x ≥ 0, with j(0) = 1."""
    values = np.asarray(x, dtype=np.float64)
    small = values < SERIES_CUTOFF
    safe = np.where(small, 1.0, values)
    # 2x e^{-x} / (1 - e^{-2x}) stays finite where sinh overflows
    large_branch = 2.0 * safe * np.exp(-safe) / -np.expm1(-2.0 * safe)
    squared = values * values
    series = 1.0 - squared / 6.0 + 7.0 * squared * squared / 360.0
    return np.where(small, series, large_branch)


def log_j(x: npt.ArrayLike) -> FloatArray:
    """Vectorised log j(x), accurate where j(x) underflows."""
    values = np.asarray(x, dtype=np.float64)
    small = values < SERIES_CUTOFF
    safe = np.where(small, 1.0, values)
    large_branch = np.log(2.0 * safe) - safe - np.log(-np.expm1(-2.0 * safe))
    squared = values * values
    series = np.log1p(-squared / 6.0 + 7.0 * squared * squared / 360.0)
    return np.where(small, series, large_branch)


def x_coth_x(x: npt.ArrayLike) -> FloatArray:
    """Vectorised x·coth x, equal to 1 at x = 0."""
    values = np.asarray(x, dtype=np.float64)
    small = values < SERIES_CUTOFF
    safe = np.where(small, 1.0, values)
    squared = values * values
    series = 1.0 + squared / 3.0 - squared * squared / 45.0
    return np.where(small, series, safe / np.tanh(safe))


def j_scalar(x: float) -> float:
    """j(x) = x/sinh x for a single x ≥ 0.

    Raises:
        ValueError: If ``x`` is negative
    """
    if x < 0:
        raise ValueError(f"j is evaluated on non-negative arguments, got {x}")
    return float(j_function(x))


def a_of(spec: GroupSpec, lam: npt.ArrayLike) -> FloatArray:
    """A(λ) = -J(λ)², symmetric positive semidefinite.

    Batched like :func:`~step2heat.group.spec.j_of`.
    """
    kaplan = j_of(spec, lam)
    product = -np.matmul(kaplan, kaplan)
    # Symmetrise away rounding so eigh sees an exactly symmetric matrix
    return 0.5 * (product + np.swapaxes(product, -1, -2))


def _clamp(eigenvalues: FloatArray, matrices: FloatArray) -> FloatArray:
    scale = np.maximum(1.0, np.max(np.abs(matrices), axis=(-2, -1)))
    threshold = -CLAMP_TOLERANCE * scale[..., np.newaxis]
    if np.any(eigenvalues < threshold):
        worst = float(np.min(eigenvalues / scale[..., np.newaxis]))
        raise SpectralError(f"A(λ) has eigenvalue {worst:.3g} (relative), expected ≥ 0")
    return np.maximum(eigenvalues, 0.0)


def spectral_batch(spec: GroupSpec, lambdas: npt.ArrayLike) -> tuple[FloatArray, FloatArray]:
    """Eigenvalues and eigenvectors of A(λ) for a stack of λ of shape (N, k).

    Returns:
        Clamped eigenvalues of shape (N, m) in ascending order and eigenvectors of
        shape (N, m, m)

    Raises:
        SpectralError: If an eigenvalue is more negative than the clamp threshold
    """
    matrices = a_of(spec, np.atleast_2d(np.asarray(lambdas, dtype=np.float64)))
    try:
        eigenvalues, eigenvectors = np.linalg.eigh(matrices)
    except np.linalg.LinAlgError as exc:
        raise SpectralError(f"eigensolver failed on A(λ): {exc}") from exc
    return _clamp(eigenvalues, matrices), eigenvectors


def spectral(spec: GroupSpec, lam: npt.ArrayLike) -> SpectralData:
    """Eigendecomposition of A(λ) with cached j, x·coth x and det j(√A)."""
    lam_array = np.atleast_1d(np.asarray(lam, dtype=np.float64))
    eigenvalues, eigenvectors = spectral_batch(spec, lam_array[np.newaxis])
    mu = eigenvalues[0]
    roots = np.sqrt(mu)
    j_values = j_function(roots)
    return SpectralData(
        lam=lam_array,
        eigenvalues=mu,
        eigenvectors=eigenvectors[0],
        j_values=j_values,
        x_coth_x=x_coth_x(roots),
        det_j=float(np.prod(j_values)),
    )


def even_apply(sd: SpectralData, f: Callable[[FloatArray], FloatArray]) -> FloatArray:
    """V·diag(f(√μ_i))·V^T for a function ``f`` of the eigenvalues of √A(λ)."""
    values = np.asarray(f(sd.roots), dtype=np.float64)
    if not np.all(np.isfinite(values)):
        raise ValueError("function is not finite on the spectrum")
    vectors = sd.eigenvectors
    return (vectors * values) @ vectors.T


def det_j_sqrtA(sd: SpectralData) -> float:
    """det j(√A(λ)) = Π j(√μ_i), a number in (0, 1]."""
    return sd.det_j


def exp_minus_i_j(sd: SpectralData, kaplan: FloatArray) -> npt.NDArray[np.complex128]:
    """e^{-iJ(λ)} through cosh√A - i·(√A)⁻¹ sinh√A·J(λ).

    The second factor is j(√A)⁻¹ composed with J(λ) on the range of A(λ) and
    vanishes on its kernel, so it is formed as V·diag(sinh x/x)·V^T·J(λ).
    """
    roots = sd.roots
    vectors = sd.eigenvectors
    cosh_part = (vectors * np.cosh(roots)) @ vectors.T
    sinh_over_x = 1.0 / j_function(roots)
    odd_part = (vectors * sinh_over_x) @ vectors.T @ kaplan
    return cosh_part - 1j * odd_part


def _sphere_points(k: int, samples: int, seed: int) -> tuple[FloatArray, int]:
    exponent = max(int(np.ceil(np.log2(samples))), 1)
    sampler = qmc.Sobol(d=k, scramble=True, seed=seed)
    uniform = np.clip(sampler.random_base2(m=exponent), 1e-12, 1.0 - 1e-12)
    gaussian = norm.ppf(uniform)
    return gaussian / np.linalg.norm(gaussian, axis=1, keepdims=True), 2**exponent


def _root_on_sphere(spec: GroupSpec, direction: FloatArray, rank: int) -> float:
    unit = direction / max(float(np.linalg.norm(direction)), 1e-300)
    eigenvalues, _ = spectral_batch(spec, unit[np.newaxis])
    return float(np.sqrt(eigenvalues[0, ::-1][rank]))


def estimate_k0(
    spec: GroupSpec,
    samples: int = 1024,
    safety_factor: float = DEFAULT_SAFETY_FACTOR,
    seed: int = 0,
) -> DecayEstimate:
    """Estimate the decay constants of det j(√A(λ)) on the unit sphere.

    Samples the sphere with scrambled Sobol points pushed through the normal
    quantile, takes per-rank minima of the eigenvalues of √A(λ), and refines
    the minimum of every second member of an eigenvalue pair with Nelder-Mead.

    Args:
        spec: Group to analyse
        samples: Minimum number of sphere samples (rounded up to a power of 2)
        safety_factor: Factor applied to the minima
        seed: Seed of the Sobol scrambling

    Returns:
        Decay estimate whose ``k0`` is the safety-scaled minimum of the second
        largest eigenvalue of √A(λ)

    Raises:
        ValueError: If fewer than 64 samples are requested
    """
    if samples < 64:
        raise ValueError(f"Samples must be at least 64, got {samples}")
    if not 0 < safety_factor <= 1:
        raise ValueError(f"Safety factor must be in (0, 1], got {safety_factor}")

    directions, count = _sphere_points(spec.k, samples, seed)
    eigenvalues, _ = spectral_batch(spec, directions)
    roots = np.sqrt(eigenvalues)[:, ::-1]
    minima = roots.min(axis=0)
    ceiling = float(roots[:, 0].max())

    if spec.k > 1:
        # Eigenvalues of √A come in pairs; refine the lower member of each pair
        for rank in range(1, spec.m, 2):
            if minima[rank] <= 0.0:
                continue
            start = directions[int(np.argmin(roots[:, rank]))]
            result = minimize(
                lambda v, r=rank: _root_on_sphere(spec, v, r),
                start,
                method="Nelder-Mead",
                options={"xatol": 1e-8, "fatol": 1e-12, "maxiter": 400},
            )
            refined = float(result.fun)
            minima[rank] = min(minima[rank], refined)
            minima[rank - 1] = min(minima[rank - 1], refined)

    profile = tuple(float(safety_factor * value) for value in minima)
    estimate = DecayEstimate(
        k0=profile[1],
        sample_count=count,
        safety_factor=safety_factor,
        profile=profile,
        ceiling=ceiling / safety_factor,
    )
    logger.debug(
        "Decay estimate for %s: k0=%.6f profile=%s from %d samples",
        spec.name,
        estimate.k0,
        np.round(profile, 6).tolist(),
        count,
    )
    return estimate
