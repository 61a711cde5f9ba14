"""Monte Carlo oracle: the horizontal diffusion generated by 𝓛.

Matching the generator's coefficient blocks gives the Itô system

    dZ = √2 dW,    dσ_ℓ = (1/√2)<J(ε_ℓ)Z, dW>,

with W a standard m-dimensional Brownian motion: the σσ block of the covariance
rate is ½·½<J_ℓZ, J_ℓ'Z> = ¼<J_ℓZ, J_ℓ'Z> and the cross block is <J_ℓZ, e_s>.
Itô and Stratonovich forms agree since <J(ε_ℓ)e_j, e_j> = 0.

Paths are simulated by Euler-Maruyama in blocks. Every block draws from its own
Philox stream spawned from ``SeedSequence(seed)``, so the endpoints depend on
the seed and the block size only, not on the number of worker threads.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Literal

import numpy as np
import numpy.typing as npt

from step2heat.config import McConfig, QuadratureConfig, worker_count
from step2heat.kernel.carnot import make_kernel
from step2heat.kernel.quadrature import uniform_rule
from step2heat.linalg.matrix_functions import even_apply, spectral, x_coth_x
from step2heat.logging import get_logger
from step2heat.models import GroupPoint, GroupSpec, McReport, PathEndpoints

logger = get_logger(__name__)

FloatArray = npt.NDArray[np.float64]
KernelMethod = Literal["fourier-slice", "quadrature"]

CLOSED_FORM_ERROR = 64 * float(np.finfo(np.float64).eps)


@dataclass(frozen=True)
class GaussianTrigBump:
    """Test function f(z, σ) = e^{-a|z|²}·cos<κ, σ>.

    Attributes:
        a: Gaussian rate, non-negative
        kappa: Vertical frequency, shape (k,)
    """

    a: float = 0.0
    kappa: tuple[float, ...] = field(default_factory=tuple)

    def __post_init__(self) -> None:
        """Validate the Gaussian rate."""
        if self.a < 0:
            raise ValueError(f"Gaussian rate must be non-negative, got {self.a}")

    def frequency(self, k: int) -> FloatArray:
        """κ padded with zeros to length k."""
        values = np.zeros(k)
        values[: len(self.kappa)] = self.kappa
        return values

    def __call__(self, z: FloatArray, sigma: FloatArray) -> FloatArray:
        squared = np.sum(z * z, axis=-1)
        return np.exp(-self.a * squared) * np.cos(sigma @ self.frequency(sigma.shape[-1]))


def gaussian_bump(a: float = 1.0) -> GaussianTrigBump:
    """e^{-a|z|²}."""
    return GaussianTrigBump(a=a)


def trig_bump(kappa: tuple[float, ...] = (1.0,)) -> GaussianTrigBump:
    """cos<κ, σ>."""
    return GaussianTrigBump(kappa=kappa)


def _simulate_block(
    spec: GroupSpec,
    cfg: McConfig,
    seed: np.random.SeedSequence,
    size: int,
) -> tuple[FloatArray, FloatArray]:
    generator = np.random.Generator(np.random.Philox(seed))
    dt = cfg.dt
    root_dt = math.sqrt(dt)
    drawn = size // 2 if cfg.antithetic else size
    z = np.zeros((size, spec.m))
    sigma = np.zeros((size, spec.k))
    for _ in range(cfg.n_steps):
        increments = generator.standard_normal((drawn, spec.m)) * root_dt
        if cfg.antithetic:
            increments = np.concatenate([increments, -increments])
        rotated = np.einsum("lij,bj->bli", spec.J, z)
        sigma += np.einsum("bli,bi->bl", rotated, increments) / math.sqrt(2.0)
        z += math.sqrt(2.0) * increments
    if cfg.antithetic:
        # Interleave so that paths 2i and 2i + 1 are an antithetic pair
        half = size // 2
        z = np.stack([z[:half], z[half:]], axis=1).reshape(size, spec.m)
        sigma = np.stack([sigma[:half], sigma[half:]], axis=1).reshape(size, spec.k)
    return z, sigma


def mc_sample_paths(spec: GroupSpec, cfg: McConfig | None = None) -> PathEndpoints:
    """Simulate ``cfg.n_paths`` horizontal paths from the identity up to ``cfg.t``.

    Raises:
        ValueError: If antithetic sampling is requested for an odd number of paths
    """
    config = cfg or McConfig()
    if config.antithetic and config.n_paths % 2:
        raise ValueError(f"Antithetic sampling needs an even number of paths, got {config.n_paths}")
    sizes = [config.block_size] * (config.n_paths // config.block_size)
    if config.n_paths % config.block_size:
        sizes.append(config.n_paths % config.block_size)
    seeds = np.random.SeedSequence(config.seed).spawn(len(sizes))
    logger.debug(
        "Simulating %d paths in %d blocks, %d steps of %.3g",
        config.n_paths,
        len(sizes),
        config.n_steps,
        config.dt,
    )
    with ThreadPoolExecutor(max_workers=min(worker_count(), len(sizes))) as executor:
        blocks = list(
            executor.map(
                lambda item: _simulate_block(spec, config, item[0], item[1]),
                zip(seeds, sizes, strict=True),
            )
        )
    return PathEndpoints(
        z=np.concatenate([block[0] for block in blocks]),
        sigma=np.concatenate([block[1] for block in blocks]),
    )


def fourier_slice_expectation(spec: GroupSpec, f: GaussianTrigBump, t: float) -> float:
    """∫ p(e, g', t) f(g') dg' in closed form.

    Integrating cos<κ, τ> against the kernel picks the single frequency λ = tκ,
    and the remaining Gaussian integral in ζ gives

        (det j(√A))^{1/2} (4t)^{-m/2} det(M/(4t) + aI)^{-1/2},  M = j(√A)cosh√A.
    """
    if t <= 0:
        raise ValueError(f"Time must be positive, got {t}")
    data = spectral(spec, t * f.frequency(spec.k))
    gaussian = even_apply(data, x_coth_x)
    matrix = gaussian / (4.0 * t) + f.a * np.eye(spec.m)
    sign, log_det = np.linalg.slogdet(matrix)
    if sign <= 0:
        raise ValueError("Gaussian matrix of the expectation is not positive definite")
    return float(math.sqrt(data.det_j) * (4.0 * t) ** (-spec.m / 2.0) * math.exp(-0.5 * log_det))


def planar_expectation(
    spec: GroupSpec,
    f: GaussianTrigBump,
    t: float,
    cfg: QuadratureConfig | None = None,
    radius: float = 12.0,
    height: float = 15.0,
    radial_panels: int = 6,
    height_panels: int = 30,
) -> tuple[float, float]:
    """∫ p(e, g', t) f(g') dg' by direct quadrature, for groups with m = 2, k = 1.

    The kernel from the identity is radial in ζ on such groups, so the integral
    runs over r ∈ [0, radius] with weight 2πr and τ ∈ [-height, height].

    Returns:
        The integral and the sum of the kernel error estimates times the weights
    """
    if (spec.m, spec.k) != (2, 1):
        raise ValueError(f"Planar quadrature needs m = 2, k = 1, got ({spec.m}, {spec.k})")
    heat = make_kernel(spec, cfg)
    radii, radial_weights = uniform_rule(0.0, radius, radial_panels, 12)
    heights, height_weights = uniform_rule(-height, height, height_panels, 12)
    identity = GroupPoint.identity(2, 1)
    triples = [
        (identity, GroupPoint(np.array([r, 0.0]), np.array([tau])), t)
        for r in radii
        for tau in heights
    ]
    values = heat.evaluate_many(triples)
    weights = np.outer(2.0 * np.pi * radii * radial_weights, height_weights).ravel()
    points_z = np.array([[r, 0.0] for r in radii for _ in heights])
    points_sigma = np.array([[tau] for _ in radii for tau in heights])
    test = f(points_z, points_sigma)
    kernel = np.array([value.value for value in values])
    errors = np.array([value.est_error for value in values])
    return float(np.sum(weights * kernel * test)), float(np.sum(weights * errors * np.abs(test)))


def kernel_expectation(
    spec: GroupSpec,
    f: GaussianTrigBump,
    t: float,
    cfg: QuadratureConfig | None = None,
    method: KernelMethod = "fourier-slice",
) -> tuple[float, float]:
    """Kernel side of the Monte Carlo comparison: value and error estimate."""
    if method == "fourier-slice":
        value = fourier_slice_expectation(spec, f, t)
        return value, CLOSED_FORM_ERROR * abs(value)
    if method == "quadrature":
        return planar_expectation(spec, f, t, cfg)
    raise ValueError(f"Unknown expectation method: {method}")


def mc_vs_kernel(
    spec: GroupSpec,
    f: GaussianTrigBump,
    t: float | None = None,
    mc: McConfig | None = None,
    cfg: QuadratureConfig | None = None,
    method: KernelMethod = "fourier-slice",
    endpoints: PathEndpoints | None = None,
) -> McReport:
    """Compare the Monte Carlo mean of f at the path endpoints with ∫ p(e, ·, t) f.

    Args:
        spec: The group
        f: Library test function
        t: Final time; ``mc.t`` when omitted
        mc: Monte Carlo settings
        cfg: λ-quadrature settings for the kernel side
        method: How the kernel side is computed
        endpoints: Reuse simulated endpoints, which must belong to time ``t``
    """
    config = mc or McConfig()
    if t is not None and t != config.t:
        config = replace(config, t=t)
    paths = endpoints if endpoints is not None else mc_sample_paths(spec, config)
    samples = f(paths.z, paths.sigma)
    if config.antithetic:
        samples = 0.5 * (samples[0::2] + samples[1::2])
    mean = float(samples.mean())
    stderr = float(samples.std(ddof=1) / math.sqrt(samples.size))
    kernel_value, kernel_error = kernel_expectation(spec, f, config.t, cfg, method)
    report = McReport(
        mc_mean=mean,
        mc_stderr=stderr,
        kernel_value=kernel_value,
        kernel_error=kernel_error,
        n_paths=len(paths),
    )
    logger.debug(
        "Monte Carlo %.8f ± %.2e against kernel %.8f (%s)",
        mean,
        stderr,
        kernel_value,
        "pass" if report.passed else "fail",
    )
    return report
