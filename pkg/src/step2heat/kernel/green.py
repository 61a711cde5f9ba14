"""Green functions as time integrals of heat kernels.

All time integrals here have the same shape: an integrand that vanishes like a
Gaussian as t → 0 and decays like t^{-β} as t → ∞. They are computed in the
variable u = log t on [u_min, u_max], split at the natural scale of the point,
and the power-law remainder beyond T = e^{u_max} is added as f(T)·T/(β - 1).
"""

import math
from collections.abc import Callable

import numpy as np
from scipy.integrate import quad

from step2heat.config import QuadratureConfig, TimeQuadratureConfig
from step2heat.errors import ConvergenceError, PoleError
from step2heat.group.law import bracket_term
from step2heat.group.spec import check_point
from step2heat.kernel.carnot import make_kernel
from step2heat.logging import get_logger
from step2heat.models import GroupPoint, GroupSpec
from step2heat.protocols import HeatKernel

logger = get_logger(__name__)

ERROR_SLACK = 100.0


def integrate_over_time(
    f: Callable[[float], float],
    scale: float,
    beta: float,
    tcfg: TimeQuadratureConfig | None = None,
    t_floor: float = 0.0,
    split: float | None = None,
) -> float:
    """∫_0^∞ f(t) dt for a Gaussian-at-zero, power-law-at-infinity integrand.

    Args:
        f: Integrand in t
        scale: Squared natural length ρ² of the problem; the Gaussian factor is at
            most e^{-ρ²/(4t)} up to constants
        beta: Exact decay exponent of f at infinity, > 1
        tcfg: Time quadrature settings
        t_floor: Smallest time at which ``f`` may be evaluated
        split: Time at which the range is split, ``scale`` when omitted

    Raises:
        ValueError: If ``scale`` is not positive or ``beta`` ≤ 1
        ConvergenceError: If the adaptive quadrature reports a large error
    """
    if scale <= 0:
        raise ValueError(f"Scale must be positive, got {scale}")
    if beta <= 1:
        raise ValueError(f"Decay exponent must exceed 1, got {beta}")
    config = tcfg or TimeQuadratureConfig()

    u_min = math.log(scale / (4.0 * config.gaussian_cutoff))
    if t_floor > 0 and math.log(2.0 * t_floor) > u_min:
        logger.debug(
            "Raising the small-time endpoint from %.3g to %.3g", math.exp(u_min), 2 * t_floor
        )
        u_min = math.log(2.0 * t_floor)
    u_max = math.log(scale * config.tail_factor)
    u_split = math.log(split if split is not None else scale)
    u_split = min(max(u_split, u_min), u_max)
    logger.debug(
        "Time integral over t in [%.3g, %.3g] split at %.3g, decay exponent %.3g",
        math.exp(u_min),
        math.exp(u_max),
        math.exp(u_split),
        beta,
    )

    def integrand(u: float) -> float:
        t = math.exp(u)
        return f(t) * t

    total = 0.0
    error = 0.0
    for lower, upper in ((u_min, u_split), (u_split, u_max)):
        if upper <= lower:
            continue
        value, piece_error = quad(
            integrand, lower, upper, epsabs=0.0, epsrel=config.rel_tol, limit=config.limit
        )
        total += float(value)
        error += float(piece_error)

    end = math.exp(u_max)
    total += f(end) * end / (beta - 1.0)
    if error > ERROR_SLACK * config.rel_tol * abs(total):
        raise ConvergenceError(
            f"time integral {total:.6g} has error estimate {error:.3g} above "
            f"rel_tol={config.rel_tol:g}"
        )
    return total


def natural_scale(spec: GroupSpec, g: GroupPoint, gp: GroupPoint) -> float:
    """ρ² = |z - ζ|² + |τ - σ + ½<J(·)ζ, z>|, the squared homogeneous size of g⁻¹∘g'."""
    difference = g.z - gp.z
    shift = gp.sigma - g.sigma + 0.5 * bracket_term(spec, gp.z, g.z)
    return float(difference @ difference + np.linalg.norm(shift))


def green_eval(
    spec: GroupSpec,
    g: GroupPoint,
    gp: GroupPoint,
    cfg: QuadratureConfig | None = None,
    t_quad: TimeQuadratureConfig | None = None,
    kernel: HeatKernel | None = None,
) -> float:
    """Fundamental solution ∫_0^∞ p(g, g', t) dt of the horizontal Laplacian.

    Args:
        spec: The group
        g: Evaluation point
        gp: Pole
        cfg: λ-quadrature settings for the kernel
        t_quad: Time quadrature settings
        kernel: Kernel to integrate; the fastest kernel for ``spec`` when omitted

    Raises:
        PoleError: If ``g`` equals ``gp``
    """
    check_point(spec, g)
    check_point(spec, gp)
    if np.array_equal(g.flat, gp.flat):
        raise PoleError(f"Green function evaluated at its pole {gp.flat.tolist()}")
    heat = kernel or make_kernel(spec, cfg)
    beta = spec.m / 2.0 + spec.k
    return integrate_over_time(
        lambda t: heat.evaluate(g, gp, t).value,
        natural_scale(spec, g, gp),
        beta,
        t_quad,
        t_floor=heat.t_min(g, gp),
    )
