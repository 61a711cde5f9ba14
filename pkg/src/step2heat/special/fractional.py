"""Extension and fractional kernels on groups of Heisenberg type.

For 0 < s ≤ 1 the extension kernel is

    q_s(z, σ, y, t) = (2^k / (4πt)^{m/2+k+1-s}) ∫ e^{-(i/t)<σ, λ>} j(|λ|)^{m/2+1-s}
                      · exp{-((|z|² + y²)/4t)·|λ|coth|λ|} dλ,

the fractional heat kernel is K_s = (4πt)^{1-s}·q_s at y = 0, and the
fundamental solution of the fractional operator is

    ℰ_s(g) = (1/Γ(s)) ∫_0^∞ t^{s-1} K_s(g, t) dt = C_s(m, k)·N(g)^{2s-Q},

with the gauge N(z, σ) = (|z|⁴ + 16|σ|²)^{1/4}. At s = 1 everything reduces to
the heat kernel of the group and its Green function.
"""

from collections.abc import Iterable
from typing import Literal

import numpy as np
import numpy.typing as npt
from scipy.special import gamma

from step2heat.config import QuadratureConfig, TimeQuadratureConfig
from step2heat.errors import PoleError
from step2heat.group.law import bracket_term
from step2heat.group.spec import check_point
from step2heat.kernel.carnot import OscillatoryKernel
from step2heat.kernel.green import integrate_over_time
from step2heat.kernel.heisenberg import RadialEnvelope, radial_query
from step2heat.logging import get_logger
from step2heat.models import (
    ConstantReport,
    FractionalParams,
    GaugeValue,
    GroupPoint,
    GroupSpec,
    LambdaQuery,
)

logger = get_logger(__name__)

ConstantSource = Literal["theorem", "endpoint-identity"]


def gauge(z: npt.ArrayLike, sigma: npt.ArrayLike) -> GaugeValue:
    """Homogeneous gauge N = (|z|⁴ + 16|σ|²)^{1/4}."""
    z_array = np.asarray(z, dtype=np.float64)
    sigma_array = np.asarray(sigma, dtype=np.float64)
    squared = float(z_array @ z_array)
    return GaugeValue(N=float((squared**2 + 16.0 * float(sigma_array @ sigma_array)) ** 0.25))


def c_constant(s: float, m: int, k: int) -> float:
    """C_s(m, k) = 2^{m/2+2k-3s-1} Γ(½(m/2+1-s)) Γ(½(m/2+k-s)) / (π^{(m+k+1)/2} Γ(s)).

    Raises:
        ValueError: If ``s`` is outside (0, 1]
    """
    if not 0 < s <= 1:
        raise ValueError(f"Order s must be in (0, 1], got {s}")
    half_m = m / 2.0
    numerator = (
        2.0 ** (half_m + 2 * k - 3 * s - 1)
        * gamma(0.5 * (half_m + 1 - s))
        * gamma(0.5 * (half_m + k - s))
    )
    return float(numerator / (np.pi ** ((m + k + 1) / 2.0) * gamma(s)))


def endpoint_constant(m: int, k: int) -> float:
    """Constant of the Green function identity ∫_0^∞ p dt = c·N^{2-Q}.

    2^{m/2+2k-2} Γ(m/4) Γ(½(m/2+k-1)) / π^{(m+k+1)/2}; four times C_1(m, k).
    """
    half_m = m / 2.0
    numerator = 2.0 ** (half_m + 2 * k - 2) * gamma(m / 4.0) * gamma(0.5 * (half_m + k - 1))
    return float(numerator / np.pi ** ((m + k + 1) / 2.0))


class ExtensionKernel(OscillatoryKernel):
    """q_s(g, g', y, t), translated so that the pole may sit anywhere."""

    def __init__(self, params: FractionalParams, cfg: QuadratureConfig | None = None) -> None:
        self.params = params
        self.spec = params.spec
        self.m, self.k = self.spec.m, self.spec.k
        self.exponent = self.spec.m / 2.0 + self.spec.k + 1.0 - params.s
        super().__init__(RadialEnvelope(self.k, self.spec.m / 2.0 + 1.0 - params.s), cfg)

    def query(self, g: GroupPoint, gp: GroupPoint, t: float) -> LambdaQuery:
        if t <= 0:
            raise ValueError(f"Time must be positive, got {t}")
        check_point(self.spec, g)
        check_point(self.spec, gp)
        difference = g.z - gp.z
        shift = gp.sigma - g.sigma + 0.5 * bracket_term(self.spec, gp.z, g.z)
        alpha = float(difference @ difference) + self.params.y**2
        return radial_query(shift / t, t, alpha, 0.0)


class RieszKernel(ExtensionKernel):
    """K_s = (4πt)^{1-s}·q_s at y = 0; the prefactor becomes 2^k (4πt)^{-(m/2+k)}."""

    def __init__(self, params: FractionalParams, cfg: QuadratureConfig | None = None) -> None:
        super().__init__(FractionalParams(s=params.s, y=0.0, spec=params.spec), cfg)
        self.exponent = self.spec.m / 2.0 + self.spec.k


def _point(spec: GroupSpec, z: npt.ArrayLike, sigma: npt.ArrayLike) -> GroupPoint:
    point = GroupPoint(np.atleast_1d(np.asarray(z, dtype=np.float64)), np.atleast_1d(sigma))
    check_point(spec, point)
    return point


def extension_q_s(
    p: FractionalParams,
    z: npt.ArrayLike,
    sigma: npt.ArrayLike,
    t: float,
    cfg: QuadratureConfig | None = None,
) -> float:
    """Extension kernel q_s((z, σ), y, t) with pole at the identity."""
    identity = GroupPoint.identity(p.spec.m, p.spec.k)
    return ExtensionKernel(p, cfg).evaluate(_point(p.spec, z, sigma), identity, t).value


def riesz_K_s(
    p: FractionalParams,
    z: npt.ArrayLike,
    sigma: npt.ArrayLike,
    t: float,
    cfg: QuadratureConfig | None = None,
) -> float:
    """Fractional heat kernel K_s((z, σ), t) with pole at the identity; ``p.y`` is ignored."""
    identity = GroupPoint.identity(p.spec.m, p.spec.k)
    return RieszKernel(p, cfg).evaluate(_point(p.spec, z, sigma), identity, t).value


def fractional_green(
    p: FractionalParams,
    z: npt.ArrayLike,
    sigma: npt.ArrayLike,
    cfg: QuadratureConfig | None = None,
    t_quad: TimeQuadratureConfig | None = None,
    kernel: RieszKernel | None = None,
) -> float:
    """Numeric ℰ_s(z, σ) = (1/Γ(s)) ∫_0^∞ t^{s-1} K_s dt, split at t = N².

    Raises:
        PoleError: If (z, σ) is the identity
    """
    point = _point(p.spec, z, sigma)
    size = gauge(point.z, point.sigma).N
    if size == 0.0:
        raise PoleError("fractional fundamental solution evaluated at its pole, the identity")
    riesz = kernel or RieszKernel(p, cfg)
    identity = GroupPoint.identity(p.spec.m, p.spec.k)
    s = p.s
    integral = integrate_over_time(
        lambda t: t ** (s - 1.0) * riesz.evaluate(point, identity, t).value,
        float(point.z @ point.z + np.linalg.norm(point.sigma)),
        p.spec.m / 2.0 + p.spec.k + 1.0 - s,
        t_quad,
        t_floor=riesz.t_min(point, identity),
        split=size**2,
    )
    return float(integral / gamma(s))


def closed_form_E_s(
    p: FractionalParams,
    z: npt.ArrayLike,
    sigma: npt.ArrayLike,
    source: ConstantSource = "theorem",
) -> float:
    """Closed form c·N^{2s-Q} with the constant taken from ``source``.

    Args:
        p: Fractional parameters
        z: Horizontal coordinates
        sigma: Vertical coordinates
        source: ``"theorem"`` for C_s(m, k), ``"endpoint-identity"`` for the
            constant of the ∫_0^∞ p dt identity (s = 1 only)

    Raises:
        PoleError: If (z, σ) is the identity
        ValueError: If the endpoint constant is requested for s ≠ 1
    """
    point = _point(p.spec, z, sigma)
    size = gauge(point.z, point.sigma).N
    if size == 0.0:
        raise PoleError("fractional fundamental solution evaluated at its pole, the identity")
    spec = p.spec
    if source == "theorem":
        constant = c_constant(p.s, spec.m, spec.k)
    elif source == "endpoint-identity":
        if p.s != 1.0:
            raise ValueError(f"The endpoint identity constant exists for s = 1 only, got {p.s}")
        constant = endpoint_constant(spec.m, spec.k)
    else:
        raise ValueError(f"Unknown constant source: {source}")
    return constant * size ** (2.0 * p.s - spec.Q_hom)


def measure_constant(
    p: FractionalParams,
    points: Iterable[GroupPoint],
    cfg: QuadratureConfig | None = None,
    t_quad: TimeQuadratureConfig | None = None,
) -> ConstantReport:
    """Numeric ℰ_s(g)·N(g)^{Q-2s} over sample points, compared with both constants."""
    riesz = RieszKernel(p, cfg)
    ratios = []
    for point in points:
        value = fractional_green(p, point.z, point.sigma, cfg, t_quad, kernel=riesz)
        size = gauge(point.z, point.sigma).N
        ratios.append(value * size ** (p.spec.Q_hom - 2.0 * p.s))
    if not ratios:
        raise ValueError("At least one sample point is required")
    samples = np.array(ratios)
    mean = float(samples.mean())
    report = ConstantReport(
        s=p.s,
        measured=mean,
        spread=float((samples.max() - samples.min()) / abs(mean)),
        theorem_constant=c_constant(p.s, p.spec.m, p.spec.k),
        endpoint_constant=endpoint_constant(p.spec.m, p.spec.k) if p.s == 1.0 else None,
        n_points=samples.size,
    )
    logger.debug(
        "Measured constant for s=%g on %s: %.10g (theorem ratio %.6f, spread %.2e)",
        p.s,
        p.spec.name,
        report.measured,
        report.theorem_ratio,
        report.spread,
    )
    return report
