"""Verification suites: each one returns rows of :class:`CheckResult`.

Checks that need a specific group shape (the planar integrals need m = 2, k = 1;
closed forms need a group of Heisenberg type) report a ``skip`` row instead of
failing on other groups.
"""

import math
from collections.abc import Callable, Sequence
from typing import Literal

import numpy as np
import numpy.typing as npt

from step2heat.config import McConfig, QuadratureConfig, StencilConfig, TimeQuadratureConfig
from step2heat.group.spec import is_heisenberg_type
from step2heat.kernel.carnot import make_kernel
from step2heat.kernel.green import green_eval
from step2heat.kernel.heisenberg import HeisenbergTypeKernel
from step2heat.kernel.quadrature import uniform_rule
from step2heat.logging import get_logger
from step2heat.models import (
    CheckResult,
    FractionalParams,
    GroupPoint,
    GroupSpec,
    OscillatorParams,
    OUSystem,
)
from step2heat.ou.hormander import hormander_q
from step2heat.ou.mehler import classical_mehler, mehler_P, mehler_via_ou
from step2heat.pipeline import ordered_map
from step2heat.special.fractional import (
    RieszKernel,
    c_constant,
    endpoint_constant,
    gauge,
    measure_constant,
)
from step2heat.verification.monte_carlo import (
    gaussian_bump,
    mc_vs_kernel,
    planar_expectation,
    trig_bump,
)
from step2heat.verification.stencil import (
    drift_elimination_residual,
    euclidean_residual,
    oscillator_residual,
    pde_residual,
)

logger = get_logger(__name__)

FloatArray = npt.NDArray[np.float64]
Suite = Literal["pde", "mass", "semigroup", "mc", "vertical", "ou", "green", "fractional"]
SUITES: tuple[Suite, ...] = (
    "pde",
    "mass",
    "semigroup",
    "mc",
    "vertical",
    "ou",
    "green",
    "fractional",
)

VERTICAL_TARGET = 1.0 / math.sqrt(4.0 * math.pi)
FRACTIONAL_ORDERS = (0.25, 0.5, 0.75, 1.0)
PROFILE_POINTS = 10
MIN_GAUGE = 0.25
# Planar Gaussian control; the Richardson time error is about h_t⁴/4 at t = 1
CONTROL_STENCIL = StencilConfig(h_t=0.025)


def _is_planar(spec: GroupSpec) -> bool:
    return (spec.m, spec.k) == (2, 1)


def _require_planar(spec: GroupSpec, what: str) -> None:
    if not _is_planar(spec):
        raise ValueError(f"The {what} needs a group with m = 2, k = 1, got ({spec.m}, {spec.k})")


def _skip(check: str, reason: str) -> CheckResult:
    logger.warning("Skipping %s: %s", check, reason)
    return CheckResult(check, math.nan, math.nan, math.nan, None, reason)


def _row(
    check: str, value: float, target: float, tolerance: float, detail: str = ""
) -> CheckResult:
    return CheckResult(check, value, target, tolerance, abs(value - target) <= tolerance, detail)


def _relative(value: float, reference: float) -> float:
    return abs(value - reference) / abs(reference)


def mass_check(spec: GroupSpec, t: float = 1.0, cfg: QuadratureConfig | None = None) -> float:
    """∫ p(e, g', t) dg' by planar quadrature; expected 1."""
    _require_planar(spec, "mass check")
    value, _ = planar_expectation(spec, gaussian_bump(0.0), t, cfg)
    return value


def semigroup_check(
    spec: GroupSpec,
    t: float = 0.5,
    s: float = 0.5,
    target: GroupPoint | None = None,
    cfg: QuadratureConfig | None = None,
    half_width: float = 6.0,
) -> tuple[float, float]:
    """Both sides of p(e, g'', t + s) = ∫ p(e, g', t) p(g', g'', s) dg'.

    The intermediate point g' = (ζ, τ) runs over [-half_width, half_width]³. In τ the
    integrand has poles at distance of order t from the real axis, so the τ panels
    are kept at width 2.

    Returns:
        The direct value p(e, g'', t + s) and the convolution integral
    """
    _require_planar(spec, "semigroup check")
    far = target or GroupPoint(np.array([0.5, 0.0]), np.array([0.25]))
    heat = make_kernel(spec, cfg)
    identity = GroupPoint.identity(2, 1)
    nodes, weights = uniform_rule(-half_width, half_width, 4, 10)
    heights, height_weights = uniform_rule(
        -half_width, half_width, max(1, round(half_width)), 12
    )
    middle = [
        GroupPoint(np.array([x, y]), np.array([tau]))
        for x in nodes
        for y in nodes
        for tau in heights
    ]
    first = heat.evaluate_many([(identity, point, t) for point in middle])
    second = heat.evaluate_many([(point, far, s) for point in middle])
    products = np.array([a.value * b.value for a, b in zip(first, second, strict=True)])
    volume = np.einsum("i,j,l->ijl", weights, weights, height_weights).ravel()
    direct = heat.evaluate(identity, far, t + s).value
    return direct, float(volume @ products)


def vertical_identity_check(
    spec: GroupSpec,
    nu: npt.ArrayLike,
    cfg: QuadratureConfig | None = None,
    half_width: float = 12.0,
    height: float = 15.0,
) -> float:
    """∫∫ p((r·ν⊥, σ), e, 1) dr dσ over the vertical plane orthogonal to ν.

    Integrating out σ leaves the one-dimensional Gaussian (4π)^{-1} e^{-r²/4},
    so the expected value is 1/√(4π).
    """
    _require_planar(spec, "vertical identity")
    direction = np.asarray(nu, dtype=np.float64)
    if direction.shape != (2,) or not math.isclose(float(np.linalg.norm(direction)), 1.0):
        raise ValueError(f"Direction must be a unit vector in the plane, got {direction.tolist()}")
    normal = np.array([-direction[1], direction[0]])
    heat = make_kernel(spec, cfg)
    radii, radial_weights = uniform_rule(-half_width, half_width, 8, 12)
    heights, height_weights = uniform_rule(-height, height, 30, 12)
    identity = GroupPoint.identity(2, 1)
    triples = [
        (GroupPoint(r * normal, np.array([sigma])), identity, 1.0)
        for r in radii
        for sigma in heights
    ]
    values = np.array([value.value for value in heat.evaluate_many(triples)])
    return float(np.outer(radial_weights, height_weights).ravel() @ values)


def _random_points(spec: GroupSpec, count: int, seed: int) -> list[GroupPoint]:
    rng = np.random.default_rng(seed)
    return [
        GroupPoint(rng.uniform(-1.0, 1.0, spec.m), rng.uniform(-1.0, 1.0, spec.k))
        for _ in range(count)
    ]


def pde_suite(
    spec: GroupSpec,
    cfg: QuadratureConfig | None = None,
    seed: int = 0,
    n_points: int = 5,
) -> list[CheckResult]:
    """Normalised heat-equation residual at random points, t = 1, plus the Gaussian control."""
    heat = make_kernel(spec, cfg)
    identity = GroupPoint.identity(spec.m, spec.k)
    residuals = [
        pde_residual(spec, point, identity, 1.0, qcfg=cfg, kernel=heat)
        for point in _random_points(spec, n_points, seed)
    ]
    control = euclidean_residual([0.3, -0.2], [0.0, 0.0], 1.0, CONTROL_STENCIL)
    return [
        _row("pde-residual", max(residuals), 0.0, 1e-3, f"max over {n_points} points"),
        _row("pde-euclidean-control", control, 0.0, 1e-6),
    ]


def mass_suite(spec: GroupSpec, cfg: QuadratureConfig | None = None) -> list[CheckResult]:
    if not _is_planar(spec):
        return [_skip("mass", "planar quadrature needs m = 2, k = 1")]
    return [_row("mass", mass_check(spec, 1.0, cfg), 1.0, 1e-3, "t = 1")]


def semigroup_suite(spec: GroupSpec, cfg: QuadratureConfig | None = None) -> list[CheckResult]:
    if not _is_planar(spec):
        return [_skip("semigroup", "planar quadrature needs m = 2, k = 1")]
    direct, convolved = semigroup_check(spec, cfg=cfg)
    return [_row("semigroup", convolved, direct, 1e-2 * abs(direct), "t = s = 0.5")]


def mc_suite(
    spec: GroupSpec, cfg: QuadratureConfig | None = None, mc: McConfig | None = None
) -> list[CheckResult]:
    """Monte Carlo means of the library test functions against the kernel side."""
    config = mc or McConfig()
    rows = []
    for name, f in (("mc-gaussian", gaussian_bump(1.0)), ("mc-trig", trig_bump((1.0,)))):
        report = mc_vs_kernel(spec, f, mc=config, cfg=cfg)
        rows.append(
            CheckResult(
                name,
                report.mc_mean,
                report.kernel_value,
                report.gate,
                report.passed,
                f"{report.n_paths} paths, t = {config.t:g}",
            )
        )
    return rows


def vertical_suite(spec: GroupSpec, cfg: QuadratureConfig | None = None) -> list[CheckResult]:
    if not _is_planar(spec):
        return [_skip("vertical", "planar quadrature needs m = 2, k = 1")]
    root = 1.0 / math.sqrt(2.0)
    directions = {"e1": (1.0, 0.0), "e2": (0.0, 1.0), "diagonal": (root, root)}
    return [
        _row(f"vertical-{name}", vertical_identity_check(spec, nu, cfg), VERTICAL_TARGET, 1e-3)
        for name, nu in directions.items()
    ]


def _kolmogorov_closed_form(z: FloatArray, zeta: FloatArray, t: float) -> float:
    covariance = np.array([[1.0, t / 2.0], [t / 2.0, t**2 / 3.0]])
    shift = zeta - np.array([[1.0, 0.0], [t, 1.0]]) @ z
    distance = float(shift @ np.linalg.solve(covariance, shift))
    return float(np.exp(-distance / (4.0 * t)) / (4.0 * np.pi * math.sqrt(t**4 / 12.0)))


def ou_suite(spec: GroupSpec, stencil: StencilConfig | None = None) -> list[CheckResult]:
    """Ornstein-Uhlenbeck and oscillator identities, plus the drift elimination on ``spec``."""
    z, zeta, t = np.array([0.3, -0.4]), np.array([0.1, 0.5]), 0.7
    kolmogorov = OUSystem(Q=np.diag([1.0, 0.0]), B=np.array([[0.0, 0.0], [1.0, 0.0]]))
    oscillator = OscillatorParams(D=np.diag([0.5, 1.2]), t=t)
    isotropic = OscillatorParams(D=math.sqrt(2.0) * np.eye(2), t=t)
    lam = np.zeros(spec.k)
    lam[0] = 0.2
    return [
        _row(
            "ou-kolmogorov",
            _relative(hormander_q(kolmogorov, z, zeta, t), _kolmogorov_closed_form(z, zeta, t)),
            0.0,
            1e-10,
        ),
        _row(
            "ou-mehler-classical",
            _relative(mehler_P(isotropic, z, zeta), classical_mehler(2.0, z, zeta, t)),
            0.0,
            1e-12,
        ),
        _row(
            "ou-mehler-via-ou",
            _relative(mehler_via_ou(oscillator, z, zeta), mehler_P(oscillator, z, zeta)),
            0.0,
            1e-8,
        ),
        _row(
            "ou-oscillator-residual", oscillator_residual(oscillator, z, zeta, stencil), 0.0, 1e-3
        ),
        _row(
            "ou-drift-elimination",
            drift_elimination_residual(
                spec, lam, np.linspace(0.3, -0.2, spec.m), np.zeros(spec.m), 0.5, stencil
            ),
            0.0,
            1e-3,
            "|λ| = 0.2, t = 0.5",
        ),
    ]


def _sample_points(
    spec: GroupSpec, count: int = PROFILE_POINTS, seed: int = 0
) -> list[GroupPoint]:
    """A horizontal, a vertical and a mixed point, then random points with N ≥ MIN_GAUGE.

    Raises:
        ValueError: If fewer than three points are requested
    """
    if count < 3:
        raise ValueError(f"Profile needs at least 3 points, got {count}")
    horizontal = np.zeros(spec.m)
    horizontal[0] = 1.0
    vertical = np.zeros(spec.k)
    vertical[0] = 0.5
    mixed_z = np.full(spec.m, 0.6 / math.sqrt(spec.m))
    mixed_sigma = np.full(spec.k, 0.3 / math.sqrt(spec.k))
    points = [
        GroupPoint(horizontal, np.zeros(spec.k)),
        GroupPoint(np.zeros(spec.m), vertical),
        GroupPoint(mixed_z, mixed_sigma),
    ]
    rng = np.random.default_rng(seed)
    while len(points) < count:
        candidate = GroupPoint(rng.uniform(-1.0, 1.0, spec.m), rng.uniform(-1.0, 1.0, spec.k))
        if gauge(candidate.z, candidate.sigma).N >= MIN_GAUGE:
            points.append(candidate)
    return points


def green_suite(
    spec: GroupSpec,
    cfg: QuadratureConfig | None = None,
    t_quad: TimeQuadratureConfig | None = None,
    n_points: int = PROFILE_POINTS,
) -> list[CheckResult]:
    """Green function against C_1(m, k)·N^{2-Q} on groups of Heisenberg type."""
    if not is_heisenberg_type(spec):
        return [_skip("green", "closed form needs a group of Heisenberg type")]
    heat = HeisenbergTypeKernel(spec, cfg)
    identity = GroupPoint.identity(spec.m, spec.k)
    constant = c_constant(1.0, spec.m, spec.k)
    profile = []
    for point in _sample_points(spec, n_points):
        size = gauge(point.z, point.sigma).N
        value = green_eval(spec, point, identity, cfg, t_quad, kernel=heat)
        profile.append(value * size ** (spec.Q_hom - 2))
    spread = (max(profile) - min(profile)) / abs(profile[0])
    return [
        _row("green-closed-form", profile[0], constant, 1e-3 * constant, "g = (e1, 0)"),
        _row("green-gauge-profile", spread, 0.0, 1e-3, f"over {len(profile)} points"),
        _row("green-endpoint-ratio", profile[0] / endpoint_constant(spec.m, spec.k), 0.25, 1e-3),
    ]


def fractional_suite(
    spec: GroupSpec,
    cfg: QuadratureConfig | None = None,
    t_quad: TimeQuadratureConfig | None = None,
    n_points: int = PROFILE_POINTS,
) -> list[CheckResult]:
    """Measured constants of ℰ_s against C_s(m, k), and K_1 against the heat kernel."""
    if not is_heisenberg_type(spec):
        return [_skip("fractional", "fractional kernels need a group of Heisenberg type")]
    points = _sample_points(spec, n_points)
    identity = GroupPoint.identity(spec.m, spec.k)
    riesz = RieszKernel(FractionalParams(s=1.0, y=0.0, spec=spec), cfg)
    heat = HeisenbergTypeKernel(spec, cfg)
    rows = [
        _row(
            "fractional-k1-heat",
            _relative(
                riesz.evaluate(points[2], identity, 1.0).value,
                heat.evaluate(points[2], identity, 1.0).value,
            ),
            0.0,
            1e-8,
        )
    ]
    for s in FRACTIONAL_ORDERS:
        report = measure_constant(FractionalParams(s=s, y=0.0, spec=spec), points, cfg, t_quad)
        rows.append(
            _row(
                f"fractional-profile-s={s:g}",
                report.spread,
                0.0,
                1e-3,
                f"over {report.n_points} points",
            )
        )
        rows.append(_row(f"fractional-constant-s={s:g}", report.theorem_ratio, 1.0, 1e-3))
        if report.endpoint_ratio is not None:
            rows.append(_row("fractional-endpoint-ratio", report.endpoint_ratio, 0.25, 1e-3))
    return rows


def run_suite(
    spec: GroupSpec,
    suite: Suite,
    cfg: QuadratureConfig | None = None,
    seed: int = 0,
    mc: McConfig | None = None,
) -> list[CheckResult]:
    """Run one named suite."""
    runners: dict[Suite, Callable[[], list[CheckResult]]] = {
        "pde": lambda: pde_suite(spec, cfg, seed),
        "mass": lambda: mass_suite(spec, cfg),
        "semigroup": lambda: semigroup_suite(spec, cfg),
        "mc": lambda: mc_suite(spec, cfg, mc or McConfig(seed=seed)),
        "vertical": lambda: vertical_suite(spec, cfg),
        "ou": lambda: ou_suite(spec),
        "green": lambda: green_suite(spec, cfg),
        "fractional": lambda: fractional_suite(spec, cfg),
    }
    if suite not in runners:
        raise ValueError(f"Unknown suite {suite!r}, expected one of {', '.join(SUITES)}")
    logger.debug("Running suite %s on %s", suite, spec.name)
    return runners[suite]()


def run_suites(
    spec: GroupSpec,
    suites: Sequence[Suite],
    cfg: QuadratureConfig | None = None,
    seed: int = 0,
    mc: McConfig | None = None,
    workers: int | None = None,
) -> list[CheckResult]:
    """Run suites on worker threads; rows keep the order of ``suites``."""
    results = ordered_map(lambda suite: run_suite(spec, suite, cfg, seed, mc), suites, workers)
    return [row for rows in results for row in rows]
