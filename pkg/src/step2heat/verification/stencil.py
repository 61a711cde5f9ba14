"""Finite-difference oracles for the horizontal Laplacian and the heat equation.

𝓛 is realised two ways. The ``"blocks"`` scheme differentiates in coordinates
with the coefficients of :class:`HorizontalOperator`: second differences for Δ_z
and the σσ block, cross differences for the mixed block. The ``"flows"`` scheme
uses X_j² f(g) = d²/ds² f(g∘(s·e_j, 0)) and needs only 2m + 1 points. Both are
exact on polynomials of degree ≤ 2 in (z, σ). Richardson extrapolation combines
steps h and h/2 as (4·L_{h/2} - L_h)/3.
"""

from collections.abc import Callable
from dataclasses import dataclass
from typing import Literal

import numpy as np
import numpy.typing as npt
from scipy.linalg import expm

from step2heat.config import QuadratureConfig, StencilConfig
from step2heat.group.law import horizontal_step
from step2heat.group.operator import HorizontalOperator
from step2heat.group.spec import j_of
from step2heat.kernel.carnot import make_kernel
from step2heat.models import GroupPoint, GroupSpec, OscillatorParams
from step2heat.ou.mehler import mehler_complex, reduction_params
from step2heat.protocols import HeatKernel

FloatArray = npt.NDArray[np.float64]
Scheme = Literal["blocks", "flows"]


@dataclass(frozen=True)
class Stencil:
    """Linear functional Σ_i weights[i]·f(points[i])."""

    points: tuple[GroupPoint, ...]
    weights: FloatArray

    def apply(self, f: Callable[[GroupPoint], float]) -> float:
        return float(sum(w * f(p) for p, w in zip(self.points, self.weights, strict=True)))

    def combine(self, values: npt.ArrayLike) -> float:
        return float(np.asarray(values, dtype=np.float64) @ self.weights)

    def scaled(self, factor: float) -> "Stencil":
        return Stencil(self.points, factor * self.weights)

    def __add__(self, other: "Stencil") -> "Stencil":
        return Stencil(self.points + other.points, np.concatenate([self.weights, other.weights]))


def _shifted(
    g: GroupPoint, dz: FloatArray | None = None, ds: FloatArray | None = None
) -> GroupPoint:
    z = g.z if dz is None else g.z + dz
    sigma = g.sigma if ds is None else g.sigma + ds
    return GroupPoint(z, sigma)


def _unit(size: int, index: int, step: float) -> FloatArray:
    vector = np.zeros(size)
    vector[index] = step
    return vector


def _cross(
    g: GroupPoint,
    first: tuple[str, int, float],
    second: tuple[str, int, float],
    m: int,
    k: int,
) -> Stencil:
    """(f(++) - f(+-) - f(-+) + f(--)) / (4·h1·h2) for a mixed second derivative."""
    points = []
    for sign_a, sign_b in ((1, 1), (1, -1), (-1, 1), (-1, -1)):
        dz = np.zeros(m)
        ds = np.zeros(k)
        for (kind, index, step), sign in ((first, sign_a), (second, sign_b)):
            target = dz if kind == "z" else ds
            target[index] += sign * step
        points.append(_shifted(g, dz, ds))
    scale = 1.0 / (4.0 * first[2] * second[2])
    return Stencil(tuple(points), scale * np.array([1.0, -1.0, -1.0, 1.0]))


def _second(g: GroupPoint, kind: str, index: int, step: float, m: int, k: int) -> Stencil:
    forward = _unit(m, index, step) if kind == "z" else _unit(k, index, step)
    if kind == "z":
        points = (_shifted(g, dz=forward), _shifted(g, dz=-forward))
    else:
        points = (_shifted(g, ds=forward), _shifted(g, ds=-forward))
    return Stencil(points, np.array([1.0, 1.0]) / step**2)


def _blocks(op: HorizontalOperator, g: GroupPoint, h_z: float, h_sigma: float) -> Stencil:
    m, k = op.spec.m, op.spec.k
    sigma_block = op.sigma_block(g.z)
    mixed_block = op.mixed_block(g.z)
    centre_weight = -2.0 * m / h_z**2 - 2.0 * float(np.trace(sigma_block)) / h_sigma**2
    stencil = Stencil((g,), np.array([centre_weight]))
    for j in range(m):
        stencil = stencil + _second(g, "z", j, h_z, m, k)
    for ell in range(k):
        if sigma_block[ell, ell] != 0.0:
            stencil = stencil + _second(g, "s", ell, h_sigma, m, k).scaled(sigma_block[ell, ell])
        for other in range(ell + 1, k):
            if sigma_block[ell, other] != 0.0:
                cross = _cross(g, ("s", ell, h_sigma), ("s", other, h_sigma), m, k)
                stencil = stencil + cross.scaled(2.0 * sigma_block[ell, other])
        for s in range(m):
            if mixed_block[ell, s] != 0.0:
                cross = _cross(g, ("z", s, h_z), ("s", ell, h_sigma), m, k)
                stencil = stencil + cross.scaled(mixed_block[ell, s])
    return stencil


def _flows(op: HorizontalOperator, g: GroupPoint, h: float) -> Stencil:
    points: list[GroupPoint] = [g]
    for j in range(op.spec.m):
        points.append(horizontal_step(op.spec, g, j, h))
        points.append(horizontal_step(op.spec, g, j, -h))
    weights = np.full(len(points), 1.0 / h**2)
    weights[0] = -2.0 * op.spec.m / h**2
    return Stencil(tuple(points), weights)


def laplacian_stencil(
    op: HorizontalOperator,
    g: GroupPoint,
    cfg: StencilConfig | None = None,
    scheme: Scheme = "blocks",
) -> Stencil:
    """Weights and points realising 𝓛f(g), with Richardson extrapolation if configured."""
    config = cfg or StencilConfig()

    def once(scale: float) -> Stencil:
        if scheme == "flows":
            return _flows(op, g, scale * config.h_z)
        if scheme == "blocks":
            return _blocks(op, g, scale * config.h_z, scale * config.h_sigma)
        raise ValueError(f"Unknown stencil scheme: {scheme}")

    if not config.richardson:
        return once(1.0)
    return once(0.5).scaled(4.0 / 3.0) + once(1.0).scaled(-1.0 / 3.0)


def apply_L(
    op: HorizontalOperator,
    f: Callable[[GroupPoint], float],
    g: GroupPoint,
    cfg: StencilConfig | None = None,
    scheme: Scheme = "blocks",
) -> float:
    """Finite-difference 𝓛f(g) = Δ_z f + ¼Σ<J_ℓz, J_ℓ'z>∂σ_ℓ∂σ_ℓ' f + ΣΘ_ℓ∂σ_ℓ f."""
    return laplacian_stencil(op, g, cfg, scheme).apply(f)


def _time_offsets(t: float, h: float, richardson: bool) -> tuple[FloatArray, FloatArray]:
    """Times and weights of the central ∂_t difference."""
    if h >= t:
        raise ValueError(f"Time step {h} must be smaller than t = {t}")
    if not richardson:
        return np.array([t + h, t - h]), np.array([1.0, -1.0]) / (2.0 * h)
    half = 0.5 * h
    times = np.array([t + half, t - half, t + h, t - h])
    weights = np.array([8.0, -8.0, -1.0, 1.0]) / (6.0 * h)
    return times, weights


def pde_residual(
    spec: GroupSpec,
    g: GroupPoint,
    gp: GroupPoint,
    t: float,
    cfg: StencilConfig | None = None,
    qcfg: QuadratureConfig | None = None,
    kernel: HeatKernel | None = None,
    scheme: Scheme = "flows",
) -> float:
    """|𝓛_g p(g, g', t) - ∂_t p(g, g', t)| divided by p(e, e, t).

    All kernel values of the stencil are computed in one batch.
    """
    config = cfg or StencilConfig()
    heat = kernel or make_kernel(spec, qcfg)
    stencil = laplacian_stencil(HorizontalOperator(spec), g, config, scheme)
    times, time_weights = _time_offsets(t, config.h_t, config.richardson)
    triples = [(point, gp, t) for point in stencil.points]
    triples += [(g, gp, float(time)) for time in times]
    values = np.array([value.value for value in heat.evaluate_many(triples)])
    n_space = len(stencil.points)
    laplacian = stencil.combine(values[:n_space])
    derivative = float(values[n_space:] @ time_weights)
    return abs(laplacian - derivative) / heat.diagonal(t)


def _euclidean_derivatives(
    f: Callable[[npt.NDArray[np.complex128]], complex],
    z: FloatArray,
    h: float,
    richardson: bool,
) -> tuple[complex, npt.NDArray[np.complex128]]:
    """Laplacian and gradient of f at z by central differences."""

    def once(step: float) -> tuple[complex, npt.NDArray[np.complex128]]:
        centre = f(z.astype(np.complex128))
        laplacian = 0j
        gradient = np.zeros(z.size, dtype=np.complex128)
        for j in range(z.size):
            offset = _unit(z.size, j, step)
            plus = f((z + offset).astype(np.complex128))
            minus = f((z - offset).astype(np.complex128))
            laplacian += (plus - 2.0 * centre + minus) / step**2
            gradient[j] = (plus - minus) / (2.0 * step)
        return laplacian, gradient

    if not richardson:
        return once(h)
    fine_lap, fine_grad = once(0.5 * h)
    coarse_lap, coarse_grad = once(h)
    return (4.0 * fine_lap - coarse_lap) / 3.0, (4.0 * fine_grad - coarse_grad) / 3.0


def _time_derivative(
    f: Callable[[float], complex], t: float, h: float, richardson: bool
) -> complex:
    times, weights = _time_offsets(t, h, richardson)
    return complex(sum(w * f(float(time)) for time, w in zip(times, weights, strict=True)))


def euclidean_residual(
    z: npt.ArrayLike, zeta: npt.ArrayLike, t: float, cfg: StencilConfig | None = None
) -> float:
    """|Δ - ∂_t| applied to the Euclidean heat kernel, divided by (4πt)^{-m/2}.

    Gaussian control for the stencil: the λ = 0 factor of the group kernel.
    """
    config = cfg or StencilConfig()
    z_array = np.asarray(z, dtype=np.float64)
    zeta_array = np.asarray(zeta, dtype=np.float64)
    m = z_array.size

    def gaussian(point: npt.NDArray[np.complex128], time: float) -> complex:
        shift = point - zeta_array
        return complex((4.0 * np.pi * time) ** (-m / 2.0) * np.exp(-(shift @ shift) / (4.0 * time)))

    centre = z_array.astype(np.complex128)
    laplacian, _ = _euclidean_derivatives(
        lambda p: gaussian(p, t), z_array, config.h_z, config.richardson
    )
    derivative = _time_derivative(
        lambda time: gaussian(centre, time), t, config.h_t, config.richardson
    )
    return abs(laplacian - derivative) / (4.0 * np.pi * t) ** (-m / 2.0)


def oscillator_residual(
    p: OscillatorParams,
    z: npt.ArrayLike,
    zeta: npt.ArrayLike,
    cfg: StencilConfig | None = None,
) -> float:
    """|(Δ - |Dz|² - ∂_t)𝒫(·, ζ, t)| at z, divided by (4πt)^{-m/2}."""
    config = cfg or StencilConfig()
    z_array = np.asarray(z, dtype=np.float64)
    m = z_array.size

    def kernel(point: npt.NDArray[np.complex128], time: float) -> complex:
        return mehler_complex(OscillatorParams(D=p.D, t=time), point, zeta)

    centre = z_array.astype(np.complex128)
    laplacian, _ = _euclidean_derivatives(
        lambda q: kernel(q, p.t), z_array, config.h_z, config.richardson
    )
    derivative = _time_derivative(
        lambda time: kernel(centre, time), p.t, config.h_t, config.richardson
    )
    potential = float(np.sum((p.D @ z_array) ** 2))
    value = kernel(centre, p.t)
    return abs(laplacian - potential * value - derivative) / (4.0 * np.pi * p.t) ** (-m / 2.0)


def drift_elimination_residual(
    spec: GroupSpec,
    lam: npt.ArrayLike,
    z: npt.ArrayLike,
    zeta: npt.ArrayLike,
    t: float,
    cfg: StencilConfig | None = None,
) -> float:
    """Residual of ṽ(z, t) = 𝒫(e^{2πitJ(λ)}z, ζ, t) in the drifted equation.

    With D = π√A(λ), ṽ solves Δṽ + 2πi<J(λ)z, ∇ṽ> - π²<A(λ)z, z>ṽ - ∂_t ṽ = 0,
    the partial Fourier transform in σ of the heat equation. The residual is
    divided by (4πt)^{-m/2}.
    """
    config = cfg or StencilConfig()
    z_array = np.asarray(z, dtype=np.float64)
    kaplan = j_of(spec, lam)
    potential_matrix = -kaplan @ kaplan
    diffusion = reduction_params(spec, lam, t).D

    def rotated(point: npt.NDArray[np.complex128], time: float) -> complex:
        rotation = expm(2j * np.pi * time * kaplan)
        return mehler_complex(OscillatorParams(D=diffusion, t=time), rotation @ point, zeta)

    centre = z_array.astype(np.complex128)
    laplacian, gradient = _euclidean_derivatives(
        lambda q: rotated(q, t), z_array, config.h_z, config.richardson
    )
    derivative = _time_derivative(
        lambda time: rotated(centre, time), t, config.h_t, config.richardson
    )
    value = rotated(centre, t)
    drift = 2j * np.pi * complex((kaplan @ z_array) @ gradient)
    potential = np.pi**2 * float(z_array @ potential_matrix @ z_array)
    residual = laplacian + drift - potential * value - derivative
    return abs(residual) / (4.0 * np.pi * t) ** (-spec.m / 2.0)
