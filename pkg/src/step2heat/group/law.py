"""Group law, inverse and dilations in logarithmic coordinates."""

import numpy as np

from step2heat.group.spec import check_point
from step2heat.models import GroupPoint, GroupSpec


def bracket_term(spec: GroupSpec, z: np.ndarray, zeta: np.ndarray) -> np.ndarray:
    """Vector with components <J(ε_ℓ)z, ζ>, ℓ = 1..k."""
    return np.einsum("lij,j,i->l", spec.J, z, zeta)


def multiply(spec: GroupSpec, g: GroupPoint, h: GroupPoint) -> GroupPoint:
    """Group product (z + ζ, σ + τ + ½ Σ_ℓ <J(ε_ℓ)z, ζ> ε_ℓ).

    Raises:
        ValueError: If a point does not match the dimensions of ``spec``
    """
    check_point(spec, g)
    check_point(spec, h)
    return GroupPoint(
        g.z + h.z,
        g.sigma + h.sigma + 0.5 * bracket_term(spec, g.z, h.z),
    )


def inverse(spec: GroupSpec, g: GroupPoint) -> GroupPoint:
    """Inverse (-z, -σ)."""
    check_point(spec, g)
    return GroupPoint(-g.z, -g.sigma)


def dilate(spec: GroupSpec, r: float, g: GroupPoint) -> GroupPoint:
    """Anisotropic dilation (r·z, r²·σ).

    Raises:
        ValueError: If ``r`` is not positive or ``g`` has the wrong dimensions
    """
    if r <= 0:
        raise ValueError(f"Dilation factor must be positive, got {r}")
    check_point(spec, g)
    return GroupPoint(r * g.z, r * r * g.sigma)


def horizontal_step(spec: GroupSpec, g: GroupPoint, direction: int, h: float) -> GroupPoint:
    """Point g∘(h·e_direction, 0) on the integral curve of the field X_direction."""
    step = np.zeros(spec.m)
    step[direction] = h
    return multiply(spec, g, GroupPoint(step, np.zeros(spec.k)))
