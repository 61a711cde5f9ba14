"""Eigendecomposition-free kernels for groups of Heisenberg type.

When J(λ)² = -|λ|² I every eigenvalue of √A(λ) equals |λ|, and the integrand
depends on λ only through |λ| and the phase. The same radial envelope

    j(|λ|)^power · exp{-(α·|λ|coth|λ| - β·j(|λ|)) / 4t}

serves the Heisenberg-type heat kernel (power m/2, α = |z-ζ|², β = 0), the
Baouendi-Grushin kernel and the extension kernels of the fractional family.
"""

from collections.abc import Sequence

import numpy as np
import numpy.typing as npt
from scipy.integrate import quad

from step2heat.config import QuadratureConfig
from step2heat.errors import NotHeisenbergTypeError
from step2heat.group.law import bracket_term
from step2heat.group.spec import check_point, is_heisenberg_type
from step2heat.kernel.carnot import OscillatoryKernel
from step2heat.kernel.quadrature import sphere_area
from step2heat.linalg.matrix_functions import j_function, log_j, x_coth_x
from step2heat.models import GroupPoint, GroupSpec, KernelValue, LambdaQuery
from step2heat.protocols import NodeData

FloatArray = npt.NDArray[np.float64]


class RadialEnvelope:
    """Envelope depending on |λ| only; queries carry (α, β) as their form."""

    def __init__(self, k: int, power: float) -> None:
        if power <= 0:
            raise ValueError(f"Envelope power must be positive, got {power}")
        self.k = k
        self.power = power

    def bound(self, r: float) -> float:
        return float(np.exp(self.power * log_j(r)))

    def diagonal_mass(self) -> float:
        value, _ = quad(
            lambda r: r ** (self.k - 1) * float(np.exp(self.power * log_j(r))),
            0.0,
            np.inf,
            limit=200,
        )
        return sphere_area(self.k) * float(value)

    def prepare(self, lambdas: FloatArray) -> NodeData:
        radii = np.linalg.norm(np.atleast_2d(lambdas), axis=1)
        return {
            "log_base": self.power * log_j(radii),
            "coth": x_coth_x(radii),
            "j": j_function(radii),
        }

    def log_values(self, data: NodeData, queries: Sequence[LambdaQuery]) -> FloatArray:
        forms = np.stack([query.form for query in queries])
        times = np.array([query.t for query in queries])
        quadratic = np.outer(forms[:, 0], data["coth"]) - np.outer(forms[:, 1], data["j"])
        return data["log_base"][np.newaxis, :] - quadratic / (4.0 * times[:, np.newaxis])


def radial_query(omega: npt.ArrayLike, t: float, alpha: float, beta: float) -> LambdaQuery:
    """Query for a radial envelope; α/4t sets how fast the envelope varies in |λ|."""
    if t <= 0:
        raise ValueError(f"Time must be positive, got {t}")
    return LambdaQuery(
        omega=np.asarray(omega, dtype=np.float64),
        t=t,
        form=np.array([alpha, beta]),
        gauss_scale=alpha / (4.0 * t),
    )


class HeisenbergTypeKernel(OscillatoryKernel):
    """Heat kernel of a Heisenberg-type group through scalar profiles of |λ|.

    Raises:
        NotHeisenbergTypeError: If ``spec`` is not of Heisenberg type
    """

    def __init__(self, spec: GroupSpec, cfg: QuadratureConfig | None = None) -> None:
        if not is_heisenberg_type(spec):
            raise NotHeisenbergTypeError(f"{spec.name!r} is not of Heisenberg type")
        self.spec = spec
        self.m, self.k = spec.m, spec.k
        self.exponent = spec.m / 2.0 + spec.k
        super().__init__(RadialEnvelope(spec.k, spec.m / 2.0), cfg)

    def query(self, g: GroupPoint, gp: GroupPoint, t: float) -> LambdaQuery:
        if t <= 0:
            raise ValueError(f"Time must be positive, got {t}")
        check_point(self.spec, g)
        check_point(self.spec, gp)
        difference = g.z - gp.z
        shift = gp.sigma - g.sigma + 0.5 * bracket_term(self.spec, gp.z, g.z)
        return radial_query(shift / t, t, float(difference @ difference), 0.0)


def heisenberg_type_eval(
    spec: GroupSpec,
    g: GroupPoint,
    gp: GroupPoint,
    t: float,
    cfg: QuadratureConfig | None = None,
) -> KernelValue:
    """One-shot p(g, g', t) on a Heisenberg-type group.

    Raises:
        NotHeisenbergTypeError: If ``spec`` is not of Heisenberg type
    """
    return HeisenbergTypeKernel(spec, cfg).evaluate(g, gp, t)
