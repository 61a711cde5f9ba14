"""Baouendi-Grushin operator Δ_w + (|w|²/4)Δ_σ on R^n × R^k.

Its heat kernel is the Heisenberg-type integrand with the drift phase removed:

    (2^k / (4πt)^{n/2+k}) ∫ e^{-(i/t)<λ, σ'-σ>} j(|λ|)^{n/2}
        · exp{-(|λ| / (4t·tanh|λ|))((|w|² + |w'|²) - 2<w, w'>·sech|λ|)} dλ.

With x·coth x·sech x = j(x) the Gaussian factor is the radial envelope with
α = |w|² + |w'|² and β = 2<w, w'>. Points are carried as :class:`GroupPoint`
values with z = w.
"""

import numpy as np
import numpy.typing as npt

from step2heat.config import QuadratureConfig, TimeQuadratureConfig
from step2heat.errors import PoleError
from step2heat.kernel.carnot import OscillatoryKernel
from step2heat.kernel.green import integrate_over_time
from step2heat.kernel.heisenberg import RadialEnvelope, radial_query
from step2heat.models import GroupPoint, LambdaQuery


class GrushinKernel(OscillatoryKernel):
    """Heat kernel of the Baouendi-Grushin operator with arbitrary pole.

    Args:
        n: Dimension of the w variable, at least 1
        k: Dimension of the σ variable, at least 1
        cfg: Quadrature settings
    """

    def __init__(self, n: int, k: int, cfg: QuadratureConfig | None = None) -> None:
        if n < 1:
            raise ValueError(f"Dimension n must be at least 1, got {n}")
        if k < 1:
            raise ValueError(f"Dimension k must be at least 1, got {k}")
        self.m, self.k = n, k
        self.exponent = n / 2.0 + k
        super().__init__(RadialEnvelope(k, n / 2.0), cfg)

    def _check(self, g: GroupPoint) -> None:
        if g.z.shape != (self.m,) or g.sigma.shape != (self.k,):
            raise ValueError(
                f"point with dimensions ({g.z.size}, {g.sigma.size}) does not match "
                f"(n, k) = ({self.m}, {self.k})"
            )

    def query(self, g: GroupPoint, gp: GroupPoint, t: float) -> LambdaQuery:
        if t <= 0:
            raise ValueError(f"Time must be positive, got {t}")
        self._check(g)
        self._check(gp)
        alpha = float(g.z @ g.z + gp.z @ gp.z)
        beta = 2.0 * float(g.z @ gp.z)
        return radial_query((gp.sigma - g.sigma) / t, t, alpha, beta)

    def scale(self, g: GroupPoint, gp: GroupPoint) -> float:
        """Squared Grushin size of the pair, |w - w'|² + |Δσ|²/(|Δσ|^{1/2} + |w| + |w'|)²."""
        horizontal = g.z - gp.z
        vertical = float(np.linalg.norm(gp.sigma - g.sigma))
        weight = np.sqrt(vertical) + float(np.linalg.norm(g.z)) + float(np.linalg.norm(gp.z))
        anisotropic = vertical**2 / weight**2 if vertical > 0 else 0.0
        return float(horizontal @ horizontal) + anisotropic


def _point(w: npt.ArrayLike, sigma: npt.ArrayLike) -> GroupPoint:
    return GroupPoint(np.atleast_1d(np.asarray(w, dtype=np.float64)), np.atleast_1d(sigma))


def bg_heat(
    n: int,
    k: int,
    w: npt.ArrayLike,
    wp: npt.ArrayLike,
    sigma: npt.ArrayLike,
    sigmap: npt.ArrayLike,
    t: float,
    cfg: QuadratureConfig | None = None,
) -> float:
    """Baouendi-Grushin heat kernel at (w, σ), (w', σ'), t."""
    kernel = GrushinKernel(n, k, cfg)
    return kernel.evaluate(_point(w, sigma), _point(wp, sigmap), t).value


def bg_green(
    g: tuple[npt.ArrayLike, npt.ArrayLike],
    gp: tuple[npt.ArrayLike, npt.ArrayLike],
    cfg: QuadratureConfig | None = None,
    t_quad: TimeQuadratureConfig | None = None,
) -> float:
    """Fundamental solution ∫_0^∞ of the Baouendi-Grushin heat kernel.

    Args:
        g: Evaluation point (w, σ)
        gp: Pole (w', σ')
        cfg: λ-quadrature settings
        t_quad: Time quadrature settings

    Raises:
        PoleError: If the two points coincide
    """
    point = _point(*g)
    pole = _point(*gp)
    if np.array_equal(point.flat, pole.flat):
        raise PoleError(f"Green function evaluated at its pole {pole.flat.tolist()}")
    kernel = GrushinKernel(point.z.size, point.sigma.size, cfg)
    return integrate_over_time(
        lambda t: kernel.evaluate(point, pole, t).value,
        kernel.scale(point, pole),
        kernel.exponent,
        t_quad,
        t_floor=kernel.t_min(point, pole),
    )
