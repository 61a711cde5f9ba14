"""Heat kernel of the horizontal Laplacian on a step-two Carnot group.

    p(g, g', t) = 2^k (4πt)^{-(m/2+k)} ∫_{R^k} e^{(i/t)(<τ-σ, λ> + ½<J(λ)ζ, z>)}
                  · (det j(√A(λ)))^{1/2} · exp{-(1/4t)<j(√A(λ))cosh√A(λ)(z-ζ), z-ζ>} dλ

for g = (z, σ), g' = (ζ, τ). Since j(x)·cosh x = x·coth x, the Gaussian matrix is
M(λ) = V diag(x coth x) V^T over the eigendecomposition of A(λ), which does not
depend on the points or on t and is cached with the quadrature nodes.
"""

from collections.abc import Sequence

import numpy as np
import numpy.typing as npt
from scipy.integrate import quad

from step2heat.config import QuadratureConfig
from step2heat.group.law import bracket_term
from step2heat.group.spec import check_point, is_heisenberg_type
from step2heat.kernel.quadrature import OscillatoryQuadrature, sphere_area
from step2heat.linalg.matrix_functions import (
    estimate_k0,
    j_function,
    log_j,
    spectral,
    spectral_batch,
    x_coth_x,
)
from step2heat.logging import get_logger
from step2heat.models import (
    DecayEstimate,
    GroupPoint,
    GroupSpec,
    KernelValue,
    LambdaQuery,
    QuadratureResult,
)
from step2heat.protocols import Envelope, HeatKernel, NodeData

logger = get_logger(__name__)

FloatArray = npt.NDArray[np.float64]
Triple = tuple[GroupPoint, GroupPoint, float]


def spectral_ceiling(spec: GroupSpec) -> float:
    """Upper bound for the largest eigenvalue of √A(λ) on the unit sphere."""
    norms = [float(np.linalg.norm(matrix, ord=2)) for matrix in spec.J]
    return float(np.sqrt(np.sum(np.square(norms))))


def decay_estimate(spec: GroupSpec, cfg: QuadratureConfig) -> DecayEstimate:
    """Decay constants for the truncation: sampled, or built from an explicit ``cfg.k0``."""
    if cfg.k0 is None:
        return estimate_k0(spec, cfg.k0_samples, cfg.safety_factor, cfg.seed)
    # sqrt(det j(√A)) ≤ j(k0|λ|) uses the two largest eigenvalues only
    profile = (cfg.k0, cfg.k0) + (0.0,) * (spec.m - 2)
    return DecayEstimate(
        k0=cfg.k0,
        sample_count=1,
        safety_factor=1.0,
        profile=profile,
        ceiling=spectral_ceiling(spec),
    )


class SpectralEnvelope:
    """(det j(√A(λ)))^{1/2}·exp(-<M(λ)d, d>/4t) for a general step-two group."""

    def __init__(self, spec: GroupSpec, estimate: DecayEstimate) -> None:
        self.spec = spec
        self.k = spec.k
        self.estimate = estimate
        self._profile = np.asarray(estimate.profile, dtype=np.float64)

    def bound(self, r: float) -> float:
        return float(np.exp(0.5 * np.sum(log_j(self._profile * r))))

    def diagonal_mass(self) -> float:
        ceiling = self.estimate.ceiling
        value, _ = quad(
            lambda r: r ** (self.k - 1) * float(j_function(ceiling * r)) ** (self.spec.m / 2.0),
            0.0,
            np.inf,
            limit=200,
        )
        return sphere_area(self.k) * float(value)

    def prepare(self, lambdas: FloatArray) -> NodeData:
        eigenvalues, vectors = spectral_batch(self.spec, lambdas)
        roots = np.sqrt(eigenvalues)
        gaussian = np.einsum("nij,nj,nkj->nik", vectors, x_coth_x(roots), vectors)
        return {
            "log_base": 0.5 * np.sum(log_j(roots), axis=1),
            "gaussian": gaussian.reshape(len(lambdas), -1),
        }

    def log_values(self, data: NodeData, queries: Sequence[LambdaQuery]) -> FloatArray:
        differences = np.stack([query.form for query in queries])
        outer = np.einsum("pi,pj->pij", differences, differences).reshape(len(queries), -1)
        times = np.array([query.t for query in queries])
        quadratic = outer @ data["gaussian"].T
        return data["log_base"][np.newaxis, :] - quadratic / (4.0 * times[:, np.newaxis])


class OscillatoryKernel:
    """Shared machinery of kernels written as a prefactor times a λ-integral.

    Subclasses set the point dimensions ``m`` and ``k`` and the ``exponent``, and
    implement :meth:`query`.
    The prefactor is 2^k (4πt)^{-exponent}.
    """

    m: int
    k: int
    exponent: float

    def __init__(self, envelope: Envelope, cfg: QuadratureConfig | None) -> None:
        self.cfg = cfg or QuadratureConfig()
        self.envelope = envelope
        self.quadrature = OscillatoryQuadrature(envelope, self.cfg)

    def prefactor(self, t: float) -> float:
        return float(2.0**self.k * (4.0 * np.pi * t) ** (-self.exponent))

    def _results(
        self, queries: Sequence[LambdaQuery]
    ) -> list[tuple[QuadratureResult, float]]:
        results = self.quadrature.integrate(queries)
        return [
            (result, self.prefactor(query.t))
            for result, query in zip(results, queries, strict=True)
        ]

    def _values(self, queries: Sequence[LambdaQuery]) -> list[KernelValue]:
        return [
            KernelValue(
                value=factor * result.value,
                imag_residue=factor * result.imag_residue,
                est_error=factor * result.est_error,
            )
            for result, factor in self._results(queries)
        ]

    def query(self, g: GroupPoint, gp: GroupPoint, t: float) -> LambdaQuery:
        """λ-integral data for the kernel at (g, g', t)."""
        raise NotImplementedError

    def evaluate(self, g: GroupPoint, gp: GroupPoint, t: float) -> KernelValue:
        return self.evaluate_many([(g, gp, t)])[0]

    def evaluate_many(self, triples: Sequence[Triple]) -> list[KernelValue]:
        return self._values([self.query(g, gp, t) for g, gp, t in triples])

    def diagonal(self, t: float) -> float:
        identity = GroupPoint.identity(self.m, self.k)
        return self.evaluate(identity, identity, t).value

    def t_min(self, g: GroupPoint, gp: GroupPoint) -> float:
        reference = self.query(g, gp, 1.0)
        return self.quadrature.time_threshold(
            float(np.max(np.abs(reference.omega), initial=0.0)), reference.gauss_scale
        )


class CarnotHeatKernel(OscillatoryKernel):
    """Heat kernel evaluation context for an arbitrary step-two group.

    Owns a λ-quadrature with its node cache; create one per thread.

    Args:
        spec: The group
        cfg: Quadrature settings
        estimate: Precomputed decay constants; estimated from the group when omitted
    """

    def __init__(
        self,
        spec: GroupSpec,
        cfg: QuadratureConfig | None = None,
        estimate: DecayEstimate | None = None,
    ) -> None:
        config = cfg or QuadratureConfig()
        self.spec = spec
        self.m, self.k = spec.m, spec.k
        self.exponent = spec.m / 2.0 + spec.k
        self.estimate = estimate or decay_estimate(spec, config)
        super().__init__(SpectralEnvelope(spec, self.estimate), config)

    def query(self, g: GroupPoint, gp: GroupPoint, t: float) -> LambdaQuery:
        """λ-integral data for p(g, g', t)."""
        if t <= 0:
            raise ValueError(f"Time must be positive, got {t}")
        check_point(self.spec, g)
        check_point(self.spec, gp)
        difference = g.z - gp.z
        shift = gp.sigma - g.sigma + 0.5 * bracket_term(self.spec, gp.z, g.z)
        return LambdaQuery(
            omega=shift / t,
            t=t,
            form=difference,
            gauss_scale=float(difference @ difference) / (4.0 * t),
        )


def integrand(
    spec: GroupSpec, g: GroupPoint, gp: GroupPoint, t: float, lam: npt.ArrayLike
) -> complex:
    """Complex integrand of the heat kernel at one frequency λ.

    Raises:
        ValueError: If ``t`` is not positive
    """
    if t <= 0:
        raise ValueError(f"Time must be positive, got {t}")
    lam_array = np.atleast_1d(np.asarray(lam, dtype=np.float64))
    data = spectral(spec, lam_array)
    difference = g.z - gp.z
    rotated = data.eigenvectors.T @ difference
    quadratic = float(np.sum(data.x_coth_x * rotated * rotated))
    phase = (
        lam_array @ (gp.sigma - g.sigma) + 0.5 * lam_array @ bracket_term(spec, gp.z, g.z)
    ) / t
    return complex(np.sqrt(data.det_j) * np.exp(1j * phase - quadratic / (4.0 * t)))


def heat_eval(
    spec: GroupSpec,
    g: GroupPoint,
    gp: GroupPoint,
    t: float,
    cfg: QuadratureConfig | None = None,
) -> KernelValue:
    """One-shot p(g, g', t) through the general spectral path.

    Builds a fresh evaluation context; reuse a :class:`CarnotHeatKernel` for many
    evaluations.
    """
    return CarnotHeatKernel(spec, cfg).evaluate(g, gp, t)


def make_kernel(spec: GroupSpec, cfg: QuadratureConfig | None = None) -> HeatKernel:
    """Fastest kernel for the group: the radial path for Heisenberg-type groups."""
    if is_heisenberg_type(spec):
        from step2heat.kernel.heisenberg import HeisenbergTypeKernel

        logger.debug("Using the Heisenberg-type path for %s", spec.name)
        return HeisenbergTypeKernel(spec, cfg)
    return CarnotHeatKernel(spec, cfg)
