"""Immutable data models for step2heat.

All models are frozen dataclasses that validate themselves on construction.
Models holding NumPy arrays copy them to float64 and mark the copies read-only;
they compare by identity, use ``numpy.testing`` or the helpers below to compare
values.
"""

from dataclasses import dataclass, field
from typing import TYPE_CHECKING

import numpy as np
import numpy.typing as npt

from step2heat.errors import NotHeisenbergTypeError, SpecValidationError

if TYPE_CHECKING:
    from collections.abc import Sequence

FloatArray = npt.NDArray[np.float64]


def _frozen_array(values: "npt.ArrayLike", ndim: int, name: str) -> FloatArray:
    array = np.array(values, dtype=np.float64)
    if array.ndim != ndim:
        raise ValueError(f"{name} must have {ndim} dimensions, got shape {array.shape}")
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class GroupSpec:
    """A step-two Carnot group given by the matrices of its Kaplan map.

    Attributes:
        name: Label of the group
        m: Dimension of the horizontal layer
        k: Dimension of the vertical layer
        J: Array of shape (k, m, m) holding J(ε_1), ..., J(ε_k)
        tolerance: Entrywise tolerance of the skew-symmetry and rank checks; 0 for
            matrices that were given exactly
    """

    name: str
    m: int
    k: int
    J: FloatArray
    tolerance: float = 1e-12

    def __post_init__(self) -> None:
        """Validate dimensions, skew-symmetry and linear independence."""
        if self.m < 2:
            raise SpecValidationError("dimension", f"m must be at least 2, got {self.m}")
        if self.k < 1:
            raise SpecValidationError("dimension", f"k must be positive, got {self.k}")
        matrices = np.array(self.J, dtype=np.float64)
        if matrices.shape != (self.k, self.m, self.m):
            raise SpecValidationError(
                "dimension",
                f"expected {self.k} matrices of shape {self.m}x{self.m}, got array of shape "
                f"{matrices.shape}",
            )
        if not np.all(np.isfinite(matrices)):
            raise SpecValidationError("dimension", "matrix entries must be finite")
        for index, matrix in enumerate(matrices):
            defect = float(np.max(np.abs(matrix + matrix.T)))
            if defect > self.tolerance:
                raise SpecValidationError(
                    "skew-symmetry",
                    f"J[{index}] is not skew-symmetric (max |J + J^T| = {defect:.3g})",
                )
        if not np.any(matrices):
            raise SpecValidationError("nondegenerate", "at least one J matrix must be nonzero")
        singular_values = np.linalg.svd(matrices.reshape(self.k, -1), compute_uv=False)
        threshold = max(self.tolerance, 1e-12) * max(1.0, float(singular_values[0]))
        rank = int(np.sum(singular_values > threshold))
        if rank < self.k:
            raise SpecValidationError(
                "linear-independence",
                f"the {self.k} J matrices span a space of dimension {rank}",
            )
        matrices.setflags(write=False)
        object.__setattr__(self, "J", matrices)

    @property
    def Q_hom(self) -> int:
        """Homogeneous dimension m + 2k."""
        return self.m + 2 * self.k

    @property
    def dimension(self) -> int:
        """Topological dimension m + k."""
        return self.m + self.k


@dataclass(frozen=True, eq=False)
class GroupPoint:
    """A point (z, σ) in logarithmic coordinates.

    Attributes:
        z: Horizontal coordinates, shape (m,)
        sigma: Vertical coordinates, shape (k,)
    """

    z: FloatArray
    sigma: FloatArray

    def __post_init__(self) -> None:
        """Copy coordinates into read-only float arrays."""
        object.__setattr__(self, "z", _frozen_array(self.z, 1, "z"))
        object.__setattr__(self, "sigma", _frozen_array(self.sigma, 1, "sigma"))

    @classmethod
    def identity(cls, m: int, k: int) -> "GroupPoint":
        """The identity element e = (0, 0)."""
        return cls(np.zeros(m), np.zeros(k))

    @classmethod
    def from_flat(cls, values: "Sequence[float] | FloatArray", m: int) -> "GroupPoint":
        """Split a flat coordinate vector (z_1..z_m, σ_1..σ_k)."""
        flat = np.asarray(values, dtype=np.float64)
        return cls(flat[:m], flat[m:])

    @property
    def flat(self) -> FloatArray:
        """Coordinates as one vector (z, σ)."""
        return np.concatenate([self.z, self.sigma])

    def allclose(self, other: "GroupPoint", atol: float = 1e-12) -> bool:
        """Coordinatewise comparison within ``atol``."""
        return bool(
            self.z.shape == other.z.shape
            and self.sigma.shape == other.sigma.shape
            and np.allclose(self.z, other.z, rtol=0.0, atol=atol)
            and np.allclose(self.sigma, other.sigma, rtol=0.0, atol=atol)
        )

    def is_identity(self) -> bool:
        """True for the point (0, 0)."""
        return not (np.any(self.z) or np.any(self.sigma))


@dataclass(frozen=True, eq=False)
class SpectralData:
    """Eigendecomposition of A(λ) with the even matrix functions built on it.

    Attributes:
        lam: The vertical vector λ
        eigenvalues: Eigenvalues μ_i of A(λ), ascending, clamped at 0
        eigenvectors: Orthogonal matrix V with A = V diag(μ) V^T
        j_values: j(√μ_i)
        x_coth_x: √μ_i·coth√μ_i
        det_j: det j(√A(λ)) = Π j(√μ_i)
    """

    lam: FloatArray
    eigenvalues: FloatArray
    eigenvectors: FloatArray
    j_values: FloatArray
    x_coth_x: FloatArray
    det_j: float

    @property
    def roots(self) -> FloatArray:
        """Eigenvalues of √A(λ)."""
        return np.sqrt(self.eigenvalues)


@dataclass(frozen=True)
class DecayEstimate:
    """Sampled decay constants of the kernel integrand.

    Attributes:
        k0: Lower bound for the second-largest eigenvalue of √A(λ) on the unit sphere
        sample_count: Number of sphere samples
        safety_factor: Factor applied to the sampled minima
        profile: Safety-scaled sphere minima of every eigenvalue of √A(λ), largest first;
            the envelope obeys det j(√A(λ))^{1/2} ≤ Π_i j(profile_i·|λ|)^{1/2}
        ceiling: Upper estimate of the largest eigenvalue of √A(λ) on the unit sphere
    """

    k0: float
    sample_count: int
    safety_factor: float
    profile: tuple[float, ...] = ()
    ceiling: float = 1.0

    def __post_init__(self) -> None:
        """Validate the estimate."""
        if self.k0 <= 0:
            raise ValueError(f"k0 must be positive, got {self.k0}")
        if self.sample_count <= 0:
            raise ValueError(f"Sample count must be positive, got {self.sample_count}")
        if not 0 < self.safety_factor <= 1:
            raise ValueError(f"Safety factor must be in (0, 1], got {self.safety_factor}")
        if any(value < 0 for value in self.profile):
            raise ValueError(f"Profile entries must be non-negative, got {self.profile}")
        if self.ceiling <= 0:
            raise ValueError(f"Ceiling must be positive, got {self.ceiling}")


@dataclass(frozen=True, eq=False)
class OUSystem:
    """Ornstein-Uhlenbeck generator tr(Q∇²) + <Bz, ∇>.

    Attributes:
        Q: Symmetric positive semidefinite diffusion matrix
        B: Drift matrix
    """

    Q: FloatArray
    B: FloatArray

    def __post_init__(self) -> None:
        """Validate shapes, symmetry and semidefiniteness of Q."""
        q = _frozen_array(self.Q, 2, "Q")
        b = _frozen_array(self.B, 2, "B")
        if q.shape[0] != q.shape[1] or q.shape != b.shape:
            raise ValueError(f"Q and B must be square of equal size, got {q.shape} and {b.shape}")
        if np.max(np.abs(q - q.T), initial=0.0) > 1e-12:
            raise ValueError("Q must be symmetric")
        if np.linalg.eigvalsh(q)[0] < -1e-12:
            raise ValueError("Q must be positive semidefinite")
        object.__setattr__(self, "Q", q)
        object.__setattr__(self, "B", b)

    @property
    def m(self) -> int:
        """State dimension."""
        return int(self.Q.shape[0])


@dataclass(frozen=True, eq=False)
class OscillatorParams:
    """Generalised harmonic oscillator Δ - |Dz|² at time t.

    Attributes:
        D: Symmetric positive semidefinite matrix
        t: Positive time
    """

    D: FloatArray
    t: float

    def __post_init__(self) -> None:
        """Validate D and t."""
        d = _frozen_array(self.D, 2, "D")
        if d.shape[0] != d.shape[1]:
            raise ValueError(f"D must be square, got shape {d.shape}")
        if np.max(np.abs(d - d.T), initial=0.0) > 1e-12:
            raise ValueError("D must be symmetric")
        if np.linalg.eigvalsh(d)[0] < -1e-12:
            raise ValueError("D must be positive semidefinite")
        if self.t <= 0:
            raise ValueError(f"Time must be positive, got {self.t}")
        object.__setattr__(self, "D", d)


@dataclass(frozen=True)
class KernelValue:
    """Result of one kernel evaluation.

    Attributes:
        value: Real part of the λ-integral times its prefactor
        imag_residue: Magnitude of the discarded imaginary part
        est_error: Estimated absolute quadrature error
    """

    value: float
    imag_residue: float = 0.0
    est_error: float = 0.0

    def __post_init__(self) -> None:
        """Validate the error fields."""
        if self.imag_residue < 0:
            raise ValueError(f"Imaginary residue must be non-negative, got {self.imag_residue}")
        if self.est_error < 0:
            raise ValueError(f"Estimated error must be non-negative, got {self.est_error}")


@dataclass(frozen=True, eq=False)
class FractionalParams:
    """Parameters of the extension and fractional kernels.

    Attributes:
        s: Fractional order in (0, 1]
        y: Extension variable, non-negative
        spec: A group of Heisenberg type
    """

    s: float
    y: float
    spec: GroupSpec

    def __post_init__(self) -> None:
        """Validate the order, the extension variable and the group type."""
        if not 0 < self.s <= 1:
            raise ValueError(f"Order s must be in (0, 1], got {self.s}")
        if self.y < 0:
            raise ValueError(f"Extension variable y must be non-negative, got {self.y}")
        from step2heat.group.spec import is_heisenberg_type

        if not is_heisenberg_type(self.spec):
            raise NotHeisenbergTypeError(
                f"fractional kernels need a group of Heisenberg type, {self.spec.name!r} is not"
            )


@dataclass(frozen=True)
class GaugeValue:
    """Homogeneous gauge N = (|z|⁴ + 16|σ|²)^{1/4}."""

    N: float

    def __post_init__(self) -> None:
        """Validate the gauge."""
        if self.N < 0:
            raise ValueError(f"Gauge must be non-negative, got {self.N}")


@dataclass(frozen=True)
class CheckResult:
    """One row of a verification report.

    Attributes:
        check: Name of the check
        value: Measured value
        target: Expected value
        tolerance: Accepted deviation
        passed: True or False, None when the check does not apply to the group
        detail: Free-form note
    """

    check: str
    value: float
    target: float
    tolerance: float
    passed: bool | None
    detail: str = ""

    @property
    def status(self) -> str:
        """``pass``, ``fail`` or ``skip``."""
        if self.passed is None:
            return "skip"
        return "pass" if self.passed else "fail"


@dataclass(frozen=True, eq=False)
class PathEndpoints:
    """Endpoints of simulated horizontal paths.

    Attributes:
        z: Horizontal endpoints, shape (n_paths, m)
        sigma: Vertical endpoints, shape (n_paths, k)
    """

    z: FloatArray
    sigma: FloatArray

    def __len__(self) -> int:
        return int(self.z.shape[0])

    def point(self, index: int) -> GroupPoint:
        """Endpoint ``index`` as a group point."""
        return GroupPoint(self.z[index], self.sigma[index])


@dataclass(frozen=True)
class McReport:
    """Comparison of a Monte Carlo mean with the kernel expectation.

    Attributes:
        mc_mean: Sample mean of the test function at the path endpoints
        mc_stderr: Standard error of that mean
        kernel_value: Integral of the test function against the kernel
        kernel_error: Estimated error of the kernel side
        n_paths: Number of paths behind the sample mean
    """

    mc_mean: float
    mc_stderr: float
    kernel_value: float
    kernel_error: float
    n_paths: int = field(default=0)

    @property
    def deviation(self) -> float:
        """Absolute difference of the two sides."""
        return abs(self.mc_mean - self.kernel_value)

    @property
    def gate(self) -> float:
        """Three times the combined standard and quadrature errors."""
        return 3.0 * (self.mc_stderr + self.kernel_error)

    @property
    def passed(self) -> bool:
        """True when the deviation stays inside the gate."""
        return self.deviation <= self.gate


@dataclass(frozen=True, eq=False)
class LambdaQuery:
    """One λ-integral ∫ Re[e^{i<λ,ω>}] · envelope(λ) dλ.

    Attributes:
        omega: Frequency vector, shape (k,)
        t: Time entering the envelope
        form: Envelope-specific data of the Gaussian factor (the horizontal
            difference z - ζ for the general kernel, (α, β) for radial kernels)
        gauss_scale: Exponent c of the Gaussian factor at λ = 0, used to size the rule
    """

    omega: FloatArray
    t: float
    form: FloatArray
    gauss_scale: float = 0.0

    def __post_init__(self) -> None:
        """Validate time and Gaussian scale."""
        if self.t <= 0:
            raise ValueError(f"Time must be positive, got {self.t}")
        if self.gauss_scale < 0:
            raise ValueError(f"Gaussian scale must be non-negative, got {self.gauss_scale}")
        object.__setattr__(self, "omega", _frozen_array(self.omega, 1, "omega"))
        object.__setattr__(self, "form", _frozen_array(self.form, 1, "form"))


@dataclass(frozen=True)
class QuadratureResult:
    """Value of a λ-integral before the kernel prefactor.

    Attributes:
        value: Integral of the real part over R^k
        est_error: Difference between the fine and the coarse rule
        imag_residue: Magnitude of the imaginary part on the coarse mirrored rule
        diagonal: Integral of the envelope with zero Gaussian data on the same rule
    """

    value: float
    est_error: float
    imag_residue: float
    diagonal: float


@dataclass(frozen=True)
class ConstantReport:
    """Measured constant of the fractional fundamental solution.

    Attributes:
        s: Fractional order
        measured: Mean of ℰ_s(g)·N(g)^{Q-2s} over the sample points
        spread: (max - min)/mean of the same ratios
        theorem_constant: C_s(m, k) from the closed form
        endpoint_constant: Constant of the ∫_0^∞ p dt identity, only for s = 1
        n_points: Number of sample points
    """

    s: float
    measured: float
    spread: float
    theorem_constant: float
    endpoint_constant: float | None = None
    n_points: int = 0

    @property
    def theorem_ratio(self) -> float:
        """measured / C_s(m, k)."""
        return self.measured / self.theorem_constant

    @property
    def endpoint_ratio(self) -> float | None:
        """measured / endpoint constant, when that constant applies."""
        if self.endpoint_constant is None:
            return None
        return self.measured / self.endpoint_constant
