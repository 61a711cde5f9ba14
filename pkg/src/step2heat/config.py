"""Configuration classes for step2heat.

This module provides centralized configuration with sensible defaults. Every
class validates itself on construction and raises ``ValueError`` on bad input.
"""

import math
import os
from dataclasses import dataclass
from typing import Literal

QuadratureMethod = Literal["tensor-gauss", "adaptive-subdivision"]

THREADS_ENV_VAR = "STEP2HEAT_THREADS"


@dataclass
class QuadratureConfig:
    """Configuration of the oscillatory λ-quadrature.

    Attributes:
        rel_tol: Target error relative to the diagonal value at the same time
        k0: Decay constant; None estimates it from the group
        truncation_radius: Half-width R of the integration box; None picks R from the
            tail bound of the integrand envelope
        nodes_per_dim: Gauss-Legendre nodes per panel and dimension before the
            oscillation allowance is added
        panel_width: Width of one composite panel; None uses π for k = 1 and 2π otherwise
        max_refinements: Node-count increases allowed before giving up
        method: Quadrature rule; None uses tensor Gauss-Legendre for k ≤ 3 and adaptive
            subdivision above
        max_nodes_per_panel: Node budget per panel and dimension; exceeding it marks the
            evaluation time as too small to resolve
        max_total_nodes: Budget for the full tensor grid
        max_boxes: Box budget of the adaptive subdivision rule
        check_imag: Measure the discarded imaginary part on every evaluation
        k0_samples: Sphere samples used by the decay estimate
        safety_factor: Factor applied to sampled sphere minima
        cache_size: Node sets kept per evaluation context
        seed: Seed of the scrambled Sobol sphere sampling
    """

    rel_tol: float = 1e-8
    k0: float | None = None
    truncation_radius: float | None = None
    nodes_per_dim: int = 12
    panel_width: float | None = None
    max_refinements: int = 4
    method: QuadratureMethod | None = None
    max_nodes_per_panel: int = 2048
    max_total_nodes: int = 2_000_000
    max_boxes: int = 4000
    check_imag: bool = True
    k0_samples: int = 1024
    safety_factor: float = 0.9
    cache_size: int = 16
    seed: int = 0

    def __post_init__(self) -> None:
        """Validate configuration parameters."""
        if not 0 < self.rel_tol <= 1e-1:
            raise ValueError(f"Relative tolerance must be in (0, 0.1], got {self.rel_tol}")
        if self.k0 is not None and self.k0 <= 0:
            raise ValueError(f"k0 must be positive, got {self.k0}")
        if self.truncation_radius is not None and self.truncation_radius <= 0:
            raise ValueError(
                f"Truncation radius must be positive, got {self.truncation_radius}"
            )
        if self.nodes_per_dim < 8:
            raise ValueError(f"Nodes per dimension must be at least 8, got {self.nodes_per_dim}")
        if self.panel_width is not None and self.panel_width <= 0:
            raise ValueError(f"Panel width must be positive, got {self.panel_width}")
        if self.max_refinements < 0:
            raise ValueError(
                f"Maximum refinements must be non-negative, got {self.max_refinements}"
            )
        if self.method not in (None, "tensor-gauss", "adaptive-subdivision"):
            raise ValueError(f"Unknown quadrature method {self.method!r}")
        if self.max_nodes_per_panel < self.nodes_per_dim:
            raise ValueError(
                "Maximum nodes per panel must be at least nodes_per_dim, "
                f"got {self.max_nodes_per_panel} < {self.nodes_per_dim}"
            )
        if self.max_total_nodes <= 0:
            raise ValueError(f"Maximum total nodes must be positive, got {self.max_total_nodes}")
        if self.max_boxes <= 0:
            raise ValueError(f"Maximum boxes must be positive, got {self.max_boxes}")
        if self.k0_samples < 64:
            raise ValueError(f"k0 samples must be at least 64, got {self.k0_samples}")
        if not 0 < self.safety_factor <= 1:
            raise ValueError(f"Safety factor must be in (0, 1], got {self.safety_factor}")
        if self.cache_size <= 0:
            raise ValueError(f"Cache size must be positive, got {self.cache_size}")

    def resolved_method(self, k: int) -> QuadratureMethod:
        """Quadrature rule used for a group with vertical dimension ``k``."""
        if self.method is not None:
            return self.method
        return "tensor-gauss" if k <= 3 else "adaptive-subdivision"

    def resolved_panel_width(self, k: int) -> float:
        """Composite panel width used for a group with vertical dimension ``k``."""
        if self.panel_width is not None:
            return self.panel_width
        return math.pi if k == 1 else 2.0 * math.pi


@dataclass
class TimeQuadratureConfig:
    """Configuration of time integrals (Green functions, fractional kernels).

    Attributes:
        rel_tol: Relative tolerance handed to ``scipy.integrate.quad``
        limit: Maximum number of quad subintervals
        gaussian_cutoff: The small-time endpoint puts this exponent on the Gaussian factor
        tail_factor: The large-time endpoint is this multiple of the natural time scale
    """

    rel_tol: float = 1e-6
    limit: int = 200
    gaussian_cutoff: float = 37.0
    tail_factor: float = 1e3

    def __post_init__(self) -> None:
        """Validate configuration parameters."""
        if not 0 < self.rel_tol < 1:
            raise ValueError(f"Relative tolerance must be in (0, 1), got {self.rel_tol}")
        if self.limit <= 0:
            raise ValueError(f"Limit must be positive, got {self.limit}")
        if self.gaussian_cutoff <= 0:
            raise ValueError(f"Gaussian cutoff must be positive, got {self.gaussian_cutoff}")
        if self.tail_factor <= 1:
            raise ValueError(f"Tail factor must exceed 1, got {self.tail_factor}")


@dataclass
class StencilConfig:
    """Step sizes of the finite-difference oracles.

    Attributes:
        h_z: Step along the horizontal flows
        h_sigma: Step in vertical coordinates
        h_t: Step in time
        richardson: Combine steps h and h/2 as (4·L(h/2) - L(h))/3
    """

    h_z: float = 0.05
    h_sigma: float = 0.05
    h_t: float = 0.05
    richardson: bool = True

    def __post_init__(self) -> None:
        """Validate configuration parameters."""
        for name in ("h_z", "h_sigma", "h_t"):
            value = getattr(self, name)
            if value <= 0:
                raise ValueError(f"Step {name} must be positive, got {value}")


@dataclass
class McConfig:
    """Configuration of the Monte Carlo horizontal diffusion.

    Attributes:
        n_paths: Number of sample paths
        n_steps: Euler-Maruyama steps per path
        seed: 64-bit seed of the counter-based generator
        t: Final time
        block_size: Paths per generator substream
        antithetic: Pair every increment sequence with its negation
    """

    n_paths: int = 10_000
    n_steps: int = 200
    seed: int = 0
    t: float = 0.5
    block_size: int = 8192
    antithetic: bool = False

    def __post_init__(self) -> None:
        """Validate configuration parameters."""
        if self.n_paths < 1000:
            raise ValueError(f"Number of paths must be at least 1000, got {self.n_paths}")
        if self.n_steps < 100:
            raise ValueError(f"Number of steps must be at least 100, got {self.n_steps}")
        if not 0 <= self.seed < 2**64:
            raise ValueError(f"Seed must be a 64-bit unsigned integer, got {self.seed}")
        if self.t <= 0:
            raise ValueError(f"Time must be positive, got {self.t}")
        if self.block_size <= 0:
            raise ValueError(f"Block size must be positive, got {self.block_size}")
        if self.antithetic and self.block_size % 2:
            raise ValueError(f"Antithetic sampling needs an even block size, got {self.block_size}")

    @property
    def dt(self) -> float:
        """Time step of the discretisation."""
        return self.t / self.n_steps


Command = Literal["validate", "eval", "grid", "green", "verify", "bench"]
COMMANDS: tuple[Command, ...] = ("validate", "eval", "grid", "green", "verify", "bench")


@dataclass
class RunConfig:
    """Resolved settings of one command line invocation.

    Attributes:
        command: Sub-command to run
        spec_path: Group spec file or ``builtin:<name>``
        tolerance: Relative tolerance of kernel evaluations
        seed: Seed for Monte Carlo and random sample points
        output: Output path; None writes to standard output
    """

    command: Command
    spec_path: str | None = None
    tolerance: float = 1e-8
    seed: int = 0
    output: str | None = None

    def __post_init__(self) -> None:
        """Validate configuration parameters."""
        if self.command not in COMMANDS:
            raise ValueError(f"Unknown command {self.command!r}")
        if not 0 < self.tolerance <= 1e-1:
            raise ValueError(f"Tolerance must be in (0, 0.1], got {self.tolerance}")
        if self.seed < 0:
            raise ValueError(f"Seed must be non-negative, got {self.seed}")


def worker_count() -> int:
    """Number of worker threads, capped by ``STEP2HEAT_THREADS`` when it is set."""
    available = os.cpu_count() or 1
    raw = os.environ.get(THREADS_ENV_VAR)
    if raw is None or raw.strip() == "":
        return available
    try:
        requested = int(raw)
    except ValueError as exc:
        raise ValueError(f"{THREADS_ENV_VAR} must be a positive integer, got {raw!r}") from exc
    if requested <= 0:
        raise ValueError(f"{THREADS_ENV_VAR} must be a positive integer, got {raw!r}")
    return min(requested, available)
