"""Protocol definitions for kernels and their λ-envelopes.

The quadrature engine only sees an :class:`Envelope`; the general Carnot kernel,
the Heisenberg-type kernel, the Baouendi-Grushin kernel and the fractional
kernels each provide one. Everything that evaluates a heat kernel on a group
accepts a :class:`HeatKernel`.
"""

from collections.abc import Sequence
from typing import Protocol

import numpy as np
import numpy.typing as npt

from step2heat.models import GroupPoint, GroupSpec, KernelValue, LambdaQuery

FloatArray = npt.NDArray[np.float64]
NodeData = dict[str, FloatArray]


class Envelope(Protocol):
    """Even, non-negative amplitude of an oscillatory λ-integrand.

    Implementations must satisfy envelope(λ) ≤ bound(|λ|) ≤ 1 with ``bound``
    non-increasing, and envelope(-λ) = envelope(λ).
    """

    k: int

    def bound(self, r: float) -> float:
        """Pointwise bound of the envelope on the sphere of radius ``r``."""
        ...

    def diagonal_mass(self) -> float:
        """Lower estimate of ∫ envelope(λ) dλ with zero Gaussian data."""
        ...

    def prepare(self, lambdas: FloatArray) -> NodeData:
        """Time-independent node data; must contain ``log_base`` of shape (N,)."""
        ...

    def log_values(self, data: NodeData, queries: Sequence[LambdaQuery]) -> FloatArray:
        """Logarithm of the envelope for every query and node, shape (P, N)."""
        ...


class HeatKernel(Protocol):
    """A heat kernel p(g, g', t) on a step-two group.

    Kernels are evaluation contexts: they own caches and are not shared
    between threads.
    """

    spec: GroupSpec

    def evaluate(self, g: GroupPoint, gp: GroupPoint, t: float) -> KernelValue:
        """Evaluate p(g, g', t).

        Raises:
            ConvergenceError: If the quadrature misses its tolerance
        """
        ...

    def evaluate_many(
        self, triples: Sequence[tuple[GroupPoint, GroupPoint, float]]
    ) -> list[KernelValue]:
        """Evaluate many (g, g', t) triples, sharing node sets where possible."""
        ...

    def diagonal(self, t: float) -> float:
        """p(e, e, t)."""
        ...

    def t_min(self, g: GroupPoint, gp: GroupPoint) -> float:
        """Smallest time the node budget resolves for this pair of points."""
        ...
