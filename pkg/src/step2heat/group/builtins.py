"""Built-in groups: Heisenberg groups, the quaternionic H-type group, free step-two groups."""

import re

import numpy as np

from step2heat.errors import SpecParseError
from step2heat.models import GroupSpec

SYMPLECTIC_BLOCK = np.array([[0.0, 1.0], [-1.0, 0.0]])

# Left multiplication by i, j, k on the quaternions in the basis (1, i, j, k)
QUATERNION_UNITS = np.array(
    [
        [[0, -1, 0, 0], [1, 0, 0, 0], [0, 0, 0, -1], [0, 0, 1, 0]],
        [[0, 0, -1, 0], [0, 0, 0, 1], [1, 0, 0, 0], [0, -1, 0, 0]],
        [[0, 0, 0, -1], [0, 0, -1, 0], [0, 1, 0, 0], [1, 0, 0, 0]],
    ],
    dtype=np.float64,
)


def heisenberg(n: int = 1) -> GroupSpec:
    """Heisenberg group H^n: m = 2n, k = 1, J = block-diagonal symplectic matrix."""
    if n < 1:
        raise ValueError(f"Heisenberg index must be positive, got {n}")
    matrix = np.kron(np.eye(n), SYMPLECTIC_BLOCK)
    return GroupSpec(name=f"heisenberg{n}", m=2 * n, k=1, J=matrix[np.newaxis], tolerance=0.0)


def quaternionic() -> GroupSpec:
    """Quaternionic H-type group: m = 4, k = 3."""
    return GroupSpec(name="quaternionic", m=4, k=3, J=QUATERNION_UNITS, tolerance=0.0)


def free_step_two(q: int = 3) -> GroupSpec:
    """Free step-two group on q generators: m = q, k = q(q-1)/2, J_(a<b) = E_ab - E_ba."""
    if q < 2:
        raise ValueError(f"Number of generators must be at least 2, got {q}")
    pairs = [(a, b) for a in range(q) for b in range(a + 1, q)]
    matrices = np.zeros((len(pairs), q, q))
    for index, (a, b) in enumerate(pairs):
        matrices[index, a, b] = 1.0
        matrices[index, b, a] = -1.0
    return GroupSpec(name=f"free{q}", m=q, k=len(pairs), J=matrices, tolerance=0.0)


def builtin_group(name: str) -> GroupSpec:
    """Look up ``heisenberg<n>``, ``quaternionic`` or ``free<q>``.

    Raises:
        SpecParseError: If the name matches none of the families
    """
    if name == "quaternionic":
        return quaternionic()
    match = re.fullmatch(r"(heisenberg|free)(\d+)", name)
    if match is None:
        raise SpecParseError(f"unknown builtin group {name!r}")
    family, size = match.group(1), int(match.group(2))
    try:
        return heisenberg(size) if family == "heisenberg" else free_step_two(size)
    except ValueError as exc:
        raise SpecParseError(str(exc)) from exc
