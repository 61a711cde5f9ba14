"""Group spec documents and the Kaplan map.

A group spec is a UTF-8 JSON document::

    {"name": "heisenberg1", "m": 2, "k": 1, "J": [[[0, 1], [-1, 0]]]}

Entries of ``J`` are JSON numbers or rational strings such as ``"1/2"``. When no
entry is a float the structural checks run with tolerance 0.
"""

import json
from fractions import Fraction
from pathlib import Path
from typing import Any

import numpy as np
import numpy.typing as npt

from step2heat.errors import SpecParseError, SpecValidationError
from step2heat.logging import get_logger
from step2heat.models import GroupPoint, GroupSpec

logger = get_logger(__name__)

FLOAT_TOLERANCE = 1e-12
HEISENBERG_TYPE_TOLERANCE = 1e-12
BUILTIN_PREFIX = "builtin:"


def _entry(value: Any, where: str) -> tuple[float, bool]:
    """Convert one matrix entry, reporting whether it was exact."""
    if isinstance(value, bool):
        raise SpecParseError(f"{where}: booleans are not matrix entries")
    if isinstance(value, int):
        return float(value), True
    if isinstance(value, float):
        return value, False
    if isinstance(value, str):
        try:
            return float(Fraction(value)), True
        except (ValueError, ZeroDivisionError) as exc:
            raise SpecParseError(f"{where}: {value!r} is not a rational number") from exc
    raise SpecParseError(f"{where}: expected a number, got {type(value).__name__}")


def parse_group_spec(document: str) -> GroupSpec:
    """Parse and validate a JSON group spec.

    Args:
        document: JSON text with fields ``name``, ``m``, ``k`` and ``J``

    Returns:
        Validated group spec

    Raises:
        SpecParseError: If the text is not JSON or fields have the wrong type
        SpecValidationError: If a structural invariant fails; its ``invariant``
            attribute names the failure
    """
    try:
        raw = json.loads(document)
    except json.JSONDecodeError as exc:
        raise SpecParseError(f"malformed JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise SpecParseError("the document must be a JSON object")

    missing = [key for key in ("m", "k", "J") if key not in raw]
    if missing:
        raise SpecParseError(f"missing fields: {', '.join(missing)}")
    name = raw.get("name", "unnamed")
    if not isinstance(name, str):
        raise SpecParseError("name must be a string")
    m, k = raw["m"], raw["k"]
    if not isinstance(m, int) or isinstance(m, bool) or not isinstance(k, int) or isinstance(
        k, bool
    ):
        raise SpecParseError("m and k must be integers")

    if m < 2 or k < 1:
        raise SpecValidationError("dimension", f"need m >= 2 and k >= 1, got m={m} k={k}")
    matrices_raw = raw["J"]
    if not isinstance(matrices_raw, list):
        raise SpecParseError("J must be a list of matrices")
    if len(matrices_raw) != k:
        raise SpecValidationError("dimension", f"k={k} but J holds {len(matrices_raw)} matrices")

    exact = True
    matrices = np.zeros((k, m, m))
    for index, matrix in enumerate(matrices_raw):
        if not isinstance(matrix, list) or len(matrix) != m:
            raise SpecValidationError("dimension", f"J[{index}] must have {m} rows")
        for row_index, row in enumerate(matrix):
            if not isinstance(row, list) or len(row) != m:
                raise SpecValidationError(
                    "dimension", f"J[{index}] row {row_index} must have {m} entries"
                )
            for col_index, value in enumerate(row):
                number, is_exact = _entry(value, f"J[{index}][{row_index}][{col_index}]")
                exact = exact and is_exact
                matrices[index, row_index, col_index] = number

    spec = GroupSpec(
        name=name, m=m, k=k, J=matrices, tolerance=0.0 if exact else FLOAT_TOLERANCE
    )
    logger.debug("Parsed group %r with m=%d k=%d (exact=%s)", name, m, k, exact)
    return spec


def load_group_spec(reference: str | Path) -> GroupSpec:
    """Load a group spec from a file, or a built-in group from ``builtin:<name>``.

    Raises:
        SpecParseError: If the file cannot be read or the builtin is unknown
    """
    text = str(reference)
    if text.startswith(BUILTIN_PREFIX):
        from step2heat.group.builtins import builtin_group

        return builtin_group(text[len(BUILTIN_PREFIX) :])
    try:
        document = Path(reference).read_text(encoding="utf-8")
    except OSError as exc:
        raise SpecParseError(f"cannot read {reference}: {exc}") from exc
    return parse_group_spec(document)


def dump_group_spec(spec: GroupSpec) -> str:
    """Serialise a spec back to the JSON document format."""
    matrices = [[[_plain(value) for value in row] for row in matrix] for matrix in spec.J]
    return json.dumps({"name": spec.name, "m": spec.m, "k": spec.k, "J": matrices})


def _plain(value: float) -> int | float:
    return int(value) if float(value).is_integer() else float(value)


def check_point(spec: GroupSpec, g: GroupPoint) -> None:
    """Raise ``ValueError`` unless ``g`` has the dimensions of ``spec``."""
    if g.z.shape != (spec.m,) or g.sigma.shape != (spec.k,):
        raise ValueError(
            f"point with dimensions ({g.z.size}, {g.sigma.size}) does not belong to "
            f"{spec.name!r} with (m, k) = ({spec.m}, {spec.k})"
        )


def j_of(spec: GroupSpec, lam: npt.ArrayLike) -> npt.NDArray[np.float64]:
    """Kaplan map J(λ) = Σ_ℓ λ_ℓ J(ε_ℓ).

    ``lam`` may carry leading batch dimensions: an array of shape (..., k) gives
    matrices of shape (..., m, m).
    """
    lam_array = np.asarray(lam, dtype=np.float64)
    if lam_array.ndim == 0:
        lam_array = lam_array.reshape(1)
    if lam_array.shape[-1] != spec.k:
        raise ValueError(f"λ must have {spec.k} components, got shape {lam_array.shape}")
    return np.tensordot(lam_array, spec.J, axes=([-1], [0]))


def anticommutation_defect(spec: GroupSpec) -> float:
    """Largest entry of J_ℓ J_ℓ' + J_ℓ' J_ℓ + 2δ_ℓℓ' I over all pairs."""
    identity = np.eye(spec.m)
    defect = 0.0
    for first in range(spec.k):
        for second in range(first, spec.k):
            product = spec.J[first] @ spec.J[second] + spec.J[second] @ spec.J[first]
            if first == second:
                product = product + 2.0 * identity
            defect = max(defect, float(np.max(np.abs(product))))
    return defect


def is_heisenberg_type(spec: GroupSpec) -> bool:
    """True iff J(λ)² = -|λ|² I for every λ."""
    return anticommutation_defect(spec) <= HEISENBERG_TYPE_TOLERANCE
