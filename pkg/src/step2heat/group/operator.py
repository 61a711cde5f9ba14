"""Coefficients of the horizontal Laplacian.

The left-invariant fields are X_j = ∂_{z_j} + ½ Σ_ℓ <J(ε_ℓ)z, e_j> ∂_{σ_ℓ}, and

    𝓛 = Σ_j X_j² = Δ_z + ¼ Σ_{ℓ,ℓ'} <J(ε_ℓ)z, J(ε_ℓ')z> ∂_{σ_ℓ}∂_{σ_ℓ'} + Σ_ℓ Θ_ℓ ∂_{σ_ℓ}

with Θ_ℓ = Σ_s <J(ε_ℓ)z, e_s> ∂_{z_s}.
"""

from dataclasses import dataclass

import numpy as np
import numpy.typing as npt

from step2heat.models import GroupSpec

FloatArray = npt.NDArray[np.float64]


@dataclass(frozen=True)
class HorizontalOperator:
    """Block coefficients of 𝓛 on a given group."""

    spec: GroupSpec

    def rotated(self, z: npt.ArrayLike) -> FloatArray:
        """Rows J(ε_ℓ)z, shape (k, m)."""
        return np.einsum("lij,j->li", self.spec.J, np.asarray(z, dtype=np.float64))

    def laplacian_block(self) -> FloatArray:
        """Coefficient matrix of the Δ_z block (the identity)."""
        return np.eye(self.spec.m)

    def sigma_block(self, z: npt.ArrayLike) -> FloatArray:
        """Symmetric PSD matrix ¼ <J(ε_ℓ)z, J(ε_ℓ')z>, shape (k, k)."""
        rows = self.rotated(z)
        return 0.25 * rows @ rows.T

    def mixed_block(self, z: npt.ArrayLike) -> FloatArray:
        """Coefficients <J(ε_ℓ)z, e_s> of ∂_{z_s}∂_{σ_ℓ}, shape (k, m)."""
        return self.rotated(z)

    def fields(self, z: npt.ArrayLike) -> FloatArray:
        """Coefficient vectors of X_1..X_m in the (z, σ) frame, shape (m, m + k)."""
        half_rows = 0.5 * self.rotated(z)
        return np.hstack([np.eye(self.spec.m), half_rows.T])

    def symbol(self, z: npt.ArrayLike) -> FloatArray:
        """Second-order coefficient matrix of 𝓛 in the (z, σ) frame."""
        frame = self.fields(z)
        return frame.T @ frame

    def apply_quadratic(
        self, hessian: npt.ArrayLike, z: npt.ArrayLike
    ) -> float:
        """Exact 𝓛f for f with constant Hessian ``hessian`` in (z, σ).

        The fields' coefficients have no component along their own direction, so
        the first-order part of X_j² vanishes and 𝓛f = tr(symbol(z)·H).
        """
        return float(np.sum(self.symbol(z) * np.asarray(hessian, dtype=np.float64)))
