"""Matrix functions of A(λ) = -J(λ)² and the decay-constant estimator."""

from step2heat.linalg.matrix_functions import (
    a_of,
    det_j_sqrtA,
    estimate_k0,
    even_apply,
    exp_minus_i_j,
    j_function,
    j_scalar,
    log_j,
    spectral,
    spectral_batch,
    x_coth_x,
)

__all__ = [
    "a_of",
    "det_j_sqrtA",
    "estimate_k0",
    "even_apply",
    "exp_minus_i_j",
    "j_function",
    "j_scalar",
    "log_j",
    "spectral",
    "spectral_batch",
    "x_coth_x",
]
