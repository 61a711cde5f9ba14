"""Independent oracles: finite-difference stencils, Monte Carlo paths and integral checks."""

from step2heat.verification.checks import (
    SUITES,
    Suite,
    mass_check,
    run_suite,
    run_suites,
    semigroup_check,
    vertical_identity_check,
)
from step2heat.verification.monte_carlo import (
    GaussianTrigBump,
    fourier_slice_expectation,
    gaussian_bump,
    mc_sample_paths,
    mc_vs_kernel,
    planar_expectation,
    trig_bump,
)
from step2heat.verification.stencil import (
    Stencil,
    apply_L,
    drift_elimination_residual,
    euclidean_residual,
    laplacian_stencil,
    oscillator_residual,
    pde_residual,
)

__all__ = [
    "SUITES",
    "GaussianTrigBump",
    "Stencil",
    "Suite",
    "apply_L",
    "drift_elimination_residual",
    "euclidean_residual",
    "fourier_slice_expectation",
    "gaussian_bump",
    "laplacian_stencil",
    "mass_check",
    "mc_sample_paths",
    "mc_vs_kernel",
    "oscillator_residual",
    "pde_residual",
    "planar_expectation",
    "run_suite",
    "run_suites",
    "semigroup_check",
    "trig_bump",
    "vertical_identity_check",
]
