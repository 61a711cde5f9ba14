"""Heat kernels and Green functions by oscillatory quadrature over R^k."""

from step2heat.kernel.carnot import (
    CarnotHeatKernel,
    SpectralEnvelope,
    heat_eval,
    integrand,
    make_kernel,
)
from step2heat.kernel.green import green_eval, integrate_over_time
from step2heat.kernel.heisenberg import HeisenbergTypeKernel, RadialEnvelope, heisenberg_type_eval
from step2heat.kernel.quadrature import OscillatoryQuadrature

__all__ = [
    "CarnotHeatKernel",
    "HeisenbergTypeKernel",
    "OscillatoryQuadrature",
    "RadialEnvelope",
    "SpectralEnvelope",
    "green_eval",
    "heat_eval",
    "heisenberg_type_eval",
    "integrand",
    "integrate_over_time",
    "make_kernel",
]
