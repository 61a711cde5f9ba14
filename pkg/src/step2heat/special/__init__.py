"""Baouendi-Grushin kernels and the fractional family on Heisenberg-type groups."""

from step2heat.special.fractional import (
    ExtensionKernel,
    RieszKernel,
    c_constant,
    closed_form_E_s,
    endpoint_constant,
    extension_q_s,
    fractional_green,
    gauge,
    measure_constant,
    riesz_K_s,
)
from step2heat.special.grushin import GrushinKernel, bg_green, bg_heat

__all__ = [
    "ExtensionKernel",
    "GrushinKernel",
    "RieszKernel",
    "bg_green",
    "bg_heat",
    "c_constant",
    "closed_form_E_s",
    "endpoint_constant",
    "extension_q_s",
    "fractional_green",
    "gauge",
    "measure_constant",
    "riesz_K_s",
]
