"""step2heat: heat kernels and Green functions on step-two Carnot groups.

The library evaluates the heat kernel of the horizontal Laplacian on any
step-two group given by its Kaplan matrices, together with Ornstein-Uhlenbeck
and Mehler kernels, Green functions, Baouendi-Grushin kernels and the
fractional family on groups of Heisenberg type. Independent oracles check the
numbers against the heat equation, Monte Carlo paths and closed forms.

Example:
    >>> from step2heat import GroupPoint, heisenberg, heat_eval
    >>> spec = heisenberg(1)
    >>> e = GroupPoint.identity(spec.m, spec.k)
    >>> round(heat_eval(spec, e, e, 1.0).value, 8)
    0.0625
"""

# Version information
__version__ = "0.1.0"
__author__ = "step2heat contributors"
__license__ = "MIT"

# Configuration
from step2heat.config import (
    McConfig,
    QuadratureConfig,
    RunConfig,
    StencilConfig,
    TimeQuadratureConfig,
)

# Errors
from step2heat.errors import (
    ConvergenceError,
    KalmanError,
    NotHeisenbergTypeError,
    PoleError,
    SmallTimeError,
    SpecParseError,
    SpecValidationError,
    SpectralError,
    Step2HeatError,
    TruncationError,
)

# Groups
from step2heat.group import (
    HorizontalOperator,
    builtin_group,
    dilate,
    free_step_two,
    heisenberg,
    inverse,
    is_heisenberg_type,
    load_group_spec,
    multiply,
    parse_group_spec,
    quaternionic,
)

# Kernels
from step2heat.kernel import (
    CarnotHeatKernel,
    HeisenbergTypeKernel,
    green_eval,
    heat_eval,
    heisenberg_type_eval,
    make_kernel,
)

# Data models
from step2heat.models import (
    CheckResult,
    ConstantReport,
    FractionalParams,
    GaugeValue,
    GroupPoint,
    GroupSpec,
    KernelValue,
    McReport,
    OscillatorParams,
    OUSystem,
)
from step2heat.ou import classical_mehler, covariance_K, hormander_q, mehler_P
from step2heat.special import (
    bg_green,
    bg_heat,
    c_constant,
    closed_form_E_s,
    extension_q_s,
    fractional_green,
    gauge,
    riesz_K_s,
)

# Public API
__all__ = [
    # Version info
    "__version__",
    "__author__",
    "__license__",
    # Configuration
    "McConfig",
    "QuadratureConfig",
    "RunConfig",
    "StencilConfig",
    "TimeQuadratureConfig",
    # Errors
    "ConvergenceError",
    "KalmanError",
    "NotHeisenbergTypeError",
    "PoleError",
    "SmallTimeError",
    "SpecParseError",
    "SpecValidationError",
    "SpectralError",
    "Step2HeatError",
    "TruncationError",
    # Groups
    "HorizontalOperator",
    "builtin_group",
    "dilate",
    "free_step_two",
    "heisenberg",
    "inverse",
    "is_heisenberg_type",
    "load_group_spec",
    "multiply",
    "parse_group_spec",
    "quaternionic",
    # Kernels
    "CarnotHeatKernel",
    "HeisenbergTypeKernel",
    "green_eval",
    "heat_eval",
    "heisenberg_type_eval",
    "make_kernel",
    "classical_mehler",
    "covariance_K",
    "hormander_q",
    "mehler_P",
    "bg_green",
    "bg_heat",
    "c_constant",
    "closed_form_E_s",
    "extension_q_s",
    "fractional_green",
    "gauge",
    "riesz_K_s",
    # Models
    "CheckResult",
    "ConstantReport",
    "FractionalParams",
    "GaugeValue",
    "GroupPoint",
    "GroupSpec",
    "KernelValue",
    "McReport",
    "OscillatorParams",
    "OUSystem",
]
