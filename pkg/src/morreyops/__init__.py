"""Fractional-integral operators and Morrey/Campanato norms on homogeneous groups."""

from .errors import (
    ConfigurationError,
    ConvergenceError,
    DivergenceError,
    HypothesisError,
    InputError,
    MorreyOpsError,
    PrecisionError,
    ResourceError,
)
from .group import (
    GroupDescriptor,
    abelian_aniso,
    abelian_iso,
    dilate,
    heisenberg1,
    inverse,
    multiply,
    parse_group,
    quasi_norm,
    radial_integrate,
    sphere_chart,
    sphere_measure,
)
from .plan import DEFAULT_PLAN, QuadraturePlan
from .profiles import (
    RadialProfile,
    check_condition,
    doubling_constant,
    parse_profile,
    power,
    power_sum,
    power_truncated,
    profile_power,
    table_profile,
)
from .functions import (
    GridFunction,
    TestFunction,
    ball_indicator,
    combo,
    gaussian,
    parse_function,
    power_function,
    sample_to_grid,
    shifted,
)
from .kernels import (
    KernelParams,
    admissible_p1_interval,
    dyadic_sum,
    kernel_eval,
    kernel_gen_morrey_norm,
    kernel_lebesgue_norm,
    kernel_morrey_norm,
    sandwich_check,
)
from .operators import (
    MaximalOperator,
    OperatorResult,
    apply_bessel_riesz,
    apply_gen_bessel_riesz,
    apply_gen_fractional,
    apply_mod_fractional,
    cancellation_decay,
    convolve_young,
    maximal_function,
    mod_fractional_offset,
)
from .spaces import (
    ball_average,
    campanato_norm,
    gen_morrey_norm,
    lebesgue_ball_norm,
    morrey_norm,
    sigma_limit,
)
from .harness import TheoremCase, VerificationReport, run_suite, run_theorem
from .suite import default_cases

__version__ = "0.1.0"
