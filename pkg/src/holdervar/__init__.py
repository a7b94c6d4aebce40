from .api import load_experiment, run_experiment
from .exponents import (
    VariableExponent,
    check_log_holder,
    closure_exponent,
    constant_exponent,
    estimate_clog,
    eval_exponent,
    example_exponent,
    tabulated_exponent,
)
from .geometry import (
    GridDomain,
    GridFunction,
    SpaceTimePoint,
    boundary_distances,
    parabolic_distance,
    semicube_contains,
)
from .kernels import KernelSpec, eval_kernel, eval_kernel_derivative, verify_derivative_bound
from .models import ExperimentConfig, ExperimentResult, HolderReport, ParabolicProblem
from .norms import (
    boundary_seminorm,
    norm_0_alpha,
    norm_2_1_alpha,
    pointed_seminorm,
    seminorm_var,
    weighted_interior_seminorm,
)
from .potentials import heat_potential, verify_time_derivative_bound
from .regularize import check_mollify_bound, extend_time, mollify, reflect_extension_ball
from .report import emit_report
from .solver import fd_solve, schauder_constant

__all__ = [
    "load_experiment",
    "run_experiment",
    "emit_report",
    "VariableExponent",
    "check_log_holder",
    "closure_exponent",
    "constant_exponent",
    "estimate_clog",
    "eval_exponent",
    "example_exponent",
    "tabulated_exponent",
    "GridDomain",
    "GridFunction",
    "SpaceTimePoint",
    "boundary_distances",
    "parabolic_distance",
    "semicube_contains",
    "KernelSpec",
    "eval_kernel",
    "eval_kernel_derivative",
    "verify_derivative_bound",
    "ExperimentConfig",
    "ExperimentResult",
    "HolderReport",
    "ParabolicProblem",
    "boundary_seminorm",
    "norm_0_alpha",
    "norm_2_1_alpha",
    "pointed_seminorm",
    "seminorm_var",
    "weighted_interior_seminorm",
    "heat_potential",
    "verify_time_derivative_bound",
    "check_mollify_bound",
    "extend_time",
    "mollify",
    "reflect_extension_ball",
    "fd_solve",
    "schauder_constant",
]
