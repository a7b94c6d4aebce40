"""Finite-difference solver, built-in problems and the Schauder harness."""

from .analysis import (
    frozen_coefficient_view,
    green_identity_check,
    interior_semicube_constant,
    maximum_principle_bound,
    schauder_constant,
    solution_error,
)
from .fd_solver import fd_solve
from .problems import (
    check_compatibility,
    coefficients_for,
    example_problem,
    manufactured_problem,
    problem_from_config,
    random_problem,
    sine_product,
)

__all__ = [
    "fd_solve",
    "frozen_coefficient_view",
    "green_identity_check",
    "interior_semicube_constant",
    "maximum_principle_bound",
    "schauder_constant",
    "solution_error",
    "check_compatibility",
    "coefficients_for",
    "example_problem",
    "manufactured_problem",
    "problem_from_config",
    "random_problem",
    "sine_product",
]
