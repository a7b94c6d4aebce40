"""Tests for the finite-difference solver, the built-in problems and the Schauder harness."""

import math

import numpy as np
import pytest

from holdervar.core.validation import validate_problem
from holdervar.errors import InvalidArgumentError, OutOfDomainError, PreconditionError
from holdervar.exponents import constant_exponent
from holdervar.geometry import GridDomain, GridFunction, SpaceTimePoint
from holdervar.models import EquationForm
from holdervar.norms import finite_differences
from holdervar.solver import (
    check_compatibility,
    coefficients_for,
    example_problem,
    fd_solve,
    frozen_coefficient_view,
    green_identity_check,
    interior_semicube_constant,
    manufactured_problem,
    maximum_principle_bound,
    random_problem,
    schauder_constant,
    sine_product,
    solution_error,
)
from holdervar.solver.problems import (
    constant_coefficients,
    heat_coefficients,
    polynomial_solution,
    source_problem,
    zero_solution,
)


@pytest.fixture
def unit_box():
    return GridDomain.box((0.0,), (1.0,), T=1.0, nx=9, nt=8)


def _sine_error(nx: int) -> float:
    h = 1.0 / (nx - 1)
    nt = int(math.ceil(0.25 / h ** 2 - 1e-9))
    dom = GridDomain.box((0.0,), (1.0,), T=0.25, nx=nx, nt=nt)
    problem = manufactured_problem(dom, heat_coefficients(1), sine_product(dom))
    return solution_error(fd_solve(problem), problem.exact)


def test_zero_data_gives_zero_solution(unit_box):
    problem = manufactured_problem(unit_box, heat_coefficients(1), zero_solution(unit_box))
    result = fd_solve(problem)
    assert np.all(result.u.values == 0.0)
    assert result.residual == 0.0

    report = schauder_constant(problem, result, constant_exponent(0.5))
    assert report.vacuous
    assert report.C_emp is None
    assert all(variant.vacuous for variant in report.variants.values())


@pytest.mark.parametrize(
    "dom",
    [
        GridDomain.box((0.0,), (1.0,), T=1.0, nx=9, nt=8),
        GridDomain.box((0.0, 0.0), (1.0, 1.0), T=0.5, nx=6, nt=4),
    ],
    ids=["1d", "2d"],
)
def test_scheme_is_exact_on_quadratic_solutions(dom):
    """Test that (1 + t)(1 + |x|²) is reproduced to round-off: backward Euler and central D² are exact on it."""
    # GIVEN
    problem = manufactured_problem(dom, heat_coefficients(dom.n), polynomial_solution(dom))

    # WHEN
    result = fd_solve(problem)

    # THEN
    assert solution_error(result, problem.exact) < 1e-9
    assert result.residual < 1e-8
    assert result.method == "splu"
    assert result.factorizations == 1
    boundary = dom.parabolic_boundary_mask
    np.testing.assert_array_equal(result.u.values[boundary], problem.phi.values[boundary])


def test_sine_solution_converges_under_coupled_refinement():
    """Test that halving h (with τ ~ h²) shrinks the error by well over a factor 2."""
    coarse, fine = _sine_error(9), _sine_error(17)
    assert fine < coarse / 2.5
    assert math.log2(coarse / fine) >= 0.9


def test_solver_is_deterministic_and_linear(unit_box):
    """Test bitwise reproducibility and solve(f1 + f2) = solve(f1) + solve(f2) with φ = 0."""
    heat = heat_coefficients(1)

    def f1(x, t):
        return np.sin(3.0 * x[:, 0]) * t

    def f2(x, t):
        return np.cos(x[:, 0]) + t ** 2

    u1 = fd_solve(source_problem(unit_box, heat, f1)).u.values
    u1_again = fd_solve(source_problem(unit_box, heat, f1)).u.values
    u2 = fd_solve(source_problem(unit_box, heat, f2)).u.values
    u12 = fd_solve(source_problem(unit_box, heat, lambda x, t: f1(x, t) + f2(x, t))).u.values

    np.testing.assert_array_equal(u1, u1_again)
    np.testing.assert_allclose(u12, u1 + u2, rtol=1e-8, atol=1e-12)


@pytest.mark.parametrize("seed", range(5))
def test_discrete_maximum_principle_on_random_problems(seed):
    dom = GridDomain.box((0.0,), (1.0,), T=0.5, nx=9, nt=32)
    problem = random_problem(dom, seed)
    result = fd_solve(problem)
    assert result.u.sup() <= maximum_principle_bound(problem) * (1 + 1e-12)


def test_maximum_principle_bound_needs_small_time_steps(unit_box):
    problem = manufactured_problem(
        unit_box, constant_coefficients(1, [1.0], [0.0], [20.0]), sine_product(unit_box)
    )
    with pytest.raises(PreconditionError, match="Refine in time"):
        maximum_principle_bound(problem)


def test_ellipticity_is_checked_before_solving(unit_box):
    problem = manufactured_problem(unit_box, heat_coefficients(1), sine_product(unit_box), lam=2.0)
    with pytest.raises(PreconditionError, match="Ellipticity"):
        fd_solve(problem)


def test_schauder_constant_rejects_coefficients_above_the_norm_bound(unit_box):
    """Test that a = 50 with Λ = 1 is refused before any quotient is measured."""
    # GIVEN
    coeffs = constant_coefficients(1, [50.0], [0.0], [0.0])
    problem = manufactured_problem(unit_box, coeffs, sine_product(unit_box), lam=0.5, Lam=1.0)
    u = GridFunction.from_function(unit_box, problem.exact, name="u*")

    # WHEN / THEN
    with pytest.raises(PreconditionError, match="Lambda"):
        schauder_constant(problem, u, constant_exponent(0.5))


def test_existence_mode_rejects_negative_zeroth_order_coefficient(unit_box):
    """Test that c = -3 passes the a priori checks but fails once c >= 0 is required."""
    # GIVEN
    coeffs = constant_coefficients(1, [1.0], [0.0], [-3.0])
    problem = manufactured_problem(unit_box, coeffs, sine_product(unit_box))

    # WHEN / THEN
    validate_problem(problem, constant_exponent(0.5))
    with pytest.raises(PreconditionError, match="c >= 0"):
        validate_problem(problem, constant_exponent(0.5), existence=True)


def test_coefficient_lookup_errors():
    with pytest.raises(InvalidArgumentError, match="Unknown operator"):
        coefficients_for("wave", 1)
    with pytest.raises(InvalidArgumentError, match="diagonal"):
        coefficients_for("constant", 2, a=[1.0, 0.0, 1.0])


def test_green_identity_is_exact_on_low_degree_pairs(unit_box):
    """Test vL₀u - uL₀*v = div(v∇u - u∇v) - (uv)_t with stencils that are exact here."""
    u = GridFunction.from_function(unit_box, lambda x, t: (1.0 + t) * x[:, 0] ** 2, name="u")
    v = GridFunction.from_function(unit_box, lambda x, t: x[:, 0] + t, name="v")
    assert green_identity_check(u, v) < 1e-10

    constant = GridFunction.from_function(unit_box, lambda x, t: np.full(t.shape, 2.0), name="c")
    assert green_identity_check(constant, constant) == 0.0

    other = GridDomain.box((0.0,), (1.0,), T=1.0, nx=5, nt=4)
    with pytest.raises(InvalidArgumentError):
        green_identity_check(u, GridFunction.zeros(other))


def test_frozen_view_of_constant_coefficient_problem(unit_box):
    """Test F = f - b Du - c u when the coefficients are already constant."""
    # GIVEN
    coeffs = constant_coefficients(1, [1.5], [0.3], [0.5])
    problem = manufactured_problem(unit_box, coeffs, sine_product(unit_box))
    u = GridFunction.from_function(unit_box, problem.exact, name="u*")
    P = SpaceTimePoint.of(0.5, 0.5)

    # WHEN
    frozen = frozen_coefficient_view(problem, P, u)

    # THEN
    bundle = finite_differences(u)
    expected = problem.f.values - 0.3 * bundle.grad[0] - 0.5 * u.values
    np.testing.assert_allclose(frozen.f.values, expected, atol=1e-12)
    assert frozen.form == EquationForm.FROZEN
    assert frozen.a[0][0].evaluate_at(P) == pytest.approx(1.5)

    heat = manufactured_problem(unit_box, heat_coefficients(1), sine_product(unit_box))
    np.testing.assert_allclose(frozen_coefficient_view(heat, P, u).f.values, heat.f.values)

    with pytest.raises(OutOfDomainError):
        frozen_coefficient_view(problem, SpaceTimePoint.of(2.0, 0.5), u)


@pytest.mark.parametrize("operator", ["example", "polynomial"])
def test_frozen_view_of_variable_coefficient_problem(unit_box, operator):
    """Test that F - (f - c u - b Du) is exactly (a(P) - a) D²u, vanishing at P and nowhere else identically."""
    # GIVEN
    problem = manufactured_problem(unit_box, coefficients_for(operator, 1), sine_product(unit_box))
    u = GridFunction.from_function(unit_box, problem.exact, name="u*")
    P = SpaceTimePoint.of(0.5, 0.5)
    index = unit_box.locate(P)
    a = problem.a[0][0].values
    a_P = float(a.reshape(-1)[index])

    # WHEN
    frozen = frozen_coefficient_view(problem, P, u)

    # THEN
    bundle = finite_differences(u)
    lower = problem.f.values - problem.c.values * u.values - problem.b[0].values * bundle.grad[0]
    expected = (a_P - a) * bundle.hess[0, 0]
    finite = np.isfinite(lower + expected)
    np.testing.assert_allclose((frozen.f.values - lower)[finite], expected[finite], atol=1e-12)
    assert frozen.f.values.reshape(-1)[index] == pytest.approx(lower.reshape(-1)[index], abs=1e-12)
    assert np.abs(expected[finite]).max() > 1e-3
    assert frozen.a[0][0].evaluate_at(P) == pytest.approx(a_P)


@pytest.mark.parametrize("operator", ["example", "polynomial"])
def test_interior_semicube_constant_with_variable_coefficients(unit_box, operator):
    """Test a finite positive constant for the original data and for the frozen right-hand side F."""
    # GIVEN
    problem = manufactured_problem(unit_box, coefficients_for(operator, 1), sine_product(unit_box))
    u = GridFunction.from_function(unit_box, problem.exact, name="u*")
    P = SpaceTimePoint.of(0.5, 0.75)
    alpha = constant_exponent(0.5)
    frozen = frozen_coefficient_view(problem, P, u)

    # WHEN
    original = interior_semicube_constant(u, problem.f, alpha, P, 0.25)
    with_frozen_data = interior_semicube_constant(u, frozen.f, alpha, P, 0.25)

    # THEN
    assert 0.0 < original < math.inf
    assert 0.0 < with_frozen_data < math.inf


def test_interior_semicube_constant(unit_box):
    problem = manufactured_problem(unit_box, heat_coefficients(1), polynomial_solution(unit_box))
    u = GridFunction.from_function(unit_box, problem.exact, name="u*")
    P = SpaceTimePoint.of(0.5, 0.75)
    alpha = constant_exponent(0.5)

    value = interior_semicube_constant(u, problem.f, alpha, P, 0.25)
    assert 0.0 < value < math.inf

    with pytest.raises(PreconditionError, match="parabolic boundary"):
        interior_semicube_constant(u, problem.f, alpha, P, 0.6)
    with pytest.raises(InvalidArgumentError, match="grid node"):
        interior_semicube_constant(u, problem.f, alpha, SpaceTimePoint.of(0.51, 0.75), 0.25)


def test_compatible_data_has_no_corner_mismatch(unit_box):
    problem = manufactured_problem(unit_box, heat_coefficients(1), polynomial_solution(unit_box))
    assert check_compatibility(problem) < 1e-8


def test_schauder_constant_for_heat_equation():
    """Test finite global, interior and boundary constants with Γ = the lateral faces where φ vanishes."""
    dom = GridDomain.box((0.0,), (1.0,), T=0.25, nx=9, nt=16)
    problem = manufactured_problem(dom, heat_coefficients(1), sine_product(dom))
    result = fd_solve(problem)

    report = schauder_constant(problem, result, constant_exponent(0.5))

    assert not report.vacuous
    assert set(report.variants) == {"global", "interior", "boundary"}
    assert 0.0 < report.C_emp < math.inf
    assert report.variants["boundary"].terms["gamma"] == 2.0
    for variant in report.variants.values():
        assert variant.value is not None and math.isfinite(variant.value)


def test_example_problem_has_nonnegative_solution():
    """Test the optimality example: f >= 0 and φ = 0 give u >= 0 under the monotone scheme."""
    problem = example_problem(0.5, 0.4, nx=9, nt=16)
    assert problem.dom.shape.value == "ball"
    result = fd_solve(problem)
    u = result.u.values[problem.dom.in_domain_mask]
    assert np.all(np.isfinite(u))
    assert u.min() >= -1e-12
    assert u.max() > 0.0
