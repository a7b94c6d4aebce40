"""Tests for heat potentials, their quadrature and the v_s Hölder bound."""

import math

import numpy as np
import pytest

from holdervar.errors import InvalidArgumentError, PreconditionError, TimeOrderingError
from holdervar.exponents import constant_exponent
from holdervar.experiments.potential_check import bump_source
from holdervar.geometry import GridDomain, GridFunction, SpaceTimePoint
from holdervar.kernels import KernelSpec
from holdervar.potentials import (
    duhamel_residual,
    heat_potential,
    potential_at,
    time_derivative_fd_check,
    verify_time_derivative_bound,
)


@pytest.fixture
def unit_box():
    return GridDomain.box((0.0,), (1.0,), T=1.0, nx=9, nt=8)


@pytest.fixture
def bump(unit_box):
    return GridFunction.from_function(unit_box, bump_source(unit_box), name="bump")


def test_constant_source_grows_linearly_away_from_the_edges():
    """Test v(0, t) = t - t0 for f = 1 when the kernel mass stays inside the box."""
    # GIVEN: [-2, 2] with h = 0.1 and τ = h², so the trapezoid rule integrates the kernel exactly
    dom = GridDomain.box((-2.0,), (2.0,), T=0.1, nx=41, nt=10)
    f = GridFunction.from_function(dom, lambda x, t: np.ones(t.shape), name="one")

    # WHEN
    result = heat_potential(f, with_time_derivative=False)

    # THEN
    center = dom.locate(SpaceTimePoint.of(0.0, 0.0))
    np.testing.assert_allclose(result.v[:, center], dom.times - dom.t0, rtol=1e-4, atol=1e-12)
    assert result.v_s is None
    assert result.meta.spatial_rule == "tensor-trapezoid"


def test_potential_at_a_node_matches_the_grid_quadrature(unit_box, bump):
    result = heat_potential(bump)
    P = unit_box.point(6 * unit_box.nx + 4)
    grid_value = result.v[6, 4]
    assert potential_at(bump, None, P) == pytest.approx(grid_value, rel=1e-10, abs=1e-14)


def test_potential_at_requires_positive_time(bump):
    with pytest.raises(TimeOrderingError):
        potential_at(bump, None, SpaceTimePoint.of(0.5, 0.0))


def test_support_conditions_for_the_time_derivative(unit_box):
    """Test that v_s needs f = 0 at t = t0 and on the fences."""
    early = GridFunction.from_function(unit_box, lambda x, t: np.sin(np.pi * x[:, 0]), name="early")
    with pytest.raises(PreconditionError, match="initial time"):
        heat_potential(early)

    lower = GridFunction.from_function(unit_box, lambda x, t: t * (1.0 - x[:, 0]), name="lower")
    with pytest.raises(PreconditionError, match="lower face"):
        heat_potential(lower)

    # Without v_s the support is not checked
    assert heat_potential(early, with_time_derivative=False).v.shape == unit_box.grid_shape


def test_kernel_dimension_must_match(bump):
    with pytest.raises(InvalidArgumentError, match="does not match"):
        heat_potential(bump, KernelSpec.standard(2))


def test_reflected_potential_vanishes_on_the_reflection_plane():
    """Test that Ḡ = 0 at y_n = d̄ makes the potential vanish on that face."""
    dom = GridDomain.box((0.0,), (1.0,), T=1.0, nx=9, nt=8)
    f = GridFunction.from_function(dom, bump_source(dom), name="bump")
    result = heat_potential(f, KernelSpec.reflected(1, dbar=1.0), with_time_derivative=False)
    # The singular layer adds τ f(y, s), and the bump vanishes on x = 1
    np.testing.assert_allclose(result.v[:, -1], 0.0, atol=1e-14)


def test_duhamel_residual_of_zero_source(unit_box):
    zero = GridFunction.zeros(unit_box)
    result = heat_potential(zero)
    assert duhamel_residual(result, zero) == 0.0
    assert np.all(result.v_s[1:] == 0.0)


def _coupled_bump_residual(nx: int) -> float:
    h = 1.0 / (nx - 1)
    dom = GridDomain.box((0.0,), (1.0,), T=1.0, nx=nx, nt=int(math.ceil(1.0 / h ** 2 - 1e-9)))
    f = GridFunction.from_function(dom, bump_source(dom), name="bump")
    return duhamel_residual(heat_potential(f, with_time_derivative=False), f)


def test_duhamel_residual_shrinks_under_coupled_refinement():
    """Test that sup|v_t - Δv - f| of the bump potential drops by at least 1.5 when h halves with τ = h²."""
    # GIVEN / WHEN
    coarse, fine = _coupled_bump_residual(9), _coupled_bump_residual(17)

    # THEN
    assert 0.0 < fine < coarse
    assert coarse / fine >= 1.5


def test_time_derivative_matches_centered_differences_of_the_potential():
    """Test v_s against (v(s + τ) - v(s - τ)) / 2τ to 1e-2 relative on a smooth source.

    The bump's steep flanks are under-resolved below a few hundred nodes per axis, so
    this uses f = sin²(πx) t², which vanishes with its slope on the fences and at t = 0,
    on a grid with τ = h²/4.
    """
    # GIVEN
    dom = GridDomain.box((0.0,), (1.0,), T=1.0, nx=17, nt=1024)
    f = GridFunction.from_function(dom, lambda x, t: np.sin(np.pi * x[:, 0]) ** 2 * t ** 2, name="sin2")

    # WHEN
    result = heat_potential(f)
    rel = time_derivative_fd_check(result, f)

    # THEN
    assert np.all(np.isfinite(result.v_s))
    assert rel < 1e-2


def test_time_derivative_check_needs_levels_away_from_the_support(bump):
    """Test the margin rule and the v_s requirement of the centered-difference check."""
    with pytest.raises(InvalidArgumentError, match="refine in time"):
        time_derivative_fd_check(heat_potential(bump), bump, margin_levels=3)
    with pytest.raises(InvalidArgumentError, match="needs a result computed with v_s"):
        time_derivative_fd_check(heat_potential(bump, with_time_derivative=False), bump)


def test_holder_bound_of_the_time_derivative(bump):
    """Test that the measured constant is finite with a witness pair."""
    report = verify_time_derivative_bound(bump, constant_exponent(0.5), seed=1)
    assert not report.vacuous
    assert report.pairs > 0
    assert 0.0 < report.value < math.inf
    assert report.witness is not None
    assert report.denominator_terms["pointed_seminorm_min"] > 0.0


def test_holder_bound_of_zero_source_is_vacuous(unit_box):
    report = verify_time_derivative_bound(GridFunction.zeros(unit_box), constant_exponent(0.5))
    assert report.vacuous
    assert report.value == 0.0
    assert report.pairs == 0
