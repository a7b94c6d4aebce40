"""Tests for extensions to the enlarged cylinder and space-time mollification."""

import math

import numpy as np
import pytest

from holdervar.corpus import DEFAULT_CORPUS_SIZE, builtin_corpus
from holdervar.errors import InvalidArgumentError, PreconditionError, UnsupportedOrderError
from holdervar.exponents import constant_exponent, example_exponent
from holdervar.geometry import GridDomain, GridFunction
from holdervar.regularize import (
    check_mollify_bound,
    extend_field,
    extend_time,
    measure_extension_constant,
    mollifier_stencil,
    mollify,
    reflect_extension_ball,
    reflect_extension_box,
    uniform_continuity_radius,
)


@pytest.fixture
def coarse_box():
    """[0, 1] x (0, 1) with h = τ = 0.25."""
    return GridDomain.box((0.0,), (1.0,), T=1.0, nx=5, nt=4)


@pytest.fixture
def half():
    return constant_exponent(0.5)


def test_box_extension_mirrors_faces_and_clamps_time(coarse_box, half):
    """Test f̄(x, t) = f(x*, clamp(t)) for f = x + t."""
    # GIVEN
    f = GridFunction.from_function(coarse_box, lambda x, t: x[:, 0] + t, name="sum")

    # WHEN: σ = 0.2 adds one cell and one time level on every side
    ext = reflect_extension_box(f, half, 0.2)

    # THEN
    assert ext.f_bar.dom.grid_shape == (7, 7)
    assert ext.base_mask.sum() == coarse_box.size
    np.testing.assert_allclose(ext.restrict(), f.values)
    values = ext.f_bar.values
    assert values[3, 0] == pytest.approx(0.75)  # (x, t) = (-0.25, 0.5) reads (0.25, 0.5)
    assert values[0, 3] == pytest.approx(0.5)   # (0.5, -0.25) reads (0.5, 0)
    assert values[0, 0] == pytest.approx(0.25)  # (-0.25, -0.25) reads (0.25, 0)
    assert values[6, 6] == pytest.approx(1.75)  # (1.25, 1.25) reads (0.75, 1)


def test_ball_extension_reflects_radially():
    """Test x* = c + (2R - r)(x - c)/r outside B(0, 0.4)."""
    dom = GridDomain.ball((0.0,), 0.4, T=0.4, nx=9, nt=8)
    f = GridFunction.from_function(dom, lambda x, t: x[:, 0], name="x")

    ext = reflect_extension_ball(f, example_exponent(0.5, 0.4), 0.15)

    # Two extra cells per side: x = ±0.5 maps to ±0.3, x = ±0.6 to ±0.2
    assert ext.f_bar.dom.nx == 13
    np.testing.assert_allclose(ext.f_bar.values[:, 11], 0.3, atol=1e-12)
    np.testing.assert_allclose(ext.f_bar.values[:, 1], -0.3, atol=1e-12)
    np.testing.assert_allclose(ext.f_bar.values[:, 12], 0.2, atol=1e-12)


def test_extension_preconditions(coarse_box, half):
    f = GridFunction.zeros(coarse_box)
    with pytest.raises(InvalidArgumentError):
        extend_time(f, half, 0.0)
    with pytest.raises(UnsupportedOrderError):
        reflect_extension_ball(f, half, 0.1)
    with pytest.raises(InvalidArgumentError, match="shortest side"):
        reflect_extension_box(f, half, 1.0)
    ball = GridDomain.ball((0.0,), 0.4, T=0.4, nx=9, nt=8)
    with pytest.raises(InvalidArgumentError, match="radius"):
        reflect_extension_ball(GridFunction.zeros(ball), half, 0.4)


def test_time_extension_keeps_space_fixed(coarse_box, half):
    f = GridFunction.from_function(coarse_box, lambda x, t: x[:, 0] * t, name="xt")
    ext = extend_time(f, half, 0.3)
    assert ext.f_bar.dom.nx == coarse_box.nx
    # Two levels below t0 and two above T
    assert ext.f_bar.dom.nt == coarse_box.nt + 4
    np.testing.assert_allclose(ext.f_bar.values[0], f.values[0])
    np.testing.assert_allclose(ext.f_bar.values[-1], f.values[-1])


def test_mollifier_stencil_has_unit_mass(coarse_box):
    stencil = mollifier_stencil(GridDomain.box((0.0,), (1.0,), T=1.0, nx=21, nt=20), 0.2)
    assert stencil.sum() == pytest.approx(1.0)
    assert np.all(stencil >= 0.0)
    # Below every grid spacing the stencil is the identity
    identity = mollifier_stencil(coarse_box, 0.1)
    assert identity.shape == (1, 1)
    assert identity[0, 0] == 1.0


def test_mollify_preserves_constants_and_checks_radius(coarse_box, half):
    f = GridFunction.from_function(coarse_box, lambda x, t: np.full(t.shape, 1.5), name="constant")
    ext = extend_field(f, half, 0.5)
    smoothed = mollify(ext, 0.5)
    np.testing.assert_allclose(smoothed.values, 1.5)
    with pytest.raises(PreconditionError, match="exceeds the extension radius"):
        mollify(ext, 0.6)
    with pytest.raises(InvalidArgumentError):
        mollify(ext, 0.0)


def test_uniform_continuity_radius(coarse_box):
    assert uniform_continuity_radius(constant_exponent(0.4), coarse_box, 0.1) == math.inf
    with pytest.raises(InvalidArgumentError):
        uniform_continuity_radius(constant_exponent(0.4), coarse_box, 0.0)


def test_mollified_norm_bound_holds_for_smooth_field(half):
    """Test |f_ε|_{0,α-δ} <= 3 |f̄|_{0,ᾱ} on a smooth field."""
    # GIVEN
    dom = GridDomain.box((0.0,), (1.0,), T=1.0, nx=9, nt=8)
    f = GridFunction.from_function(dom, lambda x, t: np.sin(2.0 * x[:, 0]) * (1.0 + t), name="sine")
    ext = extend_field(f, half, 0.25)

    # WHEN
    check = check_mollify_bound(ext, half, 0.1)

    # THEN: a constant exponent never violates uniform continuity, so ε = σ
    assert check.epsilon_prime == math.inf
    assert check.epsilon == pytest.approx(0.25)
    assert check.within_hypotheses
    assert check.passed
    assert check.lhs <= check.rhs


@pytest.mark.parametrize("fraction", [0.25, 0.5], ids=["quarter", "half"])
@pytest.mark.parametrize("index", range(DEFAULT_CORPUS_SIZE))
def test_mollified_norm_bound_holds_on_corpus_with_variable_exponent(index, fraction):
    """Test |f_ε|_{0,α-δ} <= 3 |f̄|_{0,ᾱ} for every corpus field with α = (γ + |x|)(γ + t) and δ = α⁻/4, α⁻/2."""
    # GIVEN: B(0, ζ) x (0, ζ) with γ = 0.5 and ζ = 0.4, so α⁻ = 0.25
    dom = GridDomain.ball((0.0,), 0.4, T=0.4, nx=9, nt=8)
    alpha = example_exponent(0.5, 0.4)
    field = builtin_corpus(dom)[index]
    ext = extend_field(field, alpha, 0.15)
    delta = fraction * alpha.alpha_minus

    # WHEN
    check = check_mollify_bound(ext, alpha, delta)

    # THEN: α varies, so ε'(δ) comes from the uniform-continuity scan and bounds ε
    assert math.isfinite(check.epsilon_prime)
    assert 0.0 < check.epsilon <= check.epsilon_prime / 2.0
    assert check.within_hypotheses
    assert check.passed
    assert check.lhs <= check.rhs


def test_mollify_bound_requires_delta_below_alpha_minus(coarse_box, half):
    ext = extend_field(GridFunction.zeros(coarse_box), half, 0.2)
    with pytest.raises(InvalidArgumentError, match="δ"):
        check_mollify_bound(ext, half, 0.5)


def test_extension_constant(coarse_box, half):
    f = GridFunction.from_function(coarse_box, lambda x, t: x[:, 0], name="x")
    assert measure_extension_constant(extend_field(f, half, 0.2), f, half) >= 1.0 - 1e-12
    zero = GridFunction.zeros(coarse_box)
    assert measure_extension_constant(extend_field(zero, half, 0.2), zero, half) == 0.0
