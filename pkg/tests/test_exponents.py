"""Tests for variable exponents and the log-Hölder modulus."""

import math

import numpy as np
import pytest

from holdervar.errors import InvalidArgumentError, OutOfDomainError
from holdervar.exponents import (
    check_log_holder,
    closure_exponent,
    constant_exponent,
    estimate_clog,
    eval_exponent,
    example_exponent,
    example_modulus_bound,
    exponent_values,
    range_scan,
    shifted_exponent,
    tabulated_exponent,
)
from holdervar.geometry import GridDomain, GridFunction, SpaceTimePoint


@pytest.fixture
def example_ball():
    """B(0, 0.4) x (0, 0.4), the domain of the example exponent."""
    return GridDomain.ball((0.0,), 0.4, T=0.4, nx=9, nt=8)


def test_example_exponent_values_and_range(example_ball):
    """Test α(x, t) = (γ + |x|)(γ + t) with α⁻ = γ² and α⁺ = (γ + ζ)²."""
    alpha = example_exponent(0.5, 0.4)
    assert alpha.alpha_minus == pytest.approx(0.25)
    assert alpha.alpha_plus == pytest.approx(0.81)
    assert eval_exponent(alpha, SpaceTimePoint.of(0.2, 0.1), example_ball) == pytest.approx(0.7 * 0.6)

    lo, hi = range_scan(alpha, example_ball)
    assert lo == pytest.approx(0.25)
    assert hi == pytest.approx(0.81)


def test_example_exponent_parameter_ranges():
    """Test that γ must lie in (e^-2, 1) and ζ must be positive."""
    with pytest.raises(ValueError, match="γ"):
        example_exponent(0.1, 0.2)
    with pytest.raises(ValueError, match="ζ"):
        example_exponent(0.5, 0.0)


def test_exponent_range_must_lie_in_unit_interval():
    with pytest.raises(ValueError, match="0 < α⁻ <= α⁺ < 1"):
        constant_exponent(1.0)


def test_eval_exponent_outside_domain(example_ball):
    """Test that points outside the closed cylinder are rejected."""
    with pytest.raises(OutOfDomainError):
        eval_exponent(example_exponent(0.5, 0.4), SpaceTimePoint.of(0.5, 0.1), example_ball)


def test_constant_exponent_has_zero_log_holder_constant(example_ball):
    check = check_log_holder(constant_exponent(0.3), example_ball, M=0.0)
    assert check.passed
    assert check.value == 0.0
    assert check.witness is None


def test_log_holder_estimate_matches_brute_force():
    """Test the blocked scan against a direct double loop."""
    # GIVEN: A small grid and a smooth closure exponent
    dom = GridDomain.box((0.0,), (1.0,), T=0.5, nx=6, nt=5)
    alpha = closure_exponent(lambda x, t: 0.3 + 0.2 * x[:, 0] * (1 + t), dom)

    # WHEN: Estimating c_log
    value = estimate_clog(alpha, dom)

    # THEN: It equals the exhaustive maximum of |Δα| |ln d|
    vals = exponent_values(alpha, dom).reshape(-1)
    best = 0.0
    for i in range(dom.size):
        for j in range(dom.size):
            d = max(abs(dom.node_x[i, 0] - dom.node_x[j, 0]), math.sqrt(abs(dom.node_t[i] - dom.node_t[j])))
            if d > 0:
                best = max(best, abs(vals[i] - vals[j]) * abs(math.log(d)))
    assert value == pytest.approx(best, rel=1e-12)

    check = check_log_holder(alpha, dom, M=value / 2)
    assert not check.passed
    assert check.witness is not None
    assert check.exhaustive


def test_example_modulus_bound_is_finite(example_ball):
    bound = example_modulus_bound(example_ball)
    assert math.isfinite(bound)
    assert bound > 0
    # |α(P) - α(Q)| <= (|x - y| + |t - s|)(γ + ζ + 1), so c_log is controlled by the bound
    alpha = example_exponent(0.5, 0.4)
    assert estimate_clog(alpha, example_ball) <= bound * (0.5 + 0.4 + 1.0) + 1e-12


def test_shifted_exponent():
    """Test the α - δ exponent used by the mollification bound."""
    alpha = example_exponent(0.5, 0.4)
    shifted = shifted_exponent(alpha, -0.1)
    assert shifted.alpha_minus == pytest.approx(0.15)
    x, t = np.asarray([[0.2]]), np.asarray([0.1])
    assert shifted.values(x, t)[0] == pytest.approx(alpha.values(x, t)[0] - 0.1)
    with pytest.raises(InvalidArgumentError, match="leaves"):
        shifted_exponent(alpha, -0.3)


def test_tabulated_exponent_interpolates_between_nodes():
    dom = GridDomain.box((0.0,), (1.0,), T=1.0, nx=3, nt=2)
    table = GridFunction.from_function(dom, lambda x, t: 0.2 + 0.4 * x[:, 0], name="table")
    alpha = tabulated_exponent(table)
    assert alpha.alpha_minus == pytest.approx(0.2)
    assert alpha.alpha_plus == pytest.approx(0.6)
    assert alpha.values(np.asarray([[0.25]]), np.asarray([0.3]))[0] == pytest.approx(0.3)
