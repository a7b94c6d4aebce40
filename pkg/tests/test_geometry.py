"""Tests for grid domains, the parabolic metric and boundary distances."""

import math

import numpy as np
import pytest

from holdervar.errors import InvalidArgumentError, OutOfDomainError
from holdervar.geometry import (
    GridDomain,
    GridFunction,
    SpaceTimePoint,
    boundary_distances,
    euclidean_distance,
    parabolic_distance,
    parse_gamma,
    portion_mask,
    semicube_contains,
)


@pytest.fixture
def unit_interval():
    """[0, 1] x (0, 1) with 5 nodes and 4 steps."""
    return GridDomain.box((0.0,), (1.0,), T=1.0, nx=5, nt=4)


def test_parabolic_distance_takes_max_of_space_and_root_time():
    """Test that d(P, Q) = max(|x - y|_inf, sqrt|t - s|)."""
    # GIVEN: Two points whose time gap dominates, and two whose space gap dominates
    P = SpaceTimePoint.of((0.0, 0.0), 0.0)
    Q = SpaceTimePoint.of((0.1, -0.2), 0.25)
    R = SpaceTimePoint.of((0.7, 0.0), 0.04)

    # WHEN / THEN
    assert parabolic_distance(P, Q) == pytest.approx(0.5)
    assert parabolic_distance(P, R) == pytest.approx(0.7)
    assert parabolic_distance(Q, P) == parabolic_distance(P, Q)
    assert euclidean_distance(P, Q) == pytest.approx(math.sqrt(0.01 + 0.04 + 0.0625))


def test_parabolic_distance_rejects_dimension_mismatch():
    """Test that points of different spatial dimension are rejected."""
    with pytest.raises(InvalidArgumentError, match="dimension mismatch"):
        parabolic_distance(SpaceTimePoint.of(0.0, 0.0), SpaceTimePoint.of((0.0, 0.0), 0.0))


def test_semicube_is_backward_in_time():
    """Test that N(P, δ) contains only points at or before the top time."""
    top = SpaceTimePoint.of(0.5, 0.5)
    assert semicube_contains(top, 0.3, SpaceTimePoint.of(0.6, 0.45))
    assert not semicube_contains(top, 0.3, SpaceTimePoint.of(0.5, 0.51))
    assert not semicube_contains(top, 0.3, SpaceTimePoint.of(0.5, 0.3))  # sqrt(0.2) > 0.3
    with pytest.raises(InvalidArgumentError):
        semicube_contains(top, 0.0, top)


def test_box_grid_layout_is_time_first(unit_interval):
    """Test the node layout: shape (nt+1, nx), t_k = t0 + k tau."""
    dom = unit_interval
    assert dom.grid_shape == (5, 5)
    assert dom.tau == pytest.approx(0.25)
    assert dom.h == pytest.approx(0.25)
    np.testing.assert_allclose(dom.times, [0.0, 0.25, 0.5, 0.75, 1.0])
    assert dom.point(7) == SpaceTimePoint.of(0.5, 0.25)
    assert dom.locate(SpaceTimePoint.of(0.5, 0.25)) == 7
    assert dom.locate(SpaceTimePoint.of(0.6, 0.25)) is None


def test_ball_stair_step_mask():
    """Test that ball nodes are interior iff r < R - h/2 and lateral iff r <= R + h."""
    # GIVEN: B(0, 0.4) in 1D with h = 0.1
    dom = GridDomain.ball((0.0,), 0.4, T=0.4, nx=9, nt=4)

    # THEN: 7 interior nodes (|x| <= 0.3) and the two endpoints on the lateral boundary
    assert dom.spatial_interior.sum() == 7
    assert dom.spatial_boundary.sum() == 2
    assert dom.spatial_in_domain.all()
    assert dom.parabolic_boundary_mask[0].all()
    assert dom.interior_mask[1:].sum() == 4 * 7


def test_boundary_distances_with_and_without_gamma(unit_interval):
    """Test d_P = min(t, dist(x, boundary)) and d_bar = d(P, G_T minus Gamma)."""
    P = SpaceTimePoint.of(0.25, 0.5)

    plain = boundary_distances(unit_interval, P)
    assert plain.d_P == pytest.approx(0.25)
    assert plain.d_bar == pytest.approx(0.25)

    # Removing the lower face leaves the initial slice (sqrt(0.5)) and the upper face (0.75)
    partial = boundary_distances(unit_interval, P, gamma="lower:1")
    assert partial.d_bar == pytest.approx(math.sqrt(0.5))

    # Gamma = all of G_T leaves the empty set
    assert boundary_distances(unit_interval, P, gamma="all").d_bar == math.inf


def test_boundary_distances_rejects_points_outside(unit_interval):
    with pytest.raises(OutOfDomainError):
        boundary_distances(unit_interval, SpaceTimePoint.of(1.5, 0.5))


def test_parse_gamma_rejects_regions_outside_the_parabolic_boundary(unit_interval):
    """Test that only initial, lateral and face selectors are accepted."""
    assert parse_gamma(unit_interval, "lateral") == frozenset({"lower:1", "upper:1"})
    assert parse_gamma(unit_interval, None) == frozenset()
    with pytest.raises(InvalidArgumentError, match="not part of the parabolic boundary"):
        parse_gamma(unit_interval, "final")


def test_portion_mask_marks_faces(unit_interval):
    lower = portion_mask(unit_interval, "lower:1")
    assert lower[:, 0].all() and not lower[:, 1:].any()
    initial = portion_mask(unit_interval, "initial")
    assert initial[0].all() and not initial[1:].any()


def test_grid_function_validates_shape_and_values(unit_interval):
    """Test that fields must match the grid and be finite in the domain."""
    with pytest.raises(ValueError, match="shape"):
        GridFunction(dom=unit_interval, values=np.zeros((3, 3)))
    values = np.zeros(unit_interval.grid_shape)
    values[2, 2] = np.nan
    with pytest.raises(ValueError, match="non-finite"):
        GridFunction(dom=unit_interval, values=values, name="bad")


def test_grid_function_evaluate_at(unit_interval):
    """Test node lookup, analytic evaluation and interpolation."""
    f = GridFunction.from_function(unit_interval, lambda x, t: x[:, 0] + t, name="sum")
    assert f.evaluate_at(SpaceTimePoint.of(0.5, 0.25)) == pytest.approx(0.75)
    assert f.evaluate_at(SpaceTimePoint.of(0.3, 0.1)) == pytest.approx(0.4)

    sampled = f.with_values(f.values)
    assert sampled.analytic is None
    assert sampled.evaluate_at(SpaceTimePoint.of(0.375, 0.125)) == pytest.approx(0.5)
