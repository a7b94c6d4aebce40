"""Tests for the blocked pair scan against the exhaustive double loop."""

import numpy as np
import pytest

from holdervar._internal.pairs import pair_max, pair_max_naive
from holdervar.exponents import example_exponent, exponent_values
from holdervar.geometry import GridDomain, GridFunction
from holdervar.norms import seminorm_var


@pytest.fixture
def matrix():
    rng = np.random.default_rng(7)
    values = rng.uniform(size=(37, 23))
    values[rng.uniform(size=values.shape) < 0.2] = np.nan
    return values


@pytest.mark.parametrize("workers,block_rows", [(1, None), (3, 5), (4, 1)])
def test_blocked_scan_matches_exhaustive_loop(matrix, workers, block_rows):
    expected = pair_max_naive(*matrix.shape, lambda i, j: matrix[i, j])
    result = pair_max(*matrix.shape, lambda start, stop: matrix[start:stop], workers=workers, block_rows=block_rows)
    assert result == expected


def test_ties_keep_the_lexicographically_first_pair():
    values = np.ones((6, 4))
    values[0, 0] = np.nan
    result = pair_max(6, 4, lambda start, stop: values[start:stop], workers=3, block_rows=2)
    assert (result.i, result.j) == (0, 1)


def test_all_nan_gives_no_pair():
    values = np.full((3, 3), np.nan)
    result = pair_max(3, 3, lambda start, stop: values[start:stop])
    assert not result.found
    assert pair_max(0, 3, lambda start, stop: values[start:stop]) == result


def test_seminorm_matches_brute_force_oracle():
    """Test [u]_{α(·)} against a plain double loop over node pairs on a small box cylinder."""
    # GIVEN
    dom = GridDomain.box((-0.2,), (0.2,), T=0.2, nx=7, nt=6)
    alpha = example_exponent(0.5, 0.4)
    rng = np.random.default_rng(11)
    u = GridFunction(dom=dom, values=rng.normal(size=dom.grid_shape), name="noise")

    # WHEN
    report = seminorm_var(u, alpha)

    # THEN
    x, t = dom.node_x, dom.node_t
    vals = u.values.reshape(-1)
    a = exponent_values(alpha, dom).reshape(-1)
    best = 0.0
    for i in range(dom.size):
        for j in range(dom.size):
            d = max(np.abs(x[i] - x[j]).max(), np.sqrt(abs(t[i] - t[j])))
            if d > 0:
                best = max(best, abs(vals[i] - vals[j]) / d ** a[j])
    assert report.value == pytest.approx(best, rel=1e-12)
