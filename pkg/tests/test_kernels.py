"""Tests for the analytic heat kernels and their derivative bounds."""

import math

import numpy as np
import pytest
from scipy import integrate

from holdervar.errors import InvalidArgumentError, TimeOrderingError, UnsupportedOrderError
from holdervar.kernels import (
    KernelSpec,
    anisotropic_for_operator,
    eval_kernel,
    eval_kernel_derivative,
    heat_residuals,
    kernel_1d,
    kernel_sample_lattice,
    verify_derivative_bound,
)


def test_standard_kernel_value_on_the_diagonal():
    """Test G(x, t; x, t + 1) = (4π)^{-n/2}."""
    assert eval_kernel(KernelSpec.standard(1), 0.0, 0.0, 0.0, 1.0) == pytest.approx(1.0 / math.sqrt(4 * math.pi))
    assert eval_kernel(KernelSpec.standard(2), (0.5, 0.5), 0.0, (0.5, 0.5), 1.0) == pytest.approx(1.0 / (4 * math.pi))


def test_kernel_has_unit_mass():
    total, _ = integrate.quad(lambda z: float(kernel_1d(np.asarray(z), 0.3)), -np.inf, np.inf)
    assert total == pytest.approx(1.0, rel=1e-8)


def test_kernel_requires_s_after_t():
    with pytest.raises(TimeOrderingError):
        eval_kernel(KernelSpec.standard(1), 0.0, 1.0, 0.0, 1.0)
    with pytest.raises(TimeOrderingError):
        eval_kernel(KernelSpec.standard(1), [0.0, 0.1], [0.0, 0.5], 0.0, 0.3)


def test_orders_above_four_are_unsupported():
    with pytest.raises(UnsupportedOrderError):
        eval_kernel_derivative(KernelSpec.standard(1), 3, 2, 0.0, 0.0, 0.1, 1.0)
    with pytest.raises(InvalidArgumentError, match="does not match"):
        eval_kernel_derivative(KernelSpec.standard(2), 0, (1, 0, 0), (0.0, 0.0), 0.0, (0.1, 0.0), 1.0)
    with pytest.raises(UnsupportedOrderError):
        kernel_1d(np.zeros(3), 0.5, order=9)


def test_space_derivative_matches_central_difference():
    """Test the analytic ∂_y and ∂_y² of the 1D kernel against finite differences."""
    spec = KernelSpec.standard(1)
    x, t, y, s, e = 0.3, 0.0, -0.1, 0.4, 1e-4

    def G(point):
        return eval_kernel(spec, x, t, point, s)

    first = (G(y + e) - G(y - e)) / (2 * e)
    second = (G(y + e) - 2 * G(y) + G(y - e)) / e ** 2
    assert eval_kernel_derivative(spec, 0, 1, x, t, y, s) == pytest.approx(first, rel=1e-6)
    assert eval_kernel_derivative(spec, 0, 2, x, t, y, s) == pytest.approx(second, rel=1e-5)


def test_derivatives_with_respect_to_x_flip_sign():
    """Test that D_x = -D_y and D_t = -D_s for the translation-invariant kernel."""
    spec = KernelSpec.standard(2)
    args = ((0.2, -0.1), 0.0, (0.0, 0.3), 0.7)
    ys = eval_kernel_derivative(spec, 1, (1, 0), *args)
    xt = eval_kernel_derivative(spec, 1, (1, 0), *args, wrt="xt")
    assert xt == pytest.approx(ys)  # (-1)^2
    assert eval_kernel_derivative(spec, 0, (0, 1), *args, wrt="xt") == pytest.approx(
        -eval_kernel_derivative(spec, 0, (0, 1), *args)
    )
    with pytest.raises(InvalidArgumentError):
        eval_kernel_derivative(spec, 0, 0, *args, wrt="st")


@pytest.mark.parametrize(
    "spec",
    [
        KernelSpec.standard(2),
        KernelSpec.reflected(2, dbar=0.5),
        anisotropic_for_operator([[2.0, 0.5], [0.5, 1.0]]),
    ],
    ids=["standard", "reflected", "anisotropic"],
)
def test_kernels_solve_the_heat_equations(spec):
    """Test the forward equation in (y, s) and the backward equation in (x, t)."""
    rng = np.random.default_rng(3)
    x = rng.uniform(-0.5, 0.5, size=(20, 2))
    y = rng.uniform(-0.5, 0.4, size=(20, 2))
    t = np.zeros(20)
    s = rng.uniform(0.1, 1.0, size=20)

    forward, backward = heat_residuals(spec, x, t, y, s)

    scale = np.abs(eval_kernel_derivative(spec, 1, 0, x, t, y, s)).max()
    assert np.abs(forward).max() <= 1e-9 * max(scale, 1.0)
    assert np.abs(backward).max() <= 1e-9 * max(scale, 1.0)


def test_reflected_kernel_vanishes_on_the_plane():
    spec = KernelSpec.reflected(2, dbar=0.5)
    assert eval_kernel(spec, (0.1, 0.2), 0.0, (0.3, 0.5), 0.6) == pytest.approx(0.0, abs=1e-15)
    assert eval_kernel(spec, (0.1, 0.2), 0.0, (0.3, 0.2), 0.6) > 0.0


def test_anisotropic_kernel_with_identity_matrix_is_standard():
    args = ((0.2, -0.1), 0.0, (0.0, 0.3), 0.7)
    aniso = KernelSpec.anisotropic(np.eye(2), lam=1.0, Lam=1.0)
    for k, j in [(0, (0, 0)), (0, (1, 1)), (1, (2, 0))]:
        assert eval_kernel_derivative(aniso, k, j, *args) == pytest.approx(
            eval_kernel_derivative(KernelSpec.standard(2), k, j, *args)
        )


def test_kernel_spec_validation():
    with pytest.raises(ValueError, match="dbar"):
        KernelSpec(kind="reflected", n=1)
    with pytest.raises(ValueError, match="symmetric"):
        KernelSpec.anisotropic([[1.0, 0.5], [0.0, 1.0]])
    with pytest.raises(ValueError, match="positive definite"):
        KernelSpec.anisotropic([[1.0, 0.0], [0.0, 0.5]], lam=0.8)
    with pytest.raises(ValueError, match="above"):
        KernelSpec.anisotropic([[3.0, 0.0], [0.0, 1.0]], Lam=2.0)


def test_sample_lattice_layout():
    sample = kernel_sample_lattice(2, density=3, dbar=0.5)
    assert sample.size == 7 ** 2 * 3
    assert np.all(sample.s > sample.t)
    assert np.all(sample.y[:, -1] < 0.5)
    with pytest.raises(InvalidArgumentError):
        kernel_sample_lattice(1, density=0)


def test_derivative_bound_is_finite_and_stable_under_refinement():
    """Test that the measured constant is finite and grows little when the lattice doubles."""
    spec = KernelSpec.standard(1)
    coarse = verify_derivative_bound(spec, 1, 1, kernel_sample_lattice(1, density=4))
    fine = verify_derivative_bound(spec, 1, 1, kernel_sample_lattice(1, density=8))
    assert coarse.samples == 9 * 4
    assert 0.0 < coarse.value < math.inf
    assert fine.value >= coarse.value * (1 - 1e-9)
    assert fine.value <= 1.5 * coarse.value
