"""Extension of fields and exponents to an enlarged cylinder, and space-time mollification.

Extensions keep base-grid nodes in place: the enlarged grid adds whole cells
around the base grid, so f̄ restricted to the base grid is a copy of f.
Time extension clamps t to [t0, T]; spatial extension reflects across ∂Ω
(radially for balls, mirror-wise across faces for boxes).
"""

import logging
import math
from typing import Optional

import numpy as np
from scipy import ndimage

from ._internal.pairs import pair_max
from ._internal.utils import euclidean_distance_matrix
from .errors import InconsistencyError, InvalidArgumentError, PreconditionError, UnsupportedOrderError
from .exponents import VariableExponent, closure_exponent, exponent_values, shifted_exponent
from .geometry import GridDomain, GridFunction, Shape
from .models import ExtendedField, ExtensionKind, MollifyBoundCheck
from .norms import norm_0_alpha

logger = logging.getLogger(__name__)


def _time_margin_levels(dom: GridDomain, sigma: float) -> int:
    """Whole time steps covering the margin max(σ, σ²)."""
    return int(math.ceil(max(sigma, sigma ** 2) / dom.tau - 1e-12))


def _space_margin_cells(dom: GridDomain, sigma: float) -> int:
    return int(math.ceil(sigma / min(dom.spacing) - 1e-12))


def _clamp_time(dom: GridDomain, t: np.ndarray) -> np.ndarray:
    return np.clip(t, dom.t0, dom.T)


def _ball_reflect(dom: GridDomain, x: np.ndarray) -> np.ndarray:
    """x* = c + (2R - r)(x - c)/r for r = |x - c| > R; identity inside the ball."""
    center = np.asarray(dom.center)[None, :]
    offset = x - center
    r = np.linalg.norm(offset, axis=1)
    outside = r > dom.radius
    mapped = np.array(x, dtype=float, copy=True)
    mapped[outside] = center + ((2 * dom.radius - r[outside]) / r[outside])[:, None] * offset[outside]
    return mapped


def _box_reflect(dom: GridDomain, x: np.ndarray) -> np.ndarray:
    lo = np.asarray(dom.lower)[None, :]
    hi = np.asarray(dom.upper)[None, :]
    mapped = np.where(x < lo, 2 * lo - x, x)
    return np.where(mapped > hi, 2 * hi - mapped, mapped)


def _enlarged_domain(dom: GridDomain, space_cells: int, time_levels: int) -> GridDomain:
    t0 = dom.t0 - time_levels * dom.tau
    T = dom.T + time_levels * dom.tau
    nt = dom.nt + 2 * time_levels
    nx = dom.nx + 2 * space_cells
    if dom.shape == Shape.BALL:
        radius = dom.radius + space_cells * dom.spacing[0]
        return GridDomain.ball(dom.center, radius, T=T, nx=nx, nt=nt, t0=t0)
    lower = tuple(lo - space_cells * h for lo, h in zip(dom.lower, dom.spacing))
    upper = tuple(hi + space_cells * h for hi, h in zip(dom.upper, dom.spacing))
    return GridDomain.box(lower, upper, T=T, nx=nx, nt=nt, t0=t0)


def _base_slices(dom: GridDomain, space_cells: int, time_levels: int) -> tuple[slice, ...]:
    return (slice(time_levels, time_levels + dom.nt + 1),) + (slice(space_cells, space_cells + dom.nx),) * dom.n


def _mapped_exponent(alpha: VariableExponent, dom: GridDomain, space_map, name: str) -> VariableExponent:
    def values(x, t):
        return alpha.values(space_map(np.atleast_2d(x)), _clamp_time(dom, np.atleast_1d(t)))

    return closure_exponent(
        values, alpha_minus=alpha.alpha_minus, alpha_plus=alpha.alpha_plus, name=f"{alpha.name}:{name}",
    )


def _build_extension(
    f: GridFunction,
    alpha: VariableExponent,
    sigma: float,
    kind: ExtensionKind,
    space_cells: int,
) -> ExtendedField:
    dom = f.dom
    time_levels = _time_margin_levels(dom, sigma)
    ext = _enlarged_domain(dom, space_cells, time_levels)
    if kind == ExtensionKind.BALL:
        space_map = lambda x: _ball_reflect(dom, x)  # noqa: E731
    elif kind == ExtensionKind.BOX:
        space_map = lambda x: _box_reflect(dom, x)  # noqa: E731
    else:
        space_map = lambda x: x  # noqa: E731

    base = _base_slices(dom, space_cells, time_levels)
    base_mask = np.zeros(ext.grid_shape, dtype=bool)
    base_mask[base] = True
    copied = np.zeros(ext.grid_shape, dtype=bool)
    copied[base] = dom.in_domain_mask

    values = np.full(ext.grid_shape, np.nan)
    values[base] = np.where(dom.in_domain_mask, f.values, np.nan)

    # Time clamp on copied spatial nodes: exact copies of the first and last level.
    spatial = (slice(None),) + base[1:]
    values[(slice(0, time_levels),) + base[1:]] = values[(slice(time_levels, time_levels + 1),) + base[1:]]
    values[(slice(time_levels + dom.nt + 1, None),) + base[1:]] = values[
        (slice(time_levels + dom.nt, time_levels + dom.nt + 1),) + base[1:]
    ]
    copied[spatial] = np.broadcast_to(dom.in_domain_mask[0], copied[spatial].shape)

    # Remaining in-domain nodes of the enlarged grid read f̃ at the reflected point.
    todo = ext.in_domain_mask & ~copied
    if todo.any():
        flat = np.flatnonzero(todo.reshape(-1))
        x_star = space_map(ext.node_x[flat])
        t_star = _clamp_time(dom, ext.node_t[flat])
        if f.analytic is not None:
            mapped = np.asarray(f.analytic(x_star, t_star), dtype=float)
        else:
            mapped = f.interpolator()(np.column_stack([t_star, x_star]))
        values.reshape(-1)[flat] = mapped

    analytic = None
    if f.analytic is not None:
        source = f.analytic
        analytic = lambda x, t: source(space_map(np.atleast_2d(x)), _clamp_time(dom, np.atleast_1d(t)))  # noqa: E731

    f_bar = GridFunction(dom=ext, values=values, analytic=analytic, name=f"{f.name}:{kind.value}")
    alpha_bar = _mapped_exponent(alpha, dom, space_map, kind.value)
    logger.info(f"extend: {kind.value} extension with σ={sigma:g} -> grid {ext.grid_shape}")
    return ExtendedField(
        f_bar=f_bar, alpha_bar=alpha_bar, sigma=sigma, base_dom=dom, kind=kind, base_mask=base_mask,
    )


def extend_time(f: GridFunction, alpha: VariableExponent, sigma: float) -> ExtendedField:
    """
    Extend f and α in time by clamping: f̃(x, t) = f(x, min(max(t, t0), T)).

    Raises:
        InvalidArgumentError: If sigma <= 0
    """
    if sigma <= 0:
        raise InvalidArgumentError(f"Extension radius σ must be positive, got {sigma}.")
    return _build_extension(f, alpha, sigma, ExtensionKind.TIME, 0)


def reflect_extension_ball(f: GridFunction, alpha: VariableExponent, sigma: float) -> ExtendedField:
    """
    Extend f and α to Ω_{T,σ} for a ball Ω: clamp in time, then f̄(x, t) = f̃(x*, t) outside Ω.

    Raises:
        UnsupportedOrderError: If the domain is not a ball
        InvalidArgumentError: If σ <= 0 or σ >= radius
    """
    dom = f.dom
    if dom.shape != Shape.BALL:
        raise UnsupportedOrderError("reflect_extension_ball requires a ball domain; use reflect_extension_box for boxes.")
    if not 0 < sigma < dom.radius:
        raise InvalidArgumentError(f"Ball reflection needs 0 < σ < radius={dom.radius}, got σ={sigma}.")
    return _build_extension(f, alpha, sigma, ExtensionKind.BALL, _space_margin_cells(dom, sigma))


def reflect_extension_box(f: GridFunction, alpha: VariableExponent, sigma: float) -> ExtendedField:
    """
    Extend f and α to Ω_{T,σ} for a box Ω by mirror reflection across each face.

    Raises:
        UnsupportedOrderError: If the domain is not a box
        InvalidArgumentError: If σ <= 0 or σ is not below every side length
    """
    dom = f.dom
    if dom.shape != Shape.BOX:
        raise UnsupportedOrderError("reflect_extension_box requires a box domain; use reflect_extension_ball for balls.")
    shortest = min(hi - lo for lo, hi in zip(dom.lower, dom.upper))
    if not 0 < sigma < shortest:
        raise InvalidArgumentError(f"Box reflection needs 0 < σ < {shortest:g} (shortest side), got σ={sigma}.")
    return _build_extension(f, alpha, sigma, ExtensionKind.BOX, _space_margin_cells(dom, sigma))


def extend_field(f: GridFunction, alpha: VariableExponent, sigma: float) -> ExtendedField:
    """Space-time extension matching the domain shape."""
    if f.dom.shape == Shape.BALL:
        return reflect_extension_ball(f, alpha, sigma)
    return reflect_extension_box(f, alpha, sigma)


def mollifier_stencil(dom: GridDomain, eps: float) -> np.ndarray:
    """
    Discrete bump exp(-1/(1 - |z|²)) on the Euclidean unit ball of R^{n+1}, scaled to radius eps.

    Axis order is (t, x1, ..., xn). Weights are renormalized to sum to exactly 1;
    when eps is below every grid spacing the stencil is the identity.
    """
    steps = (dom.tau,) + tuple(dom.spacing)
    half = [int(math.floor(eps / step + 1e-12)) for step in steps]
    axes = [np.arange(-m, m + 1) * step for m, step in zip(half, steps)]
    mesh = np.meshgrid(*axes, indexing="ij")
    radius2 = sum(m ** 2 for m in mesh) / eps ** 2
    with np.errstate(divide="ignore", over="ignore"):
        weights = np.where(radius2 < 1.0, np.exp(-1.0 / (1.0 - np.minimum(radius2, 1.0 - 1e-300))), 0.0)
    total = weights.sum()
    if total == 0.0:
        weights = np.zeros_like(weights)
        weights[tuple(m for m in half)] = 1.0
        return weights
    return weights / total


def mollify(ext: ExtendedField, eps: float) -> GridFunction:
    """
    f_ε = f̄ * φ_ε on the base grid, with the Euclidean space-time bump of radius ε.

    Raises:
        PreconditionError: If ε > σ (the convolution would read outside Ω_{T,σ})
        InvalidArgumentError: If ε <= 0
    """
    if eps <= 0:
        raise InvalidArgumentError(f"Mollification radius must be positive, got ε={eps}.")
    if eps > ext.sigma:
        raise PreconditionError(
            f"mollify: ε={eps:g} exceeds the extension radius σ={ext.sigma:g}; extend with a larger σ."
        )
    base, extended = ext.base_dom, ext.f_bar.dom
    stencil = mollifier_stencil(extended, eps)

    values = ext.f_bar.values
    invalid = ~np.isfinite(values)
    if invalid.any():
        _, indices = ndimage.distance_transform_edt(invalid, return_distances=True, return_indices=True)
        values = values[tuple(indices)]
    smoothed = ndimage.convolve(values, stencil[(slice(None, None, -1),) * stencil.ndim], mode="nearest")
    out = smoothed[ext.base_mask].reshape(base.grid_shape)
    out = np.where(base.in_domain_mask, out, np.nan)
    return GridFunction(dom=base, values=out, name=f"{ext.f_bar.name}*phi_{eps:g}")


def uniform_continuity_radius(alpha: VariableExponent, dom: GridDomain, delta: float) -> float:
    """
    ε'(δ): half the smallest Euclidean space-time distance between nodes whose exponents differ by >= δ.

    Returns +inf when no pair reaches δ.
    """
    if delta <= 0:
        raise InvalidArgumentError(f"δ must be positive, got {delta}.")
    nodes = np.flatnonzero(dom.in_domain_mask.reshape(-1))
    x, t = dom.node_x[nodes], dom.node_t[nodes]
    values = exponent_values(alpha, dom).reshape(-1)[nodes]

    def block(start: int, stop: int) -> np.ndarray:
        dist = euclidean_distance_matrix(x[start:stop], t[start:stop], x, t)
        far = np.abs(values[start:stop, None] - values[None, :]) >= delta
        return np.where(far, -dist, np.nan)

    best = pair_max(nodes.size, nodes.size, block)
    return math.inf if not best.found else -best.value / 2.0


def check_mollify_bound(
    ext: ExtendedField,
    alpha: VariableExponent,
    delta: float,
    eps: Optional[float] = None,
) -> MollifyBoundCheck:
    """
    Compare |f_ε|_{0,α(·)-δ,Ω_T} with 3|f̄|_{0,ᾱ(·),Ω_{T,σ}}.

    eps defaults to min(ε'(δ)/2, σ). An ε beyond ε'(δ) is still evaluated but
    flagged with within_hypotheses=False.

    Raises:
        InvalidArgumentError: If δ is not in (0, α⁻)
    """
    if not 0 < delta < alpha.alpha_minus:
        raise InvalidArgumentError(
            f"δ must satisfy 0 < δ < α⁻={alpha.alpha_minus:g}, got δ={delta:g}."
        )
    eps_prime = uniform_continuity_radius(ext.alpha_bar, ext.f_bar.dom, delta)
    if eps is None:
        eps = min(eps_prime / 2.0, ext.sigma)
    within = eps <= eps_prime
    if not within:
        logger.warning(f"check_mollify_bound: ε={eps:g} exceeds ε'(δ)={eps_prime:g}; reporting outside the hypotheses")

    f_eps = mollify(ext, eps)
    lhs = norm_0_alpha(f_eps, shifted_exponent(alpha, -delta)).value
    rhs = 3.0 * norm_0_alpha(ext.f_bar, ext.alpha_bar).value
    return MollifyBoundCheck(
        lhs=lhs, rhs=rhs, passed=lhs <= rhs, delta=delta, epsilon=eps,
        epsilon_prime=eps_prime, within_hypotheses=within,
    )


def measure_extension_constant(ext: ExtendedField, f: GridFunction, alpha: VariableExponent) -> float:
    """|f̄|_{0,ᾱ,Ω_{T,σ}} / |f|_{0,α,Ω_T}; 0 for f ≡ 0."""
    numerator = norm_0_alpha(ext.f_bar, ext.alpha_bar).value
    denominator = norm_0_alpha(f, alpha).value
    if denominator == 0.0:
        if numerator > 0.0:
            raise InconsistencyError("measure_extension_constant: the extension of a zero field is nonzero.")
        return 0.0
    return numerator / denominator
