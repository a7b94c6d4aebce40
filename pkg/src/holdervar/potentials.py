"""Heat potentials v(y, s) = ∫_0^s ∫ f(x, t) G(x, t; y, s) dx dt and their time derivatives.

Quadrature on the grid of f:
- space: tensor trapezoid rule; for the standard and reflected kernels the
  kernel factorizes per axis, so each time gap applies one nx-by-nx matrix per
  axis to every source level at once. Anisotropic kernels use dense matrices.
- time: trapezoid over the levels t_0 .. s - τ, plus the singular layer
  [s - τ, s] approximated by f(y, s)·τ (for v) and Lf(y, s)·τ (for v_s).
- v_s(y, s) = f(y, s) + ∫∫ f G_s.
"""

import logging
from typing import Optional

import numpy as np

from ._internal.pairs import pair_max
from ._internal.utils import parabolic_distance_matrix
from .errors import InconsistencyError, InvalidArgumentError, PreconditionError, TimeOrderingError
from .exponents import VariableExponent, exponent_values
from .geometry import GridDomain, GridFunction, Shape, SpaceTimePoint
from .kernels import KernelKind, KernelSpec, eval_kernel, eval_kernel_derivative, kernel_1d
from .models import PotentialResult, QuadratureMeta, TimeDerivativeBoundReport, Witness
from .norms import finite_differences, pointed_seminorm_field

logger = logging.getLogger(__name__)


def _trapezoid_weights(count: int, step: float) -> np.ndarray:
    w = np.full(count, step)
    w[0] = w[-1] = step / 2
    return w


def _space_weights(dom: GridDomain) -> np.ndarray:
    """Tensor trapezoid weights of the spatial nodes, flat."""
    weights = np.ones(dom.space_shape)
    for axis, step in enumerate(dom.spacing):
        shape = [-1 if a == axis else 1 for a in range(dom.n)]
        weights = weights * _trapezoid_weights(dom.nx, step).reshape(shape)
    return weights.reshape(-1)


def _level_weights(nt: int, gap: int, tau: float) -> np.ndarray:
    """Time-trapezoid weights over [t_0, t_{m-1}] for source levels k = 0..nt-gap, target m = k + gap."""
    w = np.full(nt - gap + 1, tau)
    w[0] /= 2
    if gap == 1:
        w /= 2
        w[0] = 0.0  # target m = 1: the interval [t_0, t_0] is empty
    return w


def _apply_axes(F: np.ndarray, mats: list[np.ndarray]) -> np.ndarray:
    """Contract each spatial axis of F (batch, nx, ..., nx) with its matrix (source x target)."""
    out = F
    for axis, M in enumerate(mats):
        out = np.moveaxis(np.tensordot(out, M, axes=([1 + axis], [0])), -1, 1 + axis)
    return out


def _axis_matrices(dom: GridDomain, spec: KernelSpec, gap_tau: float, order: int) -> list[np.ndarray]:
    mats = []
    for axis, (coords, step) in enumerate(zip(dom.axes, dom.spacing)):
        weights = _trapezoid_weights(coords.size, step)
        z = coords[:, None] - coords[None, :]
        M = kernel_1d(z, gap_tau, order)
        if spec.kind == KernelKind.REFLECTED and axis == dom.n - 1:
            mirrored = 2.0 * spec.dbar - coords
            M = M - kernel_1d(coords[:, None] - mirrored[None, :], gap_tau, order)
        mats.append(weights[:, None] * M)
    return mats


def _check_support(f: GridFunction) -> None:
    """f must vanish on the fences x_i = ±edge (i < n), the lower face of the last axis and t = t0."""
    values = np.where(f.dom.in_domain_mask, f.values, 0.0)
    scale = max(np.abs(values).max(), 1.0) * 1e-14
    dom = f.dom
    if np.abs(values[0]).max() > scale:
        raise PreconditionError(
            "heat_potential: f must vanish at the initial time to compute v_s; "
            "shift its support away from t = t0."
        )
    if dom.shape == Shape.BALL:
        lateral = dom.spatial_boundary.reshape(dom.space_shape)
        if np.abs(values[:, lateral]).max(initial=0.0) > scale:
            raise PreconditionError("heat_potential: f must vanish on the lateral boundary of the ball.")
        return
    for axis in range(dom.n):
        slab = np.moveaxis(values, 1 + axis, 1)
        sides = [("lower", 0)] if axis == dom.n - 1 else [("lower", 0), ("upper", -1)]
        for side, index in sides:
            if np.abs(slab[:, index]).max() > scale:
                raise PreconditionError(
                    f"heat_potential: f must vanish on the {side} face of axis {axis + 1} to compute v_s; "
                    "keep its support a positive distance from that fence."
                )


def _source_operator(f: GridFunction, spec: KernelSpec) -> np.ndarray:
    """Lf at every node: Δf, or Σ (A⁻¹)_ij D_ij f for anisotropic kernels."""
    bundle = finite_differences(f.with_values(np.where(f.dom.in_domain_mask, f.values, 0.0)))
    if spec.kind == KernelKind.ANISOTROPIC:
        B = np.linalg.inv(spec.matrix)
        return np.einsum("ab,ab...->...", B, bundle.hess)
    return bundle.laplacian()


def heat_potential(
    f: GridFunction,
    spec: Optional[KernelSpec] = None,
    eval_mask: Optional[np.ndarray] = None,
    with_time_derivative: bool = True,
    check_support: bool = True,
) -> PotentialResult:
    """
    Heat potential of f and its time derivative on the nodes of f's grid.

    Args:
        f: Source field; values outside the domain are treated as 0
        spec: Kernel (defaults to the standard kernel)
        eval_mask: Nodes at which to report v and v_s (defaults to all in-domain nodes)
        with_time_derivative: Also compute v_s
        check_support: Enforce the support conditions required for v_s

    Returns:
        PotentialResult with NaN outside eval_mask

    Raises:
        PreconditionError: If v_s is requested and f does not vanish on the fences or at t = t0
    """
    dom = f.dom
    spec = spec or KernelSpec.standard(dom.n)
    if spec.n != dom.n:
        raise InvalidArgumentError(f"Kernel dimension {spec.n} does not match the domain dimension {dom.n}.")
    if with_time_derivative and check_support:
        _check_support(f)

    F = np.where(dom.in_domain_mask, f.values, 0.0)
    tau, nt = dom.tau, dom.nt
    V = np.zeros(dom.grid_shape)
    VS = np.zeros(dom.grid_shape) if with_time_derivative else None

    if spec.kind == KernelKind.ANISOTROPIC:
        _accumulate_dense(dom, spec, F, V, VS)
    else:
        for gap in range(1, nt + 1):
            weights = _level_weights(nt, gap, tau)
            sources = F[: nt - gap + 1] * weights.reshape((-1,) + (1,) * dom.n)
            mats0 = _axis_matrices(dom, spec, gap * tau, 0)
            V[gap:] += _apply_axes(sources, mats0)
            if VS is not None:
                mats2 = _axis_matrices(dom, spec, gap * tau, 2)
                for axis in range(dom.n):
                    mats = list(mats0)
                    mats[axis] = mats2[axis]
                    VS[gap:] += _apply_axes(sources, mats)

    V[1:] += tau * F[1:]
    if VS is not None:
        VS[1:] += tau * _source_operator(f, spec)[1:] * dom.in_domain_mask[1:]
        VS += F

    mask = dom.in_domain_mask if eval_mask is None else (np.asarray(eval_mask, dtype=bool) & dom.in_domain_mask)
    V = np.where(mask, V, np.nan)
    if VS is not None:
        VS = np.where(mask, VS, np.nan)
    meta = QuadratureMeta(
        kind=spec.kind.value, time_cutoff=tau,
        spatial_rule="tensor-trapezoid" if spec.kind != KernelKind.ANISOTROPIC else "dense-trapezoid",
        space_nodes=int(np.prod(dom.space_shape)), time_levels=nt + 1,
    )
    logger.info(f"heat_potential: {spec.kind.value} kernel on {dom.grid_shape} grid, cutoff τ={tau:.4g}")
    return PotentialResult(v=V, v_s=VS, dom=dom, eval_mask=mask, meta=meta)


def _accumulate_dense(dom: GridDomain, spec: KernelSpec, F: np.ndarray, V: np.ndarray, VS: Optional[np.ndarray]):
    points = dom.space_points
    M = points.shape[0]
    weights = _space_weights(dom)
    src = np.repeat(points, M, axis=0)
    tgt = np.tile(points, (M, 1))
    Ff = F.reshape(dom.nt + 1, M)
    for gap in range(1, dom.nt + 1):
        gap_tau = gap * dom.tau
        zeros, ends = np.zeros(M * M), np.full(M * M, gap_tau)
        K = eval_kernel(spec, src, zeros, tgt, ends).reshape(M, M) * weights[:, None]
        lw = _level_weights(dom.nt, gap, dom.tau)
        sources = Ff[: dom.nt - gap + 1] * lw[:, None]
        V.reshape(dom.nt + 1, M)[gap:] += sources @ K
        if VS is not None:
            Ks = eval_kernel_derivative(spec, 1, 0, src, zeros, tgt, ends).reshape(M, M) * weights[:, None]
            VS.reshape(dom.nt + 1, M)[gap:] += sources @ Ks


def potential_at(f: GridFunction, spec: Optional[KernelSpec], P: SpaceTimePoint) -> float:
    """
    v at an arbitrary point (y, s) by direct quadrature over the grid of f.

    Raises:
        TimeOrderingError: If s <= t0
    """
    dom = f.dom
    spec = spec or KernelSpec.standard(dom.n)
    if P.t <= dom.t0:
        raise TimeOrderingError(f"potential_at: evaluation time s={P.t} must exceed t0={dom.t0}.")
    F = np.where(dom.in_domain_mask, f.values, 0.0).reshape(dom.nt + 1, -1)
    last = int(np.floor((P.t - dom.tau - dom.t0) / dom.tau + 1e-12))
    last = min(last, dom.nt)
    total = 0.0
    if last >= 1:
        time_w = _trapezoid_weights(last + 1, dom.tau)
        space_w = _space_weights(dom)
        y = np.asarray([P.x])
        for k in range(last + 1):
            G = eval_kernel(spec, dom.space_points, np.full(F.shape[1], dom.times[k]), y, np.full(F.shape[1], P.t))
            total += time_w[k] * float(np.dot(space_w * G, F[k]))
    layer = P.t - (dom.times[last] if last >= 0 else dom.t0)
    return total + layer * f.evaluate_at(P)


def duhamel_residual(result: PotentialResult, f: GridFunction, region: Optional[np.ndarray] = None) -> float:
    """sup |v_t - Δv - f| over region (default: interior evaluation nodes after the first two levels)."""
    dom = result.dom
    v = GridFunction(dom=dom, values=np.where(result.eval_mask, result.v, 0.0), name="v")
    bundle = finite_differences(v)
    residual = bundle.ut - bundle.laplacian() - np.where(dom.in_domain_mask, f.values, 0.0)
    if region is None:
        region = dom.interior_mask & result.eval_mask
        region[:2] = False
    values = np.abs(residual[region])
    return float(values.max()) if values.size else 0.0


def time_derivative_fd_check(result: PotentialResult, f: GridFunction, margin_levels: int = 3) -> float:
    """
    Relative sup difference between v_s and the centered difference of v in s.

    Only levels at least margin_levels steps away from the time edges of f's support are compared.
    """
    if result.v_s is None:
        raise InvalidArgumentError("time_derivative_fd_check needs a result computed with v_s.")
    dom = result.dom
    active = np.flatnonzero(np.any(np.abs(np.where(dom.in_domain_mask, f.values, 0.0)) > 0,
                                   axis=tuple(range(1, dom.n + 1))))
    start, stop = (active[0], active[-1]) if active.size else (0, dom.nt)
    levels = [m for m in range(1, dom.nt)
              if min(abs(m - start), abs(m - stop)) >= margin_levels]
    if not levels:
        raise InvalidArgumentError("No time level is far enough from the support edges; refine in time.")
    levels = np.asarray(levels)
    fd = (result.v[levels + 1] - result.v[levels - 1]) / (2 * dom.tau)
    interior = dom.interior_mask[levels]
    diff = np.abs(fd - result.v_s[levels])[interior]
    scale = np.abs(result.v_s[levels][interior]).max()
    return float(diff.max() / scale) if scale > 0 else float(diff.max())


def verify_time_derivative_bound(
    f: GridFunction,
    alpha: VariableExponent,
    spec: Optional[KernelSpec] = None,
    result: Optional[PotentialResult] = None,
    space_samples: int = 64,
    time_samples: int = 8,
    seed: int = 0,
    workers: Optional[int] = None,
) -> TimeDerivativeBoundReport:
    """
    Measured constant of the v_s Hölder bound.

    For sampled pairs P1 = (y1, s1), P2 = (y2, s2) the quotient
    |v_s(P1) - v_s(P2)| / d(P1, P2)^{α(P1)} is divided by the sum of the pointed
    seminorms of f at (y1, s1), (y1, s2), (y2, s1) and (y2, s2). Pairs are drawn
    from a product of sampled spatial nodes and time levels so all four corners
    are sampled nodes.

    Raises:
        InconsistencyError: If a pair has a nonzero quotient but a zero seminorm sum
    """
    dom = f.dom
    result = result or heat_potential(f, spec)
    if result.v_s is None:
        raise InvalidArgumentError("verify_time_derivative_bound needs v_s; compute the potential with_time_derivative.")

    rng = np.random.default_rng(seed)
    M = int(np.prod(dom.space_shape))
    spatial = np.flatnonzero(dom.spatial_interior)
    if spatial.size > space_samples:
        spatial = np.sort(rng.choice(spatial, size=space_samples, replace=False))
    levels = np.unique(np.linspace(1, dom.nt, min(time_samples, dom.nt)).round().astype(int))
    nodes = (levels[:, None] * M + spatial[None, :]).reshape(-1)
    nodes = nodes[np.isfinite(result.v_s.reshape(-1)[nodes])]

    alpha_flat = exponent_values(alpha, dom).reshape(-1)
    comps = np.where(dom.in_domain_mask, f.values, 0.0).reshape(1, -1)
    pointed = pointed_seminorm_field(dom, comps, alpha_flat, nodes)
    table = np.full((dom.nt + 1, M), np.nan)
    table[nodes // M, nodes % M] = pointed

    vs = result.v_s.reshape(-1)[nodes]
    x, t = dom.node_x[nodes], dom.node_t[nodes]
    lv, sp = nodes // M, nodes % M
    a = alpha_flat[nodes]
    tol = 1e-10 * max(1.0, float(np.abs(vs).max(initial=0.0)))
    counters = {"pairs": 0, "skipped": 0}

    def block(start: int, stop: int) -> np.ndarray:
        d = parabolic_distance_matrix(x[start:stop], t[start:stop], x, t)
        with np.errstate(divide="ignore", invalid="ignore"):
            quotient = np.abs(vs[start:stop, None] - vs[None, :]) / d ** a[start:stop, None]
        L1, S1 = lv[start:stop, None], sp[start:stop, None]
        L2, S2 = lv[None, :], sp[None, :]
        denominator = table[L1, S1] + table[L2, S1] + table[L1, S2] + table[L2, S2]
        quotient[d == 0] = np.nan
        zero = (denominator == 0) & np.isfinite(quotient)
        if np.any(zero & (quotient > tol)):
            raise InconsistencyError(
                "verify_time_derivative_bound: v_s varies between nodes where every pointed seminorm of f vanishes; "
                "the potential quadrature is inconsistent."
            )
        ratio = quotient / denominator
        ratio[zero] = np.nan
        counters["pairs"] += int(np.isfinite(ratio).sum())
        counters["skipped"] += int(zero.sum())
        return ratio

    best = pair_max(nodes.size, nodes.size, block, workers=1)
    denominators = {
        "pointed_seminorm_max": float(pointed.max(initial=0.0)),
        "pointed_seminorm_min": float(pointed.min(initial=0.0)),
    }
    if not best.found:
        logger.warning("verify_time_derivative_bound: no pair with a nonzero seminorm sum; report is vacuous")
        return TimeDerivativeBoundReport(
            value=0.0, vacuous=True, pairs=0, skipped_pairs=counters["skipped"], denominator_terms=denominators,
        )
    witness = Witness.from_nodes(dom, nodes[best.i], nodes[best.j], best.value)
    return TimeDerivativeBoundReport(
        value=best.value, vacuous=False, pairs=counters["pairs"], skipped_pairs=counters["skipped"],
        witness=witness, denominator_terms=denominators,
    )
