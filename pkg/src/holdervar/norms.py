"""Variable Hölder seminorms and norms of grid functions.

All suprema run over ordered pairs of in-domain nodes with finite samples;
no sub-grid optimization is attempted. Hessian differences use the max-norm
over entries, matching the max-norm convention on space.
"""

import logging
from typing import Iterable, Optional, Union

import numpy as np
from pydantic import BaseModel
from scipy.spatial.distance import cdist

from ._internal.pairs import PairMax, pair_max
from ._internal.utils import max_abs_difference_matrix, parabolic_distance_matrix
from .errors import InvalidArgumentError, UnsupportedOrderError
from .exponents import VariableExponent, eval_exponent, exponent_values
from .geometry import GridDomain, GridFunction, SpaceTimePoint, boundary_distance_field
from .models import HolderReport, Witness

logger = logging.getLogger(__name__)

__all__ = [
    "GridFunction",
    "DerivativeBundle",
    "finite_differences",
    "seminorm_var",
    "pointed_seminorm",
    "pointed_seminorm_field",
    "norm_0_alpha",
    "norm_2_alpha",
    "norm_2_1_alpha",
    "weighted_interior_seminorm",
    "boundary_seminorm",
    "classical_seminorm",
]


class DerivativeBundle(BaseModel):
    """Finite-difference derivatives of a grid function.

    grad has shape (n,) + grid_shape, hess (n, n) + grid_shape, ut grid_shape.
    Entries whose stencil touches a non-finite sample are NaN.
    """
    model_config = {"arbitrary_types_allowed": True}

    dom: GridDomain
    values: np.ndarray
    grad: np.ndarray
    hess: np.ndarray
    ut: np.ndarray
    stencil_order: int = 2

    def components(self, k: int) -> np.ndarray:
        """D^k u stacked as (components, N) over all flat nodes."""
        if k == 0:
            return self.values.reshape(1, -1)
        if k == 1:
            return self.grad.reshape(self.dom.n, -1)
        if k == 2:
            rows, cols = np.triu_indices(self.dom.n)
            return self.hess[rows, cols].reshape(len(rows), -1)
        raise UnsupportedOrderError(f"Derivative order k={k} is not supported; use k in {{0, 1, 2}}.")

    def laplacian(self) -> np.ndarray:
        return np.trace(self.hess, axis1=0, axis2=1)


def _second_derivative(values: np.ndarray, step: float, axis: int) -> np.ndarray:
    """Central 3-point stencil inside, one-sided second-order stencil at both ends."""
    v = np.moveaxis(values, axis, 0)
    out = np.empty_like(v)
    out[1:-1] = (v[2:] - 2.0 * v[1:-1] + v[:-2]) / step ** 2
    if v.shape[0] >= 4:
        out[0] = (2.0 * v[0] - 5.0 * v[1] + 4.0 * v[2] - v[3]) / step ** 2
        out[-1] = (2.0 * v[-1] - 5.0 * v[-2] + 4.0 * v[-3] - v[-4]) / step ** 2
    else:
        out[0] = out[1]
        out[-1] = out[-2]
    return np.moveaxis(out, 0, axis)


def finite_differences(u: GridFunction) -> DerivativeBundle:
    """
    Second-order finite-difference gradient, Hessian and time derivative.

    Space: central stencils at interior nodes, one-sided second-order stencils at
    the grid edges; mixed entries are differences of the gradient, symmetrized.
    Time: central differences, one-sided second-order at the first and last level.
    Exact up to round-off on fields quadratic in space and linear in time.

    Raises:
        InvalidArgumentError: If the grid has fewer than 3 nodes per axis or 3 time levels
    """
    dom = u.dom
    if dom.nx < 3 or dom.nt + 1 < 3:
        raise InvalidArgumentError(
            f"finite_differences needs at least 3 nodes per axis and 3 time levels, "
            f"got nx={dom.nx}, nt+1={dom.nt + 1}. Refine the grid."
        )
    values = u.values
    n = dom.n
    with np.errstate(invalid="ignore"):
        grad = np.stack([
            np.gradient(values, dom.spacing[a], axis=1 + a, edge_order=2) for a in range(n)
        ])
        hess = np.empty((n, n) + dom.grid_shape)
        for a in range(n):
            hess[a, a] = _second_derivative(values, dom.spacing[a], 1 + a)
            for b in range(a + 1, n):
                mixed_ab = np.gradient(grad[a], dom.spacing[b], axis=1 + b, edge_order=2)
                mixed_ba = np.gradient(grad[b], dom.spacing[a], axis=1 + a, edge_order=2)
                hess[a, b] = hess[b, a] = 0.5 * (mixed_ab + mixed_ba)
        ut = np.gradient(values, dom.times, axis=0, edge_order=2)
    return DerivativeBundle(dom=dom, values=values, grad=grad, hess=hess, ut=ut)


def _alpha_flat(alpha: VariableExponent, dom: GridDomain) -> np.ndarray:
    return exponent_values(alpha, dom).reshape(-1)


def _usable_nodes(dom: GridDomain, comps: np.ndarray) -> np.ndarray:
    mask = dom.in_domain_mask.reshape(-1) & np.all(np.isfinite(comps), axis=0)
    return np.flatnonzero(mask)


def _pair_scan(
    dom: GridDomain,
    comps: np.ndarray,
    alpha_flat: np.ndarray,
    exponent_at: str,
    nodes: np.ndarray,
    dist: Optional[np.ndarray] = None,
    power_shift: float = 0.0,
    workers: Optional[int] = None,
) -> PairMax:
    """
    sup over ordered node pairs (P, Q) of W * |F(P) - F(Q)| / d(P, Q)^e.

    e is α(Q) when exponent_at == "Q" and α(P) when "P". With dist given,
    W = min(dist_P, dist_Q)^(power_shift + α(P)); otherwise W = 1.
    Indices in the result refer to positions in nodes.
    """
    x, t = dom.node_x[nodes], dom.node_t[nodes]
    F = comps[:, nodes].T
    a = alpha_flat[nodes]
    w = None if dist is None else dist.reshape(-1)[nodes]

    def block(start: int, stop: int) -> np.ndarray:
        d = parabolic_distance_matrix(x[start:stop], t[start:stop], x, t)
        diff = max_abs_difference_matrix(F[start:stop], F)
        expo = a[start:stop, None] if exponent_at == "P" else a[None, :]
        with np.errstate(divide="ignore", invalid="ignore"):
            q = diff / d ** expo
            if w is not None:
                pair_dist = np.minimum(w[start:stop, None], w[None, :])
                q = q * pair_dist ** (power_shift + a[start:stop, None])
        q[d == 0] = np.nan
        return q

    return pair_max(nodes.size, nodes.size, block, workers=workers)


def _report(name: str, dom: GridDomain, nodes: np.ndarray, best: PairMax, breakdown=None) -> HolderReport:
    value = best.value if best.found else 0.0
    witness = None
    if best.found and value > 0:
        witness = Witness.from_nodes(dom, nodes[best.i], nodes[best.j], value)
    return HolderReport(name=name, value=value, witness=witness, breakdown=breakdown or {name: value})


def _sup(comps: np.ndarray, nodes: np.ndarray, weight: Optional[np.ndarray] = None) -> float:
    if nodes.size == 0:
        return 0.0
    vals = np.abs(comps[:, nodes]).max(axis=0)
    if weight is not None:
        vals = vals * weight.reshape(-1)[nodes]
    return float(vals.max())


def seminorm_var(u: GridFunction, alpha: VariableExponent, workers: Optional[int] = None) -> HolderReport:
    """[u]_{α(·)} = sup_{P≠Q} |u(P) - u(Q)| / d(P, Q)^{α(Q)}, exponent at the second point."""
    comps = u.values.reshape(1, -1)
    nodes = _usable_nodes(u.dom, comps)
    best = _pair_scan(u.dom, comps, _alpha_flat(alpha, u.dom), "Q", nodes, workers=workers)
    return _report("[u]_alpha", u.dom, nodes, best)


def _field_seminorm(dom: GridDomain, comps: np.ndarray, alpha_flat: np.ndarray, workers=None):
    nodes = _usable_nodes(dom, comps)
    return nodes, _pair_scan(dom, comps, alpha_flat, "Q", nodes, workers=workers)


def pointed_seminorm(u: GridFunction, alpha: VariableExponent, P: SpaceTimePoint) -> float:
    """[u]_{α(P),P} = sup_{Q≠P} |u(P) - u(Q)| / d(P, Q)^{α(P)} over in-domain nodes Q."""
    dom = u.dom
    up = u.evaluate_at(P)
    ap = eval_exponent(alpha, P, dom)
    nodes = _usable_nodes(dom, u.values.reshape(1, -1))
    d = parabolic_distance_matrix(np.asarray([P.x]), np.asarray([P.t]), dom.node_x[nodes], dom.node_t[nodes])[0]
    keep = d > 0
    if not keep.any():
        return 0.0
    return float((np.abs(u.flat[nodes][keep] - up) / d[keep] ** ap).max())


def pointed_seminorm_field(
    dom: GridDomain,
    comps: np.ndarray,
    alpha_flat: np.ndarray,
    rows: np.ndarray,
    cols: Optional[np.ndarray] = None,
) -> np.ndarray:
    """Pointed seminorms [F]_{α(P),P} for each flat node P in rows, sup over cols (default: all usable nodes)."""
    cols = _usable_nodes(dom, comps) if cols is None else cols
    out = np.zeros(rows.size)
    F = comps[:, cols].T
    xc, tc = dom.node_x[cols], dom.node_t[cols]
    step = max(1, 2_000_000 // max(cols.size, 1))
    for start in range(0, rows.size, step):
        r = rows[start:start + step]
        d = parabolic_distance_matrix(dom.node_x[r], dom.node_t[r], xc, tc)
        diff = max_abs_difference_matrix(comps[:, r].T, F)
        with np.errstate(divide="ignore", invalid="ignore"):
            q = diff / d ** alpha_flat[r][:, None]
        q[(d == 0) | ~np.isfinite(q)] = 0.0
        out[start:start + step] = q.max(axis=1) if q.size else 0.0
    return out


def norm_0_alpha(u: GridFunction, alpha: VariableExponent, workers: Optional[int] = None) -> HolderReport:
    """|u|_{0,α(·)} = |u|_0 + [u]_{α(·)}."""
    semi = seminorm_var(u, alpha, workers=workers)
    sup = u.sup()
    return HolderReport(
        name="|u|_{0,alpha}",
        value=sup + semi.value,
        witness=semi.witness,
        breakdown={"|u|_0": sup, "[u]_alpha": semi.value},
        term_witnesses={"[u]_alpha": semi.witness} if semi.witness else {},
    )


def _c2_terms(
    u: GridFunction,
    alpha: VariableExponent,
    bundle: DerivativeBundle,
    with_time: bool,
    workers: Optional[int],
) -> tuple[dict, dict]:
    dom = u.dom
    a = _alpha_flat(alpha, dom)
    breakdown: dict[str, float] = {}
    witnesses: dict[str, Witness] = {}

    base_nodes = _usable_nodes(dom, u.values.reshape(1, -1))
    breakdown["|u|_0"] = _sup(u.values.reshape(1, -1), base_nodes)
    grad = bundle.components(1)
    breakdown["|Du|_0"] = _sup(grad, _usable_nodes(dom, grad))

    terms = [("D2u", bundle.components(2))]
    if with_time:
        terms.append(("u_t", bundle.ut.reshape(1, -1)))
    for label, comps in terms:
        nodes, best = _field_seminorm(dom, comps, a, workers)
        breakdown[f"|{label}|_0"] = _sup(comps, nodes)
        report = _report(f"[{label}]_alpha", dom, nodes, best)
        breakdown[f"[{label}]_alpha"] = report.value
        if report.witness is not None:
            witnesses[f"[{label}]_alpha"] = report.witness
    return breakdown, witnesses


def norm_2_1_alpha(
    u: GridFunction,
    alpha: VariableExponent,
    bundle: Optional[DerivativeBundle] = None,
    workers: Optional[int] = None,
) -> HolderReport:
    """|u|_{2,1,α(·)} = |u|_0 + |Du|_0 + |D²u|_{0,α(·)} + |u_t|_{0,α(·)}."""
    bundle = bundle or finite_differences(u)
    breakdown, witnesses = _c2_terms(u, alpha, bundle, True, workers)
    witness = witnesses.get("[D2u]_alpha") or witnesses.get("[u_t]_alpha")
    return HolderReport(
        name="|u|_{2,1,alpha}", value=float(sum(breakdown.values())), witness=witness,
        breakdown=breakdown, term_witnesses=witnesses,
    )


def norm_2_alpha(
    phi: GridFunction,
    alpha: VariableExponent,
    bundle: Optional[DerivativeBundle] = None,
    workers: Optional[int] = None,
) -> HolderReport:
    """|φ|_{2,α(·)} = |φ|_0 + |Dφ|_0 + |D²φ|_{0,α(·)}."""
    bundle = bundle or finite_differences(phi)
    breakdown, witnesses = _c2_terms(phi, alpha, bundle, False, workers)
    return HolderReport(
        name="|u|_{2,alpha}", value=float(sum(breakdown.values())), witness=witnesses.get("[D2u]_alpha"),
        breakdown=breakdown, term_witnesses=witnesses,
    )


def _weighted_report(
    u: GridFunction,
    alpha: VariableExponent,
    k: int,
    s: Optional[float],
    dist: np.ndarray,
    label: str,
    bundle: Optional[DerivativeBundle],
    workers: Optional[int],
) -> HolderReport:
    if k not in (0, 1, 2):
        raise UnsupportedOrderError(f"Weighted seminorms are defined for k in {{0, 1, 2}}, got k={k}.")
    dom = u.dom
    shift = 0.0 if s is None else float(s)
    if k > 0 and bundle is None:
        bundle = finite_differences(u)
    comps_of = (lambda j: u.values.reshape(1, -1)) if bundle is None else bundle.components

    breakdown: dict[str, float] = {}
    for j in range(k + 1):
        comps = comps_of(j)
        nodes = _usable_nodes(dom, comps)
        with np.errstate(invalid="ignore"):
            weight = dist ** (j + shift)
        breakdown[f"{label}_{j}"] = _sup(comps, nodes, weight)

    comps = comps_of(k)
    nodes = _usable_nodes(dom, comps)
    best = _pair_scan(dom, comps, _alpha_flat(alpha, dom), "P", nodes, dist=dist, power_shift=k + shift, workers=workers)
    name = f"{label}_{{{k},alpha}}"
    report = _report(name, dom, nodes, best)
    breakdown[name] = report.value
    breakdown[f"|u|{label[3:]}_{{{k},alpha}}"] = float(sum(breakdown.values()))
    return HolderReport(name=name, value=report.value, witness=report.witness, breakdown=breakdown)


def weighted_interior_seminorm(
    u: GridFunction,
    alpha: VariableExponent,
    k: int,
    s: Optional[float] = None,
    bundle: Optional[DerivativeBundle] = None,
    workers: Optional[int] = None,
) -> HolderReport:
    """
    Interior weighted seminorm with d_P = min(t, dist(x, ∂Ω)).

    Without s: [u]*_{k,α(·)} = sup d_{P,Q}^{k+α(P)} |D^k u(P) - D^k u(Q)| / d(P,Q)^{α(P)}.
    With s:    [u]^{(s)}_{k,α(·)} uses the power k + α(P) + s.
    d_{P,Q} = min(d_P, d_Q). The breakdown also carries the plain weighted sups
    [u]*_j = sup d_P^{j(+s)} |D^j u| for j <= k and the full norm |u|*_{k,α(·)}.

    Raises:
        UnsupportedOrderError: If k is not 0, 1 or 2
    """
    d_P, _ = boundary_distance_field(u.dom)
    label = "[u]*" if s is None else f"[u]^({s:g})"
    return _weighted_report(u, alpha, k, s, d_P, label, bundle, workers)


def boundary_seminorm(
    u: GridFunction,
    alpha: VariableExponent,
    k: int,
    gamma: Union[None, str, Iterable[str]] = None,
    s: Optional[float] = None,
    bundle: Optional[DerivativeBundle] = None,
    workers: Optional[int] = None,
) -> HolderReport:
    """
    Weighted seminorm over Ω_T ∪ Γ, with weights d̄_P = d(P, 𝒢_T \\ Γ).

    When Γ covers all of 𝒢_T, the distance to the empty set is capped at diam(Ω_T).

    Raises:
        UnsupportedOrderError: If k is not 0, 1 or 2
        InvalidArgumentError: If Γ references a region outside 𝒢_T
    """
    _, d_bar = boundary_distance_field(u.dom, gamma)
    d_bar = np.minimum(d_bar, u.dom.diameter)
    label = "[u]*G" if s is None else f"[u]^({s:g})G"
    return _weighted_report(u, alpha, k, s, d_bar, label, bundle, workers)


def classical_seminorm(u: GridFunction, beta: float) -> float:
    """Classical parabolic Hölder seminorm sup |u(P) - u(Q)| / d(P, Q)^β for a constant exponent β."""
    if not 0 < beta <= 1:
        raise InvalidArgumentError(f"Classical Hölder exponent must lie in (0, 1], got {beta}.")
    mask = u.sample_mask
    x = u.dom.node_x[mask]
    t = u.dom.node_t[mask][:, None]
    vals = u.flat[mask][:, None]
    d = np.maximum(cdist(x, x, metric="chebyshev"), np.sqrt(cdist(t, t, metric="cityblock")))
    diff = cdist(vals, vals, metric="cityblock")
    off = d > 0
    return float((diff[off] / d[off] ** beta).max()) if off.any() else 0.0
