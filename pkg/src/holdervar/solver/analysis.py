"""Property checks and measured constants around the finite-difference solver."""

import logging
from typing import Iterable, Optional, Union

import numpy as np

from .._internal.utils import parabolic_distance_matrix
from ..core.validation import validate_problem
from ..errors import InconsistencyError, InvalidArgumentError, OutOfDomainError, PreconditionError
from ..exponents import VariableExponent, eval_exponent
from ..geometry import GridFunction, SpaceTimePoint, boundary_distances, boundary_portions, portion_mask
from ..models import EquationForm, ParabolicProblem, SchauderReport, SchauderVariant, SolveResult
from ..norms import (
    DerivativeBundle,
    boundary_seminorm,
    finite_differences,
    norm_0_alpha,
    norm_2_1_alpha,
    norm_2_alpha,
    weighted_interior_seminorm,
)

logger = logging.getLogger(__name__)

# Numerators below this multiple of the data scale count as zero for vacuous quotients.
ZERO_TOL = 1e-12


def green_identity_check(u: GridFunction, v: GridFunction) -> float:
    """
    sup over interior nodes of |(v L0 u - u L0* v) - (Σ D_i(v u_i - u v_i) - (uv)_t)|,
    with L0 u = Δu - u_t and L0* v = Δv + v_t, all by finite differences.

    Raises:
        InvalidArgumentError: If u and v live on different grids
    """
    dom = u.dom
    if not dom.same_grid(v.dom):
        raise InvalidArgumentError("green_identity_check needs u and v on the same grid.")
    du, dv = finite_differences(u), finite_differences(v)
    lhs = v.values * (du.laplacian() - du.ut) - u.values * (dv.laplacian() + dv.ut)

    flux_div = np.zeros(dom.grid_shape)
    for i in range(dom.n):
        W = v.values * du.grad[i] - u.values * dv.grad[i]
        flux_div = flux_div + np.gradient(W, dom.spacing[i], axis=1 + i, edge_order=2)
    uv_t = np.gradient(u.values * v.values, dom.times, axis=0, edge_order=2)
    rhs = flux_div - uv_t

    diff = np.abs(lhs - rhs)[dom.interior_mask]
    diff = diff[np.isfinite(diff)]
    return float(diff.max()) if diff.size else 0.0


def _variant(name: str, numerator: float, denominator: float, terms: dict, scale: float) -> SchauderVariant:
    if denominator > 0.0:
        return SchauderVariant(
            name=name, numerator=numerator, denominator=denominator, value=numerator / denominator, terms=terms,
        )
    if numerator > ZERO_TOL * max(1.0, scale):
        raise InconsistencyError(
            f"schauder_constant: the {name} quotient has denominator 0 but numerator {numerator:.6g}."
        )
    return SchauderVariant(name=name, numerator=numerator, denominator=0.0, vacuous=True, terms=terms)


def vanishing_portions(phi: GridFunction, tol: float = 1e-12) -> list[str]:
    """Pieces of 𝒢_T on which the boundary data vanish (candidates for Γ)."""
    dom = phi.dom
    scale = max(1.0, phi.sup())
    portions = []
    for portion in sorted(boundary_portions(dom)):
        mask = portion_mask(dom, portion) & np.isfinite(phi.values)
        if mask.any() and np.abs(phi.values[mask]).max() <= tol * scale:
            portions.append(portion)
    return portions


def schauder_constant(
    problem: ParabolicProblem,
    solution: Union[SolveResult, GridFunction],
    alpha: VariableExponent,
    gamma: Optional[Iterable[str]] = None,
    workers: Optional[int] = None,
) -> SchauderReport:
    """
    Measured constants of the three Schauder estimates for a solved problem.

    global:   |u|_{2,1,α} / (|u|_0 + |f|_{0,α} + |φ|_{2,α})
    interior: |u|*_{2,α} / (|u|_0 + |f|^{(2)}_{0,α})
    boundary: |u|*_{2,α,Ω∪Γ} / (|u|_0 + |f|^{(2)}_{0,α,Ω∪Γ})

    Γ defaults to the pieces of 𝒢_T where φ vanishes. A zero denominator gives
    a vacuous variant; C_emp is the global value.

    Raises:
        InconsistencyError: If a denominator is 0 while its numerator is not
        PreconditionError: If ellipticity fails or a coefficient exceeds Λ in |·|_{0,α}
    """
    validate_problem(problem, alpha)
    u = solution.u if isinstance(solution, SolveResult) else solution
    bundle = finite_differences(u)
    u0 = u.sup()
    scale = max(u0, problem.f.sup(), problem.phi.sup())

    global_num = norm_2_1_alpha(u, alpha, bundle, workers=workers)
    f_norm = norm_0_alpha(problem.f, alpha, workers=workers)
    phi_norm = norm_2_alpha(problem.phi, alpha, workers=workers)
    variants = {
        "global": _variant(
            "global", global_num.value, u0 + f_norm.value + phi_norm.value,
            {"|u|_0": u0, "|f|_{0,alpha}": f_norm.value, "|phi|_{2,alpha}": phi_norm.value, **global_num.breakdown},
            scale,
        )
    }

    interior = weighted_interior_seminorm(u, alpha, 2, bundle=bundle, workers=workers)
    f_weighted = weighted_interior_seminorm(problem.f, alpha, 0, s=2, workers=workers)
    interior_num = interior.breakdown["|u|*_{2,alpha}"]
    f_int = f_weighted.breakdown["|u|^(2)_{0,alpha}"]
    variants["interior"] = _variant(
        "interior", interior_num, u0 + f_int, {"|u|_0": u0, "|f|^(2)_{0,alpha}": f_int, **interior.breakdown}, scale,
    )

    if gamma is None:
        gamma = vanishing_portions(problem.phi)
    gamma = list(gamma)
    boundary = boundary_seminorm(u, alpha, 2, gamma, bundle=bundle, workers=workers)
    f_boundary = boundary_seminorm(problem.f, alpha, 0, gamma, s=2, workers=workers)
    boundary_num = boundary.breakdown["|u|*G_{2,alpha}"]
    f_bnd = f_boundary.breakdown["|u|^(2)G_{0,alpha}"]
    variants["boundary"] = _variant(
        "boundary", boundary_num, u0 + f_bnd,
        {"|u|_0": u0, "|f|^(2)G_{0,alpha}": f_bnd, "gamma": float(len(gamma)), **boundary.breakdown}, scale,
    )

    main = variants["global"]
    if main.vacuous:
        logger.warning(f"schauder_constant: {problem.name} has a zero global denominator; report is vacuous")
    logger.info(
        "schauder_constant: " + ", ".join(
            f"{name}={v.value:.4g}" if v.value is not None else f"{name}=vacuous" for name, v in variants.items()
        )
    )
    return SchauderReport(C_emp=main.value, vacuous=main.vacuous, variants=variants)


def frozen_coefficient_view(
    problem: ParabolicProblem,
    P: SpaceTimePoint,
    u: GridFunction,
    bundle: Optional[DerivativeBundle] = None,
) -> ParabolicProblem:
    """
    Constant-coefficient problem a^{ij}(P) D_ij u - u_t = F with
    F = (a^{ij}(P) - a^{ij}) D_ij u - b^i D_i u - c u + f, assembled from u's derivatives.

    Raises:
        OutOfDomainError: If P lies outside the closed cylinder
    """
    dom = problem.dom
    if not dom.contains(P):
        raise OutOfDomainError(f"frozen_coefficient_view: {P} lies outside the closed cylinder.")
    bundle = bundle or finite_differences(u)
    n = dom.n
    a_P = [[problem.a[i][j].evaluate_at(P) for j in range(n)] for i in range(n)]

    F = problem.f.values - problem.c.values * u.values
    for i in range(n):
        F = F - problem.b[i].values * bundle.grad[i]
        for j in range(n):
            F = F + (a_P[i][j] - problem.a[i][j].values) * bundle.hess[i, j]
    # 0 where the derivative stencils of u leave the domain
    F = np.where(np.isfinite(F), F, 0.0)

    zero = GridFunction.zeros(dom, name="0")
    frozen_a = [
        [GridFunction.from_function(dom, lambda x, t, v=a_P[i][j]: np.full(np.shape(t), v), name=f"a{i + 1}{j + 1}(P)")
         for j in range(n)]
        for i in range(n)
    ]
    return ParabolicProblem(
        dom=dom, a=frozen_a, b=[zero] * n, c=zero,
        f=GridFunction(dom=dom, values=F, name="F"),
        phi=problem.phi, lam=problem.lam, Lam=problem.Lam,
        form=EquationForm.FROZEN, time_independent=True,
        name=f"{problem.name}@frozen",
    )


def interior_semicube_constant(
    u: GridFunction,
    f: GridFunction,
    alpha: VariableExponent,
    P: SpaceTimePoint,
    d: float,
    bundle: Optional[DerivativeBundle] = None,
) -> float:
    """
    |D²u(P)| / (|f|_{0,N} + d^{α(P)} [f]_{α(P),P,N} + |u|_{0,N} d^{-2}) on the semicube N = N(P, d).

    Raises:
        InvalidArgumentError: If P is not a grid node or d <= 0
        PreconditionError: If N(P, d) is not strictly inside Ω_T
    """
    dom = u.dom
    if d <= 0:
        raise InvalidArgumentError(f"Semicube size must be positive, got d={d}.")
    index = dom.locate(P)
    if index is None:
        raise InvalidArgumentError(f"interior_semicube_constant needs P on a grid node, got {P}.")
    if d >= boundary_distances(dom, P).d_P or d * d >= P.t - dom.t0:
        raise PreconditionError(f"N(P, {d:g}) reaches the parabolic boundary; pick d < d_P.")
    bundle = bundle or finite_differences(u)

    x, t = dom.node_x, dom.node_t
    dist = parabolic_distance_matrix(np.asarray([P.x]), np.asarray([P.t]), x, t)[0]
    inside = (dist <= d) & (t <= P.t) & dom.in_domain_mask.reshape(-1) & np.isfinite(f.flat)
    a_P = eval_exponent(alpha, P, dom)

    f_sup = float(np.abs(f.flat[inside]).max())
    u_sup = float(np.abs(u.flat[inside]).max())
    others = inside & (dist > 0)
    pointed = float((np.abs(f.flat[others] - f.flat[index]) / dist[others] ** a_P).max()) if others.any() else 0.0
    hessian = float(np.abs(bundle.hess.reshape(dom.n, dom.n, -1)[:, :, index]).max())

    denominator = f_sup + d ** a_P * pointed + u_sup / d ** 2
    if denominator == 0.0:
        if hessian > 0.0:
            raise InconsistencyError("interior_semicube_constant: zero data with nonzero D²u(P).")
        return 0.0
    return hessian / denominator


def maximum_principle_bound(problem: ParabolicProblem) -> float:
    """
    Discrete bound sup|u| <= (1 - τ c⁺)^{-nt} (sup_𝒢|φ| + (T - t0) sup|f|) for backward Euler.

    Raises:
        PreconditionError: If τ c⁺ >= 1 (the bound does not apply)
    """
    dom = problem.dom
    inside = dom.in_domain_mask
    c_plus = max(0.0, float(problem.c.values[inside].max()))
    if dom.tau * c_plus >= 1.0:
        raise PreconditionError(
            f"maximum_principle_bound needs τ c⁺ < 1, got τ={dom.tau:g}, c⁺={c_plus:g}. Refine in time."
        )
    phi_sup = float(np.abs(problem.phi.values[dom.parabolic_boundary_mask]).max())
    f_sup = float(np.abs(problem.f.values[dom.interior_mask]).max()) if dom.interior_mask.any() else 0.0
    growth = (1.0 - dom.tau * c_plus) ** (-dom.nt)
    return growth * (phi_sup + (dom.T - dom.t0) * f_sup)


def solution_error(result: SolveResult, exact) -> float:
    """sup over in-domain nodes of |u - u*|."""
    u = result.u
    dom = u.dom
    reference = np.asarray(exact(dom.node_x, dom.node_t)).reshape(dom.grid_shape)
    diff = np.abs(u.values - reference)[dom.in_domain_mask]
    return float(diff[np.isfinite(diff)].max())
