"""Coefficient closures, manufactured solutions and the built-in problems."""

import logging
import math
from typing import Callable, List, Optional, Sequence

import numpy as np
from pydantic import BaseModel

from ..corpus import example_field
from ..errors import InvalidArgumentError
from ..geometry import FieldFunction, GridDomain, GridFunction, Shape
from ..models import ParabolicProblem
from ..norms import finite_differences

logger = logging.getLogger(__name__)

OPERATORS = ("heat", "constant", "example", "polynomial")
SOLUTIONS = ("sine", "polynomial", "zero", "example")


class Coefficients(BaseModel):
    """Analytic closures for a^{ij}, b^i and c."""
    model_config = {"frozen": True, "arbitrary_types_allowed": True}

    a: List[List[FieldFunction]]
    b: List[FieldFunction]
    c: FieldFunction
    name: str
    time_independent: bool = False


def _const(value: float) -> FieldFunction:
    return lambda x, t: np.full(np.shape(np.atleast_1d(t)), float(value))


def heat_coefficients(n: int) -> Coefficients:
    """L = Δ."""
    a = [[_const(1.0 if i == j else 0.0) for j in range(n)] for i in range(n)]
    return Coefficients(a=a, b=[_const(0.0)] * n, c=_const(0.0), name="heat", time_independent=True)


def constant_coefficients(
    n: int,
    a: Optional[Sequence[float]] = None,
    b: Optional[Sequence[float]] = None,
    c: Optional[Sequence[float]] = None,
) -> Coefficients:
    """
    Constant coefficients from config lists.

    a lists either n diagonal entries or all n*n entries row by row; b lists n
    entries; c is a single value. Missing lists default to the heat operator.

    Raises:
        InvalidArgumentError: If a list has the wrong length
    """
    a = [1.0] * n if a is None else list(a)
    if len(a) == n:
        matrix = np.diag(a)
    elif len(a) == n * n:
        matrix = np.asarray(a, dtype=float).reshape(n, n)
        matrix = 0.5 * (matrix + matrix.T)
    else:
        raise InvalidArgumentError(f"'a' must list {n} diagonal or {n * n} entries, got {len(a)}.")
    b = [0.0] * n if b is None else list(b)
    if len(b) != n:
        raise InvalidArgumentError(f"'b' must list {n} entries, got {len(b)}.")
    c_value = 0.0 if not c else float(c[0])
    return Coefficients(
        a=[[_const(matrix[i, j]) for j in range(n)] for i in range(n)],
        b=[_const(v) for v in b],
        c=_const(c_value),
        name="constant",
        time_independent=True,
    )


def example_coefficients(n: int) -> Coefficients:
    """
    Smooth variable coefficients within λ = 0.5 for n <= 3:
    a^{ii} = 1.5 + 0.5 sin(x_i + t), a^{ij} = 0.2 sin(x_i + x_j) (i != j),
    b^i = 0.5 cos(π x_i), c = 1 + 0.5 sin(t).
    """
    def diagonal(i: int) -> FieldFunction:
        return lambda x, t: 1.5 + 0.5 * np.sin(np.atleast_2d(x)[:, i] + t)

    def mixed(i: int, j: int) -> FieldFunction:
        return lambda x, t: 0.2 * np.sin(np.atleast_2d(x)[:, i] + np.atleast_2d(x)[:, j]) + 0.0 * t

    def drift(i: int) -> FieldFunction:
        return lambda x, t: 0.5 * np.cos(math.pi * np.atleast_2d(x)[:, i]) + 0.0 * t

    a = [[diagonal(i) if i == j else mixed(min(i, j), max(i, j)) for j in range(n)] for i in range(n)]
    return Coefficients(
        a=a,
        b=[drift(i) for i in range(n)],
        c=lambda x, t: 1.0 + 0.5 * np.sin(np.atleast_1d(t)),
        name="example",
    )


def polynomial_coefficients(
    n: int,
    a: Optional[Sequence[float]] = None,
    b: Optional[Sequence[float]] = None,
    c: Optional[Sequence[float]] = None,
) -> Coefficients:
    """
    Polynomial coefficients from listed coefficients.

    a = [p0, p1, p2] gives a^{ii} = p0 + p1 |x|_2² + p2 t (off-diagonals 0);
    b = [q0, q1] gives b^i = q0 + q1 x_i; c = [r0, r1] gives c = r0 + r1 t.
    """
    pa = list(a) if a else [1.0, 0.5, 0.25]
    pb = list(b) if b else [0.0, 0.5]
    pc = list(c) if c else [0.5, 0.0]
    pa += [0.0] * (3 - len(pa))
    pb += [0.0] * (2 - len(pb))
    pc += [0.0] * (2 - len(pc))

    def diagonal(x, t):
        return pa[0] + pa[1] * (np.atleast_2d(x) ** 2).sum(axis=1) + pa[2] * t

    def drift(i: int) -> FieldFunction:
        return lambda x, t: pb[0] + pb[1] * np.atleast_2d(x)[:, i] + 0.0 * t

    a_fields = [[diagonal if i == j else _const(0.0) for j in range(n)] for i in range(n)]
    return Coefficients(
        a=a_fields,
        b=[drift(i) for i in range(n)],
        c=lambda x, t: pc[0] + pc[1] * np.atleast_1d(t),
        name="polynomial",
        time_independent=pa[2] == 0.0 and pc[1] == 0.0,
    )


def coefficients_for(operator: str, n: int, a=None, b=None, c=None) -> Coefficients:
    """
    Look up coefficient closures by operator name.

    Raises:
        InvalidArgumentError: If the operator name is unknown
    """
    if operator == "heat":
        return heat_coefficients(n)
    if operator == "constant":
        return constant_coefficients(n, a, b, c)
    if operator == "example":
        return example_coefficients(n)
    if operator == "polynomial":
        return polynomial_coefficients(n, a, b, c)
    raise InvalidArgumentError(f"Unknown operator '{operator}'. Valid operators: {', '.join(OPERATORS)}.")


class ManufacturedSolution(BaseModel):
    """An analytic u* with its gradient, Hessian and time derivative."""
    model_config = {"frozen": True, "arbitrary_types_allowed": True}

    name: str
    value: FieldFunction
    grad: Callable[[np.ndarray, np.ndarray], np.ndarray]  # (N, n)
    hess: Callable[[np.ndarray, np.ndarray], np.ndarray]  # (N, n, n)
    dt: FieldFunction


def sine_product(dom: GridDomain) -> ManufacturedSolution:
    """u*(x, t) = e^{-t} Π sin(π (x_i - lo_i) / L_i) over the grid's bounding box."""
    lo = np.asarray(dom.bounds[0])
    k = math.pi / (np.asarray(dom.bounds[1]) - lo)

    def parts(x):
        z = k[None, :] * (np.atleast_2d(x) - lo[None, :])
        return np.sin(z), np.cos(z)

    def value(x, t):
        s, _ = parts(x)
        return np.exp(-t) * s.prod(axis=1)

    def grad(x, t):
        s, co = parts(x)
        n = s.shape[1]
        out = np.empty_like(s)
        for i in range(n):
            others = np.delete(s, i, axis=1).prod(axis=1)
            out[:, i] = k[i] * co[:, i] * others
        return np.exp(-t)[:, None] * out

    def hess(x, t):
        s, co = parts(x)
        N, n = s.shape
        out = np.empty((N, n, n))
        for i in range(n):
            for j in range(n):
                if i == j:
                    out[:, i, i] = -k[i] ** 2 * s.prod(axis=1)
                else:
                    rest = np.delete(s, [i, j], axis=1).prod(axis=1)
                    out[:, i, j] = k[i] * k[j] * co[:, i] * co[:, j] * rest
        return np.exp(-t)[:, None, None] * out

    return ManufacturedSolution(name="sine", value=value, grad=grad, hess=hess, dt=lambda x, t: -value(x, t))


def polynomial_solution(dom: GridDomain) -> ManufacturedSolution:
    """u*(x, t) = (1 + t)(1 + |x|_2²)."""
    def value(x, t):
        return (1.0 + t) * (1.0 + (np.atleast_2d(x) ** 2).sum(axis=1))

    def grad(x, t):
        return 2.0 * (1.0 + t)[:, None] * np.atleast_2d(x)

    def hess(x, t):
        x = np.atleast_2d(x)
        return 2.0 * (1.0 + t)[:, None, None] * np.broadcast_to(np.eye(x.shape[1]), (x.shape[0],) + (x.shape[1],) * 2)

    return ManufacturedSolution(
        name="polynomial", value=value, grad=grad, hess=hess,
        dt=lambda x, t: 1.0 + (np.atleast_2d(x) ** 2).sum(axis=1),
    )


def zero_solution(dom: GridDomain) -> ManufacturedSolution:
    n = dom.n
    return ManufacturedSolution(
        name="zero",
        value=lambda x, t: np.zeros(np.shape(t)),
        grad=lambda x, t: np.zeros((len(t), n)),
        hess=lambda x, t: np.zeros((len(t), n, n)),
        dt=lambda x, t: np.zeros(np.shape(t)),
    )


def solution_for(name: str, dom: GridDomain) -> ManufacturedSolution:
    if name == "sine":
        return sine_product(dom)
    if name == "polynomial":
        return polynomial_solution(dom)
    if name == "zero":
        return zero_solution(dom)
    raise InvalidArgumentError(
        f"Unknown manufactured solution '{name}'. Valid solutions: sine, polynomial, zero."
    )


def _field(dom: GridDomain, func: FieldFunction, name: str) -> GridFunction:
    return GridFunction.from_function(dom, func, name=name)


def _coefficient_fields(dom: GridDomain, coeffs: Coefficients) -> tuple[list, list, GridFunction]:
    n = dom.n
    a = [[_field(dom, coeffs.a[i][j], f"a{i + 1}{j + 1}") for j in range(n)] for i in range(n)]
    b = [_field(dom, coeffs.b[i], f"b{i + 1}") for i in range(n)]
    return a, b, _field(dom, coeffs.c, "c")


def manufactured_problem(
    dom: GridDomain,
    coeffs: Coefficients,
    solution: ManufacturedSolution,
    lam: float = 0.5,
    Lam: float = 10.0,
) -> ParabolicProblem:
    """
    Build the problem whose exact solution is u*: f = u*_t - (a^{ij}u*_ij + b^i u*_i + c u*), φ = u*.
    """
    n = dom.n
    u_star = solution

    def f(x, t):
        x = np.atleast_2d(x)
        t = np.atleast_1d(t)
        H = u_star.hess(x, t)
        G = u_star.grad(x, t)
        Lu = coeffs.c(x, t) * u_star.value(x, t)
        for i in range(n):
            Lu = Lu + coeffs.b[i](x, t) * G[:, i]
            for j in range(n):
                Lu = Lu + coeffs.a[i][j](x, t) * H[:, i, j]
        return u_star.dt(x, t) - Lu

    a, b, c = _coefficient_fields(dom, coeffs)
    return ParabolicProblem(
        dom=dom, a=a, b=b, c=c,
        f=_field(dom, f, "f"),
        phi=_field(dom, u_star.value, "phi"),
        lam=lam, Lam=Lam,
        time_independent=coeffs.time_independent,
        exact=u_star.value,
        name=f"{coeffs.name}/{u_star.name}",
    )


def source_problem(
    dom: GridDomain,
    coeffs: Coefficients,
    f: FieldFunction,
    phi: Optional[FieldFunction] = None,
    lam: float = 0.5,
    Lam: float = 10.0,
    name: str = "source",
) -> ParabolicProblem:
    """A problem with given right-hand side and boundary data (φ = 0 by default); no exact solution."""
    a, b, c = _coefficient_fields(dom, coeffs)
    phi = phi or _const(0.0)
    return ParabolicProblem(
        dom=dom, a=a, b=b, c=c, f=_field(dom, f, "f"), phi=_field(dom, phi, "phi"),
        lam=lam, Lam=Lam, time_independent=coeffs.time_independent, name=name,
    )


def example_problem(gamma: float, zeta: float, nx: int, nt: int, n: int = 1) -> ParabolicProblem:
    """
    The optimality example: Ω = B(0, ζ), T = ζ, L = Δ, φ = 0 and
    f = (|x| + sqrt(t))^{(γ + |x|)(γ + t)}.
    """
    dom = GridDomain.ball((0.0,) * n, zeta, T=zeta, nx=nx, nt=nt)
    return source_problem(
        dom, heat_coefficients(n), example_field(gamma, zeta), lam=1.0, Lam=10.0,
        name=f"example(γ={gamma:g},ζ={zeta:g})",
    )


def random_problem(dom: GridDomain, seed: int) -> ParabolicProblem:
    """
    A seeded constant-coefficient problem with c >= 0 and random smooth f and φ.

    The drift is kept small enough that central differences stay monotone.
    """
    rng = np.random.default_rng(seed)
    n = dom.n
    diag = rng.uniform(0.8, 1.5, size=n)
    matrix = np.diag(diag)
    for i in range(n):
        for j in range(i + 1, n):
            matrix[i, j] = matrix[j, i] = rng.uniform(-0.2, 0.2) * min(diag[i], diag[j])
    drift = rng.uniform(-0.5, 0.5, size=n)
    c_value = rng.uniform(0.0, 1.0)
    coeffs = constant_coefficients(n, matrix.reshape(-1).tolist(), drift.tolist(), [c_value])

    freqs = rng.integers(1, 4, size=n).astype(float)
    amp_f, amp_phi = rng.uniform(-2.0, 2.0, size=2)

    def f(x, t):
        return amp_f * np.cos(np.atleast_2d(x) @ freqs + np.atleast_1d(t))

    def phi(x, t):
        return amp_phi * np.sin(np.atleast_2d(x).sum(axis=1) + 1.0 + 0.0 * t)

    return source_problem(dom, coeffs, f, phi, lam=0.5 * float(np.linalg.eigvalsh(matrix).min()), name=f"random{seed}")


def problem_from_config(config, dom: GridDomain) -> ParabolicProblem:
    """Problem for the solve/schauder commands: operator closures plus a named solution."""
    coeffs = coefficients_for(config.operator, dom.n, config.a, config.b, config.c)
    if config.solution == "example":
        return source_problem(
            dom, coeffs, example_field(config.gamma, config.zeta), lam=config.lam, Lam=config.Lam, name="example",
        )
    return manufactured_problem(dom, coeffs, solution_for(config.solution, dom), lam=config.lam, Lam=config.Lam)


def check_compatibility(problem: ParabolicProblem, tol: Optional[float] = None) -> float:
    """
    Compatibility of the data on the corner set ∂Ω x {t0}: φ_t - Lφ = f there.

    Evaluated with the one-sided stencils of finite_differences. A violation beyond
    tol (default: 10 (h² + τ) times the data scale) is logged as a warning only.

    Returns:
        The largest corner mismatch
    """
    dom = problem.dom
    if dom.nx < 3 or dom.nt < 2:
        return 0.0
    bundle = finite_differences(problem.phi)
    a, b = problem.a_values(), problem.b_values()
    L_phi = problem.c.values * problem.phi.values
    for i in range(dom.n):
        L_phi = L_phi + b[i] * bundle.grad[i]
        for j in range(dom.n):
            L_phi = L_phi + a[i, j] * bundle.hess[i, j]
    mismatch = bundle.ut - L_phi - problem.f.values

    corner = np.zeros(dom.grid_shape, dtype=bool)
    corner[0] = dom.spatial_boundary.reshape(dom.space_shape)
    if dom.shape == Shape.BALL:
        # stair-step nodes next to the sphere have no reliable stencils
        corner &= np.isfinite(mismatch)
    values = np.abs(mismatch[corner])
    values = values[np.isfinite(values)]
    worst = float(values.max()) if values.size else 0.0

    if tol is None:
        scale = max(1.0, problem.f.sup(), problem.phi.sup())
        tol = 10.0 * (dom.h ** 2 + dom.tau) * scale
    if worst > tol:
        logger.warning(
            f"check_compatibility: {problem.name} violates φ_t - Lφ = f on ∂Ω x {{t0}} by {worst:.3g} "
            f"(tolerance {tol:.3g}); boundary layers may degrade the estimates"
        )
    return worst
