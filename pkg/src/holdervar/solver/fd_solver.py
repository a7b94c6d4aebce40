"""Backward-Euler finite-difference solver for u_t - Lu = f with parabolic boundary data."""

import logging
from typing import Optional

import numpy as np
from scipy import sparse
from scipy.sparse.linalg import LinearOperator, gmres, spilu, splu

from ..core.validation import check_ellipticity
from ..errors import SolverFailureError
from ..geometry import GridFunction
from ..models import EquationForm, ParabolicProblem, SolveResult
from .solver_utils import assemble_operator, boundary_identity

logger = logging.getLogger(__name__)

LINEAR_RTOL = 1e-10
DIRECT_MAX_DIM = 2


class _StepSolver:
    """Solves (I/τ - L) u = rhs on interior rows with identity rows elsewhere."""

    def __init__(self, matrix: sparse.csc_matrix, direct: bool, step: int):
        self.matrix = matrix
        self.direct = direct
        try:
            if direct:
                self._lu = splu(matrix)
            else:
                ilu = spilu(matrix, drop_tol=1e-6, fill_factor=20)
                self._precond = LinearOperator(matrix.shape, ilu.solve)
        except RuntimeError as exc:
            logger.error(f"fd_solve: factorization failed at step {step}", exc_info=True)
            raise SolverFailureError(f"Step matrix is singular at time step {step}: {exc}", step=step) from exc

    def solve(self, rhs: np.ndarray, guess: np.ndarray, step: int) -> tuple[np.ndarray, int]:
        """Solution of one step and the number of GMRES iterations it took (0 for LU)."""
        count = [0]
        if self.direct:
            u = self._lu.solve(rhs)
        else:
            def callback(_):
                count[0] += 1

            u, info = gmres(
                self.matrix, rhs, x0=guess, rtol=LINEAR_RTOL, atol=0.0, restart=50, maxiter=200,
                M=self._precond, callback=callback, callback_type="pr_norm",
            )
            if info != 0:
                raise SolverFailureError(
                    f"GMRES did not reach relative residual {LINEAR_RTOL:g} at time step {step} (info={info}).",
                    step=step,
                )
        if not np.all(np.isfinite(u)):
            raise SolverFailureError(f"Non-finite solution at time step {step}.", step=step)
        return u, count[0]


def _level_operator(problem: ParabolicProblem, a: np.ndarray, b: np.ndarray, c: np.ndarray, k: int):
    dom = problem.dom
    size = int(np.prod(dom.space_shape))
    if problem.form == EquationForm.FROZEN:
        # frozen view: constant a(P), no lower-order terms
        b_k = np.zeros((dom.n, size))
        c_k = np.zeros(size)
    else:
        b_k = b[:, k].reshape(dom.n, size)
        c_k = c[k].reshape(size)
    a_k = a[:, :, k].reshape(dom.n, dom.n, size)
    return assemble_operator(a_k, b_k, c_k, dom.spacing, dom.spatial_interior, dom.nx)


def fd_solve(problem: ParabolicProblem, check: bool = True) -> SolveResult:
    """
    Solve the problem by backward Euler in time and second-order differences in space.

    Each step solves (u^k - u^{k-1})/τ - L_k u^k = f^k at interior nodes, with identity
    rows carrying φ on the lateral boundary. The frozen form a(P)D²u - u_t = F is
    solved as u_t - a(P)D²u = -F. Grids with n <= 2 use a sparse LU factorization;
    n = 3 uses ILU-preconditioned GMRES to relative residual 1e-10. With
    time-independent coefficients one factorization serves every step.

    Args:
        problem: Problem to solve
        check: Verify ellipticity before solving

    Returns:
        SolveResult with u (NaN at stair-step exterior nodes) and solver statistics

    Raises:
        PreconditionError: If the ellipticity bound fails
        SolverFailureError: If a step matrix is singular or the iteration breaks down
    """
    dom = problem.dom
    if check:
        check_ellipticity(problem)

    size = int(np.prod(dom.space_shape))
    interior = dom.spatial_interior
    inside = dom.spatial_in_domain
    direct = dom.n <= DIRECT_MAX_DIM
    a, b, c = problem.a_values(), problem.b_values(), problem.c.values
    sign = -1.0 if problem.form == EquationForm.FROZEN else 1.0
    f = sign * problem.f.values.reshape(dom.nt + 1, size)
    phi = problem.phi.values.reshape(dom.nt + 1, size)
    tau = dom.tau

    u = np.full((dom.nt + 1, size), np.nan)
    u[0, inside] = phi[0, inside]
    u[0, ~inside] = 0.0
    keep = boundary_identity(~interior)
    interior_rows = boundary_identity(interior)

    stepper: Optional[_StepSolver] = None
    operators = []
    factorizations = 0
    iterations = 0
    upwinded = 0
    for k in range(1, dom.nt + 1):
        if stepper is None or not problem.time_independent:
            op = _level_operator(problem, a, b, c, k)
            upwinded = max(upwinded, op.upwinded)
            matrix = (interior_rows @ (sparse.identity(size, format="csr") / tau - op.matrix) + keep).tocsc()
            stepper = _StepSolver(matrix, direct, k)
            factorizations += 1
            operators.append(op.matrix)
        rhs = np.where(interior, u[k - 1] / tau + f[k], np.where(inside, phi[k], 0.0))
        u[k], used = stepper.solve(rhs, u[k - 1], k)
        iterations += used
        u[k, inside & ~interior] = phi[k, inside & ~interior]
        if k % max(1, dom.nt // 4) == 0:
            logger.info(f"fd_solve: step {k}/{dom.nt}")

    residual = 0.0
    for k in range(1, dom.nt + 1):
        L = operators[0] if problem.time_independent else operators[k - 1]
        r = (u[k] - u[k - 1]) / tau - L @ u[k] - f[k]
        residual = max(residual, float(np.abs(r[interior]).max()) if interior.any() else 0.0)

    u[:, ~inside] = np.nan
    field = GridFunction(dom=dom, values=u.reshape(dom.grid_shape), name=f"u[{problem.name}]")
    logger.info(
        f"fd_solve: {problem.name} done, {dom.nt} steps, {factorizations} factorization(s), "
        f"residual {residual:.3g}"
    )
    return SolveResult(
        u=field,
        residual=residual,
        steps=dom.nt,
        factorizations=factorizations,
        iterations=iterations,
        method="splu" if direct else "gmres+ilu",
        upwinded_nodes=upwinded,
    )
