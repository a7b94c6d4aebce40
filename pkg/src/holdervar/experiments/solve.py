"""`solve` command: manufactured convergence and the discrete maximum principle."""

import logging
import math
from typing import Any, Dict, List, Optional

from ..core.validation import validate_problem
from ..errors import PreconditionError
from ..models import Command, ExperimentConfig, ExperimentResult, ParabolicProblem
from ..solver import (
    check_compatibility,
    fd_solve,
    maximum_principle_bound,
    problem_from_config,
    random_problem,
    solution_error,
)
from .common import alpha_from_config, level_domain, make_table, run_levels

logger = logging.getLogger(__name__)

SOLVE_COLUMNS = [
    "level", "nx", "nt", "h", "tau", "error", "order", "residual", "sup_u", "mp_bound", "mp_holds",
    "method", "factorizations", "iterations", "upwinded_nodes", "compatibility",
]
MP_COLUMNS = ["problem", "c", "sup_u", "bound", "holds"]

# Random c >= 0 problems checked against the maximum principle.
RANDOM_PROBLEMS = 5


def _bound_or_none(problem: ParabolicProblem) -> Optional[float]:
    try:
        return maximum_principle_bound(problem)
    except PreconditionError as exc:
        logger.warning(f"run_solve: {exc}")
        return None


def observed_orders(hs: List[float], errors: List[Optional[float]]) -> List[Optional[float]]:
    """log(e_{k-1}/e_k) / log(h_{k-1}/h_k) for consecutive levels; None where an error vanishes."""
    orders: List[Optional[float]] = [None]
    for (h0, e0), (h1, e1) in zip(zip(hs, errors), zip(hs[1:], errors[1:])):
        if not e0 or not e1:
            orders.append(None)
        else:
            orders.append(math.log(e0 / e1) / math.log(h0 / h1))
    return orders


def run_solve(config: ExperimentConfig) -> ExperimentResult:
    """
    Solve the configured problem at every level (τ ~ h²) and report the sup error,
    observed order, step residual, maximum-principle bound and compatibility mismatch;
    then check the maximum principle on seeded random problems with c >= 0.
    """
    alpha = alpha_from_config(config)

    def level_work(level: int) -> Dict[str, Any]:
        dom = level_domain(config, level)
        problem = problem_from_config(config, dom)
        validate_problem(problem, alpha, existence=True)
        result = fd_solve(problem)
        bound = _bound_or_none(problem)
        sup_u = result.u.sup()
        return {
            "level": level, "nx": dom.nx, "nt": dom.nt, "h": dom.h, "tau": dom.tau,
            "error": solution_error(result, problem.exact) if problem.exact is not None else None,
            "residual": result.residual, "sup_u": sup_u,
            "mp_bound": bound, "mp_holds": None if bound is None else sup_u <= bound * (1 + 1e-10),
            "method": result.method, "factorizations": result.factorizations, "iterations": result.iterations,
            "upwinded_nodes": result.upwinded_nodes, "compatibility": check_compatibility(problem),
        }

    rows = run_levels(config.levels, level_work)
    for row, order in zip(rows, observed_orders([r["h"] for r in rows], [r["error"] for r in rows])):
        row["order"] = order

    dom = level_domain(config, config.levels[0])
    mp_rows = []
    for offset in range(RANDOM_PROBLEMS):
        problem = random_problem(dom, config.seed + offset)
        sup_u = fd_solve(problem).u.sup()
        bound = _bound_or_none(problem)
        mp_rows.append({
            "problem": problem.name, "c": float(problem.c.values.max()), "sup_u": sup_u, "bound": bound,
            "holds": None if bound is None else sup_u <= bound * (1 + 1e-10),
        })

    errors = [row["error"] for row in rows]
    curves = {}
    if all(e is not None and e > 0 for e in errors):
        curves["solve_convergence"] = {"x": [row["h"] for row in rows], "sup_error": errors}
    return ExperimentResult(
        command=Command.SOLVE,
        config=config,
        tables=[
            make_table("solve", SOLVE_COLUMNS, rows, "Theorem 6.1"),
            make_table("maximum_principle", MP_COLUMNS, mp_rows, "Theorem 6.1, c >= 0"),
        ],
        summary={
            "problem": f"{config.operator}/{config.solution}",
            "orders": [row["order"] for row in rows[1:]],
            "max_residual": max(row["residual"] for row in rows),
            "maximum_principle_holds": all(row["holds"] is not False for row in mp_rows),
        },
        curves=curves,
    )
