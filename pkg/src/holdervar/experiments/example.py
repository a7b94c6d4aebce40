"""`example` command: the optimality example for variable exponents.

On Ω = B(0, ζ), T = ζ with α(x, t) = (γ + |x|)(γ + t), the field
f = (|x| + √t)^{α(x, t)} lies in C^{α(·)} but in no C^β with β > α⁻ = γ². The
probe along θ_n = (ζ/n, 0, ..., 0, 1/n²) shows the constant-β quotient growing
like n^{β - α(θ_n)}.
"""

import logging
import math
from typing import Any, Dict, List

import numpy as np

from ..corpus import example_field
from ..errors import InvalidArgumentError
from ..exponents import constant_exponent, example_exponent, example_modulus_bound
from ..models import Command, ExperimentConfig, ExperimentResult
from ..norms import seminorm_var
from ..solver import example_problem, fd_solve, schauder_constant
from .common import coupled_steps, dimension, drift_percent, make_table, run_levels, witness_entries

logger = logging.getLogger(__name__)

PROBE_COLUMNS = ["n", "x1", "t", "distance", "alpha", "q", "in_domain"]
LEVEL_COLUMNS = [
    "level", "nx", "nt", "seminorm_var", "seminorm_beta", "C_global", "C_interior", "C_boundary", "residual",
]

GAMMA_FLOOR = math.exp(-2.0)


def check_example_parameters(gamma: float, zeta: float, beta_probe: float, n_max: int) -> None:
    """
    Raises:
        InvalidArgumentError: Unless e^{-2} < γ < 1, 0 < ζ < 1 - γ, γ² < β_probe < 1 and n_max >= 2
    """
    if not GAMMA_FLOOR < gamma < 1.0:
        raise InvalidArgumentError(f"The example needs e^-2 < γ < 1, got γ={gamma:g}.")
    if not 0.0 < zeta < 1.0 - gamma:
        raise InvalidArgumentError(f"The example needs 0 < ζ < 1 - γ = {1.0 - gamma:g}, got ζ={zeta:g}.")
    alpha_minus = gamma ** 2
    if not alpha_minus < beta_probe < 1.0:
        raise InvalidArgumentError(
            f"β_probe must satisfy α⁻ = γ² = {alpha_minus:g} < β_probe < 1, got {beta_probe:g}."
        )
    if n_max < 2:
        raise InvalidArgumentError(f"n_max must be at least 2, got {n_max}.")


def optimality_probe(gamma: float, zeta: float, beta_probe: float, n_max: int, n: int = 1) -> List[Dict[str, Any]]:
    """
    q_n = |f(θ_n) - f(0)| / d(θ_n, 0)^{β_probe} for n = 1..n_max.

    θ_n lies in Ω_T once 1/n² < T = ζ; earlier entries are reported with in_domain False.

    Raises:
        InvalidArgumentError: On parameter-range violations
    """
    check_example_parameters(gamma, zeta, beta_probe, n_max)
    f = example_field(gamma, zeta)
    alpha = example_exponent(gamma, zeta)
    origin = np.zeros((1, n))
    f0 = float(f(origin, np.zeros(1))[0])

    rows = []
    for m in range(1, n_max + 1):
        x = np.zeros((1, n))
        x[0, 0] = zeta / m
        t = np.asarray([1.0 / m ** 2])
        distance = max(zeta / m, math.sqrt(t[0]))
        q = abs(float(f(x, t)[0]) - f0) / distance ** beta_probe
        rows.append({
            "n": m, "x1": zeta / m, "t": float(t[0]), "distance": distance,
            "alpha": float(alpha.values(x, t)[0]), "q": q, "in_domain": bool(t[0] < zeta),
        })
    return rows


def tail_slope(rows: List[Dict[str, Any]]) -> float:
    """Least-squares slope of log q_n against log n over the in-domain second half of the probe."""
    n_max = rows[-1]["n"]
    tail = [row for row in rows if row["in_domain"] and row["n"] >= n_max // 2 and row["q"] > 0]
    if len(tail) < 2:
        return math.nan
    slope, _ = np.polyfit(np.log([row["n"] for row in tail]), np.log([row["q"] for row in tail]), 1)
    return float(slope)


def run_example(config: ExperimentConfig) -> ExperimentResult:
    """
    The optimality probe, then at every refinement level: [f]_{α(·)} (finite), the
    constant-β_probe seminorm (growing), and solve + Schauder constants for
    Δu - u_t = f on B(0, ζ) with φ = 0.

    Raises:
        InvalidArgumentError: On parameter-range violations
    """
    gamma, zeta, beta_probe = config.gamma, config.zeta, config.beta_probe
    n = dimension(config)
    probe = optimality_probe(gamma, zeta, beta_probe, config.n_max, n)
    alpha = example_exponent(gamma, zeta)
    beta = constant_exponent(beta_probe)

    def level_work(level: int) -> Dict[str, Any]:
        h = 2.0 * zeta / (level - 1)
        problem = example_problem(gamma, zeta, nx=level, nt=coupled_steps(zeta, h), n=n)
        var = seminorm_var(problem.f, alpha)
        fixed = seminorm_var(problem.f, beta)
        result = fd_solve(problem)
        report = schauder_constant(problem, result, alpha)
        row = {
            "level": level, "nx": problem.dom.nx, "nt": problem.dom.nt,
            "seminorm_var": var.value, "seminorm_beta": fixed.value,
            "C_global": report.variants["global"].value,
            "C_interior": report.variants["interior"].value,
            "C_boundary": report.variants["boundary"].value,
            "residual": result.residual,
        }
        logger.info(f"run_example: level {level}, [f]_α={var.value:.4g}, [f]_β={fixed.value:.4g}")
        return {
            "row": row,
            "witnesses": (
                witness_entries(var, level=level, field="example")
                + witness_entries(fixed, level=level, field="example/beta")
            ),
            "modulus": example_modulus_bound(problem.dom) if level == config.levels[0] else None,
        }

    per_level = run_levels(config.levels, level_work)
    rows = [item["row"] for item in per_level]
    in_domain = [row for row in probe if row["in_domain"]]
    tail = in_domain[len(in_domain) // 2:]
    variable = [row["seminorm_var"] for row in rows]
    return ExperimentResult(
        command=Command.EXAMPLE,
        config=config,
        tables=[
            make_table("example_probe", PROBE_COLUMNS, probe, "§6 Example"),
            make_table("example_levels", LEVEL_COLUMNS, rows, "§6 Example"),
        ],
        summary={
            "alpha_minus": alpha.alpha_minus,
            "alpha_plus": alpha.alpha_plus,
            "beta_probe": beta_probe,
            "q_first": probe[0]["q"],
            "q_last": probe[-1]["q"],
            "tail_slope": tail_slope(probe),
            "expected_slope": beta_probe - alpha.alpha_minus,
            "tail_increasing": all(b["q"] > a["q"] for a, b in zip(tail, tail[1:])),
            "seminorm_var_ratio": max(variable) / min(variable) if min(variable) > 0 else None,
            "seminorm_var_drift_percent": drift_percent(variable),
            "seminorm_beta_growth": (
                rows[-1]["seminorm_beta"] / rows[0]["seminorm_beta"] if rows[0]["seminorm_beta"] > 0 else None
            ),
            "modulus_bound": per_level[0]["modulus"],
        },
        witnesses=[entry for item in per_level for entry in item["witnesses"]],
        curves={"example_probe": {"x": [float(row["n"]) for row in probe], "q": [row["q"] for row in probe]}},
    )
