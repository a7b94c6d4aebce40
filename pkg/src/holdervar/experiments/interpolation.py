"""`interp-check` command: minimal empirical constants of the weighted interpolation inequalities."""

import logging
import math
from typing import Any, Dict, List, Optional, Sequence

from ..corpus import builtin_corpus
from ..errors import InvalidArgumentError
from ..exponents import VariableExponent
from ..geometry import GridFunction
from ..models import Command, ExperimentConfig, ExperimentResult
from ..norms import finite_differences, weighted_interior_seminorm
from .common import alpha_from_config, beta_from_config, drift_percent, level_domain, make_table, run_levels

logger = logging.getLogger(__name__)

INTERP_COLUMNS = ["level", "nx", "nt", "epsilon", "C_min", "argmax_field", "C_norm_form", "finite"]
FIELD_COLUMNS = ["level", "field", "sup", "lhs", "rhs", "lhs_norm", "rhs_norm"]


def _field_terms(u: GridFunction, alpha: VariableExponent, beta: VariableExponent, k: int, j: int) -> Dict[str, Any]:
    bundle = finite_differences(u)
    low = weighted_interior_seminorm(u, beta, j, bundle=bundle)
    high = weighted_interior_seminorm(u, alpha, k, bundle=bundle)
    terms = {"field": u.name, "sup": u.sup(), "lhs": low.value, "rhs": high.value, "lhs_norm": None, "rhs_norm": None}
    if j < k:
        terms["lhs_norm"] = low.breakdown[f"|u|*_{{{j},alpha}}"]
        terms["rhs_norm"] = weighted_interior_seminorm(u, beta, k, bundle=bundle).value
    return terms


def _minimal_constant(terms: List[Dict[str, Any]], eps: float, lhs: str, rhs: str) -> tuple[float, Optional[str]]:
    """max over fields of max(0, (lhs - ε rhs)/|u|_0); +inf when a zero field violates lhs <= ε rhs."""
    best, argmax = 0.0, None
    for item in terms:
        if item[lhs] is None:
            continue
        excess = item[lhs] - eps * item[rhs]
        if excess <= 0:
            continue
        value = math.inf if item["sup"] == 0.0 else excess / item["sup"]
        if value > best:
            best, argmax = value, item["field"]
    return best, argmax


def run_interp_check(
    corpus: Sequence[GridFunction],
    alpha: VariableExponent,
    beta: VariableExponent,
    k: int,
    j: int,
    epsilons: Sequence[float],
) -> tuple[List[Dict[str, Any]], List[Dict[str, Any]]]:
    """
    Minimal empirical C(ε) with [u]*_{j,β(·)} <= C|u|_0 + ε[u]*_{k,α(·)} over the corpus.

    When j < k the norm form |u|*_{j,β(·)} <= C|u|_0 + ε[u]*_{k,β(·)} is measured too.

    Returns:
        (one row per ε, one row of measured terms per field)

    Raises:
        InvalidArgumentError: If j + β⁺ >= k + α⁻, or an ε is not positive
        UnsupportedOrderError: If k or j is outside {0, 1, 2}
    """
    if j + beta.alpha_plus >= k + alpha.alpha_minus:
        raise InvalidArgumentError(
            f"Interpolation needs j + β⁺ < k + α⁻, got {j} + {beta.alpha_plus:g} >= {k} + {alpha.alpha_minus:g}."
        )
    if any(eps <= 0 for eps in epsilons):
        raise InvalidArgumentError(f"Interpolation weights ε must be positive, got {list(epsilons)}.")

    terms = [_field_terms(u, alpha, beta, k, j) for u in corpus]
    rows = []
    for eps in epsilons:
        constant, argmax = _minimal_constant(terms, eps, "lhs", "rhs")
        norm_constant = _minimal_constant(terms, eps, "lhs_norm", "rhs_norm")[0] if j < k else None
        rows.append({
            "epsilon": eps, "C_min": constant, "argmax_field": argmax,
            "C_norm_form": norm_constant, "finite": math.isfinite(constant),
        })
    return rows, terms


def run_interp(config: ExperimentConfig) -> ExperimentResult:
    """run_interp_check on the built-in corpus at every refinement level."""
    alpha, beta = alpha_from_config(config), beta_from_config(config)

    def level_work(level: int) -> Dict[str, Any]:
        dom = level_domain(config, level)
        rows, terms = run_interp_check(
            builtin_corpus(dom, seed=config.seed), alpha, beta, config.k, config.j, config.epsilons,
        )
        header = {"level": level, "nx": dom.nx, "nt": dom.nt}
        logger.info(f"run_interp: level {level}, C = {[round(r['C_min'], 6) for r in rows]}")
        return {
            "rows": [{**header, **row} for row in rows],
            "terms": [{"level": level, **item} for item in terms],
        }

    per_level = run_levels(config.levels, level_work)
    rows = [row for item in per_level for row in item["rows"]]
    finest = {row["epsilon"]: row["C_min"] for row in per_level[-1]["rows"]}
    ordered = [finest[eps] for eps in sorted(finest)]
    return ExperimentResult(
        command=Command.INTERP_CHECK,
        config=config,
        tables=[
            make_table("interpolation", INTERP_COLUMNS, rows, "Lemmas A.1-A.3"),
            make_table(
                "interpolation_terms", FIELD_COLUMNS, [t for item in per_level for t in item["terms"]],
                "Lemmas A.1-A.3",
            ),
        ],
        summary={
            "alpha": alpha.name,
            "beta": beta.name,
            "k": config.k,
            "j": config.j,
            "C_min": {f"{eps:g}": value for eps, value in finest.items()},
            "drift_percent": {
                f"{eps:g}": drift_percent(row["C_min"] for row in rows if row["epsilon"] == eps)
                for eps in config.epsilons
            },
            "all_finite": all(row["finite"] for row in rows),
            "non_increasing_in_epsilon": all(b <= a for a, b in zip(ordered, ordered[1:])),
        },
    )
