"""`mollify-check` command: the mollification bound on the corpus."""

import logging
from typing import Any, Dict, List

from ..corpus import builtin_corpus
from ..models import Command, ExperimentConfig, ExperimentResult
from ..regularize import check_mollify_bound, extend_field, measure_extension_constant
from .common import alpha_from_config, level_domain, make_table, run_levels

logger = logging.getLogger(__name__)

MOLLIFY_COLUMNS = [
    "level", "nx", "nt", "field", "delta", "epsilon", "epsilon_prime", "lhs", "rhs", "passed",
    "within_hypotheses", "extension_constant",
]


def run_mollify_check(config: ExperimentConfig) -> ExperimentResult:
    """
    For every corpus field and δ (default α⁻/4 and α⁻/2): extend by σ, mollify at
    ε = min(ε'(δ)/2, σ) and compare |f_ε|_{0,α-δ} with 3|f̄|_{0,ᾱ}.
    """
    alpha = alpha_from_config(config)
    deltas = config.deltas or [alpha.alpha_minus / 4.0, alpha.alpha_minus / 2.0]

    def level_work(level: int) -> List[Dict[str, Any]]:
        dom = level_domain(config, level)
        rows = []
        for field in builtin_corpus(dom, seed=config.seed):
            ext = extend_field(field, alpha, config.sigma)
            constant = measure_extension_constant(ext, field, alpha)
            for delta in deltas:
                check = check_mollify_bound(ext, alpha, delta)
                rows.append({
                    "level": level, "nx": dom.nx, "nt": dom.nt, "field": field.name, "delta": delta,
                    "epsilon": check.epsilon, "epsilon_prime": check.epsilon_prime,
                    "lhs": check.lhs, "rhs": check.rhs, "passed": check.passed,
                    "within_hypotheses": check.within_hypotheses, "extension_constant": constant,
                })
        logger.info(f"run_mollify_check: level {level}, {sum(r['passed'] for r in rows)}/{len(rows)} passed")
        return rows

    rows = [row for rows in run_levels(config.levels, level_work) for row in rows]
    failures = [f"{row['field']}@{row['level']}/δ={row['delta']:g}" for row in rows if not row["passed"]]
    if failures:
        logger.warning(f"run_mollify_check: bound fails for {', '.join(failures)}")
    return ExperimentResult(
        command=Command.MOLLIFY_CHECK,
        config=config,
        tables=[make_table("mollify", MOLLIFY_COLUMNS, rows, "Lemma 6.3")],
        summary={
            "alpha": alpha.name,
            "sigma": config.sigma,
            "deltas": deltas,
            "all_passed": not failures,
            "failures": failures,
            "max_ratio": max((row["lhs"] / row["rhs"] for row in rows if row["rhs"] > 0), default=0.0),
            "max_extension_constant": max(row["extension_constant"] for row in rows),
        },
    )
