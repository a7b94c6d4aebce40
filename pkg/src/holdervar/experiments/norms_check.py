"""`norms` command: variable-exponent norms of the built-in corpus across refinement levels."""

import logging
from typing import Any, Dict, List

from ..corpus import builtin_corpus
from ..exponents import ExponentForm, check_log_holder
from ..models import Command, ExperimentConfig, ExperimentResult
from ..norms import classical_seminorm, finite_differences, norm_0_alpha, norm_2_1_alpha
from .common import alpha_from_config, drift_percent, level_domain, make_table, run_levels, witness_entries

logger = logging.getLogger(__name__)

NORM_COLUMNS = [
    "level", "nx", "nt", "field", "sup", "seminorm", "norm_0_alpha", "norm_2_1_alpha", "classical",
    "witness_P", "witness_Q",
]
LOG_HOLDER_COLUMNS = ["level", "nx", "nt", "c_log", "bound", "passed", "exhaustive", "nodes"]

# Bound checked against the estimated log-Hölder constant.
LOG_HOLDER_BOUND = 10.0
# The dense classical cross-check is skipped above this many nodes.
CLASSICAL_NODE_LIMIT = 5_000


def run_norms(config: ExperimentConfig) -> ExperimentResult:
    """Seminorm, |u|_{0,α} and |u|_{2,1,α} of every corpus field at every level, plus c_log(α)."""
    alpha = alpha_from_config(config)

    def level_work(level: int) -> Dict[str, Any]:
        dom = level_domain(config, level)
        classical = alpha.form == ExponentForm.CONSTANT and dom.size <= CLASSICAL_NODE_LIMIT
        rows: List[Dict[str, Any]] = []
        witnesses: List[Dict[str, Any]] = []
        for field in builtin_corpus(dom, seed=config.seed):
            norm0 = norm_0_alpha(field, alpha)
            norm2 = norm_2_1_alpha(field, alpha, finite_differences(field))
            row = {
                "level": level, "nx": dom.nx, "nt": dom.nt, "field": field.name,
                "sup": norm0.breakdown["|u|_0"], "seminorm": norm0.breakdown["[u]_alpha"],
                "norm_0_alpha": norm0.value, "norm_2_1_alpha": norm2.value,
                "classical": classical_seminorm(field, alpha.value) if classical else None,
            }
            if norm0.witness is not None:
                witness = norm0.witness.to_row()
                row["witness_P"], row["witness_Q"] = witness["witness_P"], witness["witness_Q"]
            rows.append(row)
            witnesses += witness_entries(norm0, level=level, field=field.name)
        check = check_log_holder(alpha, dom, LOG_HOLDER_BOUND, seed=config.seed)
        log_row = {
            "level": level, "nx": dom.nx, "nt": dom.nt, "c_log": check.value, "bound": check.M,
            "passed": check.passed, "exhaustive": check.exhaustive, "nodes": check.nodes,
        }
        logger.info(f"run_norms: level {level} done ({len(rows)} fields, c_log ≈ {check.value:.4g})")
        return {"rows": rows, "witnesses": witnesses, "log": log_row}

    per_level = run_levels(config.levels, level_work)
    rows = [row for item in per_level for row in item["rows"]]
    fields = [row["field"] for row in per_level[0]["rows"]]
    drift = {
        field: drift_percent(row["seminorm"] for row in rows if row["field"] == field)
        for field in fields
    }
    return ExperimentResult(
        command=Command.NORMS,
        config=config,
        tables=[
            make_table("norms", NORM_COLUMNS, rows, "§2 variable Hölder norms"),
            make_table(
                "log_holder", LOG_HOLDER_COLUMNS, [item["log"] for item in per_level], "§2 log-Hölder condition (2)",
            ),
        ],
        summary={
            "alpha": alpha.name,
            "alpha_minus": alpha.alpha_minus,
            "alpha_plus": alpha.alpha_plus,
            "seminorm_drift_percent": drift,
            "c_log": per_level[-1]["log"]["c_log"],
        },
        witnesses=[entry for item in per_level for entry in item["witnesses"]],
    )
