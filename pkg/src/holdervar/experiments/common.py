"""Helpers shared by the experiment commands: domains per level, exponents, drift and table plumbing."""

import math
from concurrent.futures import ThreadPoolExecutor
from typing import Any, Callable, Dict, Iterable, List, Optional, Sequence, TypeVar

from ..exponents import VariableExponent, constant_exponent, example_exponent
from ..geometry import GridDomain
from ..models import ExperimentConfig, HolderReport, ReportTable

T = TypeVar("T")

# Cap on concurrently processed refinement levels.
MAX_LEVEL_WORKERS = 4


def dimension(config: ExperimentConfig) -> int:
    if config.shape == "box" and config.lower is not None:
        return len(config.lower)
    if config.center is not None:
        return len(config.center)
    return 1


def coupled_steps(span: float, h: float) -> int:
    """Time steps with τ <= h² over a time interval of length span."""
    return max(1, int(math.ceil(span / h ** 2 - 1e-9)))


def config_domain(config: ExperimentConfig, nx: Optional[int] = None, nt: Optional[int] = None) -> GridDomain:
    """Domain described by the config; nx and nt default to the config's own values."""
    nx = config.nx if nx is None else nx
    nt = config.nt if nt is None else nt
    if config.shape == "ball":
        return GridDomain.ball(config.center, config.radius, T=config.T, nx=nx, nt=nt, t0=config.t0)
    return GridDomain.box(config.lower, config.upper, T=config.T, nx=nx, nt=nt, t0=config.t0)


def level_domain(config: ExperimentConfig, level: int) -> GridDomain:
    """Domain with `level` nodes per axis and the coupled number of time steps."""
    coarse = config_domain(config, nx=level, nt=1)
    return coarse.refined(level, coupled_steps(config.T - config.t0, coarse.h))


def alpha_from_config(config: ExperimentConfig) -> VariableExponent:
    if config.form == "example":
        return example_exponent(config.gamma, config.zeta)
    return constant_exponent(config.value)


def beta_from_config(config: ExperimentConfig) -> VariableExponent:
    if config.beta_form == "example":
        return example_exponent(config.gamma, config.zeta)
    return constant_exponent(config.beta_value)


def run_levels(levels: Sequence[int], work: Callable[[int], T], workers: int = MAX_LEVEL_WORKERS) -> List[T]:
    """
    Run work(level) for every refinement level in a thread pool.

    Results come back in level order regardless of completion order.
    """
    levels = list(levels)
    if len(levels) <= 1 or workers <= 1:
        return [work(level) for level in levels]
    with ThreadPoolExecutor(max_workers=min(workers, len(levels))) as pool:
        futures = [pool.submit(work, level) for level in levels]
        return [future.result() for future in futures]


def drift_percent(values: Iterable[Optional[float]]) -> Optional[float]:
    """Relative change in percent between the last two values; None when undefined."""
    values = [v for v in values if v is not None and math.isfinite(v)]
    if len(values) < 2:
        return None
    previous, last = values[-2], values[-1]
    if previous == 0.0:
        return 0.0 if last == 0.0 else None
    return 100.0 * abs(last - previous) / abs(previous)


def witness_entries(report: HolderReport, **labels: Any) -> List[Dict[str, Any]]:
    """JSON-ready witness pairs of a report (main witness plus per-term witnesses)."""
    entries = []
    seen = set()
    named = [(report.name, report.witness)] + list(report.term_witnesses.items())
    for term, witness in named:
        if witness is None or (witness.i, witness.j) in seen:
            continue
        seen.add((witness.i, witness.j))
        entries.append({**labels, "term": term, **witness.model_dump(mode="json")})
    return entries


def make_table(name: str, columns: List[str], rows: List[Dict[str, Any]], paper_ref: str) -> ReportTable:
    """A report table whose rows carry the theorem or lemma label they exercise in the 'paper_ref' column."""
    columns = columns + ["paper_ref"] if "paper_ref" not in columns else columns
    return ReportTable(
        name=name,
        columns=columns,
        rows=[{**row, "paper_ref": row.get("paper_ref", paper_ref)} for row in rows],
    )
