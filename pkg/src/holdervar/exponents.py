"""Variable exponents α(x, t), their range, and the log-Hölder modulus.

The log-Hölder constant is the supremum over node pairs of
|α(P) - α(Q)| * |ln d(P, Q)|. Grids with at most EXHAUSTIVE_LIMIT in-domain
nodes are scanned exhaustively; larger grids use a stratified sample of nodes
(equal share per time level, numpy Generator seeded with 0 by default).
"""

import logging
import math
from enum import Enum
from typing import Optional

import numpy as np
from pydantic import BaseModel, model_validator

from ._internal.pairs import pair_max
from ._internal.utils import parabolic_distance_matrix
from .errors import InvalidArgumentError, OutOfDomainError
from .geometry import FieldFunction, GridDomain, GridFunction, SpaceTimePoint
from .models import LogHolderCheck, Witness

logger = logging.getLogger(__name__)

EXHAUSTIVE_LIMIT = 20_000
DEFAULT_SAMPLE = 20_000


class ExponentForm(str, Enum):
    CONSTANT = "constant"
    EXAMPLE = "example"
    TABULATED = "tabulated"
    CLOSURE = "closure"


class VariableExponent(BaseModel):
    """
    An exponent field α: Ω_T -> (0, 1) with declared range α⁻ <= α <= α⁺.

    Forms:
    - constant: α ≡ value
    - example: α(x, t) = (γ + |x|)(γ + t) with e^{-2} < γ < 1 and ζ < 1 - γ
    - tabulated: values sampled on a GridFunction (multilinear between nodes)
    - closure: user-supplied vectorized function of (x, t)
    """
    model_config = {"frozen": True, "arbitrary_types_allowed": True}

    form: ExponentForm
    alpha_plus: float
    alpha_minus: float
    value: Optional[float] = None
    gamma: Optional[float] = None
    zeta: Optional[float] = None
    table: Optional[GridFunction] = None
    closure: Optional[FieldFunction] = None
    clog_estimate: Optional[float] = None
    name: str = ""

    @model_validator(mode="after")
    def _validate(self) -> "VariableExponent":
        if not 0 < self.alpha_minus <= self.alpha_plus < 1:
            raise InvalidArgumentError(
                f"Exponent range must satisfy 0 < α⁻ <= α⁺ < 1, got α⁻={self.alpha_minus}, α⁺={self.alpha_plus}."
            )
        if self.form == ExponentForm.CONSTANT and self.value is None:
            raise InvalidArgumentError("Constant exponents require 'value'.")
        if self.form == ExponentForm.EXAMPLE:
            if self.gamma is None or self.zeta is None:
                raise InvalidArgumentError("Example exponents require 'gamma' and 'zeta'.")
            if not math.exp(-2) < self.gamma < 1:
                raise InvalidArgumentError(f"Example exponent needs e^-2 < γ < 1, got γ={self.gamma}.")
            if not 0 < self.zeta < 1 - self.gamma:
                raise InvalidArgumentError(
                    f"Example exponent needs 0 < ζ < 1 - γ = {1 - self.gamma:.4g}, got ζ={self.zeta}."
                )
        if self.form == ExponentForm.TABULATED and self.table is None:
            raise InvalidArgumentError("Tabulated exponents require 'table'.")
        if self.form == ExponentForm.CLOSURE and self.closure is None:
            raise InvalidArgumentError("Closure exponents require 'closure'.")
        return self

    def values(self, x: np.ndarray, t: np.ndarray) -> np.ndarray:
        """Vectorized α at points x: (N, n), t: (N,)."""
        x = np.atleast_2d(np.asarray(x, dtype=float))
        t = np.atleast_1d(np.asarray(t, dtype=float))
        if self.form == ExponentForm.CONSTANT:
            return np.full(t.shape, float(self.value))
        if self.form == ExponentForm.EXAMPLE:
            return (self.gamma + np.abs(x).max(axis=1)) * (self.gamma + t)
        if self.form == ExponentForm.CLOSURE:
            return np.broadcast_to(np.asarray(self.closure(x, t), dtype=float), t.shape).copy()
        points = np.column_stack([t, x])
        return self.table.interpolator()(points)


def constant_exponent(value: float) -> VariableExponent:
    return VariableExponent(
        form=ExponentForm.CONSTANT, value=float(value), alpha_plus=float(value), alpha_minus=float(value),
        clog_estimate=0.0, name=f"const({value:g})",
    )


def example_exponent(gamma: float, zeta: float) -> VariableExponent:
    """α(x, t) = (γ + |x|)(γ + t) on B(0, ζ) x (0, ζ); α⁻ = γ², α⁺ = (γ + ζ)²."""
    return VariableExponent(
        form=ExponentForm.EXAMPLE, gamma=gamma, zeta=zeta,
        alpha_minus=gamma ** 2, alpha_plus=(gamma + zeta) ** 2,
        name=f"example(γ={gamma:g},ζ={zeta:g})",
    )


def tabulated_exponent(table: GridFunction) -> VariableExponent:
    values = table.flat[table.sample_mask]
    return VariableExponent(
        form=ExponentForm.TABULATED, table=table,
        alpha_minus=float(values.min()), alpha_plus=float(values.max()),
        name=table.name or "tabulated",
    )


def closure_exponent(
    func: FieldFunction,
    dom: Optional[GridDomain] = None,
    alpha_minus: Optional[float] = None,
    alpha_plus: Optional[float] = None,
    name: str = "closure",
) -> VariableExponent:
    """Wrap a vectorized α(x, t); the range is scanned on dom unless given explicitly."""
    if alpha_minus is None or alpha_plus is None:
        if dom is None:
            raise InvalidArgumentError("closure_exponent needs either dom or an explicit (α⁻, α⁺) range.")
        mask = dom.in_domain_mask.reshape(-1)
        vals = np.asarray(func(dom.node_x[mask], dom.node_t[mask]), dtype=float)
        alpha_minus = float(vals.min()) if alpha_minus is None else alpha_minus
        alpha_plus = float(vals.max()) if alpha_plus is None else alpha_plus
    return VariableExponent(
        form=ExponentForm.CLOSURE, closure=func, alpha_minus=alpha_minus, alpha_plus=alpha_plus, name=name,
    )


def shifted_exponent(alpha: VariableExponent, shift: float) -> VariableExponent:
    """The exponent α(·) + shift (shift < 0 gives the α(·) - δ exponent of the mollification bound)."""
    lo, hi = alpha.alpha_minus + shift, alpha.alpha_plus + shift
    if not 0 < lo <= hi < 1:
        raise InvalidArgumentError(
            f"Shifting {alpha.name} by {shift:g} leaves (0, 1): new range [{lo:.4g}, {hi:.4g}]."
        )
    if alpha.form == ExponentForm.CONSTANT:
        return constant_exponent(alpha.value + shift)
    return VariableExponent(
        form=ExponentForm.CLOSURE,
        closure=lambda x, t: alpha.values(x, t) + shift,
        alpha_minus=lo, alpha_plus=hi,
        clog_estimate=alpha.clog_estimate,
        name=f"{alpha.name}{shift:+g}",
    )


def eval_exponent(alpha: VariableExponent, P: SpaceTimePoint, dom: Optional[GridDomain] = None) -> float:
    """
    α(P).

    Args:
        alpha: Exponent field
        P: Space-time point
        dom: Domain the exponent lives on; tabulated exponents use their table's domain

    Raises:
        OutOfDomainError: If P lies outside the closed cylinder, or α(P) falls outside (0, 1)
    """
    dom = dom if dom is not None else (alpha.table.dom if alpha.table is not None else None)
    if dom is not None and not dom.contains(P):
        raise OutOfDomainError(f"eval_exponent: point {P} lies outside the closed cylinder.")
    value = float(alpha.values(np.asarray([P.x]), np.asarray([P.t]))[0])
    if not 0 < value < 1:
        raise OutOfDomainError(
            f"eval_exponent: α({P.x}, {P.t}) = {value:.6g} is outside (0, 1); "
            "the point is not in the exponent's domain of definition."
        )
    return value


def exponent_values(alpha: VariableExponent, dom: GridDomain) -> np.ndarray:
    """α at every node of dom, shape dom.grid_shape."""
    if alpha.form == ExponentForm.TABULATED and alpha.table.dom.same_grid(dom):
        return alpha.table.values
    return alpha.values(dom.node_x, dom.node_t).reshape(dom.grid_shape)


def range_scan(alpha: VariableExponent, dom: GridDomain) -> tuple[float, float]:
    """(α⁻, α⁺) measured as min/max over in-domain nodes."""
    vals = exponent_values(alpha, dom)[dom.in_domain_mask]
    return float(vals.min()), float(vals.max())


def _sample_nodes(dom: GridDomain, limit: int, samples: int, seed: int) -> tuple[np.ndarray, bool]:
    """In-domain flat node indices to scan: all of them, or a stratified sample."""
    nodes = np.flatnonzero(dom.in_domain_mask.reshape(-1))
    if nodes.size <= limit:
        return nodes, True
    rng = np.random.default_rng(seed)
    per_level = max(2, samples // (dom.nt + 1))
    level_of = nodes // int(np.prod(dom.space_shape))
    chosen = []
    for level in range(dom.nt + 1):
        candidates = nodes[level_of == level]
        take = min(per_level, candidates.size)
        chosen.append(np.sort(rng.choice(candidates, size=take, replace=False)))
    logger.info(f"_sample_nodes: {nodes.size} nodes exceed {limit}; scanning a stratified sample of "
                f"{sum(c.size for c in chosen)} (seed={seed})")
    return np.concatenate(chosen), False


def _clog_scan(
    values: np.ndarray,
    dom: GridDomain,
    nodes: np.ndarray,
    workers: Optional[int],
):
    x, t = dom.node_x[nodes], dom.node_t[nodes]

    def block(start: int, stop: int) -> np.ndarray:
        d = parabolic_distance_matrix(x[start:stop], t[start:stop], x, t)
        diff = np.abs(values[start:stop, None] - values[None, :])
        with np.errstate(divide="ignore", invalid="ignore"):
            q = diff * np.abs(np.log(d))
        q[d == 0] = np.nan
        return q

    return pair_max(nodes.size, nodes.size, block, workers=workers)


def estimate_clog(
    alpha: VariableExponent,
    dom: GridDomain,
    workers: Optional[int] = None,
    exhaustive_limit: int = EXHAUSTIVE_LIMIT,
    samples: int = DEFAULT_SAMPLE,
    seed: int = 0,
) -> float:
    """
    Estimate c_log(α) = sup |α(P) - α(Q)| |ln d(P, Q)| over node pairs.

    Pairs at distance 0 are skipped; pairs with d >= 1 are included as-is.

    Raises:
        InvalidArgumentError: If the domain has fewer than 2 in-domain nodes
    """
    return _log_holder_scan(alpha, dom, workers, exhaustive_limit, samples, seed)[0]


def _log_holder_scan(alpha, dom, workers, exhaustive_limit, samples, seed):
    nodes, exhaustive = _sample_nodes(dom, exhaustive_limit, samples, seed)
    if nodes.size < 2:
        raise InvalidArgumentError("estimate_clog needs at least 2 in-domain nodes.")
    if alpha.form == ExponentForm.CONSTANT:
        return 0.0, None, exhaustive, nodes.size
    values = exponent_values(alpha, dom).reshape(-1)[nodes]
    best = _clog_scan(values, dom, nodes, workers)
    if not best.found or best.value == 0.0:
        return 0.0, None, exhaustive, nodes.size
    witness = Witness.from_nodes(dom, nodes[best.i], nodes[best.j], best.value)
    logger.info(f"estimate_clog: c_log({alpha.name}) ≈ {best.value:.6g} over {nodes.size} nodes")
    return best.value, witness, exhaustive, nodes.size


def check_log_holder(
    alpha: VariableExponent,
    dom: GridDomain,
    M: float,
    workers: Optional[int] = None,
    seed: int = 0,
) -> LogHolderCheck:
    """True iff the estimated log-Hölder constant is <= M; the worst pair is returned as witness."""
    value, witness, exhaustive, count = _log_holder_scan(
        alpha, dom, workers, EXHAUSTIVE_LIMIT, DEFAULT_SAMPLE, seed
    )
    return LogHolderCheck(passed=value <= M, value=value, M=M, witness=witness, exhaustive=exhaustive, nodes=count)


def example_modulus_bound(dom: GridDomain, workers: Optional[int] = None) -> float:
    """sup over node pairs of (|x - y| + |t - s|) |ln d(P, Q)|, the majorant of the example exponent's modulus."""
    nodes = np.flatnonzero(dom.in_domain_mask.reshape(-1))
    x, t = dom.node_x[nodes], dom.node_t[nodes]

    def block(start: int, stop: int) -> np.ndarray:
        d = parabolic_distance_matrix(x[start:stop], t[start:stop], x, t)
        space = parabolic_distance_matrix(x[start:stop], np.zeros(stop - start), x, np.zeros(t.size))
        gap = space + np.abs(t[start:stop, None] - t[None, :])
        with np.errstate(divide="ignore", invalid="ignore"):
            q = gap * np.abs(np.log(d))
        q[d == 0] = np.nan
        return q

    return pair_max(nodes.size, nodes.size, block, workers=workers).value
