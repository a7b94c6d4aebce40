from enum import Enum
from typing import Any, Dict, List, Optional

import numpy as np
from pydantic import BaseModel, Field, field_serializer, model_validator

from .errors import InvalidArgumentError
from .geometry import FieldFunction, GridDomain, GridFunction, SpaceTimePoint

SCHEMA_VERSION = "1.0"


class Witness(BaseModel):
    """The ordered node pair attaining a grid supremum."""
    model_config = {"frozen": True}

    i: int
    j: int
    P: SpaceTimePoint
    Q: SpaceTimePoint
    quotient: float

    @classmethod
    def from_nodes(cls, dom: GridDomain, i: int, j: int, quotient: float) -> "Witness":
        """Build a witness from flat node indices of dom."""
        return cls(i=int(i), j=int(j), P=dom.point(i), Q=dom.point(j), quotient=float(quotient))

    def to_row(self, prefix: str = "witness") -> Dict[str, Any]:
        return {
            f"{prefix}_i": self.i,
            f"{prefix}_j": self.j,
            f"{prefix}_P": " ".join(f"{v:.10g}" for v in self.P.x + (self.P.t,)),
            f"{prefix}_Q": " ".join(f"{v:.10g}" for v in self.Q.x + (self.Q.t,)),
        }


class HolderReport(BaseModel):
    """Value of a seminorm or norm with its arg-max witness and per-term breakdown.

    For a plain seminorm, value equals witness.quotient. For a norm, value is the
    sum of the breakdown and the witness belongs to the Hölder term.
    """
    name: str
    value: float
    witness: Optional[Witness] = None
    breakdown: Dict[str, float] = Field(default_factory=dict)
    term_witnesses: Dict[str, Witness] = Field(default_factory=dict)

    def to_row(self) -> Dict[str, Any]:
        row: Dict[str, Any] = {"name": self.name, "value": self.value}
        row.update(self.breakdown)
        if self.witness is not None:
            row.update(self.witness.to_row())
        return row


class LogHolderCheck(BaseModel):
    """Outcome of check_log_holder: estimate of c_log(α) against a bound M."""
    passed: bool
    value: float
    M: float
    witness: Optional[Witness] = None
    exhaustive: bool = True
    nodes: int = 0


class DerivativeBoundReport(BaseModel):
    """Measured constant of |D_s^k D_y^j G| (s-t)^{(n+2k+|j|)/2} exp(|x-y|²/(5(s-t)))."""
    kind: str
    k: int
    j: List[int]
    value: float
    samples: int
    argmax: int = -1


class QuadratureMeta(BaseModel):
    kind: str
    time_cutoff: float
    spatial_rule: str = "tensor-trapezoid"
    space_nodes: int
    time_levels: int
    layer_correction: bool = True


class PotentialResult(BaseModel):
    """Heat potential v and its time derivative v_s on the evaluation grid.

    Nodes outside eval_mask hold NaN in both fields.
    """
    model_config = {"arbitrary_types_allowed": True}

    v: np.ndarray
    v_s: Optional[np.ndarray] = None
    dom: GridDomain
    eval_mask: np.ndarray
    meta: QuadratureMeta

    def field(self, which: str = "v") -> GridFunction:
        """Wrap v or v_s as a GridFunction on the evaluation nodes (NaN elsewhere is filled with 0)."""
        values = self.v if which == "v" else self.v_s
        if values is None:
            raise InvalidArgumentError(f"Potential result has no '{which}' component.")
        return GridFunction(dom=self.dom, values=np.where(self.eval_mask, values, 0.0), name=which)


class TimeDerivativeBoundReport(BaseModel):
    """Measured constant of the v_s Hölder bound against the four pointed seminorms of f."""
    value: float
    vacuous: bool
    pairs: int
    skipped_pairs: int = 0
    witness: Optional[Witness] = None
    denominator_terms: Dict[str, float] = Field(default_factory=dict)


class ExtensionKind(str, Enum):
    TIME = "time"
    BALL = "ball-reflection"
    BOX = "box-reflection"


class ExtendedField(BaseModel):
    """f and α carried onto the enlarged cylinder Ω_{T,σ}."""
    model_config = {"arbitrary_types_allowed": True}

    f_bar: GridFunction
    alpha_bar: Any  # VariableExponent; typed loosely to avoid an import cycle with exponents
    sigma: float
    base_dom: GridDomain
    kind: ExtensionKind
    base_mask: np.ndarray  # nodes of the extended grid that coincide with base-grid nodes

    def restrict(self) -> np.ndarray:
        """Values at the base-grid nodes, reshaped to the base grid."""
        return self.f_bar.values[self.base_mask].reshape(self.base_dom.grid_shape)


class MollifyBoundCheck(BaseModel):
    lhs: float
    rhs: float
    passed: bool
    delta: float
    epsilon: float
    epsilon_prime: float
    within_hypotheses: bool = True


class EquationForm(str, Enum):
    PARABOLIC = "parabolic"  # u_t - Lu = f
    FROZEN = "frozen"        # a(P) D²u - u_t = F


class ParabolicProblem(BaseModel):
    """u_t - (a^{ij} D_ij u + b^i D_i u + c u) = f in Ω_T, u = φ on 𝒢_T."""
    model_config = {"arbitrary_types_allowed": True}

    dom: GridDomain
    a: List[List[GridFunction]]
    b: List[GridFunction]
    c: GridFunction
    f: GridFunction
    phi: GridFunction
    lam: float = Field(gt=0, description="ellipticity lower bound λ")
    Lam: float = Field(gt=0, description="coefficient norm bound Λ")
    form: EquationForm = EquationForm.PARABOLIC
    time_independent: bool = False
    exact: Optional[FieldFunction] = None
    name: str = "problem"

    @model_validator(mode="after")
    def _validate_shapes(self) -> "ParabolicProblem":
        n = self.dom.n
        if len(self.a) != n or any(len(row) != n for row in self.a):
            raise InvalidArgumentError(f"Coefficient matrix a must be {n}x{n}.")
        if len(self.b) != n:
            raise InvalidArgumentError(f"Drift b must have {n} components, got {len(self.b)}.")
        if self.lam > self.Lam:
            raise InvalidArgumentError(f"Ellipticity bounds require λ <= Λ, got λ={self.lam}, Λ={self.Lam}.")
        return self

    def a_values(self) -> np.ndarray:
        """Coefficient tensor of shape (n, n) + grid_shape."""
        return np.stack([np.stack([aij.values for aij in row]) for row in self.a])

    def b_values(self) -> np.ndarray:
        return np.stack([bi.values for bi in self.b])


class SolveResult(BaseModel):
    model_config = {"arbitrary_types_allowed": True}

    u: GridFunction
    residual: float
    steps: int
    factorizations: int
    iterations: int = 0
    method: str = "splu"
    upwinded_nodes: int = 0


class SchauderVariant(BaseModel):
    """One measured-constant quotient: numerator / denominator, or vacuous."""
    name: str
    numerator: float
    denominator: float
    value: Optional[float] = None
    vacuous: bool = False
    terms: Dict[str, float] = Field(default_factory=dict)


class SchauderReport(BaseModel):
    C_emp: Optional[float]
    vacuous: bool
    variants: Dict[str, SchauderVariant]

    def to_row(self) -> Dict[str, Any]:
        row: Dict[str, Any] = {"C_emp": self.C_emp, "vacuous": self.vacuous}
        for name, variant in self.variants.items():
            row[f"C_{name}"] = variant.value
        return row


class Command(str, Enum):
    NORMS = "norms"
    KERNEL_CHECK = "kernel-check"
    POTENTIAL = "potential"
    SOLVE = "solve"
    SCHAUDER = "schauder"
    MOLLIFY_CHECK = "mollify-check"
    INTERP_CHECK = "interp-check"
    EXAMPLE = "example"


class ExperimentConfig(BaseModel):
    """Parsed key=value configuration for one CLI command."""
    command: Command
    # domain
    shape: str = "box"
    lower: Optional[List[float]] = None
    upper: Optional[List[float]] = None
    center: Optional[List[float]] = None
    radius: Optional[float] = None
    t0: float = 0.0
    T: float = 1.0
    nx: int = 9
    nt: int = 8
    # exponent
    form: str = "constant"
    value: float = 0.5
    gamma: float = 0.5
    zeta: float = 0.4
    beta_form: str = "constant"
    beta_value: float = 0.3
    # problem
    operator: str = "heat"
    a: Optional[List[float]] = None
    b: Optional[List[float]] = None
    c: Optional[List[float]] = None
    solution: str = "sine"
    lam: float = 0.5
    Lam: float = 10.0
    # command parameters
    levels: List[int] = Field(default_factory=lambda: [9, 17])
    seed: int = 0
    beta_probe: float = 0.35
    n_max: int = 64
    epsilons: List[float] = Field(default_factory=lambda: [0.1, 0.01])
    k: int = 2
    j: int = 0
    deltas: Optional[List[float]] = None
    sigma: float = 0.1
    kernel: str = "standard"
    dbar: float = 1.0
    order_k: int = 0
    order_j: int = 2
    samples: int = 200
    out_dir: Optional[str] = None
    source: Optional[str] = None

    @model_validator(mode="after")
    def _validate_levels(self) -> "ExperimentConfig":
        if not self.levels:
            raise InvalidArgumentError("At least one refinement level is required.")
        if any(b <= a for a, b in zip(self.levels, self.levels[1:])):
            raise InvalidArgumentError(
                f"Refinement levels must be strictly increasing, got {self.levels}."
            )
        return self

    @field_serializer("command")
    def serialize_command(self, command: Command, _info):
        return command.value


class ReportTable(BaseModel):
    """One CSV table; columns fix the header even when rows is empty."""
    name: str
    columns: List[str]
    rows: List[Dict[str, Any]] = Field(default_factory=list)


class ExperimentResult(BaseModel):
    command: Command
    config: ExperimentConfig
    tables: List[ReportTable] = Field(default_factory=list)
    summary: Dict[str, Any] = Field(default_factory=dict)
    witnesses: List[Dict[str, Any]] = Field(default_factory=list)
    curves: Dict[str, Dict[str, List[float]]] = Field(default_factory=dict)

    @field_serializer("command")
    def serialize_command(self, command: Command, _info):
        return command.value
