"""Discretized space-time cylinders, the parabolic metric and boundary distances.

Conventions:
- Space uses the maximum norm |x| = max_i |x_i|; the parabolic metric is
  d(P, Q) = max(|x1 - x2|, sqrt|t1 - t2|).
- Time is stored in parabolic units (the same scale as space squared).
- Grid values are stored with time as the first axis: shape (nt+1, nx, ..., nx),
  time levels t_k = t0 + k * tau for k = 0..nt.
"""

import math
from enum import Enum
from functools import cached_property
from typing import Callable, Iterable, Optional, Union

import numpy as np
from pydantic import BaseModel, model_validator
from scipy.interpolate import RegularGridInterpolator
from scipy.ndimage import distance_transform_edt

from .errors import InvalidArgumentError, OutOfDomainError

# Closure signature for analytic fields: f(x: (N, n) array, t: (N,) array) -> (N,) array
FieldFunction = Callable[[np.ndarray, np.ndarray], np.ndarray]

INITIAL = "initial"
LATERAL = "lateral"


class Shape(str, Enum):
    BOX = "box"
    BALL = "ball"


class SpaceTimePoint(BaseModel):
    """A point P = (x, t) of space-time."""
    model_config = {"frozen": True}

    x: tuple[float, ...]
    t: float

    @property
    def n(self) -> int:
        return len(self.x)

    @classmethod
    def of(cls, x: Union[float, Iterable[float]], t: float) -> "SpaceTimePoint":
        coords = (float(x),) if np.isscalar(x) else tuple(float(v) for v in x)
        return cls(x=coords, t=float(t))


# A spatial point is just a coordinate tuple; kept as an alias for readability.
SpacePoint = tuple[float, ...]


class BoundaryDistances(BaseModel):
    """Pointwise distances d_P = min(t, dist(x, ∂Ω)) and d̄_P = d(P, 𝒢_T \\ Γ)."""
    model_config = {"frozen": True}

    d_P: float
    d_bar: float


def _check_dimensions(P: SpaceTimePoint, Q: SpaceTimePoint) -> None:
    if P.n != Q.n:
        raise InvalidArgumentError(
            f"Spatial dimension mismatch: P has {P.n} coordinates, Q has {Q.n}."
        )


def parabolic_distance(P: SpaceTimePoint, Q: SpaceTimePoint) -> float:
    """d(P, Q) = max(|x1 - x2|_inf, sqrt|t1 - t2|)."""
    _check_dimensions(P, Q)
    space = max((abs(a - b) for a, b in zip(P.x, Q.x)), default=0.0)
    return max(space, math.sqrt(abs(P.t - Q.t)))


def euclidean_distance(P: SpaceTimePoint, Q: SpaceTimePoint) -> float:
    """Euclidean distance in R^{n+1}; the mollifier balls use this norm."""
    _check_dimensions(P, Q)
    return math.sqrt(sum((a - b) ** 2 for a, b in zip(P.x, Q.x)) + (P.t - Q.t) ** 2)


def semicube_contains(top: SpaceTimePoint, delta: float, Q: SpaceTimePoint) -> bool:
    """Membership in the backward semicube N(top, delta) = {Q: d(top, Q) <= delta, t <= t_top}."""
    if delta <= 0:
        raise InvalidArgumentError(f"Semicube radius must be positive, got {delta}.")
    return Q.t <= top.t and parabolic_distance(top, Q) <= delta


class GridDomain(BaseModel):
    """
    A discretized space-time cylinder Ω_T = Ω × (t0, T) on a tensor grid.

    The box shape uses the grid [lower, upper] per axis. The ball shape uses the
    bounding box of B(center, radius) with a stair-step mask: a node is interior
    iff its Euclidean center distance is < radius - h/2, lateral boundary iff it
    is not interior and within h of the sphere (r <= radius + h).
    """
    model_config = {"frozen": True}

    shape: Shape = Shape.BOX
    lower: Optional[tuple[float, ...]] = None
    upper: Optional[tuple[float, ...]] = None
    center: Optional[tuple[float, ...]] = None
    radius: Optional[float] = None
    t0: float = 0.0
    T: float
    nx: int
    nt: int

    @model_validator(mode="after")
    def _validate(self) -> "GridDomain":
        if self.shape == Shape.BOX:
            if self.lower is None or self.upper is None:
                raise InvalidArgumentError("Box domains require 'lower' and 'upper' corners.")
            if len(self.lower) != len(self.upper) or not self.lower:
                raise InvalidArgumentError(
                    f"Box corners must have equal, nonzero length: lower={self.lower}, upper={self.upper}."
                )
            if any(lo >= hi for lo, hi in zip(self.lower, self.upper)):
                raise InvalidArgumentError(f"Box requires lower < upper on every axis, got {self.lower}, {self.upper}.")
        else:
            if self.center is None or self.radius is None:
                raise InvalidArgumentError("Ball domains require 'center' and 'radius'.")
            if self.radius <= 0:
                raise InvalidArgumentError(f"Ball radius must be positive, got {self.radius}.")
        if self.nx < 2:
            raise InvalidArgumentError(f"nx must be at least 2 (got {self.nx}).")
        if self.nt < 1:
            raise InvalidArgumentError(f"nt must be at least 1 (got {self.nt}).")
        if self.T <= self.t0:
            raise InvalidArgumentError(f"Time horizon T={self.T} must exceed t0={self.t0}.")
        return self

    # ---- construction helpers -------------------------------------------------

    @classmethod
    def box(cls, lower, upper, T: float, nx: int, nt: int, t0: float = 0.0) -> "GridDomain":
        lower = (float(lower),) if np.isscalar(lower) else tuple(float(v) for v in lower)
        upper = (float(upper),) if np.isscalar(upper) else tuple(float(v) for v in upper)
        return cls(shape=Shape.BOX, lower=lower, upper=upper, T=T, nx=nx, nt=nt, t0=t0)

    @classmethod
    def unit_box(cls, n: int, T: float, nx: int, nt: int) -> "GridDomain":
        return cls.box((0.0,) * n, (1.0,) * n, T=T, nx=nx, nt=nt)

    @classmethod
    def ball(cls, center, radius: float, T: float, nx: int, nt: int, t0: float = 0.0) -> "GridDomain":
        center = (float(center),) if np.isscalar(center) else tuple(float(v) for v in center)
        return cls(shape=Shape.BALL, center=center, radius=float(radius), T=T, nx=nx, nt=nt, t0=t0)

    def refined(self, nx: int, nt: int) -> "GridDomain":
        """Same geometry at another resolution."""
        data = self.model_dump()
        data.update(nx=nx, nt=nt)
        return GridDomain(**data)

    def same_grid(self, other: "GridDomain") -> bool:
        return self.model_dump() == other.model_dump()

    # ---- grid structure ----------------------------------------------------------

    @property
    def n(self) -> int:
        return len(self.lower) if self.shape == Shape.BOX else len(self.center)

    @cached_property
    def bounds(self) -> tuple[tuple[float, ...], tuple[float, ...]]:
        if self.shape == Shape.BOX:
            return self.lower, self.upper
        return (
            tuple(c - self.radius for c in self.center),
            tuple(c + self.radius for c in self.center),
        )

    @cached_property
    def axes(self) -> list[np.ndarray]:
        lo, hi = self.bounds
        return [np.linspace(a, b, self.nx) for a, b in zip(lo, hi)]

    @cached_property
    def spacing(self) -> tuple[float, ...]:
        lo, hi = self.bounds
        return tuple((b - a) / (self.nx - 1) for a, b in zip(lo, hi))

    @property
    def h(self) -> float:
        return max(self.spacing)

    @property
    def tau(self) -> float:
        return (self.T - self.t0) / self.nt

    @cached_property
    def times(self) -> np.ndarray:
        times = self.t0 + np.arange(self.nt + 1) * self.tau
        times[-1] = self.T
        return times

    @property
    def space_shape(self) -> tuple[int, ...]:
        return (self.nx,) * self.n

    @property
    def grid_shape(self) -> tuple[int, ...]:
        return (self.nt + 1,) + self.space_shape

    @property
    def size(self) -> int:
        return int(np.prod(self.grid_shape))

    @cached_property
    def space_points(self) -> np.ndarray:
        """Spatial node coordinates, shape (nx**n, n), C order."""
        mesh = np.meshgrid(*self.axes, indexing="ij")
        return np.stack([m.reshape(-1) for m in mesh], axis=1)

    @cached_property
    def node_x(self) -> np.ndarray:
        """Spatial coordinates of every grid node, shape (size, n)."""
        return np.tile(self.space_points, (self.nt + 1, 1))

    @cached_property
    def node_t(self) -> np.ndarray:
        """Time coordinate of every grid node, shape (size,)."""
        return np.repeat(self.times, self.space_points.shape[0])

    @cached_property
    def center_distance(self) -> np.ndarray:
        """Euclidean distance of each spatial node to the ball center (ball shape only)."""
        if self.shape != Shape.BALL:
            raise InvalidArgumentError("center_distance is defined for ball domains only.")
        return np.linalg.norm(self.space_points - np.asarray(self.center)[None, :], axis=1)

    @cached_property
    def spatial_interior(self) -> np.ndarray:
        """Spatial nodes of the open set Ω (flat boolean, length nx**n)."""
        if self.shape == Shape.BOX:
            idx = np.indices(self.space_shape).reshape(self.n, -1)
            return np.all((idx > 0) & (idx < self.nx - 1), axis=0)
        return self.center_distance < self.radius - self.h / 2

    @cached_property
    def spatial_boundary(self) -> np.ndarray:
        """Spatial nodes representing ∂Ω (flat boolean)."""
        if self.shape == Shape.BOX:
            return ~self.spatial_interior
        return (~self.spatial_interior) & (self.center_distance <= self.radius + self.h)

    @property
    def spatial_in_domain(self) -> np.ndarray:
        return self.spatial_interior | self.spatial_boundary

    @cached_property
    def in_domain_mask(self) -> np.ndarray:
        return np.broadcast_to(self.spatial_in_domain.reshape(self.space_shape), self.grid_shape).copy()

    @cached_property
    def parabolic_boundary_mask(self) -> np.ndarray:
        """Nodes of 𝒢_T: lateral boundary at every level plus the initial slice."""
        mask = np.broadcast_to(self.spatial_boundary.reshape(self.space_shape), self.grid_shape).copy()
        mask[0] = self.spatial_in_domain.reshape(self.space_shape)
        return mask

    @cached_property
    def interior_mask(self) -> np.ndarray:
        return self.in_domain_mask & ~self.parabolic_boundary_mask

    @property
    def diameter(self) -> float:
        """Parabolic diameter of Ω_T."""
        lo, hi = self.bounds
        space = max(b - a for a, b in zip(lo, hi))
        return max(space, math.sqrt(self.T - self.t0))

    # ---- point helpers -----------------------------------------------------------

    def contains(self, P: SpaceTimePoint, tol: float = 1e-12) -> bool:
        """Membership in the closed cylinder Ω̄ × [t0, T]."""
        if P.n != self.n:
            raise InvalidArgumentError(f"Point has {P.n} coordinates; the domain has n={self.n}.")
        scale = tol * max(1.0, self.diameter)
        if P.t < self.t0 - scale or P.t > self.T + scale:
            return False
        x = np.asarray(P.x)
        if self.shape == Shape.BOX:
            return bool(np.all(x >= np.asarray(self.lower) - scale) and np.all(x <= np.asarray(self.upper) + scale))
        return float(np.linalg.norm(x - np.asarray(self.center))) <= self.radius + scale

    def locate(self, P: SpaceTimePoint, tol: float = 1e-9) -> Optional[int]:
        """Flat node index of P when P coincides with a grid node, otherwise None."""
        k = (P.t - self.t0) / self.tau
        k_round = int(round(k))
        if abs(k - k_round) > tol or not 0 <= k_round <= self.nt:
            return None
        index = [k_round]
        lo, _ = self.bounds
        for axis, (xi, a, step) in enumerate(zip(P.x, lo, self.spacing)):
            m = (xi - a) / step
            m_round = int(round(m))
            if abs(m - m_round) > tol or not 0 <= m_round < self.nx:
                return None
            index.append(m_round)
        return int(np.ravel_multi_index(tuple(index), self.grid_shape))

    def point(self, flat_index: int) -> SpaceTimePoint:
        return SpaceTimePoint(x=tuple(float(v) for v in self.node_x[flat_index]), t=float(self.node_t[flat_index]))


def space_distance_to_boundary(dom: GridDomain, x: np.ndarray) -> np.ndarray:
    """Analytic dist(x, ∂Ω) for points inside Ω (max-norm for boxes, radius - |x|_2 for balls), clipped at 0."""
    x = np.atleast_2d(np.asarray(x, dtype=float))
    if dom.shape == Shape.BOX:
        lo = np.asarray(dom.lower)[None, :]
        hi = np.asarray(dom.upper)[None, :]
        dist = np.minimum(x - lo, hi - x).min(axis=1)
    else:
        dist = dom.radius - np.linalg.norm(x - np.asarray(dom.center)[None, :], axis=1)
    return np.clip(dist, 0.0, None)


def _space_distance_outside(dom: GridDomain, x: np.ndarray) -> np.ndarray:
    """Distance from x to the closed set Ω̄ (zero inside)."""
    if dom.shape == Shape.BOX:
        lo = np.asarray(dom.lower)[None, :]
        hi = np.asarray(dom.upper)[None, :]
        return np.maximum(np.maximum(lo - x, x - hi), 0.0).max(axis=1)
    return np.clip(np.linalg.norm(x - np.asarray(dom.center)[None, :], axis=1) - dom.radius, 0.0, None)


def boundary_portions(dom: GridDomain) -> frozenset[str]:
    """Elementary pieces of 𝒢_T: the initial slice plus the lateral faces (boxes) or sphere (balls)."""
    if dom.shape == Shape.BOX:
        faces = {f"{side}:{i}" for i in range(1, dom.n + 1) for side in ("lower", "upper")}
        return frozenset({INITIAL} | faces)
    return frozenset({INITIAL, LATERAL})


def parse_gamma(dom: GridDomain, gamma: Union[None, str, Iterable[str]]) -> frozenset[str]:
    """
    Normalize a Γ selector into a set of elementary boundary portions.

    Accepts None/empty (Γ = ∅), a comma-separated string or an iterable of names.
    Valid names: 'initial', 'lateral', 'all' and, for boxes, 'lower:i' / 'upper:i'.

    Raises:
        InvalidArgumentError: If a name refers to a region outside 𝒢_T
    """
    if gamma is None:
        return frozenset()
    names = [g.strip() for g in gamma.split(",")] if isinstance(gamma, str) else [str(g).strip() for g in gamma]
    portions = boundary_portions(dom)
    selected: set[str] = set()
    for name in filter(None, names):
        if name == "all":
            selected |= portions
        elif name == LATERAL:
            selected |= portions - {INITIAL}
        elif name in portions:
            selected.add(name)
        else:
            raise InvalidArgumentError(
                f"Γ selector '{name}' is not part of the parabolic boundary of a {dom.shape.value} domain. "
                f"Valid selectors: {', '.join(sorted(portions | {LATERAL, 'all'}))}."
            )
    return frozenset(selected)


def _portion_distance(dom: GridDomain, portion: str, x: np.ndarray, t: np.ndarray) -> np.ndarray:
    """Parabolic distance from points (x, t) to one piece of 𝒢_T."""
    if portion == INITIAL:
        return np.maximum(_space_distance_outside(dom, x), np.sqrt(np.clip(t - dom.t0, 0.0, None)))

    time_gap = np.sqrt(np.maximum(np.maximum(dom.t0 - t, t - dom.T), 0.0))
    if dom.shape == Shape.BALL:
        r = np.linalg.norm(x - np.asarray(dom.center)[None, :], axis=1)
        return np.maximum(np.abs(r - dom.radius), time_gap)

    side, axis = portion.split(":")
    axis = int(axis) - 1
    lo = np.asarray(dom.lower)[None, :]
    hi = np.asarray(dom.upper)[None, :]
    outside = np.maximum(np.maximum(lo - x, x - hi), 0.0)
    outside[:, axis] = 0.0
    plane = dom.lower[axis] if side == "lower" else dom.upper[axis]
    face = np.maximum(np.abs(x[:, axis] - plane), outside.max(axis=1))
    return np.maximum(face, time_gap)


def portion_mask(dom: GridDomain, portion: str) -> np.ndarray:
    """Grid nodes representing one piece of 𝒢_T, shape dom.grid_shape."""
    mask = np.zeros(dom.grid_shape, dtype=bool)
    inside = dom.spatial_in_domain.reshape(dom.space_shape)
    if portion == INITIAL:
        mask[0] = inside
        return mask
    if portion == LATERAL and dom.shape == Shape.BALL:
        mask[:] = dom.spatial_boundary.reshape(dom.space_shape)
        return mask
    if portion not in boundary_portions(dom):
        raise InvalidArgumentError(f"Unknown boundary piece '{portion}' for a {dom.shape.value} domain.")
    side, axis = portion.split(":")
    index = [slice(None)] * (dom.n + 1)
    index[int(axis)] = 0 if side == "lower" else dom.nx - 1
    mask[tuple(index)] = True
    return mask


def boundary_distance_arrays(
    dom: GridDomain,
    x: np.ndarray,
    t: np.ndarray,
    gamma: Union[None, str, Iterable[str]] = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized (d_P, d̄_P) for points x: (N, n), t: (N,). d̄_P is +inf when 𝒢_T \\ Γ is empty."""
    x = np.atleast_2d(np.asarray(x, dtype=float))
    t = np.atleast_1d(np.asarray(t, dtype=float))
    selected = parse_gamma(dom, gamma)
    d_P = np.minimum(t - dom.t0, space_distance_to_boundary(dom, x))
    d_P = np.clip(d_P, 0.0, None)

    d_bar = np.full(t.shape, np.inf)
    for portion in sorted(boundary_portions(dom) - selected):
        d_bar = np.minimum(d_bar, _portion_distance(dom, portion, x, t))
    return d_P, d_bar


def boundary_distances(
    dom: GridDomain,
    P: SpaceTimePoint,
    gamma: Union[None, str, Iterable[str]] = None,
) -> BoundaryDistances:
    """
    Distances of P to the boundary used by the weighted norms.

    d_P = min(t, dist(x, ∂Ω)) and d̄_P = d(P, 𝒢_T \\ Γ).

    Raises:
        OutOfDomainError: If P is outside the closed cylinder
        InvalidArgumentError: If Γ references a region outside 𝒢_T
    """
    if not dom.contains(P):
        raise OutOfDomainError(f"Point {P} lies outside the closed cylinder of the domain.")
    d_P, d_bar = boundary_distance_arrays(dom, np.asarray([P.x]), np.asarray([P.t]), gamma)
    return BoundaryDistances(d_P=float(d_P[0]), d_bar=float(d_bar[0]))


def boundary_distance_field(
    dom: GridDomain,
    gamma: Union[None, str, Iterable[str]] = None,
) -> tuple[np.ndarray, np.ndarray]:
    """(d_P, d̄_P) at every grid node, each of shape dom.grid_shape."""
    d_P, d_bar = boundary_distance_arrays(dom, dom.node_x, dom.node_t, gamma)
    return d_P.reshape(dom.grid_shape), d_bar.reshape(dom.grid_shape)


class GridFunction(BaseModel):
    """A scalar field sampled at the nodes of a GridDomain, with an optional analytic closure."""
    model_config = {"frozen": True, "arbitrary_types_allowed": True}

    dom: GridDomain
    values: np.ndarray
    analytic: Optional[FieldFunction] = None
    name: str = ""

    @model_validator(mode="after")
    def _validate(self) -> "GridFunction":
        if self.values.shape != self.dom.grid_shape:
            raise InvalidArgumentError(
                f"Field values have shape {self.values.shape}; the domain grid is {self.dom.grid_shape}."
            )
        if not np.all(np.isfinite(self.values[self.dom.in_domain_mask])):
            raise InvalidArgumentError(f"Field '{self.name}' has non-finite values at in-domain nodes.")
        return self

    @classmethod
    def from_function(cls, dom: GridDomain, func: FieldFunction, name: str = "") -> "GridFunction":
        """Sample an analytic field at every grid node (including stair-step exterior nodes)."""
        with np.errstate(invalid="ignore", divide="ignore"):
            values = np.asarray(func(dom.node_x, dom.node_t), dtype=float)
        values = np.broadcast_to(values, (dom.size,)).reshape(dom.grid_shape).copy()
        return cls(dom=dom, values=values, analytic=func, name=name)

    @classmethod
    def zeros(cls, dom: GridDomain, name: str = "zero") -> "GridFunction":
        return cls.from_function(dom, lambda x, t: np.zeros(t.shape), name=name)

    def with_values(self, values: np.ndarray, name: Optional[str] = None) -> "GridFunction":
        return GridFunction(dom=self.dom, values=values, analytic=None, name=self.name if name is None else name)

    def resample(self, dom: GridDomain) -> "GridFunction":
        """Re-evaluate the analytic closure on another grid."""
        if self.analytic is None:
            raise InvalidArgumentError(f"Field '{self.name}' has no analytic closure to resample.")
        return GridFunction.from_function(dom, self.analytic, name=self.name)

    @property
    def flat(self) -> np.ndarray:
        return self.values.reshape(-1)

    @property
    def sample_mask(self) -> np.ndarray:
        """Flat mask of in-domain nodes with finite values."""
        return self.dom.in_domain_mask.reshape(-1) & np.isfinite(self.flat)

    def sup(self) -> float:
        vals = np.abs(self.flat[self.sample_mask])
        return float(vals.max()) if vals.size else 0.0

    def evaluate_at(self, P: SpaceTimePoint) -> float:
        """Value at P: exact node lookup, analytic closure, or multilinear interpolation."""
        index = self.dom.locate(P)
        if index is not None and np.isfinite(self.flat[index]):
            return float(self.flat[index])
        if self.analytic is not None:
            return float(np.asarray(self.analytic(np.asarray([P.x]), np.asarray([P.t])))[0])
        return float(self.interpolator()(np.asarray([(P.t,) + P.x]))[0])

    def interpolator(self) -> RegularGridInterpolator:
        """Multilinear interpolant over (t, x1..xn); non-finite nodes take their nearest finite value."""
        values = self.values
        invalid = ~np.isfinite(values)
        if invalid.any():
            _, indices = distance_transform_edt(invalid, return_distances=True, return_indices=True)
            values = values[tuple(indices)]
        grid = (self.dom.times,) + tuple(self.dom.axes)
        return RegularGridInterpolator(grid, values, method="linear", bounds_error=False, fill_value=None)

    def _combine(self, other: "GridFunction", op, name: str) -> "GridFunction":
        if not self.dom.same_grid(other.dom):
            raise InvalidArgumentError("Cannot combine fields defined on different grids.")
        analytic = None
        if self.analytic is not None and other.analytic is not None:
            f, g = self.analytic, other.analytic
            analytic = lambda x, t: op(f(x, t), g(x, t))  # noqa: E731
        return GridFunction(dom=self.dom, values=op(self.values, other.values), analytic=analytic, name=name)

    def __add__(self, other: "GridFunction") -> "GridFunction":
        return self._combine(other, np.add, f"({self.name}+{other.name})")

    def __sub__(self, other: "GridFunction") -> "GridFunction":
        return self._combine(other, np.subtract, f"({self.name}-{other.name})")

    def scaled(self, factor: float) -> "GridFunction":
        analytic = None
        if self.analytic is not None:
            f = self.analytic
            analytic = lambda x, t: factor * f(x, t)  # noqa: E731
        return GridFunction(dom=self.dom, values=factor * self.values, analytic=analytic, name=f"{factor}*{self.name}")

    def __mul__(self, factor: float) -> "GridFunction":
        return self.scaled(float(factor))

    __rmul__ = __mul__
