"""Heat kernels G(x, t; y, s), defined for s > t, and their analytic derivatives.

    G(x, t; y, s) = (4π(s - t))^{-n/2} exp(-|x - y|² / (4(s - t)))

Every call site uses this orientation: (x, t) is the source point and (y, s)
the later point. Derivatives are taken with respect to (y, s) by default and
with respect to (x, t) via wrt="xt", using G = G(x - y, s - t).

Derivatives come from a per-axis Hermite form. With u = (x - y)/(2√τ),
    ∂_y^m g = (2√τ)^{-m} H_m(u) g,   ∂_s = Δ_y,
so D_s^k D_y^j G expands Δ^k as Σ_{|m|=k} k!/m! Π ∂_i^{2m_i}.
"""

import itertools
import math
from enum import Enum
from functools import cached_property
from typing import Optional, Sequence, Union

import numpy as np
from numpy.polynomial import hermite, polynomial
from pydantic import BaseModel, model_validator

from .errors import InvalidArgumentError, TimeOrderingError, UnsupportedOrderError
from .models import DerivativeBoundReport

MAX_ORDER = 4
UNDERFLOW_ARG = -700.0
BOUND_EXP_DENOMINATOR = 5.0

# Physicists' Hermite polynomials H_0..H_8 in power-basis coefficients.
HERMITE_TABLE = [hermite.herm2poly([0] * m + [1]) for m in range(2 * MAX_ORDER + 1)]

MultiIndex = Union[int, Sequence[int]]


class KernelKind(str, Enum):
    STANDARD = "standard"
    REFLECTED = "reflected"
    ANISOTROPIC = "anisotropic"


class KernelSpec(BaseModel):
    """
    Which heat kernel to evaluate.

    - standard: G
    - reflected: Ḡ = G(x, t; y, s) - G(x, t; y*, s), y* = (y_1, ..., y_{n-1}, 2d̄ - y_n)
    - anisotropic: det(A)^{1/2} (2√π)^{-n} (s-t)^{-n/2} exp(-(x-y)ᵀA(x-y) / (4(s-t))),
      which solves K_s = Σ (A⁻¹)_ij ∂_{y_i} ∂_{y_j} K
    """
    model_config = {"frozen": True}

    kind: KernelKind = KernelKind.STANDARD
    n: int
    dbar: Optional[float] = None
    A: Optional[tuple[tuple[float, ...], ...]] = None
    lam: Optional[float] = None
    Lam: Optional[float] = None

    @model_validator(mode="after")
    def _validate(self) -> "KernelSpec":
        if self.n < 1:
            raise InvalidArgumentError(f"Kernel dimension must be >= 1, got n={self.n}.")
        if self.kind == KernelKind.REFLECTED and self.dbar is None:
            raise InvalidArgumentError("Reflected kernels require the reflection height 'dbar'.")
        if self.kind == KernelKind.ANISOTROPIC:
            if self.A is None:
                raise InvalidArgumentError("Anisotropic kernels require the matrix 'A'.")
            A = np.asarray(self.A, dtype=float)
            if A.shape != (self.n, self.n):
                raise InvalidArgumentError(f"Matrix A must be {self.n}x{self.n}, got shape {A.shape}.")
            if not np.allclose(A, A.T, rtol=0, atol=1e-12 * max(1.0, np.abs(A).max())):
                raise InvalidArgumentError("Matrix A must be symmetric.")
            eig = np.linalg.eigvalsh(A)
            lam = self.lam if self.lam is not None else 0.0
            if eig.min() <= 0 or eig.min() < lam - 1e-12:
                raise InvalidArgumentError(
                    f"Matrix A must be positive definite with eigenvalues >= λ={lam}; smallest is {eig.min():.6g}."
                )
            if self.Lam is not None and eig.max() > self.Lam + 1e-12:
                raise InvalidArgumentError(f"Matrix A has eigenvalue {eig.max():.6g} above Λ={self.Lam}.")
        return self

    @classmethod
    def standard(cls, n: int) -> "KernelSpec":
        return cls(kind=KernelKind.STANDARD, n=n)

    @classmethod
    def reflected(cls, n: int, dbar: float) -> "KernelSpec":
        return cls(kind=KernelKind.REFLECTED, n=n, dbar=float(dbar))

    @classmethod
    def anisotropic(cls, A, lam: Optional[float] = None, Lam: Optional[float] = None) -> "KernelSpec":
        A = np.atleast_2d(np.asarray(A, dtype=float))
        return cls(
            kind=KernelKind.ANISOTROPIC, n=A.shape[0],
            A=tuple(tuple(float(v) for v in row) for row in A), lam=lam, Lam=Lam,
        )

    @cached_property
    def matrix(self) -> np.ndarray:
        return np.asarray(self.A, dtype=float) if self.A is not None else np.eye(self.n)

    @cached_property
    def cholesky(self) -> np.ndarray:
        return np.linalg.cholesky(self.matrix)

    @cached_property
    def sqrt_det(self) -> float:
        return float(np.sqrt(np.linalg.det(self.matrix)))


def anisotropic_for_operator(a) -> KernelSpec:
    """Kernel solving K_s = Σ a_ij ∂_{y_i} ∂_{y_j} K for a constant SPD coefficient matrix a."""
    a = np.atleast_2d(np.asarray(a, dtype=float))
    return KernelSpec.anisotropic(np.linalg.inv(a))


def _normalize_order(k: int, j: MultiIndex, n: int) -> tuple[int, tuple[int, ...]]:
    if np.isscalar(j):
        j = (int(j),) + (0,) * (n - 1)
    j = tuple(int(v) for v in j)
    if len(j) != n:
        raise InvalidArgumentError(f"Multi-index {j} does not match dimension n={n}.")
    if k < 0 or any(v < 0 for v in j):
        raise InvalidArgumentError(f"Derivative orders must be nonnegative, got k={k}, j={j}.")
    if k + sum(j) > MAX_ORDER:
        raise UnsupportedOrderError(
            f"Derivative order k + |j| = {k + sum(j)} exceeds the supported maximum {MAX_ORDER}."
        )
    return k, j


def _batch(x, t, y, s, n: int):
    """Broadcast inputs to x, y: (N, n) and t, s: (N,)."""
    scalar = np.ndim(t) == 0 and np.ndim(s) == 0 and np.ndim(x) <= 1 and np.ndim(y) <= 1
    x = np.asarray(x, dtype=float).reshape(-1, n)
    y = np.asarray(y, dtype=float).reshape(-1, n)
    t = np.asarray(t, dtype=float).reshape(-1)
    s = np.asarray(s, dtype=float).reshape(-1)
    N = max(x.shape[0], y.shape[0], t.size, s.size)
    x = np.broadcast_to(x, (N, n))
    y = np.broadcast_to(y, (N, n))
    t = np.broadcast_to(t, (N,))
    s = np.broadcast_to(s, (N,))
    scalar = scalar and N == 1
    tau = s - t
    if np.any(tau <= 0):
        raise TimeOrderingError(
            f"Heat kernels are defined for s > t only; got s - t = {float(tau.min()):.6g}."
        )
    return x, t, y, s, tau, scalar


def _compositions(k: int, n: int):
    """Multi-indices m with |m| = k and their multinomial weights k!/m!."""
    for m in itertools.product(range(k + 1), repeat=n):
        if sum(m) == k:
            yield m, math.factorial(k) // math.prod(math.factorial(v) for v in m)


def _separable_derivative(w: np.ndarray, tau: np.ndarray, k: int, j: tuple[int, ...]) -> np.ndarray:
    """D_s^k D_y^j of (4πτ)^{-n/2} exp(-|w|²/(4τ)) with w playing the role of x - y."""
    n = w.shape[1]
    root = 2.0 * np.sqrt(tau)
    u = w / root[:, None]
    arg = -np.sum(u * u, axis=1)
    with np.errstate(under="ignore"):
        base = np.where(arg < UNDERFLOW_ARG, 0.0, (4.0 * np.pi * tau) ** (-n / 2) * np.exp(np.maximum(arg, UNDERFLOW_ARG)))
    total = np.zeros_like(tau)
    for m, weight in _compositions(k, n):
        term = np.full_like(tau, float(weight))
        for axis in range(n):
            order = j[axis] + 2 * m[axis]
            if order:
                term = term * root ** (-order) * polynomial.polyval(u[:, axis], HERMITE_TABLE[order])
        total = total + term
    return total * base


def _standard_derivative(x, y, tau, k, j):
    return _separable_derivative(x - y, tau, k, j)


def _anisotropic_derivative(spec: KernelSpec, x, y, tau, k, j):
    L = spec.cholesky
    w = (x - y) @ L
    axes = [a for a, count in enumerate(j) for _ in range(count)]
    if not axes:
        return spec.sqrt_det * _separable_derivative(w, tau, k, j)
    total = np.zeros_like(tau)
    for combo in itertools.product(range(spec.n), repeat=len(axes)):
        coeff = math.prod(L[a, i] for a, i in zip(axes, combo))
        if coeff == 0.0:
            continue
        counts = tuple(combo.count(i) for i in range(spec.n))
        total = total + coeff * _separable_derivative(w, tau, k, counts)
    return spec.sqrt_det * total


def _reflect(spec: KernelSpec, y: np.ndarray) -> np.ndarray:
    y_star = np.array(y, copy=True)
    y_star[:, -1] = 2.0 * spec.dbar - y_star[:, -1]
    return y_star


def eval_kernel_derivative(
    spec: KernelSpec,
    k: int,
    j: MultiIndex,
    x,
    t,
    y,
    s,
    wrt: str = "ys",
):
    """
    Analytic D^k D^j of the kernel, with respect to (y, s) or (x, t).

    Args:
        spec: Kernel selection
        k: Time-derivative order
        j: Space multi-index (an int means the first axis)
        x, t, y, s: Points with s > t; arrays broadcast along a leading axis
        wrt: "ys" (default) or "xt"

    Returns:
        float for scalar inputs, otherwise an array of shape (N,)

    Raises:
        TimeOrderingError: If any s <= t
        UnsupportedOrderError: If k + |j| > 4
    """
    if wrt not in ("ys", "xt"):
        raise InvalidArgumentError(f"wrt must be 'ys' or 'xt', got '{wrt}'.")
    k, j = _normalize_order(k, j, spec.n)
    x, t, y, s, tau, scalar = _batch(x, t, y, s, spec.n)
    sign = (-1.0) ** (k + sum(j)) if wrt == "xt" else 1.0

    if spec.kind == KernelKind.STANDARD:
        value = sign * _standard_derivative(x, y, tau, k, j)
    elif spec.kind == KernelKind.ANISOTROPIC:
        value = sign * _anisotropic_derivative(spec, x, y, tau, k, j)
    else:
        direct = _standard_derivative(x, y, tau, k, j)
        image = _standard_derivative(x, _reflect(spec, y), tau, k, j)
        if wrt == "ys":
            value = direct - (-1.0) ** j[-1] * image
        else:
            value = sign * (direct - image)
    return float(value[0]) if scalar else value


def eval_kernel(spec: KernelSpec, x, t, y, s):
    """
    Kernel value G(x, t; y, s) for s > t.

    Raises:
        TimeOrderingError: If any s <= t
    """
    return eval_kernel_derivative(spec, 0, 0, x, t, y, s)


class KernelSample(BaseModel):
    """Deterministic sample points (x, t, y, s) with s > t."""
    model_config = {"arbitrary_types_allowed": True}

    x: np.ndarray
    t: np.ndarray
    y: np.ndarray
    s: np.ndarray

    @property
    def size(self) -> int:
        return self.t.size


def kernel_sample_lattice(
    n: int,
    density: int = 8,
    dbar: Optional[float] = None,
    radius: float = 3.0,
) -> KernelSample:
    """
    Lattice of samples in scaled variables ξ = (x - y)/(2√τ) ∈ [-radius, radius]^n.

    density sets 2·density + 1 lattice points per axis (nested under doubling) and
    density time gaps τ ∈ [10⁻², 1]. With dbar, y_n is kept strictly below dbar.
    """
    if density < 1:
        raise InvalidArgumentError(f"Sample density must be >= 1, got {density}.")
    xi_axis = np.linspace(-radius, radius, 2 * density + 1)
    xi = np.stack(np.meshgrid(*([xi_axis] * n), indexing="ij"), axis=-1).reshape(-1, n)
    taus = np.logspace(-2, 0, density)
    offsets = np.linspace(0.05, 2.0, density)

    xs, ys, ss = [], [], []
    for index, tau in enumerate(taus):
        y = np.zeros((xi.shape[0], n))
        if dbar is not None:
            y[:, -1] = dbar - 2.0 * np.sqrt(tau) * offsets[index]
        xs.append(y + 2.0 * np.sqrt(tau) * xi)
        ys.append(y)
        ss.append(np.full(xi.shape[0], tau))
    s = np.concatenate(ss)
    return KernelSample(x=np.concatenate(xs), t=np.zeros(s.size), y=np.concatenate(ys), s=s)


def verify_derivative_bound(
    spec: KernelSpec,
    k: int,
    j: MultiIndex,
    sample: KernelSample,
) -> DerivativeBoundReport:
    """
    Measured constant sup |D_s^k D_y^j G| (s-t)^{(n+2k+|j|)/2} exp(|x-y|²/(5(s-t))) over the sample.

    Raises:
        UnsupportedOrderError: If k + |j| > 4
        TimeOrderingError: If a sample has s <= t
    """
    k, j = _normalize_order(k, j, spec.n)
    values = np.abs(eval_kernel_derivative(spec, k, j, sample.x, sample.t, sample.y, sample.s))
    tau = sample.s - sample.t
    power = (spec.n + 2 * k + sum(j)) / 2.0
    growth = np.sum((sample.x - sample.y) ** 2, axis=1) / (BOUND_EXP_DENOMINATOR * tau)
    scaled = np.where(values == 0.0, 0.0, values * tau ** power * np.exp(np.minimum(growth, -UNDERFLOW_ARG)))
    argmax = int(np.argmax(scaled)) if scaled.size else -1
    return DerivativeBoundReport(
        kind=spec.kind.value, k=k, j=list(j),
        value=float(scaled[argmax]) if scaled.size else 0.0,
        samples=int(scaled.size), argmax=argmax,
    )


def heat_residuals(spec: KernelSpec, x, t, y, s) -> tuple[np.ndarray, np.ndarray]:
    """(K_s - Σ B_ij ∂_{y_i}∂_{y_j} K, K_t + Σ B_ij ∂_{x_i}∂_{x_j} K) with B = I, or A⁻¹ for anisotropic kernels."""
    B = np.linalg.inv(spec.matrix) if spec.kind == KernelKind.ANISOTROPIC else np.eye(spec.n)
    forward = np.asarray(eval_kernel_derivative(spec, 1, 0, x, t, y, s), dtype=float)
    backward = np.asarray(eval_kernel_derivative(spec, 1, 0, x, t, y, s, wrt="xt"), dtype=float)
    for a in range(spec.n):
        for b in range(spec.n):
            if B[a, b] == 0.0:
                continue
            multi = [0] * spec.n
            multi[a] += 1
            multi[b] += 1
            forward = forward - B[a, b] * np.asarray(eval_kernel_derivative(spec, 0, multi, x, t, y, s))
            backward = backward + B[a, b] * np.asarray(eval_kernel_derivative(spec, 0, multi, x, t, y, s, wrt="xt"))
    return forward, backward


def kernel_1d(z: np.ndarray, tau: float, order: int = 0) -> np.ndarray:
    """One-dimensional factor ∂_y^order g(z, τ), z = x - y, of the separable heat kernel."""
    z = np.asarray(z, dtype=float)
    if order > 2 * MAX_ORDER:
        raise UnsupportedOrderError(f"One-dimensional kernel order {order} exceeds {2 * MAX_ORDER}.")
    flat = z.reshape(-1, 1)
    values = _separable_derivative(flat, np.full(flat.shape[0], float(tau)), 0, (order,))
    return values.reshape(z.shape)
