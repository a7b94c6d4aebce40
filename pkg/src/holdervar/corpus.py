"""Built-in smooth test fields shared by the interpolation, mollification and Schauder harnesses."""

import math
from typing import List

import numpy as np

from .exponents import example_exponent
from .geometry import FieldFunction, GridDomain, GridFunction

DEFAULT_CORPUS_SIZE = 10


def example_field(gamma: float, zeta: float) -> FieldFunction:
    """f(x, t) = (|x| + sqrt(t))^{α(x, t)} with the example exponent α = (γ + |x|)(γ + t)."""
    alpha = example_exponent(gamma, zeta)

    def f(x: np.ndarray, t: np.ndarray) -> np.ndarray:
        x = np.atleast_2d(x)
        t = np.atleast_1d(t)
        base = np.abs(x).max(axis=1) + np.sqrt(np.clip(t, 0.0, None))
        return base ** alpha.values(x, t)

    return f


def _constant(value: float) -> FieldFunction:
    return lambda x, t: np.full(np.shape(t), value, dtype=float)


def _linear(weights: np.ndarray, rate: float) -> FieldFunction:
    return lambda x, t: np.atleast_2d(x) @ weights + rate * t


def _quadratic(x, t):
    x = np.atleast_2d(x)
    return (x ** 2).sum(axis=1) + 2.0 * t


def _sine_product(x, t):
    x = np.atleast_2d(x)
    return np.exp(-t) * np.prod(np.sin(math.pi * x), axis=1)


def _gaussian(center: np.ndarray, width: float) -> FieldFunction:
    def f(x, t):
        x = np.atleast_2d(x)
        return np.exp(-(((x - center[None, :]) ** 2).sum(axis=1) + (t - 0.5) ** 2) / width ** 2)

    return f


def _random_trig(rng: np.random.Generator, n: int) -> FieldFunction:
    """Random trigonometric field with three modes; frequencies are small integers."""
    freqs = rng.integers(1, 4, size=(3, n)).astype(float)
    time_freqs = rng.integers(0, 3, size=3).astype(float)
    phases = rng.uniform(0.0, 2 * math.pi, size=3)
    amps = rng.uniform(-1.0, 1.0, size=3)

    def f(x, t):
        x = np.atleast_2d(x)
        arg = x @ freqs.T + np.outer(t, time_freqs) + phases[None, :]
        return np.sin(arg) @ amps

    return f


def builtin_corpus(dom: GridDomain, size: int = DEFAULT_CORPUS_SIZE, seed: int = 0) -> List[GridFunction]:
    """
    Smooth fields sampled on dom: constant, linear, quadratic, sine product, Gaussian bump,
    the example field, then seeded random trigonometric fields up to size.

    The same (size, seed) yields the same closures on every grid, so refinement
    studies compare like with like.
    """
    n = dom.n
    rng = np.random.default_rng(seed)
    lo, hi = dom.bounds
    middle = 0.5 * (np.asarray(lo) + np.asarray(hi))
    named: list[tuple[str, FieldFunction]] = [
        ("constant", _constant(1.5)),
        ("linear", _linear(np.linspace(1.0, 0.5, n), 0.5)),
        ("quadratic", _quadratic),
        ("sine", _sine_product),
        ("gaussian", _gaussian(middle, 0.5)),
        ("example", example_field(0.5, 0.4)),
    ]
    index = 0
    while len(named) < size:
        named.append((f"trig{index}", _random_trig(rng, n)))
        index += 1
    return [GridFunction.from_function(dom, func, name=name) for name, func in named[:size]]
