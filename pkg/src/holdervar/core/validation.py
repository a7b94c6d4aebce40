"""Config and problem validation utilities."""

import math

import numpy as np

from ..errors import InvalidArgumentError, PreconditionError
from ..models import Command, ExperimentConfig, ParabolicProblem
from ..norms import norm_0_alpha

ELLIPTICITY_DIRECTIONS = 64


def validate_experiment_config(config: ExperimentConfig) -> None:
    """
    Validate that an ExperimentConfig has the fields its command needs.

    Args:
        config: Parsed experiment configuration

    Raises:
        InvalidArgumentError: If required fields are missing or out of range
    """
    if config.shape not in ("box", "ball"):
        raise InvalidArgumentError(f"shape must be 'box' or 'ball', got '{config.shape}'.")

    if config.shape == "box":
        if config.lower is None or config.upper is None:
            raise InvalidArgumentError(
                "Box domains need 'lower' and 'upper' (comma-separated corners, e.g. lower=0,0 upper=1,1)."
            )
        if len(config.lower) != len(config.upper):
            raise InvalidArgumentError(
                f"'lower' has {len(config.lower)} coordinates but 'upper' has {len(config.upper)}."
            )
    elif config.command != Command.EXAMPLE and (config.center is None or config.radius is None):
        raise InvalidArgumentError("Ball domains need 'center' and 'radius' (e.g. center=0,0 radius=0.4).")

    if config.form not in ("constant", "example"):
        raise InvalidArgumentError(f"form must be 'constant' or 'example', got '{config.form}'.")
    if config.operator not in ("heat", "constant", "example", "polynomial"):
        raise InvalidArgumentError(
            f"operator must be one of heat, constant, example, polynomial; got '{config.operator}'."
        )
    if config.solution not in ("sine", "polynomial", "zero", "example"):
        raise InvalidArgumentError(
            f"solution must be one of sine, polynomial, zero, example; got '{config.solution}'."
        )
    if config.kernel not in ("standard", "reflected", "anisotropic"):
        raise InvalidArgumentError(
            f"kernel must be one of standard, reflected, anisotropic; got '{config.kernel}'."
        )
    if config.sigma <= 0:
        raise InvalidArgumentError(f"sigma must be positive, got {config.sigma}.")
    if any(eps <= 0 for eps in config.epsilons):
        raise InvalidArgumentError(f"epsilons must all be positive, got {config.epsilons}.")
    if config.n_max < 2:
        raise InvalidArgumentError(f"n_max must be at least 2, got {config.n_max}.")
    if min(config.levels) < 3:
        raise InvalidArgumentError(
            f"Refinement levels are nodes per axis and must be at least 3, got {config.levels}."
        )


def _sample_directions(n: int, count: int = ELLIPTICITY_DIRECTIONS, seed: int = 0) -> np.ndarray:
    """Unit vectors: the coordinate axes, the diagonals of each axis pair, then seeded random directions."""
    rows = [np.eye(n)]
    for i in range(n):
        for j in range(i + 1, n):
            for sign in (1.0, -1.0):
                v = np.zeros(n)
                v[i], v[j] = 1.0, sign
                rows.append(v[None, :] / math.sqrt(2.0))
    rng = np.random.default_rng(seed)
    extra = rng.normal(size=(count, n))
    rows.append(extra / np.linalg.norm(extra, axis=1, keepdims=True))
    return np.vstack(rows)


def check_ellipticity(problem: ParabolicProblem) -> float:
    """
    Verify λ|ζ|² <= a^{ij} ζ_i ζ_j on a sampled set of unit vectors ζ at every in-domain node.

    Returns:
        The smallest sampled quadratic form value

    Raises:
        PreconditionError: If the ellipticity bound fails somewhere
    """
    dom = problem.dom
    a = problem.a_values()[:, :, dom.in_domain_mask]  # (n, n, M)
    zeta = _sample_directions(dom.n)
    forms = np.einsum("ki,ijm,kj->km", zeta, a, zeta)
    smallest = float(forms.min())
    if smallest < problem.lam * (1.0 - 1e-12):
        raise PreconditionError(
            f"Ellipticity fails: min a^ij ζ_i ζ_j = {smallest:.6g} < λ = {problem.lam:g} on the sampled directions. "
            "Lower 'lambda' or adjust the coefficients."
        )
    return smallest


def validate_problem(problem: ParabolicProblem, alpha=None, existence: bool = False) -> None:
    """
    Check the hypotheses of the Schauder estimates on a problem.

    Args:
        problem: Problem to validate
        alpha: Exponent for the coefficient Hölder norms (skipped when None)
        existence: Also require c >= 0

    Raises:
        PreconditionError: If ellipticity, the Λ bound or c >= 0 fails
    """
    check_ellipticity(problem)

    if alpha is not None:
        coefficients = [aij for row in problem.a for aij in row] + list(problem.b) + [problem.c]
        for coefficient in coefficients:
            value = norm_0_alpha(coefficient, alpha).value
            if value > problem.Lam:
                raise PreconditionError(
                    f"Coefficient '{coefficient.name}' has |·|_0,α = {value:.6g} > Λ = {problem.Lam:g}. "
                    "Raise 'Lambda' or use smoother coefficients."
                )

    if existence:
        c_min = float(problem.c.values[problem.dom.in_domain_mask].min())
        if c_min < 0:
            raise PreconditionError(f"Existence mode needs c >= 0, but min c = {c_min:.6g}.")
