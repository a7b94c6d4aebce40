"""Core utilities for configuration parsing and validation."""

from .config import build_config, load_config, parse_config_text
from .validation import check_ellipticity, validate_experiment_config, validate_problem

__all__ = [
    "build_config",
    "load_config",
    "parse_config_text",
    "check_ellipticity",
    "validate_experiment_config",
    "validate_problem",
]
