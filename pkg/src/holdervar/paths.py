"""Path utilities for holdervar.

Resolves the project root and the default run directories so experiment
reports land in the same place regardless of where the CLI is invoked from.
"""

import re
from pathlib import Path


def get_project_root() -> Path:
    """
    Get the project root directory (where data/ lives).

    Returns:
        Path to the directory holding pyproject.toml

    Raises:
        RuntimeError: If the project root cannot be found
    """
    current = Path(__file__).resolve().parent

    # Search upward for the project root (max 10 levels)
    for _ in range(10):
        if (current / "pyproject.toml").exists():
            return current
        parent = current.parent
        if parent == current:
            break
        current = parent

    raise RuntimeError(
        "Could not find project root directory. "
        "Expected to find 'pyproject.toml' in the project root. "
        f"Searched from {Path(__file__).resolve()} upward."
    )


def sanitize_run_name(run_name: str) -> str:
    """
    Strip a run name down to letters, digits, underscores and hyphens.

    Raises:
        ValueError: If the name is empty or has no usable characters
    """
    if not run_name or not run_name.strip():
        raise ValueError("Run name cannot be empty")

    # Only allow alphanumeric, underscore, and hyphen (dots and slashes are removed)
    sanitized = re.sub(r"[^a-zA-Z0-9_\-]", "", run_name).strip("_-")
    if not sanitized:
        raise ValueError(
            f"Invalid run name: '{run_name}'. "
            "Run names must contain at least one alphanumeric character."
        )
    return sanitized


def get_run_path(run_name: str) -> Path:
    """
    Default output directory for a run: {project_root}/data/runs/{run_name}.

    Raises:
        ValueError: If the run name is empty or invalid
    """
    return get_project_root() / "data" / "runs" / sanitize_run_name(run_name)
