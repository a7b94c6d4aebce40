"""Tests for project-root and run-directory resolution."""

import pytest

from holdervar.paths import get_project_root, get_run_path, sanitize_run_name


def test_project_root_holds_the_manifest():
    assert (get_project_root() / "pyproject.toml").exists()


def test_run_path_lives_under_data_runs():
    path = get_run_path("norms-seed0")
    assert path.parent == get_project_root() / "data" / "runs"
    assert path.name == "norms-seed0"


def test_sanitize_run_name_strips_path_characters():
    assert sanitize_run_name("../solve seed/1") == "solveseed1"
    with pytest.raises(ValueError, match="empty"):
        sanitize_run_name("  ")
    with pytest.raises(ValueError, match="alphanumeric"):
        sanitize_run_name("../")
