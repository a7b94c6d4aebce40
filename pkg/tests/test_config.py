"""Tests for key=value config parsing and command validation."""

import pytest

from holdervar.core.config import build_config, load_config, parse_config_text
from holdervar.core.validation import validate_experiment_config
from holdervar.errors import InvalidArgumentError
from holdervar.models import Command


def test_parse_config_text_handles_comments_and_lists():
    text = """
    # unit interval, two levels
    command = norms
    lower = 0
    upper = 1
    levels = 9, 17   # nodes per axis
    epsilons = 0.1,0.01
    """
    raw = parse_config_text(text)
    assert raw["command"] == "norms"
    assert raw["lower"] == [0.0]
    assert raw["levels"] == [9, 17]
    assert raw["epsilons"] == [0.1, 0.01]


def test_parse_config_text_rejects_malformed_lines():
    with pytest.raises(InvalidArgumentError, match="line 2"):
        parse_config_text("command=norms\nlower 0\n")
    with pytest.raises(InvalidArgumentError, match="integer"):
        parse_config_text("levels=9,17.5\n")
    with pytest.raises(InvalidArgumentError, match="decimal"):
        parse_config_text("center=0,x\n")


def test_build_config_aliases_and_command_override():
    """Test that 'lambda' / 'Lambda' map onto the model and the CLI command wins."""
    config = build_config({"command": "norms", "lambda": "0.25", "Lambda": "4"}, command="solve")
    assert config.command == Command.SOLVE
    assert config.lam == pytest.approx(0.25)
    assert config.Lam == pytest.approx(4.0)


def test_build_config_errors():
    with pytest.raises(InvalidArgumentError, match="No command given"):
        build_config({"lower": [0.0]})
    with pytest.raises(InvalidArgumentError, match="Invalid configuration"):
        build_config({"command": "fly"})
    with pytest.raises(InvalidArgumentError, match="Invalid configuration"):
        build_config({"command": "norms", "levels": [17, 9]})


def test_load_config_records_source(tmp_path):
    path = tmp_path / "norms.cfg"
    path.write_text("command=norms\nlower=0\nupper=1\nseed=7\n", encoding="utf-8")
    config = load_config(path)
    assert config.seed == 7
    assert config.source == str(path)

    with pytest.raises(FileNotFoundError):
        load_config(tmp_path / "missing.cfg")


def test_validate_experiment_config():
    """Test the per-command checks run before an experiment."""
    validate_experiment_config(build_config({"command": "norms", "lower": [0.0], "upper": [1.0]}))

    with pytest.raises(InvalidArgumentError, match="'lower' and 'upper'"):
        validate_experiment_config(build_config({"command": "norms"}))
    with pytest.raises(InvalidArgumentError, match="center"):
        validate_experiment_config(build_config({"command": "norms", "shape": "ball"}))
    with pytest.raises(InvalidArgumentError, match="at least 3"):
        validate_experiment_config(
            build_config({"command": "norms", "lower": [0.0], "upper": [1.0], "levels": [2, 5]})
        )
    with pytest.raises(InvalidArgumentError, match="kernel"):
        validate_experiment_config(
            build_config({"command": "kernel-check", "lower": [0.0], "upper": [1.0], "kernel": "gauss"})
        )
