"""Public API for holdervar.

This module provides the main interface for:
- Loading experiment configs (key=value files) with CLI-style overrides
- Running an experiment command
- Writing its CSV/JSON/SVG report
"""

import logging
from pathlib import Path
from typing import Iterable, List, Optional, Sequence, Union

from .core.config import build_config, load_config
from .errors import InvalidArgumentError
from .experiments.runner import execute_experiment
from .models import Command, ExperimentConfig, ExperimentResult
from .paths import get_run_path
from .report import FORMATS, emit_report

logger = logging.getLogger(__name__)


def load_experiment(
    path: Union[str, Path],
    command: Optional[Union[str, Command]] = None,
    seed: Optional[int] = None,
    levels: Optional[Sequence[int]] = None,
    out_dir: Optional[Union[str, Path]] = None,
) -> ExperimentConfig:
    """
    Load a config file and apply command-line overrides.

    Args:
        path: key=value config file
        command: Command to run (overrides the file's 'command' key)
        seed: Overrides 'seed'
        levels: Overrides 'levels'
        out_dir: Output directory recorded on the config

    Returns:
        Validated ExperimentConfig

    Raises:
        FileNotFoundError: If the config file does not exist
        InvalidArgumentError: If the config or an override is invalid
    """
    config = load_config(path, command)
    overrides = {}
    if seed is not None:
        overrides["seed"] = seed
    if levels is not None:
        overrides["levels"] = list(levels)
    if out_dir is not None:
        overrides["out_dir"] = str(out_dir)
    if not overrides:
        return config
    return build_config({**config.model_dump(mode="json"), **overrides})


def default_out_dir(config: ExperimentConfig) -> Path:
    """data/runs/<command>-seed<seed> under the project root, unless the config names a directory."""
    if config.out_dir:
        return Path(config.out_dir)
    return get_run_path(f"{config.command.value}-seed{config.seed}")


def run_experiment(
    config: ExperimentConfig,
    out_dir: Optional[Union[str, Path]] = None,
    write: bool = True,
    formats: Iterable[str] = FORMATS,
) -> tuple[ExperimentResult, List[Path]]:
    """
    Run one experiment command and, unless write is False, emit its report.

    Args:
        config: Experiment configuration
        out_dir: Report directory (defaults to config.out_dir, then data/runs/<command>-seed<seed>)
        write: Write the report files
        formats: Report formats to write

    Returns:
        (ExperimentResult, written file paths)

    Raises:
        InvalidArgumentError: If the config is invalid for its command
        OSError: If the report directory is not writable
    """
    if not isinstance(config, ExperimentConfig):
        raise InvalidArgumentError(f"run_experiment expects an ExperimentConfig, got {type(config).__name__}.")
    result = execute_experiment(config)
    if not write:
        return result, []
    target = Path(out_dir) if out_dir is not None else default_out_dir(config)
    written = emit_report(result, target, formats)
    logger.info(f"run_experiment: {config.command.value} wrote {len(written)} file(s) to {target}")
    return result, written
