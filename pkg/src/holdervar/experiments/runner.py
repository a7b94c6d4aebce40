"""Experiment orchestration - routes a config to the command that runs it."""

from typing import Callable, Dict

from ..core.validation import validate_experiment_config
from ..models import Command, ExperimentConfig, ExperimentResult
from .example import run_example
from .interpolation import run_interp
from .kernel_check import run_kernel_check
from .mollify_check import run_mollify_check
from .norms_check import run_norms
from .potential_check import run_potential
from .schauder_sweep import run_schauder
from .solve import run_solve

COMMANDS: Dict[Command, Callable[[ExperimentConfig], ExperimentResult]] = {
    Command.NORMS: run_norms,
    Command.KERNEL_CHECK: run_kernel_check,
    Command.POTENTIAL: run_potential,
    Command.SOLVE: run_solve,
    Command.SCHAUDER: run_schauder,
    Command.MOLLIFY_CHECK: run_mollify_check,
    Command.INTERP_CHECK: run_interp,
    Command.EXAMPLE: run_example,
}


def execute_experiment(config: ExperimentConfig) -> ExperimentResult:
    """
    Run the experiment named by config.command.

    Every command is a pure function of the config (seed included), so reruns
    reproduce their tables exactly.

    Args:
        config: Validated or raw experiment configuration

    Returns:
        ExperimentResult with tables, summary, witnesses and plot curves

    Raises:
        InvalidArgumentError: If the config is incomplete or a parameter is out of range
    """
    validate_experiment_config(config)
    return COMMANDS[config.command](config)
