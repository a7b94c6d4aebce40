"""One module per CLI command, dispatched by runner.execute_experiment."""

from .example import optimality_probe, run_example
from .interpolation import run_interp, run_interp_check
from .runner import COMMANDS, execute_experiment

__all__ = [
    "COMMANDS",
    "execute_experiment",
    "optimality_probe",
    "run_example",
    "run_interp",
    "run_interp_check",
]
