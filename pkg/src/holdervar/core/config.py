"""Plain-text key=value experiment configuration."""

import logging
from pathlib import Path
from typing import Any, Dict, Optional, Union

from pydantic import ValidationError

from ..errors import InvalidArgumentError
from ..models import Command, ExperimentConfig

logger = logging.getLogger(__name__)

# Keys holding comma-separated decimal lists.
LIST_KEYS = {"lower", "upper", "center", "a", "b", "c", "levels", "epsilons", "deltas"}
INT_LIST_KEYS = {"levels"}

# Config spellings that are not valid Python identifiers on the model.
KEY_ALIASES = {"lambda": "lam", "Lambda": "Lam"}


def _parse_number(key: str, text: str, integer: bool = False) -> Union[int, float]:
    try:
        return int(text) if integer else float(text)
    except ValueError as exc:
        kind = "an integer" if integer else "a decimal literal"
        raise InvalidArgumentError(f"Config key '{key}' expects {kind}, got '{text}'.") from exc


def parse_config_text(text: str) -> Dict[str, Any]:
    """
    Parse key=value lines into a raw dictionary.

    Blank lines and '#' comments are ignored; list keys are split on commas.

    Raises:
        InvalidArgumentError: If a line has no '=' or a value does not parse
    """
    raw: Dict[str, Any] = {}
    for number, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise InvalidArgumentError(f"Config line {number} is not of the form key=value: '{line}'.")
        key, value = (part.strip() for part in line.split("=", 1))
        if key in LIST_KEYS:
            items = [item.strip() for item in value.split(",") if item.strip()]
            raw[key] = [_parse_number(key, item, key in INT_LIST_KEYS) for item in items]
        else:
            raw[key] = value
    return raw


def build_config(raw: Dict[str, Any], command: Optional[Union[str, Command]] = None) -> ExperimentConfig:
    """
    Turn a raw key/value mapping into an ExperimentConfig.

    Args:
        raw: Parsed keys (strings or lists)
        command: Overrides the 'command' key when given

    Raises:
        InvalidArgumentError: If the command is missing/unknown or a field fails validation
    """
    data = {KEY_ALIASES.get(key, key): value for key, value in raw.items()}
    if command is not None:
        data["command"] = command.value if isinstance(command, Command) else command
    if "command" not in data:
        raise InvalidArgumentError(
            f"No command given. Pass one of: {', '.join(c.value for c in Command)}."
        )
    try:
        return ExperimentConfig(**data)
    except ValidationError as exc:
        raise InvalidArgumentError(f"Invalid configuration: {exc.errors()[0]['msg']} ({exc.errors()[0]['loc']}).") from exc


def load_config(path: Union[str, Path], command: Optional[Union[str, Command]] = None) -> ExperimentConfig:
    """
    Load an ExperimentConfig from a key=value file.

    Args:
        path: Config file path
        command: CLI command; overrides a 'command' key in the file

    Returns:
        Validated ExperimentConfig with 'source' set to the file path

    Raises:
        FileNotFoundError: If the file does not exist
        InvalidArgumentError: If the file does not parse
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Config file not found: {path}")
    raw = parse_config_text(path.read_text(encoding="utf-8"))
    raw.setdefault("source", str(path))
    config = build_config(raw, command)
    logger.info(f"load_config: {config.command.value} from {path} ({len(raw)} keys)")
    return config
