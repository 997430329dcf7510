"""Utility functions and helpers for axifb."""

import logging
from pathlib import Path
from typing import Any, Dict, Optional, Union

import yaml
from rich.console import Console
from rich.logging import RichHandler


def setup_logging(verbose: bool = False, console: Optional[Console] = None) -> logging.Logger:
    """Route the ``axifb`` loggers through a rich handler.

    Args:
        verbose: DEBUG instead of INFO
        console: Console to log to (stderr by default)

    Returns:
        The package logger
    """
    logger = logging.getLogger("axifb")
    logger.handlers.clear()
    handler = RichHandler(
        console=console or Console(stderr=True),
        show_path=False,
        rich_tracebacks=True,
    )
    handler.setFormatter(logging.Formatter("%(message)s", datefmt="[%X]"))
    logger.addHandler(handler)
    logger.setLevel(logging.DEBUG if verbose else logging.INFO)
    logger.propagate = False
    return logger


def ensure_dir(directory: Union[str, Path]) -> Path:
    """Ensure a directory exists."""
    path = Path(directory)
    path.mkdir(parents=True, exist_ok=True)
    return path


def normalize_path(path: Union[str, Path]) -> Path:
    """Normalize a path to an absolute Path object."""
    return Path(path).expanduser().resolve()


def load_yaml(path: Union[str, Path]) -> Any:
    """Parse a YAML (or JSON) document; an empty file reads as ``{}``."""
    with open(path, "r") as f:
        return yaml.safe_load(f) or {}


def save_yaml(data: Dict[str, Any], path: Union[str, Path]) -> Path:
    path = Path(path)
    ensure_dir(path.parent)
    with open(path, "w") as f:
        yaml.safe_dump(data, f, default_flow_style=False, sort_keys=False)
    return path
