"""Exception hierarchy shared by every axifb module.

All errors derive from ``ValueError`` as well, so call sites that only know
about bad values keep working.
"""

from typing import Iterable, Optional


class WorkbenchError(ValueError):
    """Base class for all axifb errors."""


class DomainError(WorkbenchError):
    """An argument lies outside the domain of a function."""


class InputError(WorkbenchError):
    """Malformed samples or mutually inconsistent parameters."""


class ConstructionError(WorkbenchError):
    """A numerical construction failed one of its own self-checks."""


class StabilityError(WorkbenchError):
    """Inadmissible time step, or an energy increase during a flow."""


class FitError(WorkbenchError):
    """Least-squares fit impossible or ill-conditioned."""


class BlowupError(WorkbenchError):
    """Blow-up rescaling impossible at the current resolution."""


class MountainPassError(WorkbenchError):
    """The minimax level failed to clear both anchor energies."""


class ConfigError(WorkbenchError):
    """Configuration document violates the schema."""

    def __init__(self, message: str, keys: Optional[Iterable[str]] = None):
        self.keys = sorted(keys or [])
        if self.keys:
            message = f"{message}: {', '.join(self.keys)}"
        super().__init__(message)


class StageError(WorkbenchError):
    """A pipeline stage failed; carries the stage tag and the cause."""

    def __init__(self, stage: str, cause: Exception):
        self.stage = stage
        self.cause = cause
        super().__init__(f"[{stage}] {cause}")
