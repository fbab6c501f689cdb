"""Exception types raised across the package."""
from __future__ import annotations

from typing import Any, Sequence


class StatError(Exception):
    """Base class for all package errors."""


class ConfigError(StatError, ValueError):
    def __init__(self, field: str, value: Any, reason: str) -> None:
        self.field = field
        self.value = value
        super().__init__(f"invalid parameter {field}={value!r}: {reason}")


class UnknownPresetError(ConfigError):
    def __init__(self, name: str, valid: Sequence[str]) -> None:
        self.valid = list(valid)
        StatError.__init__(self, f"unknown preset {name!r}; valid presets: {', '.join(valid)}")
        self.field = "preset"
        self.value = name


class PlacementError(StatError, ValueError):
    """The grid has fewer free cells than tasks to place."""


class InvalidActionError(StatError, ValueError):
    def __init__(self, agent: int | None, action: Any, reason: str = "masked action") -> None:
        self.agent = agent
        self.action = action
        if agent is None:
            super().__init__(reason)
        else:
            super().__init__(f"agent {agent}: invalid action {action!r} ({reason})")


class EpisodeOverError(StatError, RuntimeError):
    """``step`` was called on a terminal state."""


class AllocationError(StatError, ValueError):
    """A selection targeted a task that is not available."""


class DegenerateVarianceError(StatError, ValueError):
    """Both samples are constant and equal, so the t statistic is undefined."""
