"""Core modules for netsis: configuration, errors, events, and the trajectory store."""

from netsis.core.config import DEFAULTS, PARAMETER_PRESETS
from netsis.core.data_manager import TrajectoryStore
from netsis.core.errors import NetsisError
from netsis.core.events import EventBus, EventType

__all__ = [
    "DEFAULTS",
    "PARAMETER_PRESETS",
    "NetsisError",
    "EventBus",
    "EventType",
    "TrajectoryStore",
]
