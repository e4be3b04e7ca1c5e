"""Event bus for experiment pipeline progress.

The experiment runner publishes one event per pipeline stage. The CLI (or a
test) subscribes to print progress without the runner knowing who listens.
"""

import logging
from collections import defaultdict
from enum import Enum
from typing import Any, Callable

logger = logging.getLogger(__name__)

Listener = Callable[..., Any]


class EventType(str, Enum):
    """Pipeline events, in the order a run emits them."""

    GRAPH_LOADED = "graph_loaded"  # graph read/generated, SCC extracted
    MODEL_VALIDATED = "model_validated"  # Assumptions 1-3 checked
    REGIME_CLASSIFIED = "regime_classified"
    EQUILIBRIUM_SOLVED = "equilibrium_solved"
    TRAJECTORY_SIMULATED = "trajectory_simulated"
    DIAGNOSTICS_DONE = "diagnostics_done"
    RUN_FINISHED = "run_finished"  # emitted with status and error list
    CELL_FINISHED = "cell_finished"  # sweep only


class EventBus:
    """Stage listeners for one run or one sweep.

    Listeners are called in subscription order with the stage payload as
    keyword arguments. A bus is not shared between processes; each sweep
    worker runs its cells on a private bus.
    """

    def __init__(self):
        self._listeners: defaultdict[EventType, list[Listener]] = defaultdict(list)

    def subscribe(self, event: EventType | str, listener: Listener) -> Listener:
        """Register a listener; strings are accepted as EventType values.

        Raises:
            ValueError: Unknown event name
        """
        self._listeners[EventType(event)].append(listener)
        return listener

    def emit(self, event: EventType, **payload) -> None:
        """Call every listener of an event.

        A listener that raises is logged and skipped; the pipeline goes on.
        """
        for listener in self._listeners.get(EventType(event), ()):
            try:
                listener(**payload)
            except Exception:
                logger.exception("listener for %s failed", EventType(event).value)
