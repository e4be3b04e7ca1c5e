"""Trajectory simulation."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import Enum

import numpy as np
import pandas as pd

from netsis.core.config import DEFAULTS
from netsis.model.sis_model import SisModel, advance, check_state

logger = logging.getLogger(__name__)


class StopReason(str, Enum):
    HORIZON = "horizon"
    CONVERGED = "converged"


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Recorded states x(0), ..., x(K) of one simulation run.

    Attributes:
        states: (K+1) x n array, row k is x(k)
        stop_reason: Why the run ended
        stop_tol: Early-stopping tolerance used (0 = disabled)
        fingerprint: Model fingerprint the trajectory was produced with
    """

    states: np.ndarray
    stop_reason: StopReason = StopReason.HORIZON
    stop_tol: float = 0.0
    fingerprint: str = ""

    def __post_init__(self):
        states = np.array(self.states, dtype=np.float64)
        if states.ndim != 2:
            raise ValueError("states must be a 2-d array (steps x nodes)")
        states.setflags(write=False)
        object.__setattr__(self, "states", states)

    def __len__(self) -> int:
        return self.states.shape[0]

    @property
    def n(self) -> int:
        return self.states.shape[1]

    @property
    def steps(self) -> int:
        """Number of steps taken (K)."""
        return self.states.shape[0] - 1

    @property
    def initial(self) -> np.ndarray:
        return self.states[0]

    @property
    def final(self) -> np.ndarray:
        return self.states[-1]


def simulate(
    m: SisModel,
    x0: np.ndarray,
    horizon: int,
    stop_tol: float = DEFAULTS.STOP_TOL,
) -> Trajectory:
    """Iterate the model from x0.

    Stops at k = horizon, or as soon as ||x(k+1) - x(k)||_inf < stop_tol
    (stop_tol = 0 disables early stopping). Every state is recorded.

    Args:
        m: Validated model
        x0: Initial state in [0, 1]^N
        horizon: Maximum number of steps
        stop_tol: Early-stopping tolerance (>= 0)

    Returns:
        Trajectory of length (steps + 1)

    Raises:
        StateOutOfRange: x0 is not in [0, 1]^N
    """
    if horizon < 0:
        raise ValueError(f"horizon must be >= 0, got {horizon}")
    if stop_tol < 0:
        raise ValueError(f"stop_tol must be >= 0, got {stop_tol}")

    x = check_state(x0, m.n).copy()
    states = [x]
    reason = StopReason.HORIZON
    for _ in range(horizon):
        nxt = advance(m, x)
        states.append(nxt)
        if stop_tol > 0 and np.max(np.abs(nxt - x)) < stop_tol:
            reason = StopReason.CONVERGED
            break
        x = nxt

    logger.debug("simulated %d steps (%s)", len(states) - 1, reason.value)
    return Trajectory(np.vstack(states), reason, float(stop_tol), m.fingerprint())


def trajectory_frame(traj: Trajectory) -> pd.DataFrame:
    """Trajectory as a DataFrame with columns k, x_0, ..., x_{N-1}."""
    df = pd.DataFrame(traj.states, columns=[f"x_{i}" for i in range(traj.n)])
    df.insert(0, "k", np.arange(len(traj), dtype=np.int64))
    return df
