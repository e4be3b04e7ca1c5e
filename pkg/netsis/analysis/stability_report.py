"""Bundle all trajectory diagnostics into one StabilityReport."""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from netsis.analysis.diagnostics import (
    Convergence,
    InitialClass,
    classify_initial,
    converged_to,
    convergence_rate,
    monotone_components,
    overshoot_check,
    positivity_hitting_time,
)
from netsis.analysis.stability import ErrorSystem, LyapunovTrace, lyapunov_trace
from netsis.core.config import DEFAULTS
from netsis.model.simulate import Trajectory
from netsis.model.sis_model import SisModel

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class StabilityReport:
    """Diagnostics of one trajectory.

    initial_class and the overshoot fields are None when there is no endemic
    equilibrium to compare against; the Lyapunov fields are None when no
    error system is available.
    """

    initial_class: InitialClass | None
    overshoot_up_count: int | None
    overshoot_down_count: int | None
    overshoot_passed: bool | None
    lyapunov: LyapunovTrace | None
    hitting_time: int | None
    empirical_rate: float | None
    converged_to: Convergence
    final_error_inf: float
    steps_to_tolerance: int | None
    monotone_components: int

    @property
    def lyapunov_monotone(self) -> bool | None:
        return None if self.lyapunov is None else self.lyapunov.monotone


def diagnose(
    m: SisModel,
    traj: Trajectory,
    x_star: np.ndarray | None = None,
    es: ErrorSystem | None = None,
    slack: float = DEFAULTS.OVERSHOOT_SLACK,
    tol: float = DEFAULTS.CONVERGENCE_TOL,
) -> StabilityReport:
    """Run every trajectory diagnostic.

    Args:
        m: Model the trajectory came from
        traj: Trajectory to diagnose
        x_star: Endemic equilibrium, or None in the disease-free regime
        es: Error system for (m, x_star); enables the Lyapunov trace
        slack: Overshoot slack
        tol: Convergence tolerance for converged_to

    Returns:
        StabilityReport
    """
    target = np.zeros(traj.n) if x_star is None else np.asarray(x_star, dtype=np.float64)
    hitting = positivity_hitting_time(traj)

    initial = up = down = passed = None
    if x_star is not None:
        over = overshoot_check(traj, target, slack)
        initial, up, down, passed = over.initial_class, over.up_violations, over.down_violations, over.passed
        if passed is False:
            logger.warning("overshoot detected for a %s start", initial.value)

    lyap = None
    if es is not None and x_star is not None and hitting is not None:
        lyap = lyapunov_trace(m, target, es, traj)

    conv = converged_to(traj, x_star, tol)
    return StabilityReport(
        initial_class=initial if initial is not None else _zero_or_none(traj),
        overshoot_up_count=up,
        overshoot_down_count=down,
        overshoot_passed=passed,
        lyapunov=lyap,
        hitting_time=hitting,
        empirical_rate=convergence_rate(traj, target),
        converged_to=conv.converged_to,
        final_error_inf=conv.final_error_inf,
        steps_to_tolerance=conv.steps_to_tolerance,
        monotone_components=monotone_components(traj),
    )


def _zero_or_none(traj: Trajectory) -> InitialClass | None:
    # without x* only the zero class is defined
    return InitialClass.ZERO if not np.any(traj.initial) else None
