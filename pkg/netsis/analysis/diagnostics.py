"""Trajectory diagnostics: initial-condition class, overshoot, positivity, rates."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from netsis.core.config import DEFAULTS
from netsis.model.simulate import Trajectory


class InitialClass(str, Enum):
    ZERO = "Zero"
    DL = "Dl"  # 0 < x0 <= x*
    DH = "Dh"  # x* < x0 <= 1
    MIXED = "Mixed"


class Convergence(str, Enum):
    DISEASE_FREE = "DiseaseFree"
    ENDEMIC = "Endemic"
    UNDECIDED = "Undecided"


def classify_initial(x0: np.ndarray, x_star: np.ndarray) -> InitialClass:
    """Place an initial state relative to the endemic equilibrium.

    Vector "<" follows the convention "<= with at least one strict entry":
    Dl is x0 <= x* with x0 != 0, Dh is x0 >= x* with x0 != x*. The state
    x0 = x* itself is assigned to Dl.
    """
    x0 = np.asarray(x0, dtype=np.float64)
    x_star = np.asarray(x_star, dtype=np.float64)
    if not np.any(x0):
        return InitialClass.ZERO
    if np.all(x0 <= x_star):
        return InitialClass.DL
    if np.all(x0 >= x_star):
        return InitialClass.DH
    return InitialClass.MIXED


@dataclass(frozen=True)
class OvershootResult:
    """Overshoot counts of a trajectory against x*.

    Attributes:
        up_violations: Number of (k, i) with x_i(k) > x_i* + slack
        down_violations: Number of (k, i) with x_i(k) < x_i* - slack
        initial_class: Class of x(0)
        passed: True/False for Dl (no up-violations) and Dh (no
            down-violations); None for classes with no overshoot guarantee
    """

    up_violations: int
    down_violations: int
    initial_class: InitialClass
    passed: bool | None


def overshoot_check(
    traj: Trajectory,
    x_star: np.ndarray,
    slack: float = DEFAULTS.OVERSHOOT_SLACK,
) -> OvershootResult:
    """Count equilibrium crossings and check them against the initial class."""
    x_star = np.asarray(x_star, dtype=np.float64)
    states = traj.states
    up = int(np.count_nonzero(states > x_star + slack))
    down = int(np.count_nonzero(states < x_star - slack))
    initial = classify_initial(states[0], x_star)
    if initial is InitialClass.DL:
        passed = up == 0
    elif initial is InitialClass.DH:
        passed = down == 0
    else:
        passed = None
    return OvershootResult(up, down, initial, passed)


def positivity_hitting_time(traj: Trajectory) -> int | None:
    """Smallest k with every x_i(k) > 0, or None."""
    positive = np.all(traj.states > 0, axis=1)
    hits = np.flatnonzero(positive)
    return int(hits[0]) if hits.size else None


def error_norms(traj: Trajectory, target: np.ndarray) -> np.ndarray:
    """||x(k) - target||_inf for every recorded k."""
    return np.max(np.abs(traj.states - np.asarray(target, dtype=np.float64)), axis=1)


def convergence_rate(
    traj: Trajectory,
    target: np.ndarray,
    min_length: int = DEFAULTS.RATE_MIN_LENGTH,
) -> float | None:
    """Empirical per-step contraction of the error towards target.

    Geometric mean of e(k+1)/e(k) over the last half of the trajectory, with
    e(k) = ||x(k) - target||_inf, skipping pairs where either error is below
    100 machine epsilons.

    Returns:
        The rate, or None if the trajectory is shorter than min_length or the
        error is already at the floating-point floor
    """
    if len(traj) < min_length:
        return None
    errors = error_norms(traj, target)[len(traj) // 2 :]
    floor = DEFAULTS.RATE_FLOOR_FACTOR * np.finfo(np.float64).eps
    prev, nxt = errors[:-1], errors[1:]
    usable = (prev >= floor) & (nxt >= floor)
    if not np.any(usable):
        return None
    return float(np.exp(np.mean(np.log(nxt[usable] / prev[usable]))))


def monotone_components(traj: Trajectory) -> int:
    """Number of nodes whose trajectory is neither nondecreasing nor nonincreasing."""
    diffs = np.diff(traj.states, axis=0)
    if diffs.size == 0:
        return 0
    increasing = np.all(diffs >= 0, axis=0)
    decreasing = np.all(diffs <= 0, axis=0)
    return int(np.count_nonzero(~(increasing | decreasing)))


@dataclass(frozen=True)
class ConvergenceResult:
    """Where a trajectory ended up.

    Attributes:
        converged_to: DiseaseFree, Endemic, or Undecided
        final_error_inf: Distance of the last state from the reached (or
            closest candidate) equilibrium
        steps_to_tolerance: First k with error below tol, or None
    """

    converged_to: Convergence
    final_error_inf: float
    steps_to_tolerance: int | None


def _first_below(errors: np.ndarray, tol: float) -> int | None:
    hits = np.flatnonzero(errors < tol)
    return int(hits[0]) if hits.size else None


def converged_to(
    traj: Trajectory,
    x_star: np.ndarray | None,
    tol: float = DEFAULTS.CONVERGENCE_TOL,
) -> ConvergenceResult:
    """Decide whether the final state reached the disease-free or endemic equilibrium."""
    zero_errors = error_norms(traj, np.zeros(traj.n))
    if x_star is not None:
        endemic_errors = error_norms(traj, x_star)
        if endemic_errors[-1] < tol:
            return ConvergenceResult(Convergence.ENDEMIC, float(endemic_errors[-1]), _first_below(endemic_errors, tol))
    if zero_errors[-1] < tol:
        return ConvergenceResult(Convergence.DISEASE_FREE, float(zero_errors[-1]), _first_below(zero_errors, tol))
    if x_star is not None and endemic_errors[-1] < zero_errors[-1]:
        return ConvergenceResult(Convergence.UNDECIDED, float(endemic_errors[-1]), None)
    return ConvergenceResult(Convergence.UNDECIDED, float(zero_errors[-1]), None)
