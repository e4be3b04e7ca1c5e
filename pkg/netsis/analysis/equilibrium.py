"""Endemic equilibrium by monotone fixed-point iteration.

At an equilibrium (1 - x_i) sum_j beta_ij x_j = delta_i x_i, which rearranges
to the fixed-point form

    x_i = T(x)_i = 1 - delta_i / (delta_i + sum_j beta_ij x_j).

T is monotone nondecreasing, so iterating from the all-ones vector gives a
componentwise nonincreasing sequence that converges to the largest fixed
point. In the endemic regime that point is the endemic equilibrium x*.
Floating-point sums and products of nonnegative numbers round monotonically,
so the nonincreasing property survives in machine arithmetic too.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from netsis.analysis.spectral import RegimeLabel, classify_regime
from netsis.core.config import DEFAULTS
from netsis.core.errors import BoundViolation, DegenerateDelta, NoConvergence, RegimeMismatch
from netsis.model.sis_model import SisModel

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class EquilibriumBounds:
    """Upper and lower bounds on the endemic equilibrium.

    Attributes:
        hi: Per-node upper bound 1 - delta_i / (delta_i + sum_j beta_ij)
        lo_certified: 1 - delta_m / sum_j beta_mj with m = argmin_i x_i*
        lo_apriori: min_i (1 - delta_i / sum_j beta_ij), computable without x*
        m_index: Node with the smallest equilibrium value (smallest index on ties)
        violations: Nodes where x_i* falls outside [lo_certified, hi_i]
    """

    hi: np.ndarray
    lo_certified: float
    lo_apriori: float
    m_index: int
    violations: tuple[int, ...] = ()

    def to_dict(self) -> dict:
        return {
            "hi": self.hi.tolist(),
            "lo_certified": self.lo_certified,
            "lo_apriori": self.lo_apriori,
            "m_index": self.m_index,
        }


@dataclass(frozen=True)
class EquilibriumReport:
    """Endemic equilibrium with its certificates.

    Attributes:
        x_star: Equilibrium, every entry in (0, 1]
        residual_inf: ||r(x*)||_inf, r from residual()
        iterations: Fixed-point iterations used
        bounds: Upper/lower bounds checked against x_star
        monotone: Every iterate was componentwise <= its predecessor
        pinned_nodes: Nodes with delta_i = 0 whose value is 1 (permissive mode)
    """

    x_star: np.ndarray
    residual_inf: float
    iterations: int
    bounds: EquilibriumBounds
    monotone: bool = True
    pinned_nodes: tuple[int, ...] = field(default=())

    @property
    def bounds_hi(self) -> np.ndarray:
        return self.bounds.hi

    @property
    def bounds_lo_certified(self) -> float:
        return self.bounds.lo_certified

    @property
    def bounds_lo_apriori(self) -> float:
        return self.bounds.lo_apriori


def residual(m: SisModel, x: np.ndarray) -> np.ndarray:
    """r_i = (1 - x_i) sum_j beta_ij x_j - delta_i x_i; x(k+1) - x(k) = h r(x(k))."""
    x = np.asarray(x, dtype=np.float64)
    return (1.0 - x) * (m.B @ x) - m.delta * x


def bounds(m: SisModel, x_star: np.ndarray, slack: float = DEFAULTS.OVERSHOOT_SLACK) -> EquilibriumBounds:
    """Compute and check the equilibrium bounds.

    lo_certified can be negative (a valid but vacuous bound); it is never
    clamped.

    Args:
        m: Model
        x_star: Converged endemic equilibrium
        slack: Floating-point allowance for the bound checks

    Returns:
        EquilibriumBounds

    Raises:
        BoundViolation: Some x_i* lies outside [lo_certified, hi_i]
    """
    x_star = np.asarray(x_star, dtype=np.float64)
    row = m.beta_row_sums
    hi = 1.0 - m.delta / (m.delta + row)
    m_index = int(np.argmin(x_star))
    lo_certified = float(1.0 - m.delta[m_index] / row[m_index])
    lo_apriori = float(np.min(1.0 - m.delta / row))

    outside = (x_star < lo_certified - slack) | (x_star > hi + slack)
    violations = tuple(int(i) for i in np.flatnonzero(outside))
    result = EquilibriumBounds(hi, lo_certified, lo_apriori, m_index, violations)
    if violations:
        raise BoundViolation(
            f"equilibrium leaves its bounds at nodes {list(violations)}",
            nodes=list(violations),
            lo_certified=lo_certified,
        )
    return result


def _fixed_point_map(m: SisModel, x: np.ndarray) -> np.ndarray:
    return 1.0 - m.delta / (m.delta + m.B @ x)


def _settle(m: SisModel, x: np.ndarray, max_iter: int) -> tuple[np.ndarray, int]:
    """Continue the decreasing iteration until it stops moving in floating point."""
    for extra in range(max_iter):
        nxt = np.minimum(_fixed_point_map(m, x), x)
        if np.array_equal(nxt, x):
            return x, extra
        x = nxt
    return x, max_iter


def solve_endemic(
    m: SisModel,
    tol: float = DEFAULTS.SOLVER_TOL,
    max_iter: int = DEFAULTS.SOLVER_MAX_ITER,
    strict: bool = DEFAULTS.STRICT_DELTA,
    regime: RegimeLabel | None = None,
) -> EquilibriumReport:
    """Compute the endemic equilibrium x*.

    Once successive iterates differ by less than tol the iteration keeps
    going until it stops moving in floating point, at most
    DEFAULTS.SOLVER_SETTLE_ITER extra steps. Overshoot checks compare
    trajectories against x* with a 1e-12 slack and need x* at least that
    accurate.

    Args:
        m: Validated model in the endemic regime
        tol: Stop when successive iterates differ by less than tol (inf-norm)
        max_iter: Iteration cap
        strict: Raise DegenerateDelta when some delta_i = 0; otherwise pin
            x_i* = 1 there with a warning
        regime: Precomputed classification (computed when omitted)

    Returns:
        EquilibriumReport

    Raises:
        RegimeMismatch: The model is in the disease-free regime
        DegenerateDelta: delta_i = 0 for some node (strict mode)
        NoConvergence: max_iter exhausted
        BoundViolation: The result fails the bound check
    """
    label = regime if regime is not None else classify_regime(m)
    if not label.endemic:
        raise RegimeMismatch(
            f"no endemic equilibrium: rho(I - hD + hB) = {label.rho_threshold!r}",
            rho_threshold=label.rho_threshold,
        )

    zero_delta = tuple(int(i) for i in np.flatnonzero(m.delta == 0))
    if zero_delta:
        if strict:
            raise DegenerateDelta(
                f"delta_i = 0 at nodes {list(zero_delta)} forces x_i* = 1", nodes=list(zero_delta)
            )
        logger.warning("delta_i = 0 at nodes %s; pinning x_i* = 1", list(zero_delta))

    x = np.ones(m.n)
    monotone = True
    for it in range(1, max_iter + 1):
        nxt = _fixed_point_map(m, x)
        if monotone and np.any(nxt > x):
            monotone = False
            logger.warning("fixed-point iterate increased at iteration %d", it)
        change = float(np.max(np.abs(nxt - x)))
        x = nxt
        if change < tol:
            break
    else:
        raise NoConvergence(f"fixed-point iteration did not converge in {max_iter} iterations", x=x, change=change)

    x, extra = _settle(m, x, DEFAULTS.SOLVER_SETTLE_ITER)
    it += extra

    res = float(np.max(np.abs(residual(m, x))))
    logger.debug("endemic equilibrium after %d iterations, residual %.3e", it, res)
    return EquilibriumReport(
        x_star=x,
        residual_inf=res,
        iterations=it,
        bounds=bounds(m, x),
        monotone=monotone,
        pinned_nodes=zero_delta,
    )
