"""Error-system matrices and the Lyapunov certificate for the endemic equilibrium.

With z = x - x* and c_i = h delta_i / (1 - x_i*), the error obeys
z(k+1) = Phi(k) z(k) where

    Phi(k) = I - diag(c) + diag(1 - x(k)) hB,
    F      = I - diag(c) + hB                  (Phi(k) <= F, F mu = mu),
    Xi     = I - diag(c) + diag(1 - x*) hB     (comparison matrix for z >= 0).

mu_i = x_i*/x_0* and v is the positive left Perron vector of F. Along a
trajectory the auxiliary system y(k+1) = Phi(k) y(k), y(s) = |z(s)|, has the
Lyapunov function V(k) = v^T y(k) with V(k+1) - V(k) = -h v^T diag(x(k)) B y(k).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from netsis.analysis.diagnostics import positivity_hitting_time
from netsis.analysis.spectral import CwVerdict, collatz_wielandt_compare, perron
from netsis.core.config import DEFAULTS
from netsis.core.errors import DegenerateDelta, NoPositiveState, NonNegativityViolation, SpectralCertificateFailed
from netsis.model.simulate import Trajectory
from netsis.model.sis_model import SisModel

logger = logging.getLogger(__name__)

# Negative entries down to this size are rounding noise and get zeroed
_NONNEG_SLACK = 1e-12


@dataclass(frozen=True)
class ErrorSystem:
    """Matrices and certificates of the error dynamics around x*.

    Attributes:
        Xi: Comparison matrix, nonnegative, rho(Xi) < 1
        F: Upper envelope of Phi(k), rho(F) = 1 with F mu = mu
        mu: x* / x*_0
        v: Left Perron vector of F (1-norm 1)
        c: h delta_i / (1 - x_i*), the diagonal shared by Xi, F and Phi(k)
        rho_xi: rho(Xi)
        rho_f: rho(F)
        f_mu_residual: ||F mu - mu||_inf
        xi_verdict: Collatz-Wielandt verdict of Xi against x* at mu = 1
    """

    Xi: np.ndarray
    F: np.ndarray
    mu: np.ndarray
    v: np.ndarray
    c: np.ndarray
    rho_xi: float
    rho_f: float
    f_mu_residual: float
    xi_verdict: CwVerdict

    def phi(self, hB: np.ndarray, x: np.ndarray) -> np.ndarray:
        """Phi(k) for the state x = x(k)."""
        return np.eye(len(self.c)) - np.diag(self.c) + (1.0 - x)[:, None] * hB


def _clip_nonnegative(name: str, M: np.ndarray) -> np.ndarray:
    low = float(M.min())
    if low < -_NONNEG_SLACK:
        i, j = np.unravel_index(int(np.argmin(M)), M.shape)
        raise NonNegativityViolation(
            f"{name}[{i}, {j}] = {low!r} is negative; the equilibrium is inaccurate",
            matrix=name,
            row=int(i),
            col=int(j),
            value=low,
        )
    return np.maximum(M, 0.0)


def _check_delta(m: SisModel, x_star: np.ndarray) -> None:
    zero = np.flatnonzero((m.delta == 0) | (x_star >= 1.0))
    if zero.size:
        raise DegenerateDelta(
            f"x_i* = 1 at nodes {zero.tolist()} (delta_i = 0); error-system matrices are undefined",
            nodes=zero.tolist(),
        )


def build_error_system(m: SisModel, x_star: np.ndarray, verify: bool = True) -> ErrorSystem:
    """Build Xi, F, mu and v for an endemic equilibrium and check their certificates.

    Args:
        m: Model in the endemic regime with every delta_i > 0
        x_star: Endemic equilibrium
        verify: Raise SpectralCertificateFailed if a certificate fails

    Returns:
        ErrorSystem

    Raises:
        DegenerateDelta: Some delta_i = 0 (x_i* = 1)
        NonNegativityViolation: Xi or F has a clearly negative entry
        SpectralCertificateFailed: ||F mu - mu||, |rho(F) - 1|, rho(Xi) < 1 or
            Xi x* << x* fails (verify mode)
    """
    x_star = np.asarray(x_star, dtype=np.float64)
    _check_delta(m, x_star)

    hB = m.h * m.B
    c = m.h * m.delta / (1.0 - x_star)
    base = np.eye(m.n) - np.diag(c)
    Xi = _clip_nonnegative("Xi", base + (1.0 - x_star)[:, None] * hB)
    F = _clip_nonnegative("F", base + hB)
    mu = x_star / x_star[0]

    xi_report = perron(Xi)
    f_report = perron(F)
    f_mu_residual = float(np.max(np.abs(F @ mu - mu)))
    verdict = collatz_wielandt_compare(Xi, x_star, 1.0)

    es = ErrorSystem(
        Xi=Xi,
        F=F,
        mu=mu,
        v=f_report.left_vec,
        c=c,
        rho_xi=xi_report.rho,
        rho_f=f_report.rho,
        f_mu_residual=f_mu_residual,
        xi_verdict=verdict,
    )

    failures = []
    if f_mu_residual >= DEFAULTS.F_MU_TOL:
        failures.append(f"||F mu - mu|| = {f_mu_residual:.3e}")
    if abs(es.rho_f - 1.0) >= DEFAULTS.RHO_F_TOL:
        failures.append(f"rho(F) = {es.rho_f!r}")
    if es.rho_xi >= 1.0 - DEFAULTS.XI_MARGIN:
        failures.append(f"rho(Xi) = {es.rho_xi!r}")
    if verdict is not CwVerdict.MU_ABOVE_RHO:
        failures.append(f"Xi x* << x* fails ({verdict.value})")
    if failures:
        if verify:
            raise SpectralCertificateFailed("; ".join(failures), failures=failures)
        logger.warning("error-system certificates failed: %s", "; ".join(failures))
    return es


@dataclass(frozen=True)
class LyapunovTrace:
    """V(k) = v^T y(k) along a trajectory, from the hitting time s onward.

    Attributes:
        start: Hitting time s; values[0] is V(s)
        values: V(s), V(s+1), ..., V(K)
        identity_errors: |(V(k+1) - V(k)) + h v^T diag(x(k)) B y(k)| per step
        monotone: V(k+1) <= V(k) + slack at every step
        strictly_decreasing: V(k+1) < V(k) whenever ||y(k)||_inf > 1e-10
    """

    start: int
    values: np.ndarray
    identity_errors: np.ndarray
    monotone: bool
    strictly_decreasing: bool

    @property
    def max_identity_error(self) -> float:
        return float(self.identity_errors.max()) if self.identity_errors.size else 0.0


def lyapunov_trace(
    m: SisModel,
    x_star: np.ndarray,
    es: ErrorSystem,
    traj: Trajectory,
    slack: float = DEFAULTS.LYAPUNOV_SLACK,
) -> LyapunovTrace:
    """Evolve the auxiliary system along a trajectory and record V(k).

    Args:
        m: Model the trajectory came from
        x_star: Endemic equilibrium
        es: Error system built for (m, x_star)
        traj: Simulated trajectory
        slack: Allowed floating-point increase of V per step

    Returns:
        LyapunovTrace

    Raises:
        DegenerateDelta: Some delta_i = 0
        NoPositiveState: No state of the trajectory is strictly positive
    """
    x_star = np.asarray(x_star, dtype=np.float64)
    _check_delta(m, x_star)
    s = positivity_hitting_time(traj)
    if s is None:
        raise NoPositiveState("trajectory never becomes strictly positive", steps=traj.steps)

    hB = m.h * m.B
    y = np.abs(traj.states[s] - x_star)
    values = [float(es.v @ y)]
    identity_errors = []
    strict = True
    for k in range(s, traj.steps):
        x = traj.states[k]
        y_next = es.phi(hB, x) @ y
        v_next = float(es.v @ y_next)
        predicted = -float(es.v @ (x * (hB @ y)))
        identity_errors.append(abs((v_next - values[-1]) - predicted))
        if np.max(y) > 1e-10 and not v_next < values[-1]:
            strict = False
        values.append(v_next)
        y = y_next

    values_arr = np.asarray(values)
    monotone = bool(np.all(np.diff(values_arr) <= slack))
    if not monotone:
        logger.warning("Lyapunov function increased along the trajectory")
    return LyapunovTrace(
        start=s,
        values=values_arr,
        identity_errors=np.asarray(identity_errors),
        monotone=monotone,
        strictly_decreasing=strict,
    )
