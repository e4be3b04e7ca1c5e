"""Perron-Frobenius computations and the epidemic threshold.

Power iteration runs on the shifted matrix M + shift*I: an irreducible
nonnegative matrix plus a positive diagonal is primitive, so the iteration
converges even for periodic matrices such as the 2-cycle, where plain power
iteration oscillates forever. The shift changes the eigenvalue by exactly
``shift`` and leaves the eigenvectors alone.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import Enum

import numpy as np

from netsis.core.config import DEFAULTS
from netsis.core.errors import MaxIterationsExceeded, NonPositiveVector, NotIrreducible, SpectralError
from netsis.graphio.connectivity import is_irreducible
from netsis.model.sis_model import SisModel

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SpectralReport:
    """Perron root and normalized Perron vectors of a nonnegative matrix.

    Attributes:
        rho: Spectral radius
        right_vec: Positive right eigenvector, 1-norm 1
        left_vec: Positive left eigenvector, 1-norm 1
        iterations: Power iterations used (right + left)
        residual: max of ||M r - rho r||_inf and ||v^T M - rho v^T||_inf
        converged: False when max_iter ran out (best estimate returned)
    """

    rho: float
    right_vec: np.ndarray
    left_vec: np.ndarray
    iterations: int
    residual: float
    converged: bool = True


@dataclass(frozen=True)
class _PowerResult:
    lam: float
    vec: np.ndarray
    iterations: int
    residual: float
    converged: bool


def _estimate(A: np.ndarray, v: np.ndarray) -> tuple[float, float]:
    w = A @ v
    # v has unit 1-norm, so sum(w) is the growth factor of the 1-norm
    lam = float(w.sum())
    return lam, float(np.max(np.abs(w - lam * v)))


def _polish(A: np.ndarray, lam: float, v: np.ndarray) -> np.ndarray:
    """One inverse-iteration step with a shift just above lam.

    (sigma*I - A)^{-1} is entrywise positive for irreducible A once sigma
    exceeds the Perron root, and its dominant direction is the Perron vector
    either way, so the normalized solution stays positive.
    """
    sigma = lam + 1e-10 * max(1.0, abs(lam))
    try:
        z = np.linalg.solve(sigma * np.eye(A.shape[0]) - A, v)
    except np.linalg.LinAlgError:
        return v
    z = z / z.sum()
    return z if np.all(z > 0) else v


def _power_iteration(A: np.ndarray, tol: float, max_iter: int) -> _PowerResult:
    n = A.shape[0]
    v = np.full(n, 1.0 / n)
    lam_prev = np.inf
    lam = 0.0
    residual = np.inf
    for it in range(1, max_iter + 1):
        lam, residual = _estimate(A, v)
        if abs(lam - lam_prev) < tol and residual <= tol:
            polished = _polish(A, lam, v)
            lam_p, residual_p = _estimate(A, polished)
            if residual_p < residual:
                return _PowerResult(lam_p, polished, it, residual_p, True)
            return _PowerResult(lam, v, it, residual, True)
        lam_prev = lam
        v = (A @ v) / lam
    return _PowerResult(lam, v, max_iter, residual, False)


def perron(
    M: np.ndarray,
    tol: float = DEFAULTS.PERRON_TOL,
    max_iter: int = DEFAULTS.PERRON_MAX_ITER,
    shift: float = DEFAULTS.PERRON_SHIFT,
    strict: bool = True,
) -> SpectralReport:
    """Spectral radius and Perron vectors of an irreducible nonnegative matrix.

    Args:
        M: Square nonnegative irreducible matrix
        tol: Bound on the change of the eigenvalue estimate and on the residual
        max_iter: Iteration cap for each of the right and left vectors
        shift: Diagonal shift making the iteration matrix primitive
        strict: Raise MaxIterationsExceeded on non-convergence; otherwise return
            the best estimate with converged=False

    Returns:
        SpectralReport

    Raises:
        NotIrreducible: M is negative somewhere or its zero pattern is reducible
        MaxIterationsExceeded: No convergence within max_iter (strict mode)
    """
    M = np.asarray(M, dtype=np.float64)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise SpectralError(f"matrix must be square, got shape {M.shape}")
    if np.any(M < 0):
        raise NotIrreducible("matrix has negative entries")
    if not is_irreducible(M):
        raise NotIrreducible("zero pattern of the matrix is not strongly connected")

    A = M + shift * np.eye(M.shape[0])
    right = _power_iteration(A, tol, max_iter)
    left = _power_iteration(A.T, tol, max_iter)
    report = SpectralReport(
        rho=right.lam - shift,
        right_vec=right.vec,
        left_vec=left.vec,
        iterations=right.iterations + left.iterations,
        residual=max(right.residual, left.residual),
        converged=right.converged and left.converged,
    )
    if not report.converged:
        if strict:
            raise MaxIterationsExceeded(
                f"power iteration did not converge in {max_iter} iterations",
                report=report,
                rho=report.rho,
                residual=report.residual,
            )
        logger.warning("power iteration stopped at max_iter=%d (residual %.3e)", max_iter, report.residual)
    return report


class Regime(str, Enum):
    DISEASE_FREE_ONLY = "DiseaseFreeOnly"
    ENDEMIC_EXISTS = "EndemicExists"


@dataclass(frozen=True)
class RegimeLabel:
    """Threshold classification of a model.

    Attributes:
        regime: DiseaseFreeOnly (rho <= 1 + band) or EndemicExists
        rho_threshold: rho(I - hD + hB)
        boundary_warning: |rho - 1| < band, where floating point cannot decide
        row_sum_bound: Largest row sum of I - hD + hB (upper bound on rho)
        spectral: Full Perron report of the threshold matrix
    """

    regime: Regime
    rho_threshold: float
    boundary_warning: bool
    row_sum_bound: float
    spectral: SpectralReport

    @property
    def endemic(self) -> bool:
        return self.regime is Regime.ENDEMIC_EXISTS


def threshold_matrix(m: SisModel) -> np.ndarray:
    """I - hD + hB, nonnegative under Assumption 3."""
    return np.eye(m.n) - m.h * m.D + m.h * m.B


def row_sum_bound(M: np.ndarray) -> float:
    """Largest row sum; bounds the spectral radius of a nonnegative matrix."""
    return float(np.max(np.asarray(M).sum(axis=1)))


def classify_regime(m: SisModel, band: float = DEFAULTS.REGIME_BAND) -> RegimeLabel:
    """Label a model as disease-free only or endemic by its threshold.

    Args:
        m: Validated model
        band: Half-width of the floating-point band around rho = 1

    Returns:
        RegimeLabel
    """
    M = threshold_matrix(m)
    spectral = perron(M)
    rho = spectral.rho
    boundary = abs(rho - 1.0) < band
    regime = Regime.ENDEMIC_EXISTS if rho > 1.0 + band else Regime.DISEASE_FREE_ONLY
    if boundary:
        logger.warning("rho(I - hD + hB) = %.17g is within %.1e of 1; classified %s", rho, band, regime.value)
    return RegimeLabel(regime, rho, boundary, row_sum_bound(M), spectral)


class CwVerdict(str, Enum):
    MU_BELOW_RHO = "MuBelowRho"
    MU_ABOVE_RHO = "MuAboveRho"
    MU_EQUALS_RHO = "MuEqualsRho"
    INCONCLUSIVE = "Inconclusive"


def collatz_wielandt_compare(M: np.ndarray, x: np.ndarray, mu: float, tol: float = 1e-12) -> CwVerdict:
    """Place mu relative to rho(M) by comparing mu*x with M x componentwise.

    mu*x << Mx certifies mu < rho(M); mu*x >> Mx certifies mu > rho(M);
    equality within tol means mu is an eigenvalue with positive eigenvector,
    hence rho(M). Mixed signs are inconclusive.

    Args:
        M: Nonnegative matrix
        x: Strictly positive vector
        mu: Candidate value (>= 0)
        tol: Absolute tolerance on each component of Mx - mu*x

    Raises:
        NonPositiveVector: Some x_i <= 0
    """
    x = np.asarray(x, dtype=np.float64)
    if not np.all(x > 0):
        raise NonPositiveVector("comparison vector must be strictly positive", x=x.tolist())
    diff = np.asarray(M, dtype=np.float64) @ x - mu * x
    if np.all(np.abs(diff) <= tol):
        return CwVerdict.MU_EQUALS_RHO
    if np.all(diff > tol):
        return CwVerdict.MU_BELOW_RHO
    if np.all(diff < -tol):
        return CwVerdict.MU_ABOVE_RHO
    return CwVerdict.INCONCLUSIVE
