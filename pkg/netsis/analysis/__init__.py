"""Spectral threshold, endemic equilibrium, and stability diagnostics."""

from netsis.analysis.diagnostics import (
    Convergence,
    ConvergenceResult,
    InitialClass,
    OvershootResult,
    classify_initial,
    converged_to,
    convergence_rate,
    error_norms,
    monotone_components,
    overshoot_check,
    positivity_hitting_time,
)
from netsis.analysis.equilibrium import EquilibriumBounds, EquilibriumReport, bounds, residual, solve_endemic
from netsis.analysis.spectral import (
    CwVerdict,
    Regime,
    RegimeLabel,
    SpectralReport,
    classify_regime,
    collatz_wielandt_compare,
    perron,
    row_sum_bound,
    threshold_matrix,
)
from netsis.analysis.stability import ErrorSystem, LyapunovTrace, build_error_system, lyapunov_trace
from netsis.analysis.stability_report import StabilityReport, diagnose

__all__ = [
    "SpectralReport",
    "Regime",
    "RegimeLabel",
    "CwVerdict",
    "perron",
    "classify_regime",
    "collatz_wielandt_compare",
    "threshold_matrix",
    "row_sum_bound",
    "EquilibriumBounds",
    "EquilibriumReport",
    "solve_endemic",
    "residual",
    "bounds",
    "ErrorSystem",
    "LyapunovTrace",
    "build_error_system",
    "lyapunov_trace",
    "InitialClass",
    "Convergence",
    "ConvergenceResult",
    "OvershootResult",
    "classify_initial",
    "overshoot_check",
    "positivity_hitting_time",
    "convergence_rate",
    "error_norms",
    "monotone_components",
    "converged_to",
    "StabilityReport",
    "diagnose",
]
