"""Trajectory CSV and report JSON input/output.

Trajectory CSV: header ``k,x_0,...,x_{N-1}``, one row per recorded step,
floats printed with 17 significant digits so a re-read is bit-exact.

Report JSON: the fixed fields of ``REPORT_FIELDS`` first, in that order,
followed by run metadata. NaN and infinity are written as null.
"""

from __future__ import annotations

import json
import logging
import math
from pathlib import Path
from typing import Any

import numpy as np
import pandas as pd

from netsis.analysis.equilibrium import EquilibriumReport
from netsis.analysis.spectral import RegimeLabel
from netsis.analysis.stability import ErrorSystem
from netsis.analysis.stability_report import StabilityReport
from netsis.core.config import DEFAULTS, REPORT_FIELDS
from netsis.core.errors import MalformedTrajectory
from netsis.model.simulate import StopReason, Trajectory, trajectory_frame

logger = logging.getLogger(__name__)

_FLOAT_FORMAT = f"%.{DEFAULTS.FLOAT_DIGITS}g"


def write_trajectory_csv(traj: Trajectory, path: str | Path) -> Path:
    """Write a trajectory as CSV.

    Args:
        traj: Trajectory to write
        path: Output file; parent directories are created

    Returns:
        The path written
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    trajectory_frame(traj).to_csv(path, index=False, float_format=_FLOAT_FORMAT, lineterminator="\n")
    logger.debug("wrote %d rows to %s", len(traj), path)
    return path


def read_trajectory_csv(path: str | Path, stop_tol: float = 0.0) -> Trajectory:
    """Read a trajectory CSV written by write_trajectory_csv.

    The CSV does not store why the run ended. With the stop_tol the run used,
    a final step change below it means the run stopped early, exactly as
    simulate decides it.

    Raises:
        MalformedTrajectory: Missing file, wrong header, non-contiguous steps,
            or non-numeric values
    """
    path = Path(path)
    try:
        df = pd.read_csv(path, float_precision="round_trip")
    except (OSError, pd.errors.ParserError, pd.errors.EmptyDataError) as e:
        raise MalformedTrajectory(f"cannot read trajectory {path}: {e}", path=str(path)) from e

    expected = ["k"] + [f"x_{i}" for i in range(len(df.columns) - 1)]
    if list(df.columns) != expected or len(df.columns) < 2:
        raise MalformedTrajectory(
            f"{path}: header must be k,x_0,...,x_{{N-1}}, got {','.join(map(str, df.columns))}",
            path=str(path),
        )
    if df.empty:
        raise MalformedTrajectory(f"{path}: no rows", path=str(path))
    if not np.array_equal(df["k"].to_numpy(), np.arange(len(df))):
        raise MalformedTrajectory(f"{path}: steps must be 0, 1, 2, ...", path=str(path))

    try:
        states = df.drop(columns="k").to_numpy(dtype=np.float64)
    except ValueError as e:
        raise MalformedTrajectory(f"{path}: non-numeric state values", path=str(path)) from e
    reason = StopReason.HORIZON
    if stop_tol > 0 and len(states) > 1 and np.max(np.abs(states[-1] - states[-2])) < stop_tol:
        reason = StopReason.CONVERGED
    return Trajectory(states, reason, float(stop_tol))


def to_jsonable(value: Any) -> Any:
    """Convert numpy scalars/arrays, enums, and non-finite floats for JSON."""
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return [to_jsonable(v) for v in value.tolist()]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if math.isfinite(value) else None
    if hasattr(value, "value") and isinstance(value.value, str):
        return value.value
    return value


def build_report(
    *,
    regime: RegimeLabel | None = None,
    equilibrium: EquilibriumReport | None = None,
    error_system: ErrorSystem | None = None,
    stability: StabilityReport | None = None,
    trajectory: Trajectory | None = None,
    errors: list[dict] | None = None,
    extras: dict[str, Any] | None = None,
) -> dict[str, Any]:
    """Assemble a report from whatever pipeline stages completed.

    Fields of stages that did not run are null.
    """
    report: dict[str, Any] = dict.fromkeys(REPORT_FIELDS)
    report["errors"] = list(errors or [])
    report["overshoot"] = {"up": None, "down": None}

    if regime is not None:
        report["rho_threshold"] = regime.rho_threshold
        report["regime"] = regime.regime.value
        report["boundary_warning"] = regime.boundary_warning
    if equilibrium is not None:
        report["x_star"] = equilibrium.x_star
        report["bounds"] = equilibrium.bounds.to_dict()
    if error_system is not None:
        report["rho_xi"] = error_system.rho_xi
        report["f_mu_residual"] = error_system.f_mu_residual
    if stability is not None:
        report["initial_class"] = stability.initial_class.value if stability.initial_class else None
        report["overshoot"] = {"up": stability.overshoot_up_count, "down": stability.overshoot_down_count}
        report["hitting_time"] = stability.hitting_time
        report["lyapunov_monotone"] = stability.lyapunov_monotone
        report["empirical_rate"] = stability.empirical_rate
        report["converged_to"] = stability.converged_to.value
        report["final_error_inf"] = stability.final_error_inf
    if trajectory is not None:
        report["steps"] = trajectory.steps

    meta: dict[str, Any] = {}
    if regime is not None:
        meta["row_sum_bound"] = regime.row_sum_bound
    if equilibrium is not None:
        meta["equilibrium_residual"] = equilibrium.residual_inf
        meta["equilibrium_iterations"] = equilibrium.iterations
        meta["pinned_nodes"] = list(equilibrium.pinned_nodes)
    if error_system is not None:
        meta["rho_f"] = error_system.rho_f
        meta["xi_verdict"] = error_system.xi_verdict.value
    if stability is not None:
        meta["overshoot_passed"] = stability.overshoot_passed
        meta["steps_to_tolerance"] = stability.steps_to_tolerance
        meta["monotone_components"] = stability.monotone_components
        if stability.lyapunov is not None:
            meta["lyapunov_start"] = stability.lyapunov.start
            meta["lyapunov_strictly_decreasing"] = stability.lyapunov.strictly_decreasing
            meta["lyapunov_max_identity_error"] = stability.lyapunov.max_identity_error
    if trajectory is not None:
        meta["stop_reason"] = trajectory.stop_reason.value
    meta.update(extras or {})
    report.update(meta)
    return to_jsonable(report)


def dumps_report(report: dict[str, Any]) -> str:
    """Deterministic JSON text of a report."""
    return json.dumps(to_jsonable(report), indent=2, allow_nan=False) + "\n"


def write_report(report: dict[str, Any], path: str | Path) -> Path:
    """Write a report JSON file, creating parent directories."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps_report(report), encoding="utf-8")
    return path


def read_report(path: str | Path) -> dict[str, Any]:
    return json.loads(Path(path).read_text(encoding="utf-8"))
