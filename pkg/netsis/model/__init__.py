"""SIS parameters, model validation, and the discrete-time dynamics."""

from netsis.model.params import SisParams, sample_params
from netsis.model.simulate import StopReason, Trajectory, simulate, trajectory_frame
from netsis.model.sis_model import (
    AssumptionReport,
    SisModel,
    advance,
    build_and_validate,
    check_state,
    relaxed_assumption_three,
    step,
)

__all__ = [
    "SisParams",
    "SisModel",
    "AssumptionReport",
    "StopReason",
    "Trajectory",
    "sample_params",
    "build_and_validate",
    "relaxed_assumption_three",
    "check_state",
    "advance",
    "step",
    "simulate",
    "trajectory_frame",
]
