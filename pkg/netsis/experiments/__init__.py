"""Config-driven experiments, sweeps, and their CSV/JSON outputs."""

from netsis.experiments.config import (
    ExperimentConfig,
    SweepConfig,
    load_config,
    load_sweep_config,
    parse_config,
    parse_sweep_config,
)
from netsis.experiments.report_io import (
    build_report,
    dumps_report,
    read_report,
    read_trajectory_csv,
    to_jsonable,
    write_report,
    write_trajectory_csv,
)
from netsis.experiments.runner import RunResult, RunState, rediagnose, run_experiment, validate_config
from netsis.experiments.sweep import SweepResult, derive_seeds, expand_grid, sweep

__all__ = [
    "ExperimentConfig",
    "SweepConfig",
    "load_config",
    "load_sweep_config",
    "parse_config",
    "parse_sweep_config",
    "build_report",
    "dumps_report",
    "read_report",
    "read_trajectory_csv",
    "to_jsonable",
    "write_report",
    "write_trajectory_csv",
    "RunResult",
    "RunState",
    "run_experiment",
    "validate_config",
    "rediagnose",
    "SweepResult",
    "derive_seeds",
    "expand_grid",
    "sweep",
]
