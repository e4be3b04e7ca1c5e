"""Parameter sweeps over a grid of experiment configs.

Each grid cell is one run_experiment call writing into ``out_dir/<cell_id>/``.
Seeds of a cell derive from the grid's seed value only, never from the cell
position or the worker that runs it, so the summary is identical for any
worker count.
"""

from __future__ import annotations

import itertools
import logging
import multiprocessing
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Any

import numpy as np
import pandas as pd

from netsis.core.config import DEFAULTS, SUMMARY_COLUMNS
from netsis.core.data_manager import TrajectoryStore
from netsis.core.errors import EmptyGrid
from netsis.core.events import EventBus, EventType
from netsis.experiments.config import ExperimentConfig, SweepConfig
from netsis.experiments.runner import run_experiment

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SweepCell:
    index: int
    cell_id: str
    values: dict[str, Any]
    config: ExperimentConfig


@dataclass(frozen=True)
class SweepResult:
    """Outcome of a sweep.

    Attributes:
        summary: One row per cell, columns SUMMARY_COLUMNS
        summary_path: Where the summary CSV was written
        failed: Cell ids whose report holds errors
    """

    summary: pd.DataFrame
    summary_path: Path
    failed: list[str]

    @property
    def status(self) -> int:
        return 1 if self.failed else 0


def derive_seeds(seed: int) -> tuple[int, int, int]:
    """Independent (graph, params, x0) seeds from one grid seed."""
    graph_seed, params_seed, x0_seed = np.random.SeedSequence(seed).generate_state(3)
    return int(graph_seed), int(params_seed), int(x0_seed)


def _apply(config: ExperimentConfig, axis: str, value: Any) -> ExperimentConfig:
    if axis == "h":
        return replace(config, h=value)
    if axis == "beta_range":
        return replace(config, params=replace(config.params, beta_range=value))
    if axis == "delta_range":
        return replace(config, params=replace(config.params, delta_range=value))
    if axis == "n":
        gen = replace(config.network.generator, n=value)
        return replace(config, network=replace(config.network, generator=gen))
    # seeds
    graph_seed, params_seed, x0_seed = derive_seeds(value)
    if config.network.generator is not None:
        gen = replace(config.network.generator, seed=graph_seed)
        config = replace(config, network=replace(config.network, generator=gen))
    config = replace(config, params=replace(config.params, seed=params_seed))
    if config.x0.kind == "uniform_range":
        config = replace(config, x0=replace(config.x0, seed=x0_seed))
    return config


def expand_grid(sweep: SweepConfig) -> list[SweepCell]:
    """Cartesian product of the grid axes, in axis order.

    Raises:
        EmptyGrid: No axes, or an axis without values
    """
    if not sweep.axes or any(not values for _, values in sweep.axes):
        raise EmptyGrid("sweep grid has no cells", axes=[name for name, _ in sweep.axes])

    names = [name for name, _ in sweep.axes]
    cells = []
    for index, combo in enumerate(itertools.product(*(values for _, values in sweep.axes))):
        cell_id = f"cell_{index:03d}"
        config = sweep.base
        for axis, value in zip(names, combo):
            config = _apply(config, axis, value)
        config = config.with_output(sweep.out_dir / cell_id)
        cells.append(SweepCell(index, cell_id, dict(zip(names, combo)), config))
    return cells


def _run_cell(cell: SweepCell) -> dict[str, Any]:
    """Module-level worker so multiprocessing can pickle it."""
    result = run_experiment(cell.config)
    state = result.state
    return {
        "index": cell.index,
        "cell_id": cell.cell_id,
        "status": result.status,
        "report": result.report,
        "states": None if state.trajectory is None else np.asarray(state.trajectory.states),
        "target": state.target,
    }


def run_cells(cells: list[SweepCell], workers: int = DEFAULTS.SWEEP_WORKERS) -> list[dict[str, Any]]:
    """Run cells serially (workers <= 1) or in a process pool; results come back in cell order."""
    if workers <= 1 or len(cells) <= 1:
        outcomes = [_run_cell(cell) for cell in cells]
    else:
        with multiprocessing.Pool(min(workers, len(cells))) as pool:
            outcomes = list(pool.imap_unordered(_run_cell, cells))
    outcomes.sort(key=lambda o: o["index"])
    return outcomes


def summarize(outcomes: list[dict[str, Any]], store: TrajectoryStore) -> pd.DataFrame:
    """Summary table; steps-to-tolerance comes from the trajectory store."""
    for o in outcomes:
        if o["states"] is not None:
            store.register_trajectory(o["cell_id"], o["states"], o["target"])
    steps = store.query_steps_to_tolerance(DEFAULTS.CONVERGENCE_TOL)
    logger.info(
        "trajectory store: %d cells, %d rows, %.2f MB on disk",
        len(store.cell_ids),
        store.get_row_count(),
        store.get_cache_size_mb(),
    )

    rows = [
        {
            "cell_id": o["cell_id"],
            "rho_threshold": o["report"]["rho_threshold"],
            "regime": o["report"]["regime"],
            "rho_xi": o["report"]["rho_xi"],
            "converged_to": o["report"]["converged_to"],
            "steps_to_tolerance": steps.get(o["cell_id"]),
        }
        for o in outcomes
    ]
    df = pd.DataFrame(rows, columns=SUMMARY_COLUMNS)
    df["steps_to_tolerance"] = pd.array(df["steps_to_tolerance"].tolist(), dtype="Int64")
    df["rho_threshold"] = df["rho_threshold"].astype("float64")
    df["rho_xi"] = df["rho_xi"].astype("float64")
    return df


def sweep(
    config: SweepConfig,
    workers: int = DEFAULTS.SWEEP_WORKERS,
    out_of_core: bool = DEFAULTS.OUT_OF_CORE,
    bus: EventBus | None = None,
) -> SweepResult:
    """Run every grid cell and write per-cell outputs plus summary.csv.

    A failing cell is recorded in the summary (blank columns) and in
    ``failed``; the sweep continues.

    Args:
        config: Parsed sweep config
        workers: Number of worker processes
        out_of_core: Keep trajectories in Parquet files instead of memory
        bus: Optional event bus receiving CELL_FINISHED per cell

    Raises:
        EmptyGrid: The grid has no cells
    """
    bus = bus or EventBus()
    cells = expand_grid(config)
    logger.info("sweep: %d cells, %d workers", len(cells), workers)
    outcomes = run_cells(cells, workers)

    failed = []
    for o in outcomes:
        if o["status"] != 0:
            failed.append(o["cell_id"])
            logger.warning("cell %s failed: %s", o["cell_id"], [e["code"] for e in o["report"]["errors"]])
        bus.emit(EventType.CELL_FINISHED, cell_id=o["cell_id"], status=o["status"])

    config.out_dir.mkdir(parents=True, exist_ok=True)
    store = TrajectoryStore(out_of_core=out_of_core, cache_dir=config.out_dir / ".trajectory_cache")
    try:
        summary = summarize(outcomes, store)
    finally:
        store.clear()
        store.cleanup()

    summary_path = config.out_dir / DEFAULTS.SWEEP_SUMMARY_NAME
    summary.to_csv(
        summary_path, index=False, float_format=f"%.{DEFAULTS.FLOAT_DIGITS}g", lineterminator="\n"
    )
    return SweepResult(summary, summary_path, failed)
