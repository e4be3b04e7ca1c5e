"""Config-driven experiment pipeline.

One run goes: load or generate the graph, keep its largest strongly
connected component, optionally normalize in-weights, build and validate the
model, classify the regime, solve for the endemic equilibrium and its error
system when one exists, simulate, diagnose, and write the trajectory CSV and
the report JSON.

Every NetsisError stops the pipeline and lands in the report's ``errors``
list; the report is written either way and the exit status is nonzero exactly
when that list is non-empty.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from netsis.analysis.equilibrium import EquilibriumReport, solve_endemic
from netsis.analysis.spectral import RegimeLabel, classify_regime
from netsis.analysis.stability import ErrorSystem, build_error_system
from netsis.analysis.stability_report import StabilityReport, diagnose
from netsis.core.errors import ConfigError, NetsisError, NotStronglyConnected
from netsis.core.events import EventBus, EventType
from netsis.experiments.config import ExperimentConfig
from netsis.experiments.report_io import build_report, read_trajectory_csv, write_report, write_trajectory_csv
from netsis.graphio.connectivity import strongly_connected_analysis
from netsis.graphio.edge_list import read_edge_list
from netsis.graphio.generators import normalize_in_weights, random_strongly_connected
from netsis.graphio.graph import Graph
from netsis.model.params import SisParams, sample_params
from netsis.model.simulate import Trajectory, simulate
from netsis.model.sis_model import AssumptionReport, SisModel, build_and_validate

logger = logging.getLogger(__name__)


@dataclass
class RunState:
    """Everything a run has produced so far; later stages stay None after an error."""

    graph: Graph | None = None
    kept_nodes: list[int] | None = None  # positions in the loaded graph
    loaded_n: int | None = None
    model: SisModel | None = None
    assumptions: AssumptionReport | None = None
    regime: RegimeLabel | None = None
    equilibrium: EquilibriumReport | None = None
    error_system: ErrorSystem | None = None
    trajectory: Trajectory | None = None
    stability: StabilityReport | None = None
    warnings: list[dict[str, Any]] = field(default_factory=list)
    errors: list[dict[str, Any]] = field(default_factory=list)

    @property
    def x_star(self) -> np.ndarray | None:
        return None if self.equilibrium is None else self.equilibrium.x_star

    @property
    def target(self) -> np.ndarray | None:
        """Equilibrium the trajectory should approach."""
        if self.model is None:
            return None
        return self.x_star if self.x_star is not None else np.zeros(self.model.n)

    def warn(self, code: str, message: str, **details: Any) -> None:
        logger.warning(message)
        self.warnings.append({"code": code, "message": message, "details": details})


@dataclass(frozen=True)
class RunResult:
    """Outcome of run_experiment.

    Attributes:
        status: 0 on success, 1 if the report holds errors
        report: The report dict, as written
        state: Intermediate results of the pipeline
        trajectory_path: CSV written, or None
        report_path: JSON written, or None
    """

    status: int
    report: dict[str, Any]
    state: RunState
    trajectory_path: Path | None = None
    report_path: Path | None = None


def _load_graph(config: ExperimentConfig) -> Graph:
    net = config.network
    if net.edge_list is not None:
        try:
            return read_edge_list(net.edge_list, relabel=net.relabel)
        except OSError as e:
            raise ConfigError(f"cannot read edge list {net.edge_list}: {e}", path=str(net.edge_list)) from e
    gen = net.generator
    return random_strongly_connected(gen.n, gen.extra_edge_prob, gen.seed)


def _build_params(config: ExperimentConfig, state: RunState) -> SisParams:
    spec = config.params
    n = state.graph.n
    if spec.sampled:
        return sample_params(spec.beta_range, spec.delta_range, config.h, n, spec.seed)
    if len(spec.beta) != state.loaded_n:
        raise ConfigError(
            f"params.beta has {len(spec.beta)} entries, the graph has {state.loaded_n} nodes",
            key="params.beta",
        )
    keep = state.kept_nodes
    return SisParams(np.asarray(spec.beta)[keep], np.asarray(spec.delta)[keep], config.h)


def _initial_state(config: ExperimentConfig, state: RunState) -> np.ndarray:
    spec = config.x0
    n = state.graph.n
    if spec.kind == "explicit":
        if len(spec.values) != state.loaded_n:
            raise ConfigError(
                f"x0.explicit has {len(spec.values)} entries, the graph has {state.loaded_n} nodes",
                key="x0.explicit",
            )
        return np.asarray(spec.values, dtype=np.float64)[state.kept_nodes]
    if spec.kind == "uniform_range":
        return np.random.default_rng(spec.seed).uniform(spec.lo, spec.hi, n)
    return np.zeros(n)


def prepare(config: ExperimentConfig, state: RunState, bus: EventBus | None = None) -> RunState:
    """Run every stage up to (not including) the simulation.

    Fills ``state`` in place and returns it.

    Raises:
        NetsisError: From whichever stage fails
    """
    bus = bus or EventBus()

    graph = _load_graph(config)
    state.loaded_n = graph.n
    scc = strongly_connected_analysis(graph)
    state.kept_nodes = sorted(scc.largest_component)
    if not scc.is_strongly_connected:
        if config.strict_scc:
            raise NotStronglyConnected(
                f"graph has {len(scc.components)} strongly connected components",
                component_sizes=scc.component_sizes,
            )
        graph = scc.largest_component_subgraph
        state.warn(
            "graphio.LargestSccExtracted",
            f"graph is not strongly connected; keeping the largest component ({graph.n} of {state.loaded_n} nodes)",
            kept=graph.n,
            loaded=state.loaded_n,
        )
    if config.normalize_in_weights:
        graph = normalize_in_weights(graph)
    state.graph = graph
    bus.emit(EventType.GRAPH_LOADED, n=graph.n, edges=graph.edge_count)

    state.model, state.assumptions = build_and_validate(graph, _build_params(config, state))
    if state.assumptions.near_boundary:
        state.warn(
            "model.AssumptionThreeNearBoundary",
            f"Assumption 3 holds within the warning band at node {state.assumptions.worst_node}",
            node=state.assumptions.worst_node,
            value=state.assumptions.worst_value,
        )
    bus.emit(EventType.MODEL_VALIDATED, assumptions=state.assumptions)

    state.regime = classify_regime(state.model)
    if state.regime.boundary_warning:
        state.warn(
            "spectral.BoundaryWarning",
            f"threshold {state.regime.rho_threshold!r} is within the band around 1",
            rho_threshold=state.regime.rho_threshold,
        )
    bus.emit(EventType.REGIME_CLASSIFIED, regime=state.regime)

    if state.regime.endemic:
        state.equilibrium = solve_endemic(state.model, strict=config.strict_delta, regime=state.regime)
        if state.equilibrium.pinned_nodes:
            state.warn(
                "equilibrium.DegenerateDelta",
                f"delta_i = 0 at nodes {list(state.equilibrium.pinned_nodes)}; error-system diagnostics skipped",
                nodes=list(state.equilibrium.pinned_nodes),
            )
        else:
            state.error_system = build_error_system(state.model, state.equilibrium.x_star)
        bus.emit(EventType.EQUILIBRIUM_SOLVED, equilibrium=state.equilibrium, error_system=state.error_system)
    return state


def _diagnose(state: RunState, bus: EventBus) -> None:
    state.stability = diagnose(state.model, state.trajectory, state.x_star, state.error_system)
    if state.stability.overshoot_passed is False:
        state.warn(
            "stability.Overshoot",
            f"{state.stability.initial_class.value} start overshoots the endemic equilibrium",
            up=state.stability.overshoot_up_count,
            down=state.stability.overshoot_down_count,
        )
    bus.emit(EventType.DIAGNOSTICS_DONE, stability=state.stability)


def _report(state: RunState) -> dict[str, Any]:
    extras: dict[str, Any] = {"warnings": state.warnings}
    if state.graph is not None:
        extras["graph"] = {
            "n": state.graph.n,
            "edges": state.graph.edge_count,
            "loaded_n": state.loaded_n,
            "node_labels": list(state.graph.node_labels),
        }
    if state.model is not None:
        extras["model_fingerprint"] = state.model.fingerprint()
    if state.assumptions is not None:
        extras["assumptions"] = state.assumptions.to_dict()
    return build_report(
        regime=state.regime,
        equilibrium=state.equilibrium,
        error_system=state.error_system,
        stability=state.stability,
        trajectory=state.trajectory,
        errors=state.errors,
        extras=extras,
    )


def run_experiment(config: ExperimentConfig, bus: EventBus | None = None, write: bool = True) -> RunResult:
    """Run one experiment end to end.

    Args:
        config: Parsed experiment configuration
        bus: Optional event bus receiving one event per pipeline stage
        write: Write the CSV/JSON outputs named in config.output

    Returns:
        RunResult with the exit status and the report
    """
    bus = bus or EventBus()
    state = RunState()
    try:
        prepare(config, state, bus)
        x0 = _initial_state(config, state)
        state.trajectory = simulate(state.model, x0, config.horizon, config.stop_tol)
        bus.emit(EventType.TRAJECTORY_SIMULATED, trajectory=state.trajectory)
        _diagnose(state, bus)
    except NetsisError as e:
        logger.error("%s: %s", e.code, e.message)
        state.errors.append(e.to_dict())

    report = _report(state)
    trajectory_path = report_path = None
    if write:
        if config.output.trajectory_csv is not None and state.trajectory is not None:
            trajectory_path = write_trajectory_csv(state.trajectory, config.output.trajectory_csv)
        if config.output.report_json is not None:
            report_path = write_report(report, config.output.report_json)

    status = 1 if state.errors else 0
    bus.emit(EventType.RUN_FINISHED, status=status, errors=state.errors)
    return RunResult(status, report, state, trajectory_path, report_path)


def validate_config(config: ExperimentConfig, bus: EventBus | None = None) -> RunResult:
    """Run every stage except the simulation; nothing is written."""
    bus = bus or EventBus()
    state = RunState()
    try:
        prepare(config, state, bus)
    except NetsisError as e:
        logger.error("%s: %s", e.code, e.message)
        state.errors.append(e.to_dict())
    status = 1 if state.errors else 0
    bus.emit(EventType.RUN_FINISHED, status=status, errors=state.errors)
    return RunResult(status, _report(state), state)


def rediagnose(config: ExperimentConfig, trajectory_csv: str | Path) -> RunResult:
    """Recompute a report from a trajectory CSV instead of simulating.

    The model is rebuilt from the config; the trajectory is read back from
    disk. For a CSV written by run_experiment with the same config the
    whole report matches the original exactly, stop reason included.
    """
    bus = EventBus()
    state = RunState()
    try:
        prepare(config, state, bus)
        state.trajectory = read_trajectory_csv(trajectory_csv, config.stop_tol)
        if state.trajectory.n != state.model.n:
            raise ConfigError(
                f"trajectory has {state.trajectory.n} nodes, the model has {state.model.n}",
                path=str(trajectory_csv),
            )
        _diagnose(state, bus)
    except NetsisError as e:
        logger.error("%s: %s", e.code, e.message)
        state.errors.append(e.to_dict())
    status = 1 if state.errors else 0
    return RunResult(status, _report(state), state)
