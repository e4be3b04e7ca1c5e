"""Command-line interface for netsis.

This module provides the Click-based CLI for validating and running
experiments, sweeping parameter grids, and inspecting edge lists.
"""

from __future__ import annotations

import json
import logging
from dataclasses import replace
from pathlib import Path

import click

from netsis import __version__
from netsis.core.config import DEFAULTS
from netsis.core.errors import NetsisError
from netsis.core.events import EventBus, EventType
from netsis.experiments.config import load_config, load_sweep_config
from netsis.experiments.report_io import dumps_report
from netsis.experiments.runner import RunResult, rediagnose, run_experiment, validate_config
from netsis.experiments.sweep import sweep as run_sweep
from netsis.graphio.connectivity import strongly_connected_analysis
from netsis.graphio.edge_list import read_edge_list

logger = logging.getLogger(__name__)


def _setup_logging(verbose: int, quiet: bool) -> None:
    if quiet:
        level = logging.ERROR
    elif verbose >= 2:
        level = logging.DEBUG
    elif verbose == 1:
        level = logging.INFO
    else:
        level = logging.WARNING
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s", force=True)


def _fail(ctx: click.Context, error: NetsisError) -> None:
    """Print a machine-readable error report and exit nonzero."""
    click.echo(json.dumps({"errors": [error.to_dict()]}, indent=2), err=True)
    ctx.exit(1)


def _progress_bus() -> EventBus:
    bus = EventBus()
    bus.subscribe(EventType.GRAPH_LOADED, lambda **kw: click.echo(f"graph: {kw['n']} nodes, {kw['edges']} edges"))
    bus.subscribe(
        EventType.REGIME_CLASSIFIED,
        lambda **kw: click.echo(f"regime: {kw['regime'].regime.value} (rho = {kw['regime'].rho_threshold:.12g})"),
    )
    bus.subscribe(
        EventType.EQUILIBRIUM_SOLVED,
        lambda **kw: click.echo(f"endemic equilibrium: {kw['equilibrium'].iterations} iterations"),
    )
    bus.subscribe(EventType.TRAJECTORY_SIMULATED, lambda **kw: click.echo(f"simulated {kw['trajectory'].steps} steps"))
    return bus


def _echo_errors(result: RunResult) -> None:
    for error in result.report["errors"]:
        click.echo(f"error: {error['code']}: {error['message']}", err=True)


@click.group()
@click.version_option(__version__, prog_name="netsis")
@click.option("--verbose", "-v", count=True, help="More log output (-vv for debug)")
@click.option("--quiet", "-q", is_flag=True, default=False, help="Only log errors")
def main(verbose, quiet):
    """netsis - discrete-time networked SIS simulator and stability toolkit.

    \b
    Examples:
        netsis validate experiment.json
        netsis run experiment.json
        netsis sweep sweep.json --workers 4
        netsis graph-info network.edges
    """
    _setup_logging(verbose, quiet)


@main.command()
@click.argument("config_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--strict-scc", is_flag=True, default=False, help="Fail instead of keeping the largest SCC")
@click.pass_context
def validate(ctx, config_path, strict_scc):
    """Check a config: graph, Assumptions 1-3, regime. Nothing is simulated."""
    try:
        config = load_config(config_path)
    except NetsisError as e:
        _fail(ctx, e)
    if strict_scc:
        config = replace(config, strict_scc=True)

    result = validate_config(config, _progress_bus())
    _echo_errors(result)
    if result.status == 0:
        click.echo("ok")
    ctx.exit(result.status)


@main.command()
@click.argument("config_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--strict-scc", is_flag=True, default=False, help="Fail instead of keeping the largest SCC")
@click.pass_context
def run(ctx, config_path, strict_scc):
    """Run one experiment and write its trajectory CSV and report JSON."""
    try:
        config = load_config(config_path)
    except NetsisError as e:
        _fail(ctx, e)
    if strict_scc:
        config = replace(config, strict_scc=True)

    result = run_experiment(config, _progress_bus())
    _echo_errors(result)
    if result.trajectory_path is not None:
        click.echo(f"trajectory: {result.trajectory_path}")
    if result.report_path is not None:
        click.echo(f"report: {result.report_path}")
    else:
        click.echo(dumps_report(result.report), nl=False)
    ctx.exit(result.status)


@main.command()
@click.argument("config_path", type=click.Path(exists=True, dir_okay=False))
@click.argument("trajectory_csv", type=click.Path(exists=True, dir_okay=False))
@click.pass_context
def diagnose(ctx, config_path, trajectory_csv):
    """Recompute the report for an existing trajectory CSV and print it."""
    try:
        config = load_config(config_path)
    except NetsisError as e:
        _fail(ctx, e)
    result = rediagnose(config, trajectory_csv)
    click.echo(dumps_report(result.report), nl=False)
    ctx.exit(result.status)


@main.command()
@click.argument("config_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--workers", "-j", default=DEFAULTS.SWEEP_WORKERS, show_default=True, type=click.IntRange(min=1))
@click.option(
    "--out-of-core/--in-memory",
    default=DEFAULTS.OUT_OF_CORE,
    help="Keep sweep trajectories in Parquet files instead of RAM",
)
@click.option("--out-dir", type=click.Path(file_okay=False), default=None, help="Override the config's out_dir")
@click.option("--strict-scc", is_flag=True, default=False, help="Fail instead of keeping the largest SCC")
@click.pass_context
def sweep(ctx, config_path, workers, out_of_core, out_dir, strict_scc):
    """Run a grid of experiments and write summary.csv."""
    try:
        config = load_sweep_config(config_path)
    except NetsisError as e:
        _fail(ctx, e)
    if strict_scc:
        config = replace(config, base=replace(config.base, strict_scc=True))
    if out_dir is not None:
        config = replace(config, out_dir=Path(out_dir))

    bus = EventBus()
    bus.subscribe(
        EventType.CELL_FINISHED,
        lambda **kw: click.echo(f"{kw['cell_id']}: {'ok' if kw['status'] == 0 else 'failed'}"),
    )
    try:
        result = run_sweep(config, workers=workers, out_of_core=out_of_core, bus=bus)
    except NetsisError as e:
        _fail(ctx, e)
    click.echo(f"summary: {result.summary_path}")
    ctx.exit(result.status)


@main.command("graph-info")
@click.argument("edge_list", type=click.Path(exists=True, dir_okay=False))
@click.option("--relabel", is_flag=True, default=False, help="Compact sparse node ids to 0..n-1")
@click.pass_context
def graph_info(ctx, edge_list, relabel):
    """Print node/edge counts and strongly connected components of an edge list."""
    try:
        g = read_edge_list(edge_list, relabel=relabel)
    except NetsisError as e:
        _fail(ctx, e)
    scc = strongly_connected_analysis(g)
    click.echo(f"nodes: {g.n}")
    click.echo(f"edges: {g.edge_count}")
    click.echo(f"strongly connected: {'yes' if scc.is_strongly_connected else 'no'}")
    click.echo(f"components: {len(scc.components)}")
    click.echo(f"component sizes: {' '.join(str(s) for s in sorted(scc.component_sizes, reverse=True))}")
    click.echo(f"largest component: {len(scc.largest_component)} nodes")


if __name__ == "__main__":
    main()
