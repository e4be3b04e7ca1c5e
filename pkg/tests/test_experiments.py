"""Tests for netsis.experiments (config parsing, runner, report I/O, sweeps)."""

import json
import logging
import math
from pathlib import Path

import numpy as np
import pandas as pd
import pytest

from netsis.core.config import DEFAULTS, REPORT_FIELDS, SUMMARY_COLUMNS
from netsis.core.errors import ConfigError, EmptyGrid, MalformedTrajectory
from netsis.core.events import EventBus, EventType
from netsis.experiments import (
    build_report,
    derive_seeds,
    dumps_report,
    expand_grid,
    load_config,
    parse_config,
    parse_sweep_config,
    read_report,
    read_trajectory_csv,
    rediagnose,
    run_experiment,
    sweep,
    to_jsonable,
    validate_config,
    write_trajectory_csv,
)
from netsis.model import StopReason, Trajectory


@pytest.fixture
def pair_edges(tmp_path):
    path = tmp_path / "pair.edges"
    path.write_text("0 1\n1 0\n")
    return path


@pytest.fixture
def pair_raw(pair_edges):
    """2-cycle, beta = 0.5, delta = 0.25, Dl start (0.2, 0.1)."""
    return {
        "network": {"edge_list": pair_edges.name},
        "params": {"beta": [0.5, 0.5], "delta": [0.25, 0.25]},
        "h": 1.0,
        "x0": {"explicit": [0.2, 0.1]},
        "horizon": 200,
        "output": {"trajectory_csv": "out/trajectory.csv", "report_json": "out/report.json"},
    }


@pytest.fixture
def generator_raw():
    """20-node generated graph with Parameters II rates."""
    return {
        "network": {"generator": {"n": 20, "extra_edge_prob": 0.1, "seed": 1}},
        "normalize_in_weights": True,
        "params": {"preset": "parameters_ii", "seed": 2},
        "x0": {"uniform_range": {"lo": 0.0, "hi": 0.2, "seed": 3}},
        "horizon": 500,
    }


def write_json(path: Path, raw: dict) -> Path:
    path.write_text(json.dumps(raw))
    return path


class TestParseConfig:
    """Tests for parse_config and load_config."""

    def test_explicit_pair(self, pair_raw, tmp_path):
        """Explicit vectors, explicit x0, paths resolved against base_dir."""
        config = parse_config(pair_raw, tmp_path)
        assert config.network.edge_list == tmp_path / "pair.edges"
        assert config.params.beta == (0.5, 0.5)
        assert not config.params.sampled
        assert config.x0.kind == "explicit"
        assert config.x0.values == (0.2, 0.1)
        assert config.output.report_json == tmp_path / "out" / "report.json"

    def test_preset(self, generator_raw):
        """A preset fills the ranges and h."""
        config = parse_config(generator_raw)
        assert config.params.sampled
        assert config.params.beta_range == (0.45, 0.55)
        assert config.params.delta_range == (0.25, 0.35)
        assert config.h == 1.0
        assert config.network.generator.n == 20

    def test_explicit_h_overrides_preset(self, generator_raw):
        """A top-level h wins over the preset's h."""
        config = parse_config({**generator_raw, "h": 0.5})
        assert config.h == 0.5

    def test_defaults(self, generator_raw):
        """Missing keys take the documented defaults."""
        raw = {k: v for k, v in generator_raw.items() if k not in ("x0", "horizon")}
        config = parse_config(raw)
        assert config.x0.kind == "zero"
        assert config.horizon == DEFAULTS.HORIZON
        assert config.stop_tol == DEFAULTS.STOP_TOL
        assert config.strict_scc is False
        assert config.strict_delta is True
        assert config.output.trajectory_csv is None

    def test_with_output(self, generator_raw, tmp_path):
        """with_output points both files into one directory."""
        config = parse_config(generator_raw).with_output(tmp_path / "cell")
        assert config.output.trajectory_csv == tmp_path / "cell" / DEFAULTS.CSV_NAME
        assert config.output.report_json == tmp_path / "cell" / DEFAULTS.REPORT_NAME

    @pytest.mark.parametrize(
        "patch, key",
        [
            ({"network": None}, "network"),
            ({"network": {"edge_list": "a", "generator": {"n": 3}}}, "network"),
            ({"network": {"generator": {"n": 0}}}, "network.generator.n"),
            ({"network": {"generator": {"n": 5, "extra_edge_prob": 2.0}}}, "network.generator.extra_edge_prob"),
            ({"params": {"preset": "parameters_iii"}}, "params.preset"),
            ({"params": {"beta": [0.5], "delta": [0.2, 0.2]}}, "params"),
            ({"params": {"beta_range": [0.1, 0.2]}}, "params.delta_range"),
            ({"x0": {"explicit": [1.5]}}, "x0.explicit"),
            ({"x0": {"uniform_range": {"lo": 0.5, "hi": 0.2}}}, "x0.uniform_range"),
            ({"x0": {"bogus": 1}}, "x0"),
            ({"horizon": -1}, "horizon"),
            ({"horizon": 1.5}, "horizon"),
            ({"stop_tol": -1e-3}, "stop_tol"),
            ({"normalize_in_weights": "yes"}, "normalize_in_weights"),
        ],
    )
    def test_invalid(self, generator_raw, patch, key):
        """Bad values raise ConfigError naming the offending key."""
        raw = {**generator_raw, **patch}
        if raw.get("network") is None:
            del raw["network"]
        with pytest.raises(ConfigError) as exc_info:
            parse_config(raw)
        assert exc_info.value.details["key"].endswith(key)
        assert exc_info.value.code == "cli.ConfigError"

    def test_load_config(self, pair_raw, pair_edges, tmp_path):
        """load_config resolves paths against the config's directory."""
        path = write_json(tmp_path / "exp.json", pair_raw)
        assert load_config(path).network.edge_list == pair_edges

    def test_invalid_json(self, tmp_path):
        """Broken JSON is a ConfigError."""
        path = tmp_path / "bad.json"
        path.write_text("{not json")
        with pytest.raises(ConfigError):
            load_config(path)


class TestRunExperiment:
    """Tests for run_experiment and validate_config."""

    def test_endemic_pair(self, pair_raw, tmp_path):
        """The hand-checkable pair: x* = (0.5, 0.5), no overshoot, endemic."""
        result = run_experiment(parse_config(pair_raw, tmp_path))
        report = result.report
        assert result.status == 0
        assert report["errors"] == []
        assert report["regime"] == "EndemicExists"
        assert report["rho_threshold"] == pytest.approx(1.25)
        assert report["x_star"] == pytest.approx([0.5, 0.5])
        assert report["rho_xi"] == pytest.approx(0.75)
        assert report["initial_class"] == "Dl"
        assert report["overshoot"]["up"] == 0
        assert report["lyapunov_monotone"] is True
        assert report["converged_to"] == "Endemic"
        assert result.trajectory_path == tmp_path / "out" / "trajectory.csv"
        assert read_report(result.report_path) == report

    def test_report_field_order(self, pair_raw, tmp_path):
        """The fixed fields come first, in order."""
        result = run_experiment(parse_config(pair_raw, tmp_path))
        text = result.report_path.read_text()
        keys = list(json.loads(text))
        assert keys[: len(REPORT_FIELDS)] == REPORT_FIELDS

    def test_byte_identical_reruns(self, pair_raw, tmp_path):
        """Same config twice gives byte-identical CSV and JSON."""
        first = parse_config(pair_raw, tmp_path).with_output(tmp_path / "a")
        second = parse_config(pair_raw, tmp_path).with_output(tmp_path / "b")
        ra, rb = run_experiment(first), run_experiment(second)
        assert ra.trajectory_path.read_bytes() == rb.trajectory_path.read_bytes()
        assert ra.report_path.read_bytes() == rb.report_path.read_bytes()

    def test_generated_deterministic(self, generator_raw, tmp_path):
        """Seeded generator configs reproduce exactly."""
        ra = run_experiment(parse_config(generator_raw).with_output(tmp_path / "a"))
        rb = run_experiment(parse_config(generator_raw).with_output(tmp_path / "b"))
        assert ra.status == rb.status == 0
        assert ra.report_path.read_bytes() == rb.report_path.read_bytes()
        assert ra.trajectory_path.read_bytes() == rb.trajectory_path.read_bytes()

    def test_assumption_three_violation(self, pair_raw, tmp_path):
        """h(delta + beta) = 1.2 > 1: nonzero status, error in the report, no CSV."""
        raw = {**pair_raw, "params": {"beta": [0.9, 0.9], "delta": [0.3, 0.3]}}
        result = run_experiment(parse_config(raw, tmp_path))
        assert result.status == 1
        assert [e["code"] for e in result.report["errors"]] == ["model.AssumptionThreeViolated"]
        assert result.report["regime"] is None
        assert result.trajectory_path is None
        assert read_report(result.report_path)["errors"][0]["details"]["node"] == 0

    def test_missing_edge_list(self, pair_raw, tmp_path):
        """An unreadable edge list is a config error in the report."""
        raw = {**pair_raw, "network": {"edge_list": "nope.edges"}}
        result = run_experiment(parse_config(raw, tmp_path), write=False)
        assert result.status == 1
        assert result.report["errors"][0]["code"] == "cli.ConfigError"

    def test_disease_free(self, pair_raw, tmp_path):
        """Below threshold: no x*, no error system, converges to zero."""
        raw = {**pair_raw, "params": {"beta": [0.2, 0.2], "delta": [0.3, 0.3]}, "horizon": 400}
        result = run_experiment(parse_config(raw, tmp_path), write=False)
        report = result.report
        assert result.status == 0
        assert report["regime"] == "DiseaseFreeOnly"
        assert report["x_star"] is None
        assert report["rho_xi"] is None
        assert report["initial_class"] is None
        assert report["converged_to"] == "DiseaseFree"

    def test_largest_scc_extracted(self, tmp_path):
        """A dangling node is dropped with a warning; explicit vectors are subset."""
        (tmp_path / "g.edges").write_text("0 1\n1 0\n1 2\n")
        raw = {
            "network": {"edge_list": "g.edges"},
            "params": {"beta": [0.5, 0.5, 0.9], "delta": [0.25, 0.25, 0.9]},
            "x0": {"explicit": [0.2, 0.1, 1.0]},
            "horizon": 100,
        }
        result = run_experiment(parse_config(raw, tmp_path), write=False)
        assert result.status == 0
        assert [w["code"] for w in result.report["warnings"]] == ["graphio.LargestSccExtracted"]
        assert result.report["graph"]["n"] == 2
        assert result.report["graph"]["loaded_n"] == 3
        assert result.report["x_star"] == pytest.approx([0.5, 0.5])
        np.testing.assert_array_equal(result.state.trajectory.initial, [0.2, 0.1])

    def test_strict_scc(self, tmp_path):
        """strict_scc turns extraction into an error."""
        (tmp_path / "g.edges").write_text("0 1\n1 0\n1 2\n")
        raw = {
            "network": {"edge_list": "g.edges"},
            "params": {"preset": "parameters_i"},
            "strict_scc": True,
        }
        result = run_experiment(parse_config(raw, tmp_path), write=False)
        assert result.status == 1
        assert result.report["errors"][0]["code"] == "model.NotStronglyConnected"

    def test_explicit_vector_length(self, pair_raw, tmp_path):
        """Explicit vectors must match the loaded graph."""
        raw = {**pair_raw, "params": {"beta": [0.5, 0.5, 0.5], "delta": [0.25, 0.25, 0.25]}}
        result = run_experiment(parse_config(raw, tmp_path), write=False)
        assert result.report["errors"][0]["details"]["key"] == "params.beta"

    def test_events_in_order(self, pair_raw, tmp_path):
        """One event per stage, in pipeline order."""
        bus = EventBus()
        seen = []
        for event in EventType:
            bus.subscribe(event, lambda _e=event, **kw: seen.append(_e))
        run_experiment(parse_config(pair_raw, tmp_path), bus, write=False)
        assert seen == [
            EventType.GRAPH_LOADED,
            EventType.MODEL_VALIDATED,
            EventType.REGIME_CLASSIFIED,
            EventType.EQUILIBRIUM_SOLVED,
            EventType.TRAJECTORY_SIMULATED,
            EventType.DIAGNOSTICS_DONE,
            EventType.RUN_FINISHED,
        ]

    def test_validate_only(self, pair_raw, tmp_path):
        """validate_config stops before simulating and writes nothing."""
        result = validate_config(parse_config(pair_raw, tmp_path))
        assert result.status == 0
        assert result.state.trajectory is None
        assert result.report["regime"] == "EndemicExists"
        assert result.report["steps"] is None
        assert not (tmp_path / "out").exists()


class TestReportIO:
    """Tests for trajectory CSV and report JSON helpers."""

    def test_csv_round_trip_is_exact(self, tmp_path):
        """17 significant digits reproduce every float bit for bit."""
        states = np.random.default_rng(0).uniform(0.0, 1.0, size=(30, 4))
        path = write_trajectory_csv(Trajectory(states), tmp_path / "t.csv")
        assert path.read_text().splitlines()[0] == "k,x_0,x_1,x_2,x_3"
        assert read_trajectory_csv(path).states.tobytes() == states.tobytes()

    @pytest.mark.parametrize(
        "text",
        [
            "",
            "k\n0\n",
            "k,x_1\n0,0.5\n",
            "k,x_0\n",
            "k,x_0\n0,0.5\n2,0.5\n",
            "k,x_0\n0,abc\n",
        ],
    )
    def test_malformed_csv(self, tmp_path, text):
        """Empty files, bad headers, gaps in k and non-numbers are rejected."""
        path = tmp_path / "bad.csv"
        path.write_text(text)
        with pytest.raises(MalformedTrajectory):
            read_trajectory_csv(path)

    def test_stop_reason_from_stop_tol(self, tmp_path):
        """A final change below stop_tol reads back as an early stop."""
        states = np.array([[0.2, 0.1], [0.4, 0.3], [0.4, 0.3 + 1e-13]])
        path = write_trajectory_csv(Trajectory(states), tmp_path / "t.csv")
        assert read_trajectory_csv(path).stop_reason is StopReason.HORIZON
        converged = read_trajectory_csv(path, stop_tol=1e-12)
        assert converged.stop_reason is StopReason.CONVERGED
        assert converged.stop_tol == 1e-12
        assert read_trajectory_csv(path, stop_tol=1e-14).stop_reason is StopReason.HORIZON

    def test_missing_csv(self, tmp_path):
        """A missing file is a MalformedTrajectory."""
        with pytest.raises(MalformedTrajectory):
            read_trajectory_csv(tmp_path / "missing.csv")

    def test_to_jsonable(self):
        """numpy values become Python values; non-finite floats become null."""
        out = to_jsonable({"a": np.float64(0.5), "b": np.int64(2), "c": [math.nan, math.inf], "d": np.bool_(True)})
        assert out == {"a": 0.5, "b": 2, "c": [None, None], "d": True}
        json.dumps(out)

    def test_empty_report(self):
        """A report from no stages has every field null and no errors."""
        report = build_report()
        assert report["errors"] == []
        assert report["overshoot"] == {"up": None, "down": None}
        assert all(report[f] is None for f in REPORT_FIELDS if f not in ("errors", "overshoot"))

    def test_dumps_deterministic(self):
        """Same report, same text, trailing newline."""
        report = build_report(errors=[{"code": "x", "message": "y", "details": {}}])
        assert dumps_report(report) == dumps_report(report)
        assert dumps_report(report).endswith("}\n")


class TestRediagnose:
    """Tests for rediagnose."""

    def test_reproduces_report(self, generator_raw, tmp_path):
        """The report recomputed from the CSV equals the original in full."""
        config = parse_config(generator_raw).with_output(tmp_path)
        original = run_experiment(config)
        again = rediagnose(config, original.trajectory_path)
        assert again.status == 0
        assert again.report == original.report
        assert dumps_report(again.report) == original.report_path.read_text()

    def test_reproduces_early_stop(self, pair_raw, pair_edges):
        """A run that stopped on stop_tol re-diagnoses with the same stop reason."""
        config = load_config(write_json(pair_edges.parent / "pair.json", {**pair_raw, "horizon": 100_000}))
        original = run_experiment(config)
        assert original.report["stop_reason"] == "converged"
        assert original.report["steps"] < 100_000
        again = rediagnose(config, original.trajectory_path)
        assert again.report["stop_reason"] == "converged"
        assert again.report == original.report

    def test_wrong_node_count(self, generator_raw, tmp_path):
        """A CSV for a different graph is rejected."""
        path = write_trajectory_csv(Trajectory(np.zeros((3, 2))), tmp_path / "t.csv")
        result = rediagnose(parse_config(generator_raw), path)
        assert result.status == 1
        assert result.report["errors"][0]["code"] == "cli.ConfigError"

    def test_malformed_csv(self, generator_raw, tmp_path):
        """A broken CSV lands in the error list."""
        path = tmp_path / "t.csv"
        path.write_text("step,value\n")
        result = rediagnose(parse_config(generator_raw), path)
        assert result.report["errors"][0]["code"] == "cli.MalformedTrajectory"


class TestSweep:
    """Tests for grid expansion and sweeps."""

    def test_derive_seeds(self):
        """Three distinct deterministic seeds per grid seed."""
        a, b = derive_seeds(5), derive_seeds(5)
        assert a == b
        assert len(set(a)) == 3
        assert derive_seeds(6) != a

    def test_expand_grid(self, generator_raw, tmp_path):
        """Cartesian product in axis order with zero-padded ids."""
        raw = {**generator_raw, "grid": {"seeds": [1, 2], "h": [0.5, 1.0]}, "out_dir": "s"}
        sweep_config = parse_sweep_config(raw, tmp_path)
        cells = expand_grid(sweep_config)
        assert [c.cell_id for c in cells] == ["cell_000", "cell_001", "cell_002", "cell_003"]
        assert [c.values for c in cells][:2] == [{"h": 0.5, "seeds": 1}, {"h": 0.5, "seeds": 2}]
        assert cells[0].config.h == 0.5
        graph_seed, params_seed, x0_seed = derive_seeds(1)
        assert cells[0].config.network.generator.seed == graph_seed
        assert cells[0].config.params.seed == params_seed
        assert cells[0].config.x0.seed == x0_seed
        assert cells[3].config.output.report_json == tmp_path / "s" / "cell_003" / DEFAULTS.REPORT_NAME

    @pytest.mark.parametrize("grid", [{}, {"h": []}])
    def test_empty_grid(self, generator_raw, tmp_path, grid):
        """No cells raises EmptyGrid."""
        sweep_config = parse_sweep_config({**generator_raw, "grid": grid}, tmp_path)
        with pytest.raises(EmptyGrid):
            sweep(sweep_config)

    def test_unknown_axis(self, generator_raw):
        """Only the documented axes are accepted."""
        with pytest.raises(ConfigError):
            parse_sweep_config({**generator_raw, "grid": {"gamma": [1]}})

    def test_n_axis_needs_generator(self, pair_raw, tmp_path):
        """Graph size can only vary for generated graphs."""
        with pytest.raises(ConfigError):
            parse_sweep_config({**pair_raw, "grid": {"n": [5, 10]}}, tmp_path)

    def test_h_grid_all_endemic(self, generator_raw, tmp_path):
        """The endemic regime does not depend on h."""
        raw = {**generator_raw, "grid": {"h": [0.25, 0.5, 1.0]}, "out_dir": "s"}
        sweep_config = parse_sweep_config(raw, tmp_path)
        result = sweep(sweep_config)
        assert result.status == 0
        assert list(result.summary.columns) == SUMMARY_COLUMNS
        assert list(result.summary["regime"]) == ["EndemicExists"] * 3
        assert (result.summary["rho_xi"] < 1).all()
        for cell in ("cell_000", "cell_001", "cell_002"):
            assert (tmp_path / "s" / cell / DEFAULTS.REPORT_NAME).exists()
        assert pd.read_csv(result.summary_path)["cell_id"].tolist() == ["cell_000", "cell_001", "cell_002"]

    def test_summary_matches_reports(self, generator_raw, tmp_path):
        """steps_to_tolerance from the store equals each report's own count."""
        sweep_config = parse_sweep_config({**generator_raw, "grid": {"seeds": [1, 2]}, "out_dir": "s"}, tmp_path)
        result = sweep(sweep_config)
        for row in result.summary.itertuples():
            report = read_report(tmp_path / "s" / row.cell_id / DEFAULTS.REPORT_NAME)
            assert row.steps_to_tolerance == report["steps_to_tolerance"]
            assert row.rho_threshold == report["rho_threshold"]

    def test_worker_count_does_not_matter(self, generator_raw, tmp_path):
        """1 and 2 workers write the same summary bytes."""
        grid = {"seeds": [1, 2, 3], "h": [0.5, 1.0]}
        one = sweep(parse_sweep_config({**generator_raw, "grid": grid, "out_dir": "one"}, tmp_path), workers=1)
        two = sweep(parse_sweep_config({**generator_raw, "grid": grid, "out_dir": "two"}, tmp_path), workers=2)
        assert one.summary_path.read_bytes() == two.summary_path.read_bytes()

    def test_out_of_core_matches_in_memory(self, generator_raw, tmp_path):
        """Parquet-backed and in-memory stores give the same summary."""
        grid = {"seeds": [1, 2]}
        mem = sweep(parse_sweep_config({**generator_raw, "grid": grid, "out_dir": "mem"}, tmp_path))
        disk = sweep(
            parse_sweep_config({**generator_raw, "grid": grid, "out_dir": "disk"}, tmp_path), out_of_core=True
        )
        assert mem.summary_path.read_bytes() == disk.summary_path.read_bytes()
        assert not list((tmp_path / "disk" / ".trajectory_cache").glob("*.parquet"))

    def test_logs_store_size(self, generator_raw, tmp_path, caplog):
        """The sweep logs how many rows and Parquet megabytes the store held."""
        sweep_config = parse_sweep_config({**generator_raw, "grid": {"seeds": [1, 2]}, "out_dir": "s"}, tmp_path)
        with caplog.at_level(logging.INFO, logger="netsis.experiments.sweep"):
            sweep(sweep_config, out_of_core=True)
        (record,) = [r for r in caplog.records if r.getMessage().startswith("trajectory store")]
        cells, rows, size_mb = record.args
        steps = [read_report(tmp_path / "s" / c / DEFAULTS.REPORT_NAME)["steps"] for c in ("cell_000", "cell_001")]
        assert cells == 2
        assert rows == sum((k + 1) * 20 for k in steps)
        assert size_mb > 0

    def test_failed_cell_recorded(self, generator_raw, tmp_path):
        """A cell violating Assumption 3 fails; the sweep continues."""
        sweep_config = parse_sweep_config({**generator_raw, "grid": {"h": [1.0, 2.0]}, "out_dir": "s"}, tmp_path)
        bus = EventBus()
        finished = []
        bus.subscribe(EventType.CELL_FINISHED, lambda **kw: finished.append((kw["cell_id"], kw["status"])))
        result = sweep(sweep_config, bus=bus)
        assert result.status == 1
        assert result.failed == ["cell_001"]
        assert finished == [("cell_000", 0), ("cell_001", 1)]
        row = result.summary.iloc[1]
        assert math.isnan(row["rho_threshold"])
        assert pd.isna(row["steps_to_tolerance"])
