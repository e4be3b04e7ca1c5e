"""Experiment configuration: parsing JSON into frozen dataclasses.

Example config::

    {
      "network": {"generator": {"n": 67, "extra_edge_prob": 0.05, "seed": 1}},
      "normalize_in_weights": true,
      "params": {"preset": "parameters_ii", "seed": 7},
      "h": 1.0,
      "x0": {"uniform_range": {"lo": 0.0, "hi": 0.2, "seed": 3}},
      "horizon": 5000,
      "stop_tol": 1e-12,
      "output": {"trajectory_csv": "out/trajectory.csv", "report_json": "out/report.json"}
    }

Relative paths are resolved against the directory of the config file.
"""

from __future__ import annotations

import json
import math
from collections.abc import Mapping
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any

from netsis.core.config import DEFAULTS, PARAMETER_PRESETS
from netsis.core.errors import ConfigError


@dataclass(frozen=True)
class GeneratorSpec:
    n: int
    extra_edge_prob: float
    seed: int


@dataclass(frozen=True)
class NetworkSpec:
    """Either an edge-list file or a generator; exactly one is set."""

    edge_list: Path | None = None
    relabel: bool = False
    generator: GeneratorSpec | None = None


@dataclass(frozen=True)
class ParamsSpec:
    """Explicit vectors (indexed by external node id) or sampled ranges."""

    beta: tuple[float, ...] | None = None
    delta: tuple[float, ...] | None = None
    beta_range: tuple[float, float] | None = None
    delta_range: tuple[float, float] | None = None
    seed: int = 0

    @property
    def sampled(self) -> bool:
        return self.beta is None


@dataclass(frozen=True)
class InitialSpec:
    """x0: ``zero``, ``explicit`` (values by external node id) or ``uniform_range``."""

    kind: str = "zero"
    values: tuple[float, ...] = ()
    lo: float = 0.0
    hi: float = 1.0
    seed: int = 0


@dataclass(frozen=True)
class OutputSpec:
    trajectory_csv: Path | None = None
    report_json: Path | None = None


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything needed to reproduce one run."""

    network: NetworkSpec
    params: ParamsSpec
    h: float = 1.0
    normalize_in_weights: bool = False
    strict_scc: bool = False
    strict_delta: bool = DEFAULTS.STRICT_DELTA
    x0: InitialSpec = field(default_factory=InitialSpec)
    horizon: int = DEFAULTS.HORIZON
    stop_tol: float = DEFAULTS.STOP_TOL
    output: OutputSpec = field(default_factory=OutputSpec)

    def with_output(self, directory: Path) -> ExperimentConfig:
        """Copy with outputs redirected into directory."""
        return replace(
            self,
            output=OutputSpec(directory / DEFAULTS.CSV_NAME, directory / DEFAULTS.REPORT_NAME),
        )


def _require(mapping: Mapping, key: str, label: str) -> Any:
    if key not in mapping:
        raise ConfigError(f"{label}: missing required key {key!r}", key=f"{label}.{key}")
    return mapping[key]


def _as_mapping(value: Any, label: str) -> Mapping:
    if not isinstance(value, Mapping):
        raise ConfigError(f"{label} must be an object", key=label)
    return value


def _as_float(value: Any, label: str) -> float:
    if isinstance(value, bool):
        raise ConfigError(f"{label} must be a number", key=label)
    try:
        result = float(value)
    except (TypeError, ValueError):
        raise ConfigError(f"{label} must be a number, got {value!r}", key=label) from None
    if not math.isfinite(result):
        raise ConfigError(f"{label} must be finite", key=label)
    return result


def _as_int(value: Any, label: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{label} must be an integer, got {value!r}", key=label)
    return value


def _as_bool(value: Any, label: str) -> bool:
    if not isinstance(value, bool):
        raise ConfigError(f"{label} must be true or false", key=label)
    return value


def _as_pair(value: Any, label: str) -> tuple[float, float]:
    if not isinstance(value, (list, tuple)) or len(value) != 2:
        raise ConfigError(f"{label} must be a [lo, hi] pair", key=label)
    return (_as_float(value[0], label), _as_float(value[1], label))


def _as_vector(value: Any, label: str) -> tuple[float, ...]:
    if not isinstance(value, (list, tuple)) or not value:
        raise ConfigError(f"{label} must be a non-empty list of numbers", key=label)
    return tuple(_as_float(v, label) for v in value)


def _resolve(path: Any, base_dir: Path, label: str) -> Path:
    if not isinstance(path, str) or not path:
        raise ConfigError(f"{label} must be a path string", key=label)
    p = Path(path)
    return p if p.is_absolute() else base_dir / p


def _parse_network(raw: Any, base_dir: Path) -> NetworkSpec:
    raw = _as_mapping(raw, "network")
    if ("edge_list" in raw) == ("generator" in raw):
        raise ConfigError("network needs exactly one of 'edge_list' or 'generator'", key="network")
    if "edge_list" in raw:
        relabel = _as_bool(raw.get("relabel", False), "network.relabel")
        return NetworkSpec(edge_list=_resolve(raw["edge_list"], base_dir, "network.edge_list"), relabel=relabel)
    gen = _as_mapping(raw["generator"], "network.generator")
    spec = GeneratorSpec(
        n=_as_int(_require(gen, "n", "network.generator"), "network.generator.n"),
        extra_edge_prob=_as_float(gen.get("extra_edge_prob", 0.0), "network.generator.extra_edge_prob"),
        seed=_as_int(gen.get("seed", 0), "network.generator.seed"),
    )
    if spec.n < 1:
        raise ConfigError("network.generator.n must be >= 1", key="network.generator.n")
    if not 0.0 <= spec.extra_edge_prob <= 1.0:
        raise ConfigError("network.generator.extra_edge_prob must lie in [0, 1]", key="network.generator.extra_edge_prob")
    return NetworkSpec(generator=spec)


def _parse_params(raw: Any) -> tuple[ParamsSpec, float | None]:
    """Returns the spec and the preset's h (None when no preset is used)."""
    raw = _as_mapping(raw, "params")
    if "beta" in raw or "delta" in raw:
        beta = _as_vector(_require(raw, "beta", "params"), "params.beta")
        delta = _as_vector(_require(raw, "delta", "params"), "params.delta")
        if len(beta) != len(delta):
            raise ConfigError("params.beta and params.delta must have equal length", key="params")
        return ParamsSpec(beta=beta, delta=delta), None

    preset_h = None
    ranges: dict[str, Any] = {}
    if "preset" in raw:
        name = raw["preset"]
        if name not in PARAMETER_PRESETS:
            raise ConfigError(
                f"unknown params.preset {name!r}; choose from {sorted(PARAMETER_PRESETS)}", key="params.preset"
            )
        ranges.update(PARAMETER_PRESETS[name])
        preset_h = float(ranges.pop("h"))
    sampled = raw.get("sampled", raw)
    sampled = _as_mapping(sampled, "params.sampled")
    for key in ("beta_range", "delta_range"):
        if key in sampled:
            ranges[key] = sampled[key]
    seed = sampled.get("seed", raw.get("seed", 0))
    for key in ("beta_range", "delta_range"):
        if key not in ranges:
            raise ConfigError(f"params: missing {key!r} (or a 'preset')", key=f"params.{key}")
    spec = ParamsSpec(
        beta_range=_as_pair(ranges["beta_range"], "params.beta_range"),
        delta_range=_as_pair(ranges["delta_range"], "params.delta_range"),
        seed=_as_int(seed, "params.seed"),
    )
    return spec, preset_h


def _parse_x0(raw: Any) -> InitialSpec:
    if raw is None or raw == "zero":
        return InitialSpec()
    raw = _as_mapping(raw, "x0")
    if raw.get("zero"):
        return InitialSpec()
    if "explicit" in raw:
        values = _as_vector(raw["explicit"], "x0.explicit")
        if any(v < 0 or v > 1 for v in values):
            raise ConfigError("x0.explicit entries must lie in [0, 1]", key="x0.explicit")
        return InitialSpec(kind="explicit", values=values)
    if "uniform_range" in raw:
        rng = _as_mapping(raw["uniform_range"], "x0.uniform_range")
        lo = _as_float(rng.get("lo", 0.0), "x0.uniform_range.lo")
        hi = _as_float(rng.get("hi", 1.0), "x0.uniform_range.hi")
        if not 0.0 <= lo < hi <= 1.0:
            raise ConfigError("x0.uniform_range needs 0 <= lo < hi <= 1", key="x0.uniform_range")
        return InitialSpec(kind="uniform_range", lo=lo, hi=hi, seed=_as_int(rng.get("seed", 0), "x0.uniform_range.seed"))
    raise ConfigError("x0 must be 'zero', {'explicit': [...]} or {'uniform_range': {...}}", key="x0")


def _parse_output(raw: Any, base_dir: Path) -> OutputSpec:
    if raw is None:
        return OutputSpec()
    raw = _as_mapping(raw, "output")
    csv = raw.get("trajectory_csv")
    report = raw.get("report_json")
    return OutputSpec(
        trajectory_csv=_resolve(csv, base_dir, "output.trajectory_csv") if csv is not None else None,
        report_json=_resolve(report, base_dir, "output.report_json") if report is not None else None,
    )


def parse_config(raw: Mapping[str, Any], base_dir: Path | None = None) -> ExperimentConfig:
    """Build an ExperimentConfig from a decoded JSON object.

    Args:
        raw: Decoded JSON
        base_dir: Directory relative paths are resolved against (default: cwd)

    Raises:
        ConfigError: Missing key, wrong type, or inconsistent values
    """
    raw = _as_mapping(raw, "config")
    base_dir = base_dir or Path.cwd()
    params, preset_h = _parse_params(_require(raw, "params", "config"))
    h = _as_float(raw["h"], "h") if "h" in raw else (preset_h if preset_h is not None else 1.0)
    horizon = _as_int(raw.get("horizon", DEFAULTS.HORIZON), "horizon")
    stop_tol = _as_float(raw.get("stop_tol", DEFAULTS.STOP_TOL), "stop_tol")
    if horizon < 0:
        raise ConfigError("horizon must be >= 0", key="horizon")
    if stop_tol < 0:
        raise ConfigError("stop_tol must be >= 0", key="stop_tol")
    return ExperimentConfig(
        network=_parse_network(_require(raw, "network", "config"), base_dir),
        params=params,
        h=h,
        normalize_in_weights=_as_bool(raw.get("normalize_in_weights", False), "normalize_in_weights"),
        strict_scc=_as_bool(raw.get("strict_scc", False), "strict_scc"),
        strict_delta=_as_bool(raw.get("strict_delta", DEFAULTS.STRICT_DELTA), "strict_delta"),
        x0=_parse_x0(raw.get("x0")),
        horizon=horizon,
        stop_tol=stop_tol,
        output=_parse_output(raw.get("output"), base_dir),
    )


def load_json(path: str | Path) -> dict[str, Any]:
    """Read a JSON file, turning decode errors into ConfigError."""
    path = Path(path)
    try:
        return json.loads(path.read_text(encoding="utf-8"))
    except OSError as e:
        raise ConfigError(f"cannot read config {path}: {e}", path=str(path)) from e
    except json.JSONDecodeError as e:
        raise ConfigError(f"invalid JSON in {path}: {e}", path=str(path), line=e.lineno) from e


def load_config(path: str | Path) -> ExperimentConfig:
    """Read and parse an experiment config file."""
    path = Path(path)
    return parse_config(load_json(path), base_dir=path.parent)


GRID_AXES = ("h", "beta_range", "delta_range", "n", "seeds")


@dataclass(frozen=True)
class SweepConfig:
    """A base experiment plus grid axes.

    Attributes:
        base: Config every cell starts from
        axes: (axis name, values) pairs in GRID_AXES order
        out_dir: Directory receiving one sub-directory per cell and the summary
    """

    base: ExperimentConfig
    axes: tuple[tuple[str, tuple[Any, ...]], ...]
    out_dir: Path


def _parse_axis(name: str, values: Any, base: ExperimentConfig) -> tuple[Any, ...]:
    label = f"grid.{name}"
    if not isinstance(values, (list, tuple)):
        raise ConfigError(f"{label} must be a list", key=label)
    if name == "h":
        return tuple(_as_float(v, label) for v in values)
    if name in ("beta_range", "delta_range"):
        if not base.params.sampled:
            raise ConfigError(f"{label} needs sampled params, the base config gives explicit vectors", key=label)
        return tuple(_as_pair(v, label) for v in values)
    if name == "n":
        if base.network.generator is None:
            raise ConfigError(f"{label} needs a generator network, the base config reads an edge list", key=label)
        sizes = tuple(_as_int(v, label) for v in values)
        if any(s < 1 for s in sizes):
            raise ConfigError(f"{label} entries must be >= 1", key=label)
        return sizes
    return tuple(_as_int(v, label) for v in values)


def parse_sweep_config(raw: Mapping[str, Any], base_dir: Path | None = None) -> SweepConfig:
    """Build a SweepConfig: experiment keys plus ``grid`` and ``out_dir``.

    Raises:
        ConfigError: Unknown axis, or an axis that does not fit the base config
    """
    raw = dict(_as_mapping(raw, "config"))
    base_dir = base_dir or Path.cwd()
    grid = _as_mapping(raw.pop("grid", {}), "grid")
    out_dir = raw.pop("out_dir", "sweep")
    base = parse_config(raw, base_dir)

    unknown = sorted(set(grid) - set(GRID_AXES))
    if unknown:
        raise ConfigError(f"unknown grid axes {unknown}; choose from {list(GRID_AXES)}", key="grid")
    axes = tuple((name, _parse_axis(name, grid[name], base)) for name in GRID_AXES if name in grid)
    return SweepConfig(base=base, axes=axes, out_dir=_resolve(out_dir, base_dir, "out_dir"))


def load_sweep_config(path: str | Path) -> SweepConfig:
    """Read and parse a sweep config file."""
    path = Path(path)
    return parse_sweep_config(load_json(path), base_dir=path.parent)
