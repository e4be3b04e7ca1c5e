"""SIS transition rates and their seeded sampling."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from netsis.core.errors import InvalidInterval


@dataclass(frozen=True, eq=False)
class SisParams:
    """Per-node infection/curing rates and the sampling period.

    Attributes:
        beta: Infection rates beta_i (> 0 under Assumption 2)
        delta: Curing rates delta_i (>= 0 under Assumption 2)
        h: Sampling period (> 0)
    """

    beta: np.ndarray
    delta: np.ndarray
    h: float

    def __post_init__(self):
        beta = np.array(self.beta, dtype=np.float64).reshape(-1)
        delta = np.array(self.delta, dtype=np.float64).reshape(-1)
        beta.setflags(write=False)
        delta.setflags(write=False)
        object.__setattr__(self, "beta", beta)
        object.__setattr__(self, "delta", delta)
        object.__setattr__(self, "h", float(self.h))

    @property
    def n(self) -> int:
        return self.beta.shape[0]

    @classmethod
    def homogeneous(cls, n: int, beta: float, delta: float, h: float = 1.0) -> SisParams:
        """Same beta and delta at every node."""
        return cls(np.full(n, beta), np.full(n, delta), h)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SisParams):
            return NotImplemented
        return self.h == other.h and np.array_equal(self.beta, other.beta) and np.array_equal(self.delta, other.delta)

    __hash__ = None


def _check_interval(name: str, interval: tuple[float, float], lower_limit: float) -> tuple[float, float]:
    try:
        lo, hi = (float(v) for v in interval)
    except (TypeError, ValueError):
        raise InvalidInterval(f"{name} must be a (lo, hi) pair, got {interval!r}", interval=repr(interval)) from None
    if not (np.isfinite(lo) and np.isfinite(hi)) or lo >= hi or lo < lower_limit:
        raise InvalidInterval(f"{name} ({lo}, {hi}) is not a valid interval", interval=[lo, hi])
    return lo, hi


def _open_uniform(rng: np.random.Generator, lo: float, hi: float, size: int) -> np.ndarray:
    # lo + (hi - lo) * u can round onto either endpoint; redraw those
    values = rng.uniform(lo, hi, size)
    hit = (values <= lo) | (values >= hi)
    while np.any(hit):
        values[hit] = rng.uniform(lo, hi, int(hit.sum()))
        hit = (values <= lo) | (values >= hi)
    return values


def sample_params(
    beta_interval: tuple[float, float],
    delta_interval: tuple[float, float],
    h: float,
    n: int,
    seed: int,
) -> SisParams:
    """Draw heterogeneous rates uniformly from open intervals.

    beta is drawn first, then delta, from one ``np.random.default_rng(seed)``
    stream, so the same arguments always give identical vectors.

    Args:
        beta_interval: (lo, hi) with 0 <= lo < hi
        delta_interval: (lo, hi) with 0 <= lo < hi
        h: Sampling period
        n: Number of nodes
        seed: Generator seed

    Returns:
        SisParams with beta_i in beta_interval and delta_i in delta_interval

    Raises:
        InvalidInterval: An interval is empty, reversed, or below zero
    """
    b_lo, b_hi = _check_interval("beta_interval", beta_interval, 0.0)
    d_lo, d_hi = _check_interval("delta_interval", delta_interval, 0.0)
    rng = np.random.default_rng(seed)
    beta = _open_uniform(rng, b_lo, b_hi, n)
    delta = _open_uniform(rng, d_lo, d_hi, n)
    return SisParams(beta, delta, h)
