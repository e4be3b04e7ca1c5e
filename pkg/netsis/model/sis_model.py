"""The discrete-time networked SIS model.

Dynamics, per node i and step k:

    x_i(k+1) = x_i(k) + h * ((1 - x_i(k)) * sum_j beta_ij x_j(k) - delta_i x_i(k))

with beta_ij = beta_i * a_ij. In matrix form x(k+1) = x + h((I - diag(x))B - D)x.
"""

from __future__ import annotations

import hashlib
import logging
from dataclasses import dataclass, field

import numpy as np

from netsis.core.config import DEFAULTS
from netsis.core.errors import (
    AssumptionThreeViolated,
    AssumptionTwoViolated,
    ModelError,
    NotStronglyConnected,
    StateOutOfRange,
)
from netsis.graphio.connectivity import strongly_connected_analysis
from netsis.graphio.graph import Graph
from netsis.model.params import SisParams

logger = logging.getLogger(__name__)

# Slack for the post-step range check; rounding may land one ulp past 1
_RANGE_SLACK = 1e-15


@dataclass(frozen=True, eq=False)
class SisModel:
    """Graph plus rates, with the derived matrices B = [beta_i a_ij] and D = diag(delta).

    Build instances with build_and_validate(), which checks Assumptions 2-3.
    """

    graph: Graph
    params: SisParams
    B: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        B = self.params.beta[:, None] * self.graph.weights
        B.setflags(write=False)
        object.__setattr__(self, "B", B)

    @property
    def n(self) -> int:
        return self.graph.n

    @property
    def h(self) -> float:
        return self.params.h

    @property
    def beta(self) -> np.ndarray:
        return self.params.beta

    @property
    def delta(self) -> np.ndarray:
        return self.params.delta

    @property
    def D(self) -> np.ndarray:
        return np.diag(self.params.delta)

    @property
    def beta_row_sums(self) -> np.ndarray:
        """sum_j beta_ij for every node i."""
        return self.B.sum(axis=1)

    def fingerprint(self) -> str:
        """sha256 over graph weights, beta, delta and h."""
        digest = hashlib.sha256()
        digest.update(np.ascontiguousarray(self.graph.weights).tobytes())
        digest.update(self.params.beta.tobytes())
        digest.update(self.params.delta.tobytes())
        digest.update(np.float64(self.params.h).tobytes())
        return digest.hexdigest()


@dataclass(frozen=True)
class AssumptionReport:
    """Outcome of validating Assumptions 2-3 for a model.

    Attributes:
        values: Per-node h * (delta_i + sum_j beta_ij)
        worst_node: Node with the largest value
        worst_value: values[worst_node]
        near_boundary: True when worst_value is within DEFAULTS.ASSUMPTION_BAND of 1
        relaxed_holds: True when h*delta_i <= 1 and h*sum_j beta_ij <= 1 for every i
        zero_delta_nodes: Nodes with delta_i = 0; error-system diagnostics are
            restricted on such models because x_i* = 1 there
    """

    values: np.ndarray
    worst_node: int
    worst_value: float
    near_boundary: bool
    relaxed_holds: bool
    zero_delta_nodes: tuple[int, ...]

    @property
    def diagnostics_restricted(self) -> bool:
        return bool(self.zero_delta_nodes)

    def to_dict(self) -> dict:
        return {
            "values": self.values.tolist(),
            "worst_node": self.worst_node,
            "worst_value": self.worst_value,
            "near_boundary": self.near_boundary,
            "relaxed_holds": self.relaxed_holds,
            "zero_delta_nodes": list(self.zero_delta_nodes),
        }


def relaxed_assumption_three(m: SisModel) -> bool:
    """Per-term variant of Assumption 3: h*delta_i <= 1 and h*sum_j beta_ij <= 1."""
    return bool(np.all(m.h * m.delta <= 1.0) and np.all(m.h * m.beta_row_sums <= 1.0))


def build_and_validate(g: Graph, p: SisParams) -> tuple[SisModel, AssumptionReport]:
    """Construct a model and check Assumptions 2 and 3.

    Assumption 3 is checked in its combined form h(delta_i + sum_j beta_ij) <= 1
    with an exact comparison; values within DEFAULTS.ASSUMPTION_BAND of the
    boundary are accepted with a warning.

    Args:
        g: Strongly connected graph
        p: Rates and sampling period, one entry per node

    Returns:
        (model, assumption report)

    Raises:
        NotStronglyConnected: g is not strongly connected
        AssumptionTwoViolated: beta_i <= 0 or delta_i < 0 for some node
        AssumptionThreeViolated: h <= 0 or h(delta_i + sum_j beta_ij) > 1
    """
    scc = strongly_connected_analysis(g)
    if not scc.is_strongly_connected:
        raise NotStronglyConnected(
            f"graph has {len(scc.components)} strongly connected components",
            component_sizes=scc.component_sizes,
        )
    if p.beta.shape != (g.n,) or p.delta.shape != (g.n,):
        raise ModelError(
            f"rate vectors must have length {g.n}, got beta {p.beta.shape} and delta {p.delta.shape}",
            n=g.n,
        )

    bad_beta = np.flatnonzero(~(p.beta > 0))
    if bad_beta.size:
        node = int(bad_beta[0])
        raise AssumptionTwoViolated(f"beta_{node} = {p.beta[node]} must be > 0", node=node, beta=float(p.beta[node]))
    bad_delta = np.flatnonzero(~(p.delta >= 0))
    if bad_delta.size:
        node = int(bad_delta[0])
        raise AssumptionTwoViolated(
            f"delta_{node} = {p.delta[node]} must be >= 0", node=node, delta=float(p.delta[node])
        )
    if not p.h > 0:
        raise AssumptionThreeViolated(f"sampling period h = {p.h} must be positive", node=None, value=p.h)

    model = SisModel(g, p)
    values = p.h * (p.delta + model.beta_row_sums)
    worst = int(np.argmax(values))
    worst_value = float(values[worst])
    if worst_value > 1.0:
        raise AssumptionThreeViolated(
            f"h(delta_i + sum_j beta_ij) = {worst_value!r} > 1 at node {worst}",
            node=worst,
            value=worst_value,
        )

    near = 1.0 - worst_value < DEFAULTS.ASSUMPTION_BAND
    if near:
        logger.warning("Assumption 3 holds within %.1e of the boundary at node %d", DEFAULTS.ASSUMPTION_BAND, worst)
    zero_delta = tuple(int(i) for i in np.flatnonzero(p.delta == 0))
    if zero_delta:
        logger.warning("delta_i = 0 at nodes %s; error-system diagnostics are restricted", list(zero_delta))

    report = AssumptionReport(
        values=values,
        worst_node=worst,
        worst_value=worst_value,
        near_boundary=bool(near),
        relaxed_holds=relaxed_assumption_three(model),
        zero_delta_nodes=zero_delta,
    )
    return model, report


def check_state(x: np.ndarray, n: int) -> np.ndarray:
    """Validate a state vector: length n, every entry in [0, 1]."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (n,):
        raise StateOutOfRange(f"state must have shape ({n},), got {x.shape}", shape=list(x.shape))
    if not np.all((x >= 0.0) & (x <= 1.0)):
        bad = int(np.flatnonzero(~((x >= 0.0) & (x <= 1.0)))[0])
        raise StateOutOfRange(f"x_{bad} = {x[bad]} lies outside [0, 1]", node=bad, value=float(x[bad]))
    return x


def advance(m: SisModel, x: np.ndarray) -> np.ndarray:
    """One step of the dynamics without input validation.

    Evaluated as (1 - h delta_i) x_i + h (1 - x_i)(Bx)_i: both terms are
    nonnegative under Assumption 3, so no rounding can push a state below 0.
    """
    return (1.0 - m.h * m.delta) * x + m.h * (1.0 - x) * (m.B @ x)


def step(m: SisModel, x: np.ndarray) -> np.ndarray:
    """Advance a state by one sampling period.

    Args:
        m: Validated model
        x: State in [0, 1]^N

    Returns:
        Next state, in [0, 1]^N

    Raises:
        StateOutOfRange: x has the wrong shape or leaves [0, 1]
    """
    x = check_state(x, m.n)
    nxt = advance(m, x)
    if __debug__ and not np.all((nxt >= -_RANGE_SLACK) & (nxt <= 1.0 + _RANGE_SLACK)):
        raise StateOutOfRange("step left [0, 1]^N; the model violates Assumption 3", state=nxt.tolist())
    return nxt
