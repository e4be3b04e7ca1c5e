"""Shared fixtures: hand-checkable 2-node models and seeded random models."""

import numpy as np
import pytest

from netsis.graphio.generators import normalize_in_weights, random_strongly_connected
from netsis.graphio.graph import Graph
from netsis.model.params import SisParams, sample_params
from netsis.model.sis_model import build_and_validate

# Directed 2-cycle 0 -> 1 -> 0
TWO_CYCLE = np.array([[0.0, 1.0], [1.0, 0.0]])


def seeded_model(seed: int, n: int, beta_range=(0.45, 0.55), delta_range=(0.25, 0.35), p: float = 0.1):
    """Strongly connected graph with normalized in-weights and sampled rates."""
    g = normalize_in_weights(random_strongly_connected(n, p, seed))
    params = sample_params(beta_range, delta_range, 1.0, n, seed + 10_000)
    model, _ = build_and_validate(g, params)
    return model


@pytest.fixture
def two_cycle():
    """The 2-node directed cycle."""
    return Graph(TWO_CYCLE)


@pytest.fixture
def endemic_pair(two_cycle):
    """2-cycle with beta = 0.5, delta = 0.25, h = 1: rho = 1.25, x* = (0.5, 0.5)."""
    model, _ = build_and_validate(two_cycle, SisParams.homogeneous(2, 0.5, 0.25))
    return model


@pytest.fixture
def disease_free_pair(two_cycle):
    """2-cycle with beta = 0.2, delta = 0.3, h = 1: rho = 0.9."""
    model, _ = build_and_validate(two_cycle, SisParams.homogeneous(2, 0.2, 0.3))
    return model
