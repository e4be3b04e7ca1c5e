"""End-to-end regime reproductions on a 67-node network and seeded property sweeps."""

from pathlib import Path

import numpy as np
import pytest

from netsis.analysis import (
    Convergence,
    InitialClass,
    bounds,
    build_error_system,
    classify_initial,
    classify_regime,
    error_norms,
    lyapunov_trace,
    positivity_hitting_time,
    residual,
    solve_endemic,
)
from netsis.experiments import load_config, run_experiment
from netsis.model import simulate

from conftest import seeded_model

CONFIG_DIR = Path(__file__).parent.parent / "configs"


def shipped_run(name: str, tmp_path):
    """Run one of the shipped experiment configs with outputs in tmp_path."""
    config = load_config(CONFIG_DIR / f"{name}.json").with_output(tmp_path)
    result = run_experiment(config, write=False)
    assert result.status == 0
    return result


def random_model(seed: int):
    """Seeded endemic model with 3 to 30 nodes."""
    n = int(np.random.default_rng(seed).integers(3, 31))
    return seeded_model(seed, n)


def start_in_class(initial: InitialClass, x_star: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Random start strictly below, strictly above, or on both sides of x*."""
    n = x_star.size
    below = x_star * rng.uniform(0.01, 1.0, n)
    above = x_star + (1.0 - x_star) * rng.uniform(0.01, 1.0, n)
    if initial is InitialClass.DL:
        return below
    if initial is InitialClass.DH:
        return above
    return np.where(np.arange(n) % 2 == 0, below, above)


class TestShippedConfigs:
    """The configs under configs/ reproduce the four reference regimes."""

    def test_disease_free(self, tmp_path):
        """x0 in [0, 0.2) with low rates: below threshold, dead within 1000 steps."""
        result = shipped_run("disease_free", tmp_path)
        report, state = result.report, result.state
        assert report["regime"] == "DiseaseFreeOnly"
        assert report["rho_threshold"] < 1.0
        assert report["boundary_warning"] is False
        assert report["rho_threshold"] <= report["row_sum_bound"] < 1.0
        assert report["x_star"] is None
        assert report["converged_to"] == "DiseaseFree"
        assert report["graph"]["n"] == 67

        errors = error_norms(state.trajectory, np.zeros(67))
        below = np.flatnonzero(errors < 1e-6)
        assert below.size and below[0] <= 1000

    def test_disease_free_rate(self, tmp_path):
        """Decay towards zero is no slower than rho(I - hD + hB)."""
        report = shipped_run("disease_free", tmp_path).report
        assert report["empirical_rate"] is not None
        assert report["empirical_rate"] <= report["rho_threshold"] + 0.01

    def test_endemic_from_below(self, tmp_path):
        """x0 in [0, 0.2) lies below x*; no overshoot, monotone V, endemic."""
        report = shipped_run("endemic_from_below", tmp_path).report
        assert report["regime"] == "EndemicExists"
        assert min(report["x_star"]) > 0.2
        assert report["bounds"]["lo_apriori"] > 0.2
        assert report["initial_class"] == "Dl"
        assert report["overshoot"]["up"] == 0
        assert report["lyapunov_monotone"] is True
        assert report["lyapunov_strictly_decreasing"] is True
        assert report["converged_to"] == "Endemic"
        assert report["steps_to_tolerance"] is not None
        assert report["steps_to_tolerance"] <= 5000
        assert report["rho_xi"] < 1.0

    def test_endemic_from_above(self, tmp_path):
        """x0 in [0.5, 0.8) lies above x*; approached from above without undershoot."""
        report = shipped_run("endemic_from_above", tmp_path).report
        assert max(report["x_star"]) < 0.5
        assert report["initial_class"] == "Dh"
        assert report["overshoot"]["down"] == 0
        assert report["lyapunov_monotone"] is True
        assert report["converged_to"] == "Endemic"

    def test_endemic_from_above_rate(self, tmp_path):
        """From above the error contracts no slower than rho(Xi)."""
        report = shipped_run("endemic_from_above", tmp_path).report
        assert report["empirical_rate"] is not None
        assert report["empirical_rate"] <= report["rho_xi"] + 0.01

    def test_endemic_mixed(self, tmp_path):
        """x0 in [0, 1) straddles x* and still converges to it."""
        report = shipped_run("endemic_mixed", tmp_path).report
        assert report["initial_class"] == "Mixed"
        assert report["lyapunov_monotone"] is True
        assert report["converged_to"] == "Endemic"


class TestSeededProperties:
    """Properties over many seeded random models."""

    @pytest.mark.parametrize("seed", range(10))
    def test_parameters_i_disease_free(self, seed):
        """Normalized graphs with beta < delta are always below threshold."""
        n = int(np.random.default_rng(seed).integers(3, 40))
        model = seeded_model(seed, n, beta_range=(0.15, 0.25))
        assert classify_regime(model).regime.value == "DiseaseFreeOnly"

    @pytest.mark.parametrize("seed", range(200, 250))
    def test_solver_matches_long_simulation(self, seed):
        """x* from the fixed-point solver agrees with 100000 simulated steps."""
        model = random_model(seed)
        report = solve_endemic(model)
        x0 = np.random.default_rng(seed).uniform(0.01, 1.0, model.n)
        traj = simulate(model, x0, horizon=100_000, stop_tol=0.0)
        assert np.max(np.abs(report.x_star - traj.final)) < 1e-8
        assert np.max(np.abs(residual(model, report.x_star))) < 1e-10

        b = bounds(model, report.x_star)
        assert b.violations == ()
        assert np.all(report.x_star <= b.hi + 1e-12)
        assert report.x_star.min() >= b.lo_certified - 1e-12
        assert b.lo_apriori <= b.lo_certified + 1e-12

    @pytest.mark.parametrize("seed", range(200, 250))
    def test_error_system_certificates(self, seed):
        """F mu = mu, rho(F) = 1, rho(Xi) < 1 and Xi x* << x* on every model."""
        model = random_model(seed)
        x_star = solve_endemic(model).x_star
        es = build_error_system(model, x_star)
        assert es.f_mu_residual < 1e-8
        assert abs(es.rho_f - 1.0) < 1e-8
        assert es.rho_xi < 1.0 - 1e-12
        assert np.all(es.Xi @ x_star < x_star)

    @pytest.mark.parametrize("initial", [InitialClass.DL, InitialClass.DH, InitialClass.MIXED])
    @pytest.mark.parametrize("seed", range(10))
    def test_lyapunov_decrease(self, seed, initial):
        """V never increases and matches its one-step identity on 20 starts per class."""
        model = random_model(300 + seed)
        x_star = solve_endemic(model).x_star
        es = build_error_system(model, x_star)
        rng = np.random.default_rng(seed)
        for _ in range(20):
            x0 = start_in_class(initial, x_star, rng)
            assert classify_initial(x0, x_star) is initial
            trace = lyapunov_trace(model, x_star, es, simulate(model, x0, horizon=2000))
            assert trace.monotone is True
            assert np.all(np.diff(trace.values) <= 1e-12)
            assert trace.max_identity_error <= 1e-12

    @pytest.mark.parametrize("seed", range(10))
    def test_no_overshoot(self, seed):
        """Dl starts never rise above x*, Dh starts never fall below it."""
        model = random_model(400 + seed)
        x_star = solve_endemic(model).x_star
        es = build_error_system(model, x_star)
        rng = np.random.default_rng(seed)
        for initial in (InitialClass.DL, InitialClass.DH):
            traj = simulate(model, start_in_class(initial, x_star, rng), horizon=2000)
            trace = lyapunov_trace(model, x_star, es, traj)
            if initial is InitialClass.DL:
                assert np.all(traj.states <= x_star + 1e-12)
            else:
                assert np.all(traj.states >= x_star - 1e-12)
            assert trace.monotone is True

    @pytest.mark.parametrize("seed", range(10))
    def test_mixed_starts_converge(self, seed):
        """Any nonzero start ends at x* in the endemic regime."""
        rng = np.random.default_rng(100 + seed)
        n = int(rng.integers(3, 40))
        model = seeded_model(100 + seed, n)
        x_star = solve_endemic(model).x_star
        traj = simulate(model, rng.uniform(0.0, 1.0, n), horizon=5000)
        np.testing.assert_allclose(traj.final, x_star, atol=1e-8)

    @pytest.mark.parametrize("seed", range(10))
    def test_hitting_time_at_most_n_minus_one(self, seed):
        """A single infected node reaches every node within n - 1 steps."""
        rng = np.random.default_rng(500 + seed)
        n = int(rng.integers(3, 40))
        model = seeded_model(500 + seed, n)
        x0 = np.zeros(n)
        x0[rng.integers(n)] = rng.uniform(0.01, 1.0)
        hitting = positivity_hitting_time(simulate(model, x0, horizon=n, stop_tol=0.0))
        assert hitting is not None
        assert hitting <= n - 1

    @pytest.mark.parametrize("n", [3, 8, 25])
    def test_hitting_time_on_a_cycle(self, n):
        """On a bare cycle the infection needs exactly n - 1 steps to cover it."""
        model = seeded_model(n, n, p=0.0)
        x0 = np.zeros(n)
        x0[0] = 0.3
        traj = simulate(model, x0, horizon=n, stop_tol=0.0)
        assert positivity_hitting_time(traj) == n - 1
