"""Configuration constants, numerical defaults, and parameter presets."""


# Default numerical settings
class DEFAULTS:
    """Default configuration values."""

    # Simulation
    STOP_TOL = 1e-12  # 0 disables early stopping
    HORIZON = 1000

    # Perron power iteration
    PERRON_TOL = 1e-12
    PERRON_MAX_ITER = 100_000
    PERRON_SHIFT = 1.0  # M + shift*I is primitive for irreducible M

    # Regime classification
    REGIME_BAND = 1e-9

    # Assumption 3 near-boundary warning
    ASSUMPTION_BAND = 1e-12

    # Endemic fixed-point solver
    SOLVER_TOL = 1e-12
    SOLVER_MAX_ITER = 1_000_000
    SOLVER_SETTLE_ITER = 10_000  # extra steps onto the floating-point fixed point
    STRICT_DELTA = True  # delta_i = 0 raises instead of pinning x_i* to 1

    # Certificates
    F_MU_TOL = 1e-8
    RHO_F_TOL = 1e-8
    XI_MARGIN = 1e-12  # required gap 1 - rho(Xi)

    # Trajectory diagnostics
    OVERSHOOT_SLACK = 1e-12
    LYAPUNOV_SLACK = 1e-12
    LYAPUNOV_IDENTITY_TOL = 1e-12
    CONVERGENCE_TOL = 1e-6
    RATE_FLOOR_FACTOR = 100.0  # errors below factor*eps are excluded from rate fits
    RATE_MIN_LENGTH = 10

    # Output
    FLOAT_DIGITS = 17
    CSV_NAME = "trajectory.csv"
    REPORT_NAME = "report.json"

    # Sweep
    SWEEP_WORKERS = 1
    SWEEP_SUMMARY_NAME = "summary.csv"

    # Trajectory store
    OUT_OF_CORE = False
    CACHE_COMPRESSION = "snappy"  # snappy, zstd, gzip, none


# Reference parameter regimes: beta and delta intervals with sampling period
PARAMETER_PRESETS = {
    "parameters_i": {"beta_range": (0.15, 0.25), "delta_range": (0.25, 0.35), "h": 1.0},
    "parameters_ii": {"beta_range": (0.45, 0.55), "delta_range": (0.25, 0.35), "h": 1.0},
}

# Keys of the report JSON, in emission order
REPORT_FIELDS = [
    "rho_threshold",
    "regime",
    "boundary_warning",
    "x_star",
    "bounds",
    "rho_xi",
    "f_mu_residual",
    "initial_class",
    "overshoot",
    "hitting_time",
    "lyapunov_monotone",
    "empirical_rate",
    "converged_to",
    "final_error_inf",
    "steps",
    "errors",
]

# Columns of the sweep summary table
SUMMARY_COLUMNS = [
    "cell_id",
    "rho_threshold",
    "regime",
    "rho_xi",
    "converged_to",
    "steps_to_tolerance",
]
