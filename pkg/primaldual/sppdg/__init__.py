"""Stochastic preconditioned primal-dual gradient method."""
from primaldual.sppdg.constants import (
    DELTA1,
    DELTA2,
    SppdgLyapunovConstants,
    choose_alpha,
    step_bound,
)
from primaldual.sppdg.solver import (
    DescentReport,
    SppdgConfig,
    aggregate_traces,
    expectation_descent_report,
    lagrangian_s,
    lyapunov_s,
    solve_stochastic,
)
