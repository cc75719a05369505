"""Deterministic preconditioned primal-dual gradient method."""
from primaldual.ppdg.constants import DEFAULT_DELTA, LyapunovConstants
from primaldual.ppdg.solver import (
    PpdgConfig,
    SolverState,
    SubgradientBlocks,
    TraceObjective,
    check_finite,
    initial_point,
    kkt_residuals,
    lagrangian,
    lyapunov_value,
    solve,
    step,
    subgradient_d,
)
from primaldual.ppdg.steps import (
    Preconditioner,
    StepSizes,
    default_alpha,
    dual_subgradient,
    primal_dual_update,
    resolve_steps,
)
