"""Deterministic preconditioned primal-dual gradient solver.

Iterates
    x+ = x - alpha*(grad f(x) + A^T y)
    y+ = prox_{beta h*}(y + beta*A(2x+ - x))
and monitors the Lyapunov function L(x, y) - a||x - u||^2 + b||x - v||^2
evaluated at z^k = (x^k, y^k, x^{k+1}, x^{k-1}).

Assumes inf_x L(x, y) > -inf for every y; this cannot be checked and is
left to the caller.
"""
import logging
import math
import time
from dataclasses import dataclass, replace
from enum import Enum
from typing import Optional

import numpy as np

from config import Config
from primaldual.errors import (
    DiagnosticFailure,
    DivergenceError,
    ParameterError,
    PreconditionError,
)
from primaldual.models import BoundChecks, SolveReport, TerminationReason, TraceRecord
from primaldual.ppdg.constants import DEFAULT_DELTA, LyapunovConstants
from primaldual.ppdg.steps import (
    Preconditioner,
    default_alpha,
    dual_subgradient,
    primal_dual_update,
    resolve_steps,
)

logger = logging.getLogger(__name__)

BOUND_SLACK = 1e-9


class TraceObjective(str, Enum):
    """Which objective the trace records: f + h(Ax), or f + h**(Ax)."""

    EXACT = 'exact'
    ENVELOPE = 'envelope'


@dataclass(frozen=True)
class PpdgConfig:
    """Solver settings. ``alpha=None`` selects 0.9/(3L)."""

    alpha: Optional[float] = None
    delta: float = DEFAULT_DELTA
    max_iters: int = Config.SOLVER_MAX_ITERS
    tol_step: float = Config.TOL_STEP
    preconditioner: Preconditioner = Preconditioner.SCALAR_BETA
    lyapunov_checks: bool = True
    norm_cap: float = Config.NORM_CAP
    op_norm: Optional[float] = None
    record_time: bool = True
    log_every: int = 100
    trace_objective: TraceObjective = TraceObjective.EXACT

    def constants_for(self, lipschitz_L):
        """Lyapunov weights for this step choice, validated."""
        alpha = self.alpha or default_alpha(lipschitz_L)
        constants = LyapunovConstants.from_step(alpha, self.delta, lipschitz_L)
        self.validate(constants)
        return constants

    def validate(self, constants):
        if self.max_iters < 0:
            raise ParameterError(f'max_iters must be >= 0, got {self.max_iters}')
        if self.tol_step < 0:
            raise ParameterError(f'tol_step must be >= 0, got {self.tol_step}')
        if not self.lyapunov_checks:
            return
        L = constants.lipschitz_L
        if self.delta == DEFAULT_DELTA and not constants.alpha < 1.0 / (3.0 * L):
            raise ParameterError(
                f'alpha={constants.alpha:.6g} must be below 1/(3L)={1.0 / (3.0 * L):.6g} '
                'for the Lyapunov checks')
        if not constants.valid:
            raise ParameterError(
                f'Lyapunov weights must be positive, got a={constants.a:.6g}, '
                f'b={constants.b:.6g}, c={constants.c:.6g}')


@dataclass(frozen=True)
class SolverState:
    """The window (x^{k-1}, x^k, [x^{k+1}]) and (y^{k-1}, y^k) plus g^k.

    At k = 0 the previous iterates equal the current ones and ``g_cur`` is
    None. ``x_next`` is filled in once the following step has been taken.
    """

    x_prev: np.ndarray
    x_cur: np.ndarray
    y_prev: np.ndarray
    y_cur: np.ndarray
    k: int = 0
    g_cur: Optional[np.ndarray] = None
    x_next: Optional[np.ndarray] = None

    @classmethod
    def initial(cls, x0, y0):
        x0 = np.array(x0, dtype=float)
        y0 = np.array(y0, dtype=float)
        return cls(x_prev=x0, x_cur=x0, y_prev=y0, y_cur=y0)


@dataclass(frozen=True)
class SubgradientBlocks:
    """d^k = (grad_x, A x^k - g^k, grad_u, grad_v) of the Lyapunov function at z^k."""

    grad_x: np.ndarray
    residual_y: np.ndarray
    grad_u: np.ndarray
    grad_v: np.ndarray

    @property
    def norm(self):
        return float(np.linalg.norm(np.concatenate(
            (self.grad_x, self.residual_y, self.grad_u, self.grad_v))))


def initial_point(problem, x0=None, y0=None):
    if x0 is None:
        x0 = np.zeros(problem.operator.in_dim)
    if y0 is None:
        y0 = np.zeros(problem.operator.out_dim)
    return SolverState.initial(x0, y0)


def lagrangian(problem, x, y):
    """f(x) + <y, A x> - h*(y); -inf where h*(y) is infinite."""
    return problem.f_value(x) + float(y @ problem.operator.apply(x)) - problem.regularizer.conjugate(y)


def lyapunov_value(problem, z, constants):
    """L(x, y) - a||x - u||^2 + b||x - v||^2 for z = (x, y, u, v)."""
    x, y, u, v = z
    return (lagrangian(problem, x, y)
            - constants.a * float(np.sum((x - u) ** 2))
            + constants.b * float(np.sum((x - v) ** 2)))


def step(problem, state, config=PpdgConfig(), steps=None, gradient=None):
    """Advance one iteration and return the state for k + 1.

    ``gradient`` replaces grad f(x^k); the stochastic solver passes its
    estimate here.
    """
    if steps is None:
        alpha = config.alpha or default_alpha(problem.lipschitz_L)
        steps = resolve_steps(problem.operator, alpha, config.preconditioner, config.op_norm)
    if gradient is None:
        gradient = problem.grad_f(state.x_cur)

    x_next, y_next = primal_dual_update(
        problem.operator, problem.regularizer, state.x_cur, state.y_cur, gradient, steps)
    k_next = state.k + 1
    check_finite(x_next, y_next, k_next, config.norm_cap)

    g_next = dual_subgradient(problem.operator, steps, x_next, state.x_cur, y_next, state.y_cur)
    return SolverState(x_prev=state.x_cur, x_cur=x_next, y_prev=state.y_cur, y_cur=y_next,
                       k=k_next, g_cur=g_next)


def check_finite(x, y, iteration, norm_cap):
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
        raise DivergenceError(iteration)
    norm = max(float(np.linalg.norm(x)), float(np.linalg.norm(y)))
    if norm > norm_cap:
        raise DivergenceError(iteration, f'iterate norm {norm:.3g} exceeds cap {norm_cap:.3g}')


def subgradient_d(problem, state, constants, gradient=None):
    """The four blocks of d^k; needs k >= 1 and the lookahead x^{k+1}."""
    if state.k < 1 or state.g_cur is None:
        raise PreconditionError('the Lyapunov subgradient needs k >= 1')
    if state.x_next is None:
        raise PreconditionError('the Lyapunov subgradient needs x^{k+1}')
    if gradient is None:
        gradient = problem.grad_f(state.x_cur)

    op = problem.operator
    x, u, v = state.x_cur, state.x_next, state.x_prev
    a, b = constants.a, constants.b
    return SubgradientBlocks(
        grad_x=gradient + op.apply_adjoint(state.y_cur) - 2.0 * a * (x - u) + 2.0 * b * (x - v),
        residual_y=op.apply(x) - state.g_cur,
        grad_u=2.0 * a * (x - u),
        grad_v=2.0 * b * (v - x),
    )


def kkt_residuals(problem, state, gradient=None):
    """(||grad f(x) + A^T y||, ||A x - g||); the second is NaN at k = 0."""
    if gradient is None:
        gradient = problem.grad_f(state.x_cur)
    op = problem.operator
    r_x = float(np.linalg.norm(gradient + op.apply_adjoint(state.y_cur)))
    if state.g_cur is None:
        return r_x, math.nan
    return r_x, float(np.linalg.norm(op.apply(state.x_cur) - state.g_cur))


class _BoundMonitor:
    """Per-iteration checks of the descent, subgradient and dual bounds.

    Violations raise under exact_M and are logged under scalar_beta, where
    the preconditioner only approximates alpha*A*A^T.
    """

    def __init__(self, problem, constants, steps, strict):
        self.problem = problem
        self.constants = constants
        self.steps = steps
        self.strict = strict
        self.checks = BoundChecks()
        self.gamma1 = constants.gamma1(steps.op_norm)
        self.gamma2 = constants.gamma2(steps.op_norm)

    def _fail(self, iteration, bound, lhs, rhs):
        if self.strict:
            raise DiagnosticFailure(iteration, bound, lhs, rhs)
        logger.warning(f'{bound} bound exceeded at iteration {iteration}: {lhs:.6g} > {rhs:.6g}')

    def descent(self, iteration, lyapunov_prev, lyapunov_next, dx_next, dx_cur):
        lhs = lyapunov_next + self.constants.c * (dx_next ** 2 + dx_cur ** 2)
        rhs = lyapunov_prev + BOUND_SLACK * (1.0 + abs(lyapunov_prev))
        self.checks.descent_checked += 1
        if lhs > rhs:
            self.checks.descent_violations += 1
            self._fail(iteration, 'descent', lhs, rhs)

    def subgradient(self, state, gradient, dx_prev, dx_next):
        lhs = subgradient_d(self.problem, state, self.constants, gradient).norm
        rhs = self.gamma1 * dx_prev + self.gamma2 * dx_next + BOUND_SLACK
        self.checks.subgradient_checked += 1
        if lhs > rhs:
            self.checks.subgradient_violations += 1
            self._fail(state.k, 'subgradient', lhs, rhs)

    def dual(self, iteration, dy_adjoint, dx_cur, dx_next):
        alpha, L = self.steps.alpha, self.constants.lipschitz_L
        rhs = (1.0 / alpha + L) * dx_cur + dx_next / alpha + BOUND_SLACK
        self.checks.dual_checked += 1
        if dy_adjoint > rhs:
            self.checks.dual_violations += 1
            self._fail(iteration, 'dual', dy_adjoint, rhs)


def solve(problem, config=PpdgConfig(), trace_sink=None, x0=None, y0=None):
    """Run until max(||dx||, ||dy||) <= tol_step or max_iters steps.

    One TraceRecord is emitted per iteration k, after x^{k+1} is known.
    Its objective column is f + h(Ax), or f + h**(Ax) with
    ``trace_objective=envelope``.
    The descent inequality for k - 1 is checked once z^k is available.
    """
    L = problem.lipschitz_L
    if not L > 0:
        raise ParameterError(f'Lipschitz constant must be positive, got {L}')
    constants = config.constants_for(L)
    steps = resolve_steps(problem.operator, constants.alpha, config.preconditioner, config.op_norm)
    strict = Preconditioner(config.preconditioner) is Preconditioner.EXACT_M
    monitor = _BoundMonitor(problem, constants, steps, strict)
    op = problem.operator
    if TraceObjective(config.trace_objective) is TraceObjective.ENVELOPE:
        objective = problem.envelope_objective
    else:
        objective = problem.objective

    state = initial_point(problem, x0, y0)
    gradient = problem.grad_f(state.x_cur)
    trace = []
    reason = TerminationReason.ITERATION_LIMIT
    sum_dx_sq = sum_dy_sq = 0.0
    lyapunov_prev = None
    dx_history = []
    started = time.perf_counter()
    logger.info(f'ppdg start: {problem.name}, n={problem.dim}, L={L:.6g}, max_iters={config.max_iters}')

    for k in range(config.max_iters):
        following = step(problem, state, config, steps, gradient=gradient)
        current = replace(state, x_next=following.x_cur)
        gradient_next = problem.grad_f(following.x_cur)

        dx = float(np.linalg.norm(following.x_cur - state.x_cur))
        dy = float(np.linalg.norm(following.y_cur - state.y_cur))
        sum_dx_sq += dx ** 2
        sum_dy_sq += dy ** 2
        lyapunov = lyapunov_value(
            problem, (state.x_cur, state.y_cur, following.x_cur, state.x_prev), constants)
        kkt_x, kkt_y = kkt_residuals(problem, current, gradient)

        if config.lyapunov_checks and k >= 1:
            dx_prev = dx_history[-1]
            dy_adjoint = float(np.linalg.norm(op.apply_adjoint(state.y_cur - state.y_prev)))
            monitor.dual(k - 1, dy_adjoint, dx_prev, dx)
            monitor.subgradient(current, gradient, dx_prev, dx)
            if k >= 2:
                monitor.descent(k - 1, lyapunov_prev, lyapunov, dx_history[-1], dx_history[-2])

        elapsed = time.perf_counter() - started if config.record_time else 0.0
        record = TraceRecord(
            iter=k, elapsed_s=elapsed, objective=objective(state.x_cur),
            lagrangian=lagrangian(problem, state.x_cur, state.y_cur), lyapunov=lyapunov,
            dx_norm=dx, dy_norm=dy, kkt_x=kkt_x, kkt_y=kkt_y)
        trace.append(record)
        if trace_sink is not None:
            trace_sink(record)
        if config.log_every and k % config.log_every == 0:
            logger.debug(f'k={k} objective={record.objective:.10g} lyapunov={lyapunov:.10g} '
                         f'dx={dx:.3e} dy={dy:.3e}')

        lyapunov_prev = lyapunov
        dx_history = (dx_history + [dx])[-2:]
        state, gradient = following, gradient_next
        if max(dx, dy) <= config.tol_step:
            reason = TerminationReason.CONVERGED
            break

    if state.k >= 1:
        kkt_x, kkt_y = kkt_residuals(problem, state, gradient)
    else:
        kkt_x = kkt_y = math.nan
    elapsed = time.perf_counter() - started if config.record_time else 0.0
    logger.info(f'ppdg end: {reason.value} after {state.k} iterations, '
                f'r_x={kkt_x:.3e}, r_y={kkt_y:.3e}')
    return SolveReport(
        x=state.x_cur, y=state.y_cur, iters=state.k, reason=reason,
        kkt_x=kkt_x, kkt_y=kkt_y, elapsed_s=elapsed,
        sum_dx_sq=sum_dx_sq, sum_dy_sq=sum_dy_sq,
        checks=monitor.checks, trace=trace)
