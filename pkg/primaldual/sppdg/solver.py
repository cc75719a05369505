"""Stochastic preconditioned primal-dual gradient solver.

The deterministic update with grad f(x^k) replaced by a variance-reduced
estimate. Seeds are independent replicas; their traces are folded into a
per-iteration aggregate in seed order.
"""
import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from config import Config
from primaldual.errors import DivergenceError, ParameterError, PreconditionError
from primaldual.models import (
    AggregateRecord,
    SolveReport,
    StochasticReport,
    StochasticTraceRecord,
    TerminationReason,
)
from primaldual.ppdg import (
    Preconditioner,
    initial_point,
    kkt_residuals,
    resolve_steps,
    step,
)
from primaldual.sppdg.constants import SppdgLyapunovConstants, choose_alpha
from primaldual.vrgrad import EstimatorKind, make_estimator

logger = logging.getLogger(__name__)

DESCENT_SLACK = 1e-9


@dataclass(frozen=True)
class SppdgConfig:
    """Settings for replicated stochastic runs.

    ``kappa_hat`` is a user proxy for the estimator's variance constant;
    with the default 0 the deterministic step rule applies. A run stops at
    ``max_epochs`` epochs of N component evaluations, at ``max_iters``
    iterations, or when both step norms fall to ``tol_step``.
    """

    alpha: Optional[float] = None
    kappa_hat: float = 0.0
    max_epochs: float = 50
    max_iters: Optional[int] = None
    tol_step: float = Config.TOL_STEP
    seeds: tuple = (0,)
    preconditioner: Preconditioner = Preconditioner.SCALAR_BETA
    batch_size: Optional[int] = None
    period: Optional[int] = None
    workers: int = Config.WORKERS
    norm_cap: float = Config.NORM_CAP
    op_norm: Optional[float] = None
    record_time: bool = True

    def validate(self):
        if not self.seeds:
            raise ParameterError('at least one seed is required')
        if len(set(self.seeds)) != len(self.seeds):
            raise ParameterError(f'seeds must be distinct, got {list(self.seeds)}')
        if self.max_epochs <= 0:
            raise ParameterError(f'max_epochs must be positive, got {self.max_epochs}')
        if self.max_iters is not None and self.max_iters < 0:
            raise ParameterError(f'max_iters must be >= 0, got {self.max_iters}')
        if self.workers < 1:
            raise ParameterError(f'workers must be >= 1, got {self.workers}')


@dataclass
class DescentReport:
    """Seed-averaged descent violations; advisory only."""

    violations: int
    checked: int
    iterations: list = field(default_factory=list)

    @property
    def fraction(self):
        return self.violations / self.checked if self.checked else 0.0


def lagrangian_s(problem, x, y):
    """(1/N) sum_i f_i(x) + <y, A x> - h*(y)."""
    return problem.f_value(x) + float(y @ problem.operator.apply(x)) - problem.regularizer.conjugate(y)


def lyapunov_s(problem, z, constants):
    """L_s(x, y) - a||x - u||^2 + b||x - v||^2 + c||v - w||^2 for z = (x, y, u, v, w)."""
    x, y, u, v, w = z
    return (lagrangian_s(problem, x, y)
            - constants.a * float(np.sum((x - u) ** 2))
            + constants.b * float(np.sum((x - v) ** 2))
            + constants.c * float(np.sum((v - w) ** 2)))


def _run_seed(problem, estimator_kind, config, steps, constants, seed, x0, y0, trace_sink):
    n = problem.n_components
    estimator = make_estimator(estimator_kind, n, config.batch_size, seed=seed, period=config.period)
    budget = config.max_epochs * n
    max_iters = config.max_iters if config.max_iters is not None else math.inf

    state = initial_point(problem, x0, y0)
    x_prev2 = state.x_prev
    estimator.reset(state.x_cur, problem.component_grads, problem.full_grad)
    trace = []
    reason = TerminationReason.EPOCH_LIMIT
    sum_dx_sq = sum_dy_sq = 0.0
    started = time.perf_counter()

    k = 0
    while True:
        if k >= max_iters:
            reason = TerminationReason.ITERATION_LIMIT
            break
        if estimator.comp_evals >= budget:
            break
        exact = problem.full_grad(state.x_cur)
        estimate = estimator.estimate(k, state.x_cur, state.x_prev,
                                      problem.component_grads, problem.full_grad)
        following = step(problem, state, config, steps, gradient=estimate)

        dx = float(np.linalg.norm(following.x_cur - state.x_cur))
        dy = float(np.linalg.norm(following.y_cur - state.y_cur))
        sum_dx_sq += dx ** 2
        sum_dy_sq += dy ** 2
        kkt_x, kkt_y = kkt_residuals(problem, state, exact)
        elapsed = time.perf_counter() - started if config.record_time else 0.0
        record = StochasticTraceRecord(
            iter=k, comp_evals=estimator.comp_evals, elapsed_s=elapsed,
            objective=problem.objective(state.x_cur),
            lagrangian_s=lagrangian_s(problem, state.x_cur, state.y_cur),
            lyapunov_s=lyapunov_s(
                problem, (state.x_cur, state.y_cur, following.x_cur, state.x_prev, x_prev2), constants),
            dx_norm=dx, dy_norm=dy, kkt_x=kkt_x, kkt_y=kkt_y)
        trace.append(record)
        if trace_sink is not None:
            trace_sink(seed, record)

        x_prev2 = state.x_prev
        state = following
        k += 1
        if max(dx, dy) <= config.tol_step:
            reason = TerminationReason.CONVERGED
            break

    if state.k >= 1:
        kkt_x, kkt_y = kkt_residuals(problem, state, problem.full_grad(state.x_cur))
    else:
        kkt_x = kkt_y = math.nan
    elapsed = time.perf_counter() - started if config.record_time else 0.0
    logger.info(f'seed {seed}: {reason.value} after {state.k} iterations, '
                f'{estimator.comp_evals} component gradients, r_x={kkt_x:.3e}, r_y={kkt_y:.3e}')
    return SolveReport(
        x=state.x_cur, y=state.y_cur, iters=state.k, reason=reason,
        kkt_x=kkt_x, kkt_y=kkt_y, elapsed_s=elapsed,
        sum_dx_sq=sum_dx_sq, sum_dy_sq=sum_dy_sq,
        comp_evals=estimator.comp_evals, seed=seed, trace=trace)


def aggregate_traces(traces):
    """Per-iteration means over the traces that reach each iteration."""
    if not traces:
        return []
    rows = []
    for k in range(max(len(trace) for trace in traces)):
        live = [trace[k] for trace in traces if len(trace) > k]
        rows.append(AggregateRecord(
            iter=k,
            comp_evals=int(round(np.mean([r.comp_evals for r in live]))),
            mean_objective=float(np.mean([r.objective for r in live])),
            mean_lagrangian_s=float(np.mean([r.lagrangian_s for r in live])),
            mean_lyapunov_s=float(np.mean([r.lyapunov_s for r in live])),
            mean_dx=float(np.mean([r.dx_norm for r in live])),
            mean_dy=float(np.mean([r.dy_norm for r in live])),
            seeds_ok=len(live)))
    return rows


def solve_stochastic(problem, estimator_kind, config=SppdgConfig(), trace_sink=None, x0=None, y0=None):
    """Run one replica per seed and aggregate the survivors.

    A seed that diverges is reported in ``failed_seeds``; the remaining
    seeds still produce the aggregate. ``trace_sink(seed, record)`` sees
    every record; with several workers the calls interleave across seeds.
    """
    config.validate()
    estimator_kind = EstimatorKind(estimator_kind)
    L = problem.lipschitz_L
    if not L > 0:
        raise ParameterError(f'Lipschitz constant must be positive, got {L}')
    alpha = choose_alpha(config.alpha, L, config.kappa_hat)
    constants = SppdgLyapunovConstants.from_step(alpha, config.kappa_hat, L)
    if constants.e0 <= 0:
        logger.warning(f'e0={constants.e0:.4g} <= 0 at alpha={alpha:.4g}; '
                       'expected descent is not guaranteed')
    steps = resolve_steps(problem.operator, alpha, config.preconditioner, config.op_norm)
    logger.info(f'sppdg start: {problem.name}, estimator={estimator_kind.value}, '
                f'seeds={list(config.seeds)}, max_epochs={config.max_epochs}')

    def run(seed):
        try:
            return _run_seed(problem, estimator_kind, config, steps, constants, seed, x0, y0, trace_sink)
        except DivergenceError as e:
            logger.warning(f'seed {seed} failed: {e}')
            return None

    if config.workers > 1 and len(config.seeds) > 1:
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            outcomes = list(pool.map(run, config.seeds))
    else:
        outcomes = [run(seed) for seed in config.seeds]

    reports = [report for report in outcomes if report is not None]
    failed = [seed for seed, report in zip(config.seeds, outcomes) if report is None]
    if failed:
        logger.warning(f'{len(failed)} of {len(config.seeds)} seeds failed: {failed}')
    return StochasticReport(
        reports=reports, failed_seeds=failed,
        aggregate=aggregate_traces([report.trace for report in reports]))


def expectation_descent_report(traces, constants, slack=DESCENT_SLACK):
    """Count iterations where the seed-averaged L_s fails to drop by e0 times the mean squared steps.

    Iteration k is checked against mean L_s(z^{k+1}) + e0*(d_{k+1}^2 + d_k^2
    + d_{k-1}^2) <= mean L_s(z^k), with d_j = ||x^{j+1} - x^j||. The exact
    expected descent carries variance terms that cannot be evaluated, so
    the count is advisory.
    """
    if len(traces) < 2:
        raise PreconditionError(f'expected descent needs at least 2 seeds, got {len(traces)}')
    length = min(len(trace) for trace in traces)
    lyapunov = np.array([[r.lyapunov_s for r in trace[:length]] for trace in traces]).mean(axis=0)
    dx_sq = np.array([[r.dx_norm ** 2 for r in trace[:length]] for trace in traces]).mean(axis=0)

    report = DescentReport(violations=0, checked=0)
    for k in range(1, length - 1):
        lhs = lyapunov[k + 1] + constants.e0 * (dx_sq[k + 1] + dx_sq[k] + dx_sq[k - 1])
        rhs = lyapunov[k] + slack * (1.0 + abs(lyapunov[k]))
        report.checked += 1
        if lhs > rhs:
            report.violations += 1
            report.iterations.append(k)
    return report
