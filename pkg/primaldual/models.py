"""Run records and reports shared by the solvers, the writers and the CLI."""
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

import numpy as np


class TerminationReason(str, Enum):
    """Why a solver loop stopped."""

    CONVERGED = 'converged'
    ITERATION_LIMIT = 'iteration-limit'
    EPOCH_LIMIT = 'epoch-limit'


@dataclass
class TraceRecord:
    """One deterministic-solver iteration.

    Field order is the trace CSV column order.
    """

    iter: int
    elapsed_s: float
    objective: float
    lagrangian: float
    lyapunov: float
    dx_norm: float
    dy_norm: float
    kkt_x: float
    kkt_y: float


@dataclass
class StochasticTraceRecord:
    """One stochastic-solver iteration for a single seed."""

    iter: int
    comp_evals: int
    elapsed_s: float
    objective: float
    lagrangian_s: float
    lyapunov_s: float
    dx_norm: float
    dy_norm: float
    kkt_x: float
    kkt_y: float


@dataclass
class AggregateRecord:
    """Seed-averaged view of one stochastic iteration."""

    iter: int
    comp_evals: int
    mean_objective: float
    mean_lagrangian_s: float
    mean_lyapunov_s: float
    mean_dx: float
    mean_dy: float
    seeds_ok: int


@dataclass
class BoundChecks:
    """Violation counters for the per-iteration descent and residual bounds."""

    descent_checked: int = 0
    descent_violations: int = 0
    subgradient_checked: int = 0
    subgradient_violations: int = 0
    dual_checked: int = 0
    dual_violations: int = 0

    @property
    def total_violations(self):
        return self.descent_violations + self.subgradient_violations + self.dual_violations


@dataclass
class SolveReport:
    """Result of a single solver run."""

    x: np.ndarray
    y: np.ndarray
    iters: int
    reason: TerminationReason
    kkt_x: float
    kkt_y: float
    elapsed_s: float
    sum_dx_sq: float = 0.0
    sum_dy_sq: float = 0.0
    comp_evals: int = 0
    seed: Optional[int] = None
    checks: BoundChecks = field(default_factory=BoundChecks)
    trace: list = field(default_factory=list)

    @property
    def final_objective(self):
        if not self.trace:
            return float('nan')
        return self.trace[-1].objective


@dataclass
class StochasticReport:
    """Per-seed reports of a replicated stochastic run plus their aggregate."""

    reports: list
    failed_seeds: list
    aggregate: list

    @property
    def seeds_ok(self):
        return len(self.reports)

    @property
    def mean_final_objective(self):
        if not self.reports:
            return float('nan')
        return float(np.mean([report.final_objective for report in self.reports]))
