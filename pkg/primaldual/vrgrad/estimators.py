"""Variance-reduced mini-batch gradient estimators.

Every estimator draws a sorted batch without replacement from a stream
seeded by (seed, k), so the estimate stream is a pure function of the
seed and the iterates. A batch that covers all N components returns the
full gradient itself.
"""
import logging
import math
from abc import ABC, abstractmethod
from enum import Enum

import numpy as np

from primaldual.errors import EstimatorStateError, ParameterError

logger = logging.getLogger(__name__)


class EstimatorKind(str, Enum):
    SAGA = 'saga'
    SVRG = 'svrg'
    SARAH = 'sarah'
    FULL = 'full'


def default_batch_size(n_components):
    """floor(0.01 N), at least 1."""
    return max(1, n_components // 100)


class GradientEstimator(ABC):
    """Common batch sampling, state checks and evaluation accounting.

    ``comp_evals`` counts component-gradient evaluations; a full gradient
    costs N.
    """

    kind = None

    def __init__(self, n_components, batch_size, seed=0, period=None):
        if n_components < 1:
            raise ParameterError(f'need at least one component, got {n_components}')
        if not 1 <= batch_size <= n_components:
            raise ParameterError(f'batch size must lie in [1, {n_components}], got {batch_size}')
        if period is not None and period < 1:
            raise ParameterError(f'period must be >= 1, got {period}')
        self.n_components = int(n_components)
        self.batch_size = int(batch_size)
        self.seed = int(seed)
        self.period = int(period) if period is not None else math.ceil(n_components / batch_size)
        self.comp_evals = 0
        self._ready = False

    @property
    def full_batch(self):
        return self.batch_size == self.n_components

    @property
    def _anchored(self):
        """Whether the memory holds the reference gradient the batch correction adds to."""
        return True

    def sample_batch(self, k):
        """Sorted indices drawn without replacement, determined by (seed, k)."""
        if self.full_batch:
            return np.arange(self.n_components)
        rng = np.random.default_rng([self.seed, int(k)])
        return np.sort(rng.choice(self.n_components, size=self.batch_size, replace=False))

    def reset(self, x0, component_grads, full_grad):
        """Initialize the memory at x0 and zero the evaluation counter."""
        self.comp_evals = 0
        self._reset(np.array(x0, dtype=float), component_grads, full_grad)
        self._ready = True
        return self

    def estimate(self, k, x_cur, x_prev, component_grads, full_grad):
        """Gradient estimate at x_cur for iteration k.

        ``component_grads(indices, x)`` returns one gradient row per index;
        ``full_grad(x)`` returns the mean gradient.
        """
        if not self._ready:
            raise EstimatorStateError(f'{type(self).__name__}.estimate called before reset')
        return self._estimate(int(k), x_cur, x_prev, self.sample_batch(k), component_grads, full_grad)

    def estimate_on_batch(self, batch, x_cur, x_prev, component_grads):
        """The correction-step estimate for a given batch, leaving the memory untouched."""
        if not self._ready:
            raise EstimatorStateError(f'{type(self).__name__}.estimate_on_batch called before reset')
        if not self._anchored:
            raise EstimatorStateError(f'{type(self).__name__}.estimate_on_batch needs one estimate after reset')
        batch = np.sort(np.asarray(batch, dtype=np.intp))
        return self._combine(component_grads(batch, x_cur), batch, component_grads, x_prev)

    def _full(self, full_grad, x):
        self.comp_evals += self.n_components
        return full_grad(x)

    def _combine(self, fresh, batch, component_grads, x_prev):
        raise EstimatorStateError(f'{type(self).__name__} has no batch correction')

    @abstractmethod
    def _reset(self, x0, component_grads, full_grad):
        ...

    @abstractmethod
    def _estimate(self, k, x_cur, x_prev, batch, component_grads, full_grad):
        ...

    def __repr__(self):
        return f'<{type(self).__name__} N={self.n_components} b={self.batch_size} seed={self.seed}>'


class FullGradient(GradientEstimator):
    """The exact gradient every iteration."""

    kind = EstimatorKind.FULL

    def __init__(self, n_components, batch_size=None, seed=0, period=None):
        super().__init__(n_components, n_components, seed, period)

    def _reset(self, x0, component_grads, full_grad):
        pass

    def _estimate(self, k, x_cur, x_prev, batch, component_grads, full_grad):
        return self._full(full_grad, x_cur)


class Saga(GradientEstimator):
    """Table of the last gradient seen for each component.

    The table mean is updated incrementally; memory is N*n floats.
    """

    kind = EstimatorKind.SAGA

    def _reset(self, x0, component_grads, full_grad):
        self.table = np.array(component_grads(np.arange(self.n_components), x0), dtype=float)
        self.table_mean = self.table.mean(axis=0)
        self.comp_evals += self.n_components

    def _combine(self, fresh, batch, component_grads, x_prev):
        return (fresh - self.table[batch]).mean(axis=0) + self.table_mean

    def _estimate(self, k, x_cur, x_prev, batch, component_grads, full_grad):
        fresh = component_grads(batch, x_cur)
        self.comp_evals += len(batch)
        if self.full_batch:
            estimate = full_grad(x_cur)
        else:
            estimate = self._combine(fresh, batch, component_grads, x_prev)
        self.table_mean = self.table_mean + (fresh - self.table[batch]).sum(axis=0) / self.n_components
        self.table[batch] = fresh
        return estimate


class Svrg(GradientEstimator):
    """Snapshot x~ with its full gradient, refreshed every ``period`` iterations."""

    kind = EstimatorKind.SVRG

    @property
    def _anchored(self):
        return self.snapshot_grad is not None

    def _reset(self, x0, component_grads, full_grad):
        self.snapshot = x0
        self.snapshot_grad = None

    def _combine(self, fresh, batch, component_grads, x_prev):
        return (fresh - component_grads(batch, self.snapshot)).mean(axis=0) + self.snapshot_grad

    def _estimate(self, k, x_cur, x_prev, batch, component_grads, full_grad):
        if k % self.period == 0 or self.snapshot_grad is None:
            self.snapshot = np.array(x_cur, dtype=float)
            self.snapshot_grad = self._full(full_grad, x_cur)
            return self.snapshot_grad
        if self.full_batch:
            return self._full(full_grad, x_cur)
        self.comp_evals += 2 * len(batch)
        return self._combine(component_grads(batch, x_cur), batch, component_grads, x_prev)


class Sarah(GradientEstimator):
    """Recursive difference estimate, restarted with a full gradient every ``period`` iterations."""

    kind = EstimatorKind.SARAH

    @property
    def _anchored(self):
        return self.previous is not None

    def _reset(self, x0, component_grads, full_grad):
        self.previous = None

    def _combine(self, fresh, batch, component_grads, x_prev):
        return (fresh - component_grads(batch, x_prev)).mean(axis=0) + self.previous

    def _estimate(self, k, x_cur, x_prev, batch, component_grads, full_grad):
        if k % self.period == 0 or self.previous is None or self.full_batch:
            self.previous = self._full(full_grad, x_cur)
            return self.previous
        self.comp_evals += 2 * len(batch)
        self.previous = self._combine(component_grads(batch, x_cur), batch, component_grads, x_prev)
        return self.previous


ESTIMATORS = {
    EstimatorKind.SAGA: Saga,
    EstimatorKind.SVRG: Svrg,
    EstimatorKind.SARAH: Sarah,
    EstimatorKind.FULL: FullGradient,
}


def make_estimator(kind, n_components, batch_size=None, seed=0, period=None):
    """Build an estimator; ``batch_size=None`` selects floor(0.01 N)."""
    kind = EstimatorKind(kind)
    if batch_size is None:
        batch_size = default_batch_size(n_components)
    return ESTIMATORS[kind](n_components, batch_size, seed=seed, period=period)
