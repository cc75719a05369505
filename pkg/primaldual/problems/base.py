"""Smooth-plus-composite problem containers."""
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np


@dataclass(frozen=True)
class CompositeProblem:
    """min_x f(x) + h(A x) with f L-smooth.

    Whether inf_x L(x, y) is finite for every y cannot be checked here;
    it remains the caller's obligation.
    """

    f_value: Callable
    grad_f: Callable
    lipschitz_L: float
    operator: object
    regularizer: object
    name: str = 'composite'

    @property
    def dim(self):
        return self.operator.in_dim

    def objective(self, x):
        """f(x) + h(Ax); +inf when Ax leaves dom h."""
        return self.f_value(x) + self.regularizer.value(self.operator.apply(x))

    def envelope_objective(self, x):
        """f(x) + h**(Ax), the objective the dual iteration sees through h*."""
        return self.f_value(x) + self.regularizer.envelope(self.operator.apply(x))

    def as_finite_sum(self):
        """View as a one-component finite sum whose full gradient is grad_f itself."""
        grad_f = self.grad_f
        f_value = self.f_value
        return FiniteSumProblem(
            n_components=1,
            component_value=lambda i, x: f_value(x),
            component_grad=lambda i, x: grad_f(x),
            lipschitz_L=self.lipschitz_L,
            operator=self.operator,
            regularizer=self.regularizer,
            name=self.name,
            full_grad_fn=grad_f,
            full_value_fn=f_value,
        )


@dataclass(frozen=True)
class FiniteSumProblem:
    """min_x (1/N) sum_i f_i(x) + h(A x).

    ``lipschitz_L`` must hold for every component. ``batch_grad_fn`` and
    ``full_grad_fn`` are optional vectorized accessors; when absent they are
    assembled from ``component_grad``.
    """

    n_components: int
    component_value: Callable
    component_grad: Callable
    lipschitz_L: float
    operator: object
    regularizer: object
    name: str = 'finite-sum'
    batch_grad_fn: Optional[Callable] = None
    full_grad_fn: Optional[Callable] = None
    full_value_fn: Optional[Callable] = None

    @property
    def dim(self):
        return self.operator.in_dim

    def component_grads(self, indices, x):
        """Stack of grad f_i(x) for i in ``indices``, one row each."""
        if self.batch_grad_fn is not None:
            return self.batch_grad_fn(indices, x)
        return np.stack([self.component_grad(int(i), x) for i in indices])

    def full_grad(self, x):
        """(1/N) sum_i grad f_i(x)."""
        if self.full_grad_fn is not None:
            return self.full_grad_fn(x)
        return self.component_grads(np.arange(self.n_components), x).mean(axis=0)

    def f_value(self, x):
        if self.full_value_fn is not None:
            return self.full_value_fn(x)
        return float(np.mean([self.component_value(i, x) for i in range(self.n_components)]))

    def objective(self, x):
        return self.f_value(x) + self.regularizer.value(self.operator.apply(x))

    def envelope_objective(self, x):
        return self.f_value(x) + self.regularizer.envelope(self.operator.apply(x))

    def as_composite(self):
        """The same problem with the exact full gradient, for deterministic solvers."""
        return CompositeProblem(
            f_value=self.f_value,
            grad_f=self.full_grad,
            lipschitz_L=self.lipschitz_L,
            operator=self.operator,
            regularizer=self.regularizer,
            name=self.name,
        )


def quadratic_problem(b, operator, regularizer, name='quadratic'):
    """f(x) = 0.5*||x - b||^2, L = 1."""
    b = np.array(b, dtype=float)
    b.setflags(write=False)

    def f_value(x):
        diff = x - b
        return 0.5 * float(diff @ diff)

    def grad_f(x):
        return x - b

    return CompositeProblem(f_value=f_value, grad_f=grad_f, lipschitz_L=1.0,
                            operator=operator, regularizer=regularizer, name=name)
