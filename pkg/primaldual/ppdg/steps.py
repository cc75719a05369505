"""Step sizes and the primal-dual update shared by the deterministic and stochastic solvers."""
import logging
from dataclasses import dataclass
from enum import Enum

import numpy as np

from primaldual.errors import ParameterError
from primaldual.linops import estimate_op_norm

logger = logging.getLogger(__name__)

# Fraction of the sufficient step bound 1/(3L) used when no step is given.
STEP_SAFETY = 0.9


class Preconditioner(str, Enum):
    EXACT_M = 'exact_M'
    SCALAR_BETA = 'scalar_beta'


@dataclass(frozen=True)
class StepSizes:
    """Primal step alpha, dual step beta and the ||A|| they were derived from."""

    alpha: float
    beta: float
    op_norm: float


def default_alpha(lipschitz_L):
    return STEP_SAFETY / (3.0 * lipschitz_L)


def resolve_steps(operator, alpha, preconditioner, op_norm=None, power_iterations=200):
    """Dual step for the chosen metric.

    exact_M uses M = alpha*A*A^T, which is only a plain prox when A = s*I;
    then beta = 1/(alpha*s^2). scalar_beta replaces M by ||A||^2*alpha*I.
    """
    if not alpha > 0:
        raise ParameterError(f'alpha must be positive, got {alpha}')
    preconditioner = Preconditioner(preconditioner)
    scale = operator.identity_scale

    if preconditioner is Preconditioner.EXACT_M:
        if scale is None:
            raise ParameterError(
                f'exact_M needs an identity or scaled-identity operator, got {operator!r}; '
                'use scalar_beta')
        norm = abs(scale)
    elif op_norm is not None:
        norm = float(op_norm)
    elif scale is not None:
        norm = abs(scale)
    else:
        norm = estimate_op_norm(operator, power_iterations, seed=0)

    if not norm > 0:
        raise ParameterError(f'operator norm must be positive, got {norm}')
    beta = 1.0 / (alpha * norm ** 2)
    logger.info(f'step sizes: alpha={alpha:.6g}, beta={beta:.6g} ({preconditioner.value}, ||A||={norm:.6g})')
    return StepSizes(alpha=alpha, beta=beta, op_norm=norm)


def primal_dual_update(operator, regularizer, x, y, gradient, steps):
    """x+ = x - alpha*(grad + A^T y);  y+ = prox_{beta h*}(y + beta*A(2x+ - x))."""
    x_next = x - steps.alpha * (gradient + operator.apply_adjoint(y))
    y_next = regularizer.prox_conj(y + steps.beta * operator.apply(2.0 * x_next - x), steps.beta)
    return x_next, np.asarray(y_next, dtype=float)


def dual_subgradient(operator, steps, x_cur, x_prev, y_cur, y_prev):
    """g = -(1/beta)(y - y_prev) + A(2x - x_prev), an element of dh*(y) after a dual step."""
    return -(y_cur - y_prev) / steps.beta + operator.apply(2.0 * x_cur - x_prev)
