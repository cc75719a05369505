"""Lyapunov weights and the step rule for the stochastic method."""
from dataclasses import dataclass

from primaldual.errors import ParameterError
from primaldual.ppdg.steps import STEP_SAFETY, default_alpha

DELTA1 = 1.0
DELTA2 = 1.0 / 6.0


def step_bound(lipschitz_L, kappa_hat):
    """alpha must stay below 1/(2(3 + 7L + 6*kappa)) for e0 > 0 with delta1 = 1, delta2 = 1/6."""
    return 1.0 / (2.0 * (3.0 + 7.0 * lipschitz_L + 6.0 * kappa_hat))


def choose_alpha(alpha, lipschitz_L, kappa_hat):
    """Validate or pick alpha.

    Without a variance proxy (kappa_hat = 0) the deterministic default
    0.9/(3L) applies.
    """
    if kappa_hat < 0:
        raise ParameterError(f'kappa_hat must be >= 0, got {kappa_hat}')
    if kappa_hat == 0:
        return alpha or default_alpha(lipschitz_L)
    bound = step_bound(lipschitz_L, kappa_hat)
    if alpha is None:
        return STEP_SAFETY * bound
    if not 0 < alpha < bound:
        raise ParameterError(
            f'alpha={alpha:.6g} must lie in (0, {bound:.6g}) for kappa_hat={kappa_hat:g}')
    return alpha


@dataclass(frozen=True)
class SppdgLyapunovConstants:
    """Weights of L_s(x, y) - a||x - u||^2 + b||x - v||^2 + c||v - w||^2 and the descent margin e0."""

    a: float
    b: float
    c: float
    e0: float
    alpha: float
    kappa_hat: float
    lipschitz_L: float

    @classmethod
    def from_step(cls, alpha, kappa_hat, lipschitz_L, delta1=DELTA1, delta2=DELTA2):
        if not alpha > 0 or not lipschitz_L > 0 or kappa_hat < 0:
            raise ParameterError(
                f'need alpha > 0, L > 0, kappa_hat >= 0, got {alpha}, {lipschitz_L}, {kappa_hat}')
        L, k = lipschitz_L, kappa_hat
        e0 = (1.0 / (3.0 * alpha) - (delta1 + L) / 6.0 - k / (3.0 * delta1)
              - 4.0 * delta2 * L / 3.0 - 4.0 * delta2 / (3.0 * alpha)
              - 2.0 * delta2 * alpha * L ** 2 / 3.0 - alpha * L ** 2 / (2.0 * delta2)
              - 2.0 * alpha * k / delta2 - 8.0 * delta2 * alpha * k / 3.0)
        a = e0 + 2.0 * delta2 / alpha + 2.0 * delta2 * alpha * k
        b = (e0 + 9.0 * alpha * k / (2.0 * delta2) + 2.0 * delta2 * alpha * k
             + k / (2.0 * delta1) + 3.0 * alpha * L ** 2 / (2.0 * delta2))
        c = 3.0 * alpha * k / (2.0 * delta2)
        return cls(a=a, b=b, c=c, e0=e0, alpha=alpha, kappa_hat=k, lipschitz_L=L)
