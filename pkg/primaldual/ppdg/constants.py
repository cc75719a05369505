"""Lyapunov weights for the deterministic method."""
from dataclasses import dataclass

from primaldual.errors import ParameterError

DEFAULT_DELTA = 0.2


@dataclass(frozen=True)
class LyapunovConstants:
    """Weights a, b, c of L(x, y) - a||x - u||^2 + b||x - v||^2.

    With delta = 0.2 every alpha in (0, 1/(3L)) makes all three positive.
    """

    a: float
    b: float
    c: float
    alpha: float
    delta: float
    lipschitz_L: float

    @classmethod
    def from_step(cls, alpha, delta, lipschitz_L):
        if not alpha > 0 or not delta > 0 or not lipschitz_L > 0:
            raise ParameterError(
                f'alpha, delta and L must be positive, got {alpha}, {delta}, {lipschitz_L}')
        L = lipschitz_L
        a = delta / alpha
        b = (1.0 / (2.0 * alpha) - L / 4.0 - delta / alpha - alpha * delta * L ** 2 / 2.0
             - delta * L + alpha * L ** 2 / (4.0 * delta))
        c = b - alpha * L ** 2 / (2.0 * delta)
        return cls(a=a, b=b, c=c, alpha=alpha, delta=delta, lipschitz_L=L)

    @property
    def valid(self):
        return self.a > 0 and self.b > 0 and self.c > 0

    def gamma1(self, op_norm):
        """Weight of ||x^k - x^{k-1}|| in the subgradient bound."""
        L, alpha = self.lipschitz_L, self.alpha
        return 2.0 * L + 4.0 * self.b + 2.0 / alpha + (2.0 + alpha * L) * op_norm

    def gamma2(self, op_norm):
        """Weight of ||x^{k+1} - x^k|| in the subgradient bound."""
        return 4.0 * self.a + 1.0 / self.alpha + op_norm
