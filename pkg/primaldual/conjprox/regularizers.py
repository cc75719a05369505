"""Separable regularizers h with closed-form conjugates and conjugate proxes.

Every operation acts coordinate-wise. ``conjugate`` evaluates
h*(y) = sup_w <y, w> - h(w) and ``prox_conj`` evaluates
argmin_u h*(u) + ||u - v||^2 / (2 beta).
"""
import math
from abc import ABC, abstractmethod
from enum import Enum

import numpy as np

from primaldual.errors import ParameterError


class RegularizerKind(str, Enum):
    L1 = 'l1'
    L0_BOX = 'l0_box'
    LP_BALL = 'lp_ball'
    SCAD_BOX = 'scad_box'


def _check_beta(beta):
    if not beta > 0:
        raise ParameterError(f'beta must be positive, got {beta}')


class Regularizer(ABC):
    """A conjugate pair (h, h*) with the prox of h*. Immutable."""

    kind = None

    def __init__(self, lam):
        if not lam > 0:
            raise ParameterError(f'lambda must be positive, got {lam}')
        self.lam = float(lam)

    @abstractmethod
    def value_terms(self, x):
        """Per-coordinate h(x_i); +inf outside the domain."""

    @abstractmethod
    def conj_terms(self, y):
        """Per-coordinate h*(y_i)."""

    @abstractmethod
    def prox_conj(self, v, beta):
        """prox_{beta h*}(v), coordinate-wise."""

    @abstractmethod
    def envelope_terms(self, x):
        """Per-coordinate h**(x_i), the convex envelope of h; +inf outside the domain."""

    @abstractmethod
    def conj_subgradient(self, y):
        """One element of the subdifferential of h* at y."""

    @property
    @abstractmethod
    def domain(self):
        """Closed interval (lo, hi) holding dom h per coordinate."""

    @property
    @abstractmethod
    def dual_slope(self):
        """Largest slope of h*; bounds how far the prox moves a point per unit beta."""

    def value(self, x):
        """h(x), +inf outside the domain."""
        return float(np.sum(self.value_terms(np.asarray(x, dtype=float))))

    def conjugate(self, y):
        """h*(y) summed over coordinates."""
        return float(np.sum(self.conj_terms(np.asarray(y, dtype=float))))

    def envelope(self, x):
        """h**(x) summed over coordinates; h**(x) <= h(x), with equality for convex h."""
        return float(np.sum(self.envelope_terms(np.asarray(x, dtype=float))))

    def __repr__(self):
        params = ', '.join(f'{k}={v:g}' for k, v in vars(self).items())
        return f'<{type(self).__name__} {params}>'


class L1Norm(Regularizer):
    """h(x) = lam*||x||_1; h* is the indicator of the inf-ball of radius lam."""

    kind = RegularizerKind.L1

    def value_terms(self, x):
        return self.lam * np.abs(x)

    def conj_terms(self, y):
        return np.where(np.abs(y) > self.lam, math.inf, 0.0)

    def envelope_terms(self, x):
        return self.value_terms(x)

    def prox_conj(self, v, beta):
        _check_beta(beta)
        return np.clip(v, -self.lam, self.lam)

    def conj_subgradient(self, y):
        # normal cone of the box: zero inside, outward on the faces
        y = np.asarray(y, dtype=float)
        return np.where(np.abs(y) >= self.lam, np.sign(y), 0.0)

    def prox(self, v, beta):
        """Soft-thresholding, prox_{beta h}(v)."""
        _check_beta(beta)
        return soft_threshold(v, beta * self.lam)

    @property
    def domain(self):
        return (-math.inf, math.inf)

    @property
    def dual_slope(self):
        return self.lam


class L0Box(Regularizer):
    """h(x) = lam*||x||_0 + indicator{c1 <= x_i <= c2} with c1 < 0 < c2.

    h*(y_i) = max(0, c2*y_i - lam, c1*y_i - lam).
    """

    kind = RegularizerKind.L0_BOX

    def __init__(self, lam, c1, c2):
        super().__init__(lam)
        if not c1 < 0 < c2:
            raise ParameterError(f'need c1 < 0 < c2, got c1={c1}, c2={c2}')
        self.c1 = float(c1)
        self.c2 = float(c2)

    def value_terms(self, x):
        inside = (x >= self.c1) & (x <= self.c2)
        return np.where(inside, self.lam * (x != 0), math.inf)

    def conj_terms(self, y):
        return np.maximum(np.maximum(self.c2 * y - self.lam, self.c1 * y - self.lam), 0.0)

    def envelope_terms(self, x):
        # slopes lam/c2 and lam/c1 on the two halves of the box
        inside = (x >= self.c1) & (x <= self.c2)
        slope = np.where(x >= 0, self.lam / self.c2, self.lam / self.c1)
        return np.where(inside, slope * x, math.inf)

    def prox_conj(self, v, beta):
        _check_beta(beta)
        v = np.asarray(v, dtype=float)
        upper = self.lam / self.c2
        lower = self.lam / self.c1
        return np.select(
            [v > self.c2 * beta + upper,
             v > upper,
             v > lower,
             v > self.c1 * beta + lower],
            [v - self.c2 * beta,
             upper,
             v,
             lower],
            default=v - self.c1 * beta,
        )

    def conj_subgradient(self, y):
        y = np.asarray(y, dtype=float)
        return np.select([y > self.lam / self.c2, y < self.lam / self.c1],
                         [self.c2, self.c1], default=0.0)

    @property
    def domain(self):
        return (self.c1, self.c2)

    @property
    def dual_slope(self):
        return max(-self.c1, self.c2)


class _RampConjugate(Regularizer):
    """Regularizers whose conjugate is sum_i max(r*|y_i| - offset, 0).

    This holds for any h that is even, concave in |w| on [0, r] and
    restricted to [-r, r]: the supremum of y*w - h(w) sits at w = 0 or
    w = +-r, so offset = h(r). The prox is the identity up to
    tau = offset / r, flat at +-tau for a stretch of length r*beta, then a
    shift by r*beta.
    """

    def __init__(self, lam, r):
        super().__init__(lam)
        if not r > 0:
            raise ParameterError(f'radius r must be positive, got {r}')
        self.r = float(r)

    @abstractmethod
    def penalty(self, magnitude):
        """The penalty as a function of |w| for |w| <= r."""

    @property
    def offset(self):
        return float(self.penalty(np.float64(self.r)))

    @property
    def threshold(self):
        return self.offset / self.r

    def value_terms(self, x):
        magnitude = np.abs(x)
        inside = magnitude <= self.r
        return np.where(inside, self.penalty(np.minimum(magnitude, self.r)), math.inf)

    def conj_terms(self, y):
        return np.maximum(self.r * np.abs(y) - self.offset, 0.0)

    def envelope_terms(self, x):
        magnitude = np.abs(x)
        return np.where(magnitude <= self.r, self.threshold * magnitude, math.inf)

    def prox_conj(self, v, beta):
        _check_beta(beta)
        v = np.asarray(v, dtype=float)
        tau = self.threshold
        magnitude = np.abs(v)
        sign = np.sign(v)
        return np.select(
            [magnitude < tau, magnitude <= tau + self.r * beta],
            [v, sign * tau],
            default=v - sign * self.r * beta,
        )

    def conj_subgradient(self, y):
        y = np.asarray(y, dtype=float)
        return np.where(np.abs(y) > self.threshold, self.r * np.sign(y), 0.0)

    @property
    def domain(self):
        return (-self.r, self.r)

    @property
    def dual_slope(self):
        return self.r


class LpBall(_RampConjugate):
    """h(x) = lam*||x||_p^p + indicator{||x||_inf <= r}, 0 < p < 1."""

    kind = RegularizerKind.LP_BALL

    def __init__(self, lam, p, r):
        if not 0 < p < 1:
            raise ParameterError(f'p must lie in (0, 1), got {p}')
        super().__init__(lam, r)
        self.p = float(p)

    def penalty(self, magnitude):
        return self.lam * np.power(magnitude, self.p)


class ScadBox(_RampConjugate):
    """Sum of SCAD penalties plus indicator{||x||_inf <= r}, gamma > 2.

    All three regimes of r against lam and gamma*lam reduce to the ramp
    conjugate with offset = SCAD(r).
    """

    kind = RegularizerKind.SCAD_BOX

    def __init__(self, lam, gamma, r):
        if not gamma > 2:
            raise ParameterError(f'gamma must exceed 2, got {gamma}')
        super().__init__(lam, r)
        self.gamma = float(gamma)

    def penalty(self, magnitude):
        lam, gamma = self.lam, self.gamma
        magnitude = np.asarray(magnitude, dtype=float)
        middle = (2 * gamma * lam * magnitude - (magnitude ** 2 + lam ** 2)) / (2 * (gamma - 1))
        return np.select(
            [magnitude <= lam, magnitude <= gamma * lam],
            [lam * magnitude, middle],
            default=lam ** 2 * (gamma + 1) / 2,
        )


def soft_threshold(v, threshold):
    return np.sign(v) * np.maximum(np.abs(v) - threshold, 0.0)


def conj_value(reg, y):
    """h*(y); +inf only for l1 outside its box."""
    return reg.conjugate(np.atleast_1d(np.asarray(y, dtype=float)))


def prox_conj(reg, v, beta):
    """prox_{beta h*}(v)."""
    return reg.prox_conj(np.asarray(v, dtype=float), beta)


def value_h(reg, x):
    """h(x), used for objective reporting; +inf propagates."""
    return reg.value(np.atleast_1d(np.asarray(x, dtype=float)))


def build_regularizer(kind, lam, c1=-1.0, c2=1.0, p=0.5, r=1.0, gamma=3.7):
    """Construct a regularizer from a kind name and the union of parameters."""
    kind = RegularizerKind(kind)
    if kind is RegularizerKind.L1:
        return L1Norm(lam)
    if kind is RegularizerKind.L0_BOX:
        return L0Box(lam, c1, c2)
    if kind is RegularizerKind.LP_BALL:
        return LpBall(lam, p, r)
    return ScadBox(lam, gamma, r)
