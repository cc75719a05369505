"""Brute-force grid oracles for h* and prox_{beta h*}.

Used to verify the closed forms in tests and in the prox-check command.
"""
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from primaldual.errors import ParameterError

DEFAULT_HALF_WIDTH = 10.0
COARSE_FACTOR = 100


@dataclass(frozen=True)
class ProxOracle:
    """Oracle grid; bounds left as None fall back to the default grid."""

    grid_lo: Optional[float] = None
    grid_hi: Optional[float] = None
    grid_step: float = 1e-4


def _grid(lo, hi, step, anchors=()):
    """Integer multiples of ``step`` in [lo, hi] plus the anchors that fall inside."""
    if not step > 0 or not lo <= hi or not (math.isfinite(lo) and math.isfinite(hi)):
        raise ParameterError(f'empty oracle grid [{lo}, {hi}] with step {step}')
    ticks = step * np.arange(math.ceil(lo / step), math.floor(hi / step) + 1)
    extra = [a for a in (lo, hi, *anchors) if lo <= a <= hi]
    return np.union1d(ticks, np.asarray(extra, dtype=float))


def default_grid_bounds(reg, v, beta):
    half = max(DEFAULT_HALF_WIDTH, 3.0 * (abs(v) + reg.dual_slope * beta))
    return -half, half


def _prox_objective(reg, grid, v, beta):
    return reg.conj_terms(grid) + (grid - v) ** 2 / (2.0 * beta)


def prox_conj_oracle(reg, v, beta, oracle=ProxOracle()):
    """Grid argmin of h*(u) + (u - v)^2 / (2 beta) for scalar v.

    A coarse pass over the whole grid locates the minimizer to within one
    coarse cell; the fine pass then scans two cells either side. The
    objective is strictly convex, so this returns the fine-grid argmin.
    """
    if not beta > 0:
        raise ParameterError(f'beta must be positive, got {beta}')
    v = float(v)
    lo, hi = oracle.grid_lo, oracle.grid_hi
    if lo is None or hi is None:
        lo, hi = default_grid_bounds(reg, v, beta)
    step = oracle.grid_step

    coarse_step = step * COARSE_FACTOR
    coarse = _grid(lo, hi, coarse_step, anchors=(0.0,))
    center = coarse[np.argmin(_prox_objective(reg, coarse, v, beta))]

    fine = _grid(max(lo, center - 2 * coarse_step), min(hi, center + 2 * coarse_step), step,
                 anchors=(0.0,))
    return float(fine[np.argmin(_prox_objective(reg, fine, v, beta))])


def conj_value_oracle(reg, y, grid_step=1e-4, half_width=DEFAULT_HALF_WIDTH):
    """Exhaustive grid sup of y*w - h(w) over dom h (clipped to +-half_width)."""
    lo, hi = reg.domain
    lo, hi = max(lo, -half_width), min(hi, half_width)
    grid = _grid(lo, hi, grid_step, anchors=(0.0,))
    return float(np.max(float(y) * grid - reg.value_terms(grid)))
