"""l0-gradient image denoising and the PSNR metric."""
import math

import numpy as np

from primaldual.conjprox import L0Box
from primaldual.errors import ConstructionError, ShapeError
from primaldual.linops import Boundary, build_gradient2d
from primaldual.problems.base import quadratic_problem


def build_denoise(b, height, width, lam=0.1, c1=-1.0, c2=1.0, boundary=Boundary.PERIODIC):
    """min_x 0.5*||x - b||^2 + lam*||grad x||_0 with c1 <= grad x <= c2.

    ``b`` is the noisy image flattened row-major. The box constrains
    gradient values, not pixels.
    """
    b = np.asarray(b, dtype=float).ravel()
    if b.size == 0:
        raise ConstructionError('cannot denoise an empty image')
    if b.size != height * width:
        raise ShapeError(f'image has {b.size} pixels, expected {height}x{width}')

    operator = build_gradient2d(height, width, boundary)
    regularizer = L0Box(lam, c1, c2)
    return quadratic_problem(b, operator, regularizer, name=f'denoise-{height}x{width}')


def psnr(x, x_org, height, width):
    """10*log10(m*n*max(x)^2 / ||x - x_org||^2); +inf when x equals x_org."""
    x = np.asarray(x, dtype=float).ravel()
    x_org = np.asarray(x_org, dtype=float).ravel()
    if x.size != height * width or x_org.size != height * width:
        raise ShapeError(f'psnr expects two {height}x{width} images')
    error = float(np.sum((x - x_org) ** 2))
    if error == 0.0:
        return math.inf
    peak = float(np.max(x))
    return 10.0 * math.log10(height * width * peak ** 2 / error)
