"""Spectral estimates used by the step-size rules."""
import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy import linalg

from primaldual.errors import ParameterError

logger = logging.getLogger(__name__)

DEFAULT_ITERATIONS = 200
DEFAULT_MATERIALIZE_CAP = 4096

# Relative level below which a gram eigenvalue counts as zero.
RANK_TOLERANCE = 1e-10


@dataclass(frozen=True)
class SpectralBounds:
    """Estimates of ||A|| and of the smallest eigenvalue of A A^T.

    ``hat_lambda`` is sqrt(min_eig_gram); ``min_eig_gram`` is stored as
    ``hat_lambda ** 2`` so the two agree exactly.
    """

    op_norm: float
    min_eig_gram: float
    hat_lambda: float

    @property
    def surjective(self):
        return self.hat_lambda > 0.0


def _power_iteration(matvec, dim, iterations, seed):
    """Rayleigh quotient of a PSD map after ``iterations`` power steps."""
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(dim)
    v /= np.linalg.norm(v)
    for _ in range(iterations):
        w = matvec(v)
        norm = np.linalg.norm(w)
        if norm == 0.0:
            return 0.0
        v = w / norm
    return float(v @ matvec(v))


def estimate_op_norm(op, iterations=DEFAULT_ITERATIONS, seed=0):
    """Power iteration on A^T A from a seeded start.

    The result is a lower bound on ||A|| that increases with
    ``iterations``; identical seeds give identical results.
    """
    if iterations < 1:
        raise ParameterError(f'iterations must be >= 1, got {iterations}')
    gram = _power_iteration(lambda v: op.apply_adjoint(op.apply(v)), op.in_dim, iterations, seed)
    return math.sqrt(max(gram, 0.0))


def estimate_min_eig_gram(op, iterations=DEFAULT_ITERATIONS, seed=0,
                          materialize_cap=DEFAULT_MATERIALIZE_CAP):
    """Smallest eigenvalue of A A^T, clamped at zero.

    Materializes and eigensolves when out_dim <= materialize_cap; otherwise
    uses shifted power iteration on ||A||^2 I - A A^T. A zero result means A
    is not surjective, which is reported rather than raised.
    """
    if op.out_dim <= materialize_cap:
        dense = op.to_dense()
        eigenvalues = linalg.eigvalsh(dense @ dense.T)
        smallest, largest = float(eigenvalues[0]), float(eigenvalues[-1])
    else:
        if op.out_dim > op.in_dim:
            logger.debug(f'{op!r} has more rows than columns; A A^T is singular')
            return 0.0
        largest = estimate_op_norm(op, iterations, seed) ** 2

        def shifted(v):
            return largest * v - op.apply(op.apply_adjoint(v))

        smallest = largest - _power_iteration(shifted, op.out_dim, iterations, seed)

    if smallest <= RANK_TOLERANCE * max(largest, 1.0):
        return 0.0
    return smallest


def spectral_bounds(op, iterations=DEFAULT_ITERATIONS, seed=0,
                    materialize_cap=DEFAULT_MATERIALIZE_CAP):
    """Collect ||A||, lambda_min(A A^T) and hat_lambda for ``op``.

    ||A|| comes from an exact SVD when both dimensions fit under the cap,
    else from power iteration.
    """
    scale = op.identity_scale
    if scale is not None:
        op_norm = abs(scale)
        hat_lambda = abs(scale)
        return SpectralBounds(op_norm=op_norm, min_eig_gram=hat_lambda ** 2, hat_lambda=hat_lambda)

    if max(op.in_dim, op.out_dim) <= materialize_cap:
        op_norm = float(linalg.svdvals(op.to_dense())[0])
    else:
        op_norm = estimate_op_norm(op, iterations, seed)

    hat_lambda = math.sqrt(estimate_min_eig_gram(op, iterations, seed, materialize_cap))
    if hat_lambda == 0.0:
        logger.warning(f'{op!r} is not surjective (lambda_min(A A^T) = 0); '
                       'descent guarantees that assume a surjective operator do not apply')
    return SpectralBounds(op_norm=op_norm, min_eig_gram=hat_lambda ** 2, hat_lambda=hat_lambda)
