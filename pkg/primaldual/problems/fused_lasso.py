"""Nonconvex graph-guided fused lasso with the sigmoid loss.

min_x (1/N) sum_i (1 - tanh(b_i <a_i, x>)) + lam*||A x||_p^p,  A = [V; I],
restricted to ||A x||_inf <= r.
"""
import logging

import numpy as np
from scipy import sparse

from primaldual.conjprox import LpBall
from primaldual.errors import ConstructionError, DataError, ParameterError, ShapeError
from primaldual.linops import build_stacked
from primaldual.problems.base import FiniteSumProblem

logger = logging.getLogger(__name__)

# max_u |d^2/du^2 tanh(u)| = 4 / (3*sqrt(3)), rounded up
SIGMOID_CURVATURE = 0.7699

DEFAULT_GRAPH_THRESHOLD = 0.5


def _dense_rows(features):
    if sparse.issparse(features):
        features = features.toarray()
    rows = np.array(features, dtype=float)
    if rows.ndim != 2 or rows.shape[0] == 0 or rows.shape[1] == 0:
        raise ConstructionError(f'feature matrix must be a non-empty 2D array, got shape {rows.shape}')
    return rows


def normalize_rows(rows):
    """Scale each row to unit Euclidean norm; zero rows stay zero."""
    norms = np.linalg.norm(rows, axis=1)
    norms[norms == 0.0] = 1.0
    return rows / norms[:, None]


def build_fused_lasso(features, labels, V, lam=1e-4, p=0.5, r=1.0, normalize=True):
    """Build the fused-lasso finite sum from rows a_i and labels b_i in {-1, +1}.

    ``features`` may be a dense array or a scipy sparse matrix. With
    ``normalize`` (the default) the rows are scaled to unit norm first,
    giving L ~ 0.77; raw rows give L = 0.7699*max ||a_i||^2.
    """
    rows = _dense_rows(features)
    labels = np.asarray(labels, dtype=float).ravel()
    if labels.shape[0] != rows.shape[0]:
        raise ShapeError(f'{rows.shape[0]} rows but {labels.shape[0]} labels')
    if not np.all(np.isin(labels, (-1.0, 1.0))):
        bad = np.unique(labels[~np.isin(labels, (-1.0, 1.0))])
        raise DataError(f'labels must be -1 or +1, found {bad[:5].tolist()}')
    if normalize:
        rows = normalize_rows(rows)

    V = np.asarray(V, dtype=float)
    if V.shape != (rows.shape[1], rows.shape[1]):
        raise ShapeError(f'graph matrix must be {rows.shape[1]}x{rows.shape[1]}, got {V.shape}')

    rows.setflags(write=False)
    labels.setflags(write=False)
    regularizer = LpBall(lam, p, r)
    operator = build_stacked(V)

    lipschitz = SIGMOID_CURVATURE * float(np.max(np.sum(rows ** 2, axis=1)))
    if lipschitz == 0.0:
        raise ConstructionError('all feature rows are zero; the loss is constant')

    def margins(indices, x):
        return labels[indices] * (rows[indices] @ x)

    def component_value(i, x):
        return 1.0 - float(np.tanh(labels[i] * (rows[i] @ x)))

    def component_grad(i, x):
        t = np.tanh(labels[i] * (rows[i] @ x))
        return -labels[i] * (1.0 - t ** 2) * rows[i]

    def batch_grads(indices, x):
        indices = np.asarray(indices, dtype=np.intp)
        t = np.tanh(margins(indices, x))
        weights = -labels[indices] * (1.0 - t ** 2)
        return weights[:, None] * rows[indices]

    def full_grad(x):
        t = np.tanh(labels * (rows @ x))
        return rows.T @ (-labels * (1.0 - t ** 2)) / rows.shape[0]

    def full_value(x):
        return float(np.mean(1.0 - np.tanh(labels * (rows @ x))))

    logger.debug(f'fused lasso: N={rows.shape[0]}, n={rows.shape[1]}, L={lipschitz:.6g}')
    return FiniteSumProblem(
        n_components=rows.shape[0],
        component_value=component_value,
        component_grad=component_grad,
        lipschitz_L=lipschitz,
        operator=operator,
        regularizer=regularizer,
        name=f'fused-lasso-{rows.shape[0]}x{rows.shape[1]}',
        batch_grad_fn=batch_grads,
        full_grad_fn=full_grad,
        full_value_fn=full_value,
    )


def build_precision_graph(features, threshold=DEFAULT_GRAPH_THRESHOLD):
    """Correlation-threshold graph over the features.

    V_jk = 1 when |corr(feature j, feature k)| > threshold and j != k. This
    stands in for a sparse inverse-covariance estimate; a graph loaded from
    file is used verbatim instead.
    """
    rows = _dense_rows(features)
    if rows.shape[0] < 2:
        raise ConstructionError('need at least 2 rows to estimate correlations')
    if not 0 < threshold < 1:
        raise ParameterError(f'threshold must lie in (0, 1), got {threshold}')

    centered = rows - rows.mean(axis=0)
    scale = np.sqrt(np.sum(centered ** 2, axis=0))
    constant = scale == 0.0
    scale[constant] = 1.0
    standardized = centered / scale
    corr = standardized.T @ standardized
    corr[constant, :] = 0.0
    corr[:, constant] = 0.0

    V = (np.abs(corr) > threshold).astype(float)
    np.fill_diagonal(V, 0.0)
    return np.maximum(V, V.T)


def load_graph(path, n=None):
    """Read V from a comma-separated file and check it is square and symmetric."""
    V = np.loadtxt(path, delimiter=',', ndmin=2)
    if V.shape[0] != V.shape[1]:
        raise DataError(f'graph matrix in {path} is {V.shape[0]}x{V.shape[1]}, not square')
    if n is not None and V.shape[0] != n:
        raise ShapeError(f'graph matrix in {path} has size {V.shape[0]}, expected {n}')
    if not np.allclose(V, V.T):
        raise DataError(f'graph matrix in {path} is not symmetric')
    return V


def make_synthetic_lasso(n_samples, n_features, seed=0, correlation=0.6, sparsity=0.25):
    """Correlated Gaussian features with labels from a planted sparse model.

    Features follow an AR(1) covariance corr(j, k) = correlation^|j-k|, so
    neighbouring features are strongly linked. Labels are the sign of a
    noisy linear score against a sparse planted vector.
    """
    if n_samples < 1 or n_features < 1:
        raise ParameterError(f'need positive sizes, got N={n_samples}, n={n_features}')
    rng = np.random.default_rng(seed)

    lags = np.abs(np.subtract.outer(np.arange(n_features), np.arange(n_features)))
    cov = correlation ** lags
    features = rng.multivariate_normal(np.zeros(n_features), cov, size=n_samples, method='cholesky')

    planted = np.zeros(n_features)
    support = max(1, int(round(sparsity * n_features)))
    chosen = rng.choice(n_features, size=support, replace=False)
    planted[chosen] = rng.choice((-1.0, 1.0), size=support) * rng.uniform(0.5, 1.5, size=support)

    score = features @ planted + 0.1 * rng.standard_normal(n_samples)
    labels = np.where(score >= 0.0, 1.0, -1.0)
    return features, labels


def box_violation(problem, x):
    """How far ||A x||_inf exceeds r; zero on the feasible set."""
    ax = problem.operator.apply(x)
    return max(0.0, float(np.max(np.abs(ax))) - problem.regularizer.r)


def relaxed_objective(problem, x):
    """f(x) + lam*||clip(A x, -r, r)||_p^p.

    Iterates reach the ball {||A x||_inf <= r} only in the limit, where the
    exact objective is +inf for any overshoot. This finite stand-in is what
    runs are compared on; report ``box_violation`` next to it.
    """
    ax = np.abs(problem.operator.apply(x))
    reg = problem.regularizer
    return problem.f_value(x) + float(np.sum(reg.penalty(np.minimum(ax, reg.r))))
