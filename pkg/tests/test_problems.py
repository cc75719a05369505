"""Tests for the problem builders."""
import math

import numpy as np
import pytest
from scipy import sparse

from primaldual.conjprox import L0Box, L1Norm, LpBall
from primaldual.errors import ConstructionError, DataError, ShapeError
from primaldual.linops import Gradient2D, build_identity
from primaldual.problems import (
    SIGMOID_CURVATURE,
    box_violation,
    build_denoise,
    build_fused_lasso,
    build_precision_graph,
    load_graph,
    make_synthetic_lasso,
    psnr,
    quadratic_problem,
    relaxed_objective,
)


@pytest.fixture
def rng():
    return np.random.default_rng(11)


@pytest.fixture
def lasso_problem():
    features, labels = make_synthetic_lasso(40, 6, seed=3)
    V = build_precision_graph(features)
    return build_fused_lasso(features, labels, V, normalize=False)


def central_difference(func, x, eps=1e-6):
    grad = np.zeros_like(x)
    for j in range(x.size):
        step = np.zeros_like(x)
        step[j] = eps
        grad[j] = (func(x + step) - func(x - step)) / (2 * eps)
    return grad


def test_denoise_data_term():
    """f(x) = 0.5||x - b||^2 with gradient x - b and L = 1."""
    b = np.linspace(0.0, 1.0, 12)
    problem = build_denoise(b, 3, 4)
    np.testing.assert_array_equal(problem.grad_f(b), np.zeros(12))
    e1 = np.zeros(12)
    e1[0] = 1.0
    assert problem.f_value(b + e1) == pytest.approx(0.5)
    assert problem.lipschitz_L == 1.0


def test_denoise_threads_parameters():
    """The gradient operator and the l0 box regularizer carry the given parameters."""
    problem = build_denoise(np.zeros(16), 4, 4, lam=0.1, c1=-1.0, c2=1.0)
    assert isinstance(problem.operator, Gradient2D)
    assert isinstance(problem.regularizer, L0Box)
    assert (problem.regularizer.lam, problem.regularizer.c1, problem.regularizer.c2) == (0.1, -1.0, 1.0)
    assert problem.dim == 16


def test_denoise_rejects_bad_images():
    """Empty and mis-sized images are refused."""
    with pytest.raises(ConstructionError):
        build_denoise([], 0, 0)
    with pytest.raises(ShapeError):
        build_denoise(np.zeros(10), 3, 4)


def test_denoise_objective_is_nonnegative(rng):
    """Feasible images have a nonnegative objective."""
    b = rng.uniform(0.0, 1.0, 25)
    problem = build_denoise(b, 5, 5)
    assert problem.objective(rng.uniform(0.0, 1.0, 25)) >= 0.0


def test_psnr_formula():
    """10*log10(mn*max(x)^2/||x - x_org||^2)."""
    x = np.array([1.0, 0.5, 0.5, 0.0])
    x_org = np.array([0.8, 0.5, 0.5, 0.0])
    assert psnr(x, x_org, 2, 2) == pytest.approx(20.0)


def test_psnr_doubling_error():
    """Twice the error costs 10*log10(4) dB."""
    x_org = np.zeros(4)
    x = np.array([1.0, 0.1, 0.0, 0.0])
    y = np.array([1.0, 0.2, 0.0, 0.0])
    x_org[0] = 1.0
    assert psnr(x, x_org, 2, 2) - psnr(y, x_org, 2, 2) == pytest.approx(10 * math.log10(4))


def test_psnr_of_identical_images_is_infinite():
    """No error gives +inf."""
    x = np.array([0.1, 0.2, 0.3, 0.4])
    assert psnr(x, x.copy(), 2, 2) == math.inf


def test_quadratic_problem_composite_view():
    """The one-component view shares the gradient function."""
    problem = quadratic_problem(np.ones(3), build_identity(3), L1Norm(0.5))
    view = problem.as_finite_sum()
    x = np.array([0.5, -1.0, 2.0])
    assert view.n_components == 1
    np.testing.assert_array_equal(view.full_grad(x), problem.grad_f(x))
    assert view.f_value(x) == problem.f_value(x)
    assert view.objective(x) == problem.objective(x)


def test_lasso_gradient_at_zero(lasso_problem):
    """At x = 0 each component gradient is -b_i a_i and each value is 1."""
    features, labels = make_synthetic_lasso(40, 6, seed=3)
    x = np.zeros(6)
    np.testing.assert_allclose(lasso_problem.component_grads([0, 5], x), -labels[[0, 5], None] * features[[0, 5]])
    assert lasso_problem.component_value(0, x) == 1.0
    assert lasso_problem.f_value(x) == pytest.approx(1.0)


def test_lasso_component_gradients_match_finite_differences(lasso_problem, rng):
    """Component gradients agree with central differences of the values."""
    for _ in range(20):
        i = int(rng.integers(lasso_problem.n_components))
        x = rng.standard_normal(6) * 0.3
        fd = central_difference(lambda z: lasso_problem.component_value(i, z), x)
        np.testing.assert_allclose(lasso_problem.component_grad(i, x), fd, rtol=1e-5, atol=1e-8)


def test_lasso_full_gradient_is_component_mean(lasso_problem, rng):
    """The vectorized full gradient equals the mean of component gradients."""
    x = rng.standard_normal(6)
    stacked = np.stack([lasso_problem.component_grad(i, x) for i in range(lasso_problem.n_components)])
    np.testing.assert_allclose(lasso_problem.full_grad(x), stacked.mean(axis=0), rtol=1e-12, atol=1e-14)
    np.testing.assert_allclose(lasso_problem.component_grads(np.arange(40), x), stacked, rtol=1e-12, atol=1e-15)


def test_lasso_lipschitz_bound(lasso_problem, rng):
    """||grad f(x) - grad f(z)|| <= L ||x - z||."""
    L = lasso_problem.lipschitz_L
    for _ in range(100):
        x, z = rng.standard_normal((2, 6))
        lhs = np.linalg.norm(lasso_problem.full_grad(x) - lasso_problem.full_grad(z))
        assert lhs <= L * np.linalg.norm(x - z) * (1 + 1e-9)


def test_lasso_lipschitz_constant():
    """L is the curvature bound times the largest squared row norm."""
    rows = np.array([[3.0, 4.0], [1.0, 0.0]])
    problem = build_fused_lasso(rows, [1.0, -1.0], np.zeros((2, 2)), normalize=False)
    assert problem.lipschitz_L == pytest.approx(SIGMOID_CURVATURE * 25.0)
    normalized = build_fused_lasso(rows, [1.0, -1.0], np.zeros((2, 2)))
    assert normalized.lipschitz_L == pytest.approx(SIGMOID_CURVATURE)


def test_lasso_accepts_sparse_features():
    """CSR rows give the same problem as dense rows."""
    rows = np.array([[1.0, 0.0, 2.0], [0.0, -1.0, 0.5]])
    dense = build_fused_lasso(rows, [1.0, -1.0], np.eye(3))
    sparse_rows = build_fused_lasso(sparse.csr_matrix(rows), [1.0, -1.0], np.eye(3))
    x = np.array([0.1, 0.2, -0.3])
    np.testing.assert_array_equal(dense.full_grad(x), sparse_rows.full_grad(x))


def test_lasso_operator_and_regularizer(lasso_problem):
    """A = [V; I] and h is the lp penalty on the inf-ball."""
    assert lasso_problem.operator.out_dim == 12
    assert isinstance(lasso_problem.regularizer, LpBall)
    assert lasso_problem.regularizer.lam == 1e-4


def test_lasso_rejects_bad_labels():
    """Labels outside {-1, +1} are a data error."""
    with pytest.raises(DataError):
        build_fused_lasso(np.ones((2, 2)), [1.0, 2.0], np.zeros((2, 2)))


def test_lasso_rejects_bad_graph_shape():
    """V must be n x n."""
    with pytest.raises(ShapeError):
        build_fused_lasso(np.ones((2, 2)), [1.0, -1.0], np.zeros((3, 3)))


def test_relaxed_objective_and_box_violation():
    """Inside the ball the relaxed objective equals the exact one."""
    rows = np.array([[1.0, 0.0], [0.0, 1.0]])
    problem = build_fused_lasso(rows, [1.0, -1.0], np.zeros((2, 2)), lam=0.5, r=1.0)
    inside = np.array([0.25, 0.0])
    assert relaxed_objective(problem, inside) == pytest.approx(problem.objective(inside))
    assert box_violation(problem, inside) == 0.0
    outside = np.array([1.5, 0.0])
    assert problem.objective(outside) == math.inf
    assert box_violation(problem, outside) == pytest.approx(0.5)
    assert math.isfinite(relaxed_objective(problem, outside))


def test_precision_graph_links_duplicates(rng):
    """Perfectly correlated features are linked for any threshold below 1."""
    base = rng.standard_normal((50, 1))
    features = np.hstack([base, base, rng.standard_normal((50, 1))])
    V = build_precision_graph(features, threshold=0.99)
    assert V[0, 1] == 1.0 and V[1, 0] == 1.0
    np.testing.assert_array_equal(np.diag(V), np.zeros(3))
    np.testing.assert_array_equal(V, V.T)


def test_precision_graph_of_independent_features():
    """Independent features give no edges at threshold 0.9."""
    features = np.random.default_rng(5).standard_normal((10000, 5))
    assert build_precision_graph(features, threshold=0.9).sum() == 0.0


def test_precision_graph_constant_feature(rng):
    """A zero-variance feature has no edges."""
    features = np.hstack([np.ones((30, 1)), rng.standard_normal((30, 2))])
    V = build_precision_graph(features, threshold=0.01)
    np.testing.assert_array_equal(V[0], np.zeros(3))


def test_load_graph(tmp_path):
    """File graphs are used verbatim after a symmetry check."""
    good = tmp_path / 'good.csv'
    good.write_text('0,1\n1,0\n')
    np.testing.assert_array_equal(load_graph(good, n=2), [[0.0, 1.0], [1.0, 0.0]])
    bad = tmp_path / 'bad.csv'
    bad.write_text('0,1\n0,0\n')
    with pytest.raises(DataError):
        load_graph(bad)
    with pytest.raises(ShapeError):
        load_graph(good, n=3)


def test_synthetic_lasso_is_deterministic():
    """Same seed, same data."""
    a_features, a_labels = make_synthetic_lasso(30, 4, seed=9)
    b_features, b_labels = make_synthetic_lasso(30, 4, seed=9)
    np.testing.assert_array_equal(a_features, b_features)
    np.testing.assert_array_equal(a_labels, b_labels)
    assert set(np.unique(a_labels)) <= {-1.0, 1.0}
