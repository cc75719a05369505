"""Tests for linear operators and spectral estimates."""
import numpy as np
import pytest

from primaldual.errors import ConstructionError, ShapeError
from primaldual.linops import (
    Boundary,
    apply,
    apply_adjoint,
    build_dense,
    build_gradient2d,
    build_identity,
    build_stacked,
    estimate_min_eig_gram,
    estimate_op_norm,
    load_dense_csv,
    spectral_bounds,
)


@pytest.fixture
def rng():
    return np.random.default_rng(42)


def all_operators():
    rng = np.random.default_rng(7)
    return [
        build_identity(5),
        build_identity(5, 2.5),
        build_dense(rng.standard_normal((4, 6))),
        build_gradient2d(3, 4),
        build_gradient2d(3, 4, Boundary.ZERO_PAD),
        build_stacked(rng.standard_normal((5, 5))),
    ]


def test_identity_apply_and_adjoint():
    """Identity maps vectors to themselves."""
    op = build_identity(3)
    np.testing.assert_array_equal(apply(op, [1.0, -2.0, 3.0]), [1.0, -2.0, 3.0])
    np.testing.assert_array_equal(apply_adjoint(build_identity(2), [4.0, 5.0]), [4.0, 5.0])


def test_dense_apply_and_adjoint():
    """A diagonal matrix scales coordinates in both directions."""
    op = build_dense([[2.0, 0.0], [0.0, 1.0]])
    np.testing.assert_array_equal(op.apply([1.0, 1.0]), [2.0, 1.0])
    np.testing.assert_array_equal(op.apply_adjoint([1.0, 1.0]), [2.0, 1.0])


def test_gradient_of_small_image():
    """Forward differences wrap around with periodic boundary."""
    op = build_gradient2d(2, 2)
    out = op.apply(np.array([1.0, 2.0, 3.0, 4.0]))
    np.testing.assert_array_equal(out[:4], [1.0, -1.0, 1.0, -1.0])
    np.testing.assert_array_equal(out[4:], [2.0, 2.0, -2.0, -2.0])


@pytest.mark.parametrize('boundary', list(Boundary))
def test_gradient_of_constant_image_is_zero(boundary):
    """A constant image has no gradient."""
    op = build_gradient2d(4, 4, boundary)
    np.testing.assert_array_equal(op.apply(np.full(16, 0.3)), np.zeros(32))


def test_gradient_rejects_tiny_images():
    """Images smaller than 2x2 are refused."""
    with pytest.raises(ConstructionError):
        build_gradient2d(1, 5)


@pytest.mark.parametrize('op', all_operators(), ids=repr)
def test_adjoint_identity(op, rng):
    """<A x, y> equals <x, A^T y> on random pairs."""
    for _ in range(100):
        x = rng.standard_normal(op.in_dim)
        y = rng.standard_normal(op.out_dim)
        lhs = float(op.apply(x) @ y)
        rhs = float(x @ op.apply_adjoint(y))
        assert abs(lhs - rhs) <= 1e-12 * (1.0 + np.linalg.norm(x) * np.linalg.norm(y))


@pytest.mark.parametrize('op', all_operators(), ids=repr)
def test_apply_is_linear(op, rng):
    """A(a x + z) = a A x + A z."""
    x, z = rng.standard_normal(op.in_dim), rng.standard_normal(op.in_dim)
    np.testing.assert_allclose(op.apply(2.5 * x + z), 2.5 * op.apply(x) + op.apply(z), rtol=1e-12, atol=1e-12)


def test_shape_mismatch_raises():
    """Wrong-length vectors raise a shape error."""
    op = build_dense(np.ones((2, 3)))
    with pytest.raises(ShapeError):
        op.apply(np.ones(2))
    with pytest.raises(ShapeError):
        op.apply_adjoint(np.ones(3))


def test_stacked_operator_blocks():
    """[V; I] x = (V x; x)."""
    x = np.array([1.0, -2.0, 0.5])
    np.testing.assert_array_equal(build_stacked(np.zeros((3, 3))).apply(x), np.concatenate([np.zeros(3), x]))
    np.testing.assert_array_equal(build_stacked(np.eye(3)).apply(x), np.concatenate([x, x]))


def test_stacked_rejects_non_square():
    """The top block must be square."""
    with pytest.raises(ConstructionError):
        build_stacked(np.ones((2, 3)))


def test_op_norm_estimates():
    """Power iteration recovers the largest singular value."""
    assert estimate_op_norm(build_identity(3)) == pytest.approx(1.0)
    assert estimate_op_norm(build_dense([[2.0, 0.0], [0.0, 1.0]])) == pytest.approx(2.0, abs=1e-10)
    assert estimate_op_norm(build_gradient2d(8, 8)) ** 2 == pytest.approx(8.0, abs=1e-4)


def test_op_norm_rises_to_largest_singular_value():
    """Each estimate is below sigma_max and does not drop as iterations grow."""
    matrix = np.random.default_rng(7).standard_normal((6, 4))
    sigma_max = np.linalg.svd(matrix, compute_uv=False)[0]
    op = build_dense(matrix)
    estimates = [estimate_op_norm(op, iterations, seed=1) for iterations in (1, 3, 10, 30, 500)]
    assert all(value <= sigma_max * (1 + 1e-12) for value in estimates)
    assert all(later >= earlier * (1 - 1e-12) for earlier, later in zip(estimates, estimates[1:]))
    assert estimates[-1] == pytest.approx(sigma_max, rel=1e-6)


def test_op_norm_is_deterministic():
    """Same seed, same estimate bit for bit."""
    op = build_gradient2d(6, 5, Boundary.ZERO_PAD)
    assert estimate_op_norm(op, 50, seed=3) == estimate_op_norm(op, 50, seed=3)


def test_zero_operator_has_zero_norm():
    """The zero matrix has norm 0."""
    assert estimate_op_norm(build_dense(np.zeros((3, 3)))) == 0.0


def test_min_eig_gram():
    """Surjective operators have a positive gram eigenvalue; the gradient does not."""
    assert estimate_min_eig_gram(build_identity(3)) == pytest.approx(1.0)
    assert estimate_min_eig_gram(build_dense([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]])) == pytest.approx(1.0)
    assert estimate_min_eig_gram(build_gradient2d(4, 4)) == 0.0
    assert estimate_min_eig_gram(build_stacked(np.zeros((2, 2)))) == 0.0


def test_min_eig_gram_iterative_path():
    """Above the materialization cap the shifted power iteration is used."""
    op = build_dense(np.diag([3.0, 2.0, 1.5]))
    assert estimate_min_eig_gram(op, iterations=500, materialize_cap=1) == pytest.approx(2.25, rel=1e-6)


def test_spectral_bounds_of_gradient():
    """The periodic 8x8 gradient has ||A||^2 = 8 and is not surjective."""
    bounds = spectral_bounds(build_gradient2d(8, 8))
    assert bounds.op_norm ** 2 == pytest.approx(8.0, abs=1e-8)
    assert bounds.hat_lambda == 0.0
    assert not bounds.surjective


def test_spectral_bounds_sandwich(rng):
    """hat_lambda*||y|| <= ||A^T y|| <= ||A||*||y||."""
    op = build_dense(rng.standard_normal((3, 5)))
    bounds = spectral_bounds(op)
    assert bounds.hat_lambda ** 2 == bounds.min_eig_gram
    for _ in range(100):
        y = rng.standard_normal(3)
        norm = np.linalg.norm(op.apply_adjoint(y))
        assert bounds.hat_lambda * np.linalg.norm(y) <= norm * (1 + 1e-9)
        assert norm <= (bounds.op_norm * (1 + 1e-6)) * np.linalg.norm(y)


def test_spectral_bounds_of_scaled_identity():
    """A = s*I gives ||A|| = hat_lambda = |s|."""
    bounds = spectral_bounds(build_identity(4, -2.0))
    assert bounds.op_norm == 2.0
    assert bounds.hat_lambda == 2.0
    assert bounds.surjective


def test_load_dense_csv(tmp_path):
    """Rows are lines, entries comma-separated."""
    path = tmp_path / 'm.csv'
    path.write_text('1,2\n3,4\n5,6\n')
    op = build_dense(load_dense_csv(path))
    assert (op.out_dim, op.in_dim) == (3, 2)
    np.testing.assert_array_equal(op.apply([1.0, 1.0]), [3.0, 7.0, 11.0])
