"""Linear operators with forward and adjoint application.

Vectors are flat float64 arrays. Images are flattened row-major; the 2D
gradient stores its horizontal-difference block before its vertical block.
"""
from abc import ABC, abstractmethod
from enum import Enum

import numpy as np

from primaldual.errors import ConstructionError, ShapeError


class OperatorKind(str, Enum):
    DENSE = 'dense-matrix'
    GRADIENT_2D = 'gradient-2d'
    STACKED = 'stacked-over-identity'
    IDENTITY = 'identity'
    SCALED_IDENTITY = 'scaled-identity'


class Boundary(str, Enum):
    PERIODIC = 'periodic'
    ZERO_PAD = 'zero-pad'


def _as_vector(v, length, what):
    arr = np.asarray(v, dtype=float)
    if arr.ndim != 1 or arr.shape[0] != length:
        raise ShapeError(f'{what} must be a vector of length {length}, got shape {arr.shape}')
    return arr


class LinearOperator(ABC):
    """Abstract map A from R^in_dim to R^out_dim.

    Instances are immutable after construction; ``apply`` and
    ``apply_adjoint`` are pure.
    """

    kind = None

    def __init__(self, in_dim, out_dim):
        if in_dim < 1 or out_dim < 1:
            raise ConstructionError(f'operator dimensions must be positive, got {in_dim}x{out_dim}')
        self.in_dim = int(in_dim)
        self.out_dim = int(out_dim)

    def apply(self, x):
        """Return A x."""
        return self._forward(_as_vector(x, self.in_dim, 'input'))

    def apply_adjoint(self, y):
        """Return A^T y."""
        return self._adjoint(_as_vector(y, self.out_dim, 'adjoint input'))

    @abstractmethod
    def _forward(self, x):
        ...

    @abstractmethod
    def _adjoint(self, y):
        ...

    @property
    def identity_scale(self):
        """Scale s when A = s*I, else None.

        Only these operators admit the exact preconditioned dual step,
        where the metric prox reduces to an ordinary prox.
        """
        return None

    def to_dense(self):
        """Materialize A as an out_dim x in_dim array (column by column)."""
        eye = np.eye(self.in_dim)
        return np.column_stack([self._forward(eye[:, j]) for j in range(self.in_dim)])

    def __repr__(self):
        return f'<{type(self).__name__} {self.out_dim}x{self.in_dim}>'


class DenseOperator(LinearOperator):
    kind = OperatorKind.DENSE

    def __init__(self, matrix):
        matrix = np.array(matrix, dtype=float)
        if matrix.ndim != 2:
            raise ConstructionError(f'dense operator needs a 2D matrix, got shape {matrix.shape}')
        super().__init__(matrix.shape[1], matrix.shape[0])
        matrix.setflags(write=False)
        self.matrix = matrix

    def _forward(self, x):
        return self.matrix @ x

    def _adjoint(self, y):
        return self.matrix.T @ y

    def to_dense(self):
        return self.matrix.copy()


class IdentityOperator(LinearOperator):
    kind = OperatorKind.IDENTITY

    def __init__(self, n):
        super().__init__(n, n)

    def _forward(self, x):
        return x.copy()

    def _adjoint(self, y):
        return y.copy()

    @property
    def identity_scale(self):
        return 1.0


class ScaledIdentity(LinearOperator):
    kind = OperatorKind.SCALED_IDENTITY

    def __init__(self, n, scale):
        if scale == 0:
            raise ConstructionError('scaled identity needs a nonzero scale')
        super().__init__(n, n)
        self.scale = float(scale)

    def _forward(self, x):
        return self.scale * x

    def _adjoint(self, y):
        return self.scale * y

    @property
    def identity_scale(self):
        return self.scale


class Gradient2D(LinearOperator):
    """Forward differences of a height x width image.

    Output layout: [horizontal block (h*w); vertical block (h*w)], each
    block row-major. With zero-pad, differences that would leave the image
    are set to zero (the padded entries are never written).
    """

    kind = OperatorKind.GRADIENT_2D

    def __init__(self, height, width, boundary=Boundary.PERIODIC):
        if height < 2 or width < 2:
            raise ConstructionError(f'gradient needs an image of at least 2x2, got {height}x{width}')
        super().__init__(height * width, 2 * height * width)
        self.height = int(height)
        self.width = int(width)
        self.boundary = Boundary(boundary)

    def _forward(self, x):
        img = x.reshape(self.height, self.width)
        if self.boundary is Boundary.PERIODIC:
            dh = np.roll(img, -1, axis=1) - img
            dv = np.roll(img, -1, axis=0) - img
        else:
            dh = np.zeros_like(img)
            dv = np.zeros_like(img)
            dh[:, :-1] = img[:, 1:] - img[:, :-1]
            dv[:-1, :] = img[1:, :] - img[:-1, :]
        return np.concatenate([dh.ravel(), dv.ravel()])

    def _adjoint(self, y):
        size = self.height * self.width
        ph = y[:size].reshape(self.height, self.width)
        pv = y[size:].reshape(self.height, self.width)
        if self.boundary is Boundary.PERIODIC:
            out = np.roll(ph, 1, axis=1) - ph + np.roll(pv, 1, axis=0) - pv
        else:
            out = np.zeros((self.height, self.width))
            out[:, :-1] -= ph[:, :-1]
            out[:, 1:] += ph[:, :-1]
            out[:-1, :] -= pv[:-1, :]
            out[1:, :] += pv[:-1, :]
        return out.ravel()


class StackedOperator(LinearOperator):
    """A = [V; I] for a square matrix V, so that A x = (V x; x)."""

    kind = OperatorKind.STACKED

    def __init__(self, V):
        V = np.array(V, dtype=float)
        if V.ndim != 2 or V.shape[0] != V.shape[1]:
            raise ConstructionError(f'stacked operator needs a square top block, got shape {V.shape}')
        n = V.shape[0]
        super().__init__(n, 2 * n)
        V.setflags(write=False)
        self.V = V

    def _forward(self, x):
        return np.concatenate([self.V @ x, x])

    def _adjoint(self, y):
        n = self.in_dim
        return self.V.T @ y[:n] + y[n:]


def apply(op, x):
    """Return A x."""
    return op.apply(x)


def apply_adjoint(op, y):
    """Return A^T y."""
    return op.apply_adjoint(y)


def build_gradient2d(height, width, boundary=Boundary.PERIODIC):
    return Gradient2D(height, width, boundary)


def build_stacked(V):
    return StackedOperator(V)


def build_dense(matrix):
    return DenseOperator(matrix)


def build_identity(n, scale=1.0):
    if scale == 1.0:
        return IdentityOperator(n)
    return ScaledIdentity(n, scale)


def load_dense_csv(path):
    """Read a dense matrix from CSV (one row per line, comma-separated)."""
    matrix = np.loadtxt(path, delimiter=',', ndmin=2)
    return matrix
