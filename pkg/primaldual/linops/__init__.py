"""Linear operators and their spectral estimates."""
from primaldual.linops.operators import (
    Boundary,
    DenseOperator,
    Gradient2D,
    IdentityOperator,
    LinearOperator,
    OperatorKind,
    ScaledIdentity,
    StackedOperator,
    apply,
    apply_adjoint,
    build_dense,
    build_gradient2d,
    build_identity,
    build_stacked,
    load_dense_csv,
)
from primaldual.linops.spectra import (
    SpectralBounds,
    estimate_min_eig_gram,
    estimate_op_norm,
    spectral_bounds,
)
