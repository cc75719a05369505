"""Regularizers, their conjugates and the proximal maps of the conjugates."""
from primaldual.conjprox.oracle import (
    ProxOracle,
    conj_value_oracle,
    default_grid_bounds,
    prox_conj_oracle,
)
from primaldual.conjprox.regularizers import (
    L0Box,
    L1Norm,
    LpBall,
    Regularizer,
    RegularizerKind,
    ScadBox,
    build_regularizer,
    conj_value,
    prox_conj,
    soft_threshold,
    value_h,
)
