"""Variance-reduced stochastic gradient estimators."""
from primaldual.vrgrad.estimators import (
    ESTIMATORS,
    EstimatorKind,
    FullGradient,
    GradientEstimator,
    Saga,
    Sarah,
    Svrg,
    default_batch_size,
    make_estimator,
)
