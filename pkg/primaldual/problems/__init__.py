"""Problem builders for the denoising and fused-lasso experiments."""
from primaldual.problems.base import CompositeProblem, FiniteSumProblem, quadratic_problem
from primaldual.problems.denoise import build_denoise, psnr
from primaldual.problems.fused_lasso import (
    SIGMOID_CURVATURE,
    box_violation,
    build_fused_lasso,
    build_precision_graph,
    load_graph,
    make_synthetic_lasso,
    normalize_rows,
    relaxed_objective,
)
