"""Joint feature selection with the Generalized Fisher Score."""

from .baselines import ScoreVector, fisher_scores, hsic_scores, laplacian_scores, top_m
from .data import (
    ClassStats,
    DataError,
    Dataset,
    ScatterPair,
    Standardizer,
    apply_standardizer,
    center_columns,
    class_stats,
    fit_standardizer,
    scatter_matrices,
    split_train_test,
)
from .solver import (
    ConstraintSet,
    GfsConfig,
    LinearSolverError,
    SolverError,
    SolverTrace,
    build_target_matrix,
    compute_bounds,
    cutting_plane,
    dual_gradient_V,
    dual_objective,
    gfs_selection_path,
    inner_mkl,
    lambda_gradient,
    most_violated,
    project_simplex,
    ratio_trace_criterion,
    recover_primal_W,
    ridge_objective,
    select_k_features,
    selected_features,
    solve_dual_V,
)

__version__ = "0.1.0"
