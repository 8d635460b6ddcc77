"""Latent correlation, graph, and sparse-PCA estimation for binary/mixed data."""

__version__ = "0.1.0"

from .normal import bivariate_normal_cdf, std_normal_cdf, std_normal_quantile
from .correlation import (
    MixedDataset,
    bridge_binary,
    bridge_binary_inverse,
    bridge_mixed,
    bridge_mixed_inverse,
    continuous_pair_correlation,
    estimate_cutoff,
    estimate_latent_correlation,
    kendall_tau_binary,
    kendall_tau_continuous,
    kendall_tau_matrix,
    kendall_tau_mixed,
)
from .psd import PsdProjection, project_psd_maxnorm
from .precision import (
    PrecisionEstimate,
    adaptive_glasso_lla,
    clime,
    clime_threshold,
    glasso,
    glasso_weighted,
    lambda_path,
    oracle_precision,
    scad_derivative,
    scad_penalty,
)
from .spca import (
    RelaxationSolution,
    SparseEigenvector,
    leading_eigenvector,
    sdp_relaxation,
    sin_angle,
    truncated_power,
    two_stage_spca,
)
from .simulate import (
    ScenarioSpec,
    ScenarioTruth,
    random_graph_truth,
    sample_scenario,
    spiked_truth,
)
from .metrics import (
    edge_set,
    eigvec_fpr_tpr,
    graph_fpr_tpr,
    match_rate,
    matrix_errors,
    naive_covariance,
    oracle_lambda,
    roc_curve,
    tpr_at_fpr,
)

__all__ = [
    "MixedDataset",
    "PrecisionEstimate",
    "PsdProjection",
    "RelaxationSolution",
    "ScenarioSpec",
    "ScenarioTruth",
    "SparseEigenvector",
    "adaptive_glasso_lla",
    "bivariate_normal_cdf",
    "bridge_binary",
    "bridge_binary_inverse",
    "bridge_mixed",
    "bridge_mixed_inverse",
    "clime",
    "clime_threshold",
    "continuous_pair_correlation",
    "edge_set",
    "eigvec_fpr_tpr",
    "estimate_cutoff",
    "estimate_latent_correlation",
    "glasso",
    "glasso_weighted",
    "graph_fpr_tpr",
    "kendall_tau_binary",
    "kendall_tau_continuous",
    "kendall_tau_matrix",
    "kendall_tau_mixed",
    "lambda_path",
    "leading_eigenvector",
    "match_rate",
    "matrix_errors",
    "naive_covariance",
    "oracle_lambda",
    "oracle_precision",
    "project_psd_maxnorm",
    "random_graph_truth",
    "roc_curve",
    "sample_scenario",
    "scad_derivative",
    "scad_penalty",
    "sdp_relaxation",
    "sin_angle",
    "spiked_truth",
    "std_normal_cdf",
    "std_normal_quantile",
    "tpr_at_fpr",
    "truncated_power",
    "two_stage_spca",
]
