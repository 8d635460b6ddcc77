"""Recovery and error metrics for graph and eigenvector estimates."""

from __future__ import annotations

import numpy as np

from .precision import PrecisionEstimate
from .spca import SparseEigenvector

# Iterative solvers emit near-zeros; entries at or below this magnitude
# count as structural zeros.
NONZERO_TOL = 1e-8


def edge_set(omega: np.ndarray, tol: float = NONZERO_TOL) -> set[tuple[int, int]]:
    """Off-diagonal support of a symmetric matrix as pairs (i, j), i < j."""
    omega = np.asarray(omega)
    idx = np.nonzero(np.triu(np.abs(omega) > tol, k=1))
    return {(int(i), int(j)) for i, j in zip(*idx)}


def _as_edges(est) -> set[tuple[int, int]]:
    if isinstance(est, PrecisionEstimate):
        return edge_set(est.omega)
    if isinstance(est, np.ndarray):
        return edge_set(est)
    return {(min(i, j), max(i, j)) for i, j in est}


def _as_support(est) -> set[int]:
    if isinstance(est, SparseEigenvector):
        return set(est.support)
    if isinstance(est, np.ndarray):
        return {int(i) for i in np.flatnonzero(np.abs(est) > NONZERO_TOL)}
    return {int(i) for i in est}


def graph_fpr_tpr(est, truth_edges, d: int) -> tuple[float, float]:
    """False/true positive rates over the d(d-1)/2 distinct pairs."""
    truth = _as_edges(truth_edges)
    est = _as_edges(est)
    total = d * (d - 1) // 2
    positives = len(truth)
    negatives = total - positives
    if positives == 0:
        raise ValueError("degenerate truth: the true edge set is empty")
    if negatives == 0:
        raise ValueError("degenerate truth: the true graph is complete")
    fp = len(est - truth)
    tp = len(est & truth)
    return fp / negatives, tp / positives


def eigvec_fpr_tpr(est, truth_support, d: int) -> tuple[float, float]:
    """False/true positive rates over the d coordinates of an eigenvector."""
    truth = _as_support(truth_support)
    est = _as_support(est)
    positives = len(truth)
    negatives = d - positives
    if positives == 0:
        raise ValueError("degenerate truth: the true support is empty")
    if negatives == 0:
        raise ValueError("degenerate truth: the true support is full")
    fp = len(est - truth)
    tp = len(est & truth)
    return fp / negatives, tp / positives


def roc_curve(path, truth, d: int) -> list[tuple[float, float]]:
    """(fpr, tpr) points for a path of estimates, sorted by fpr.

    Points sharing an fpr keep the maximal tpr.
    """
    points = []
    for est in path:
        if isinstance(est, SparseEigenvector) or (
            isinstance(est, np.ndarray) and est.ndim == 1
        ):
            points.append(eigvec_fpr_tpr(est, truth, d))
        else:
            points.append(graph_fpr_tpr(est, truth, d))
    best: dict[float, float] = {}
    for fpr, tpr in points:
        best[fpr] = max(tpr, best.get(fpr, 0.0))
    return sorted(best.items())


def tpr_at_fpr(curve, fpr: float) -> float:
    """Step-function read of an ROC curve: best tpr at or below the given fpr."""
    vals = [t for f, t in curve if f <= fpr]
    return max(vals) if vals else 0.0


def matrix_errors(est, truth: np.ndarray) -> tuple[float, float, float]:
    """(Frobenius, spectral, max) norms of the estimation error."""
    omega = est.omega if isinstance(est, PrecisionEstimate) else np.asarray(est)
    diff = omega - np.asarray(truth)
    return (
        float(np.linalg.norm(diff, "fro")),
        float(np.linalg.norm(diff, 2)),
        float(np.max(np.abs(diff))),
    )


def oracle_lambda(path, omega_true: np.ndarray, norm: str = "frobenius"):
    """Path element minimizing the chosen error norm against the truth.

    Ties are broken toward the smaller lambda. Returns (lambda, estimate).
    """
    key = {"frobenius": 0, "f": 0, "spectral": 1, "s": 1}.get(norm.lower())
    if key is None:
        raise ValueError(f"norm must be frobenius or spectral, got {norm!r}")
    if not path:
        raise ValueError("empty path")
    best_est = None
    best_err = np.inf
    for est in path:
        err = matrix_errors(est, omega_true)[key]
        if err < best_err or (err == best_err and est.lam < best_est.lam):
            best_err = err
            best_est = est
    return best_est.lam, best_est


def match_rate(support, group_labels) -> float:
    """Largest fraction of the support falling inside one of two groups."""
    support = _as_support(support)
    if not support:
        raise ValueError("match rate undefined for an empty support")
    labels = np.asarray(group_labels)
    groups = np.unique(labels)
    if groups.size != 2:
        raise ValueError(f"need exactly 2 groups, got {groups.size}")
    in_first = sum(1 for i in support if labels[i] == groups[0])
    return max(in_first, len(support) - in_first) / len(support)


def naive_covariance(values: np.ndarray) -> np.ndarray:
    """Pearson sample covariance of the observed columns."""
    return np.cov(np.asarray(values, dtype=float), rowvar=False)
