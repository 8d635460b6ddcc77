"""Sparse leading-eigenvector estimation.

Two-stage procedure: an l1-penalized semidefinite relaxation over the
spectraplex (solved by ADMM) supplies the starting direction, and
truncated power iteration with a hard cardinality cap refines it.
"""

from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass

import numpy as np

logger = logging.getLogger(__name__)

_PSD_TOL = -1e-8
_EIGENGAP_TOL = 1e-8


@dataclass
class SparseEigenvector:
    v: np.ndarray
    k: int
    support: set[int]
    converged: bool = True
    iterations: int = 0


@dataclass
class RelaxationSolution:
    w: np.ndarray
    lam: float
    objective: float
    converged: bool
    degenerate: bool
    iterations: int

    @property
    def trace(self) -> float:
        return float(np.trace(self.w))


def _check_symmetric(m, name="matrix"):
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"{name} must be square")
    if not np.allclose(m, m.T, atol=1e-8):
        raise ValueError(f"{name} must be symmetric")
    return 0.5 * (m + m.T)


def _project_simplex(vals: np.ndarray) -> np.ndarray:
    """Euclidean projection of a vector onto the probability simplex."""
    u = np.sort(vals)[::-1]
    cumsum = np.cumsum(u)
    rho = np.flatnonzero(u + (1.0 - cumsum) / np.arange(1, u.size + 1) > 0)[-1]
    theta = (1.0 - cumsum[rho]) / (rho + 1.0)
    return np.maximum(vals + theta, 0.0)


def _project_spectraplex(m: np.ndarray) -> np.ndarray:
    vals, vecs = np.linalg.eigh(0.5 * (m + m.T))
    projected = _project_simplex(vals)
    out = (vecs * projected) @ vecs.T
    return 0.5 * (out + out.T)


def _soft_threshold(m: np.ndarray, thresh: float) -> np.ndarray:
    return np.sign(m) * np.maximum(np.abs(m) - thresh, 0.0)


def relaxation_objective(r: np.ndarray, w: np.ndarray, lam: float) -> float:
    return float(np.sum(r * w) - lam * np.abs(w).sum())


def sdp_relaxation(
    r: np.ndarray,
    lam: float,
    tol: float = 1e-5,
    max_iter: int = 2000,
    rho: float = 1.0,
) -> RelaxationSolution:
    """Maximize <r, W> - lam ||W||_1,1 over {W >= 0, Tr W = 1} by ADMM.

    Alternates the spectraplex projection (eigenvalues onto the
    probability simplex) with elementwise soft-thresholding; stops when
    both Frobenius residuals drop below tol.
    """
    r = _check_symmetric(r)
    if lam < 0:
        raise ValueError("lambda must be nonnegative")
    d = r.shape[0]
    w = np.eye(d) / d
    y = w.copy()
    u = np.zeros_like(w)
    converged = False
    it = 0
    for it in range(1, max_iter + 1):
        w = _project_spectraplex(y - u + r / rho)
        y_new = _soft_threshold(w + u, lam / rho)
        primal = float(np.linalg.norm(w - y_new))
        dual = float(rho * np.linalg.norm(y_new - y))
        y = y_new
        u = u + w - y
        if primal <= tol and dual <= tol:
            converged = True
            break
    eigvals = np.linalg.eigvalsh(w)
    degenerate = bool(eigvals[-1] - eigvals[-2] < _EIGENGAP_TOL)
    if degenerate:
        logger.info("relaxation has a (near-)degenerate leading eigengap")
    return RelaxationSolution(
        w=w,
        lam=float(lam),
        objective=relaxation_objective(r, w, lam),
        converged=converged,
        degenerate=degenerate,
        iterations=it,
    )


def _canonical_sign(v: np.ndarray) -> np.ndarray:
    idx = int(np.argmax(np.abs(v)))  # first maximum breaks magnitude ties
    return -v if v[idx] < 0 else v.copy()


def leading_eigenvector(w: np.ndarray) -> np.ndarray:
    """Unit top eigenvector; the largest-magnitude entry is made positive."""
    w = _check_symmetric(w)
    _, vecs = np.linalg.eigh(w)
    return _canonical_sign(vecs[:, -1])


def _truncate_top_k(x: np.ndarray, k: int) -> np.ndarray:
    """Keep the k largest-magnitude entries; ties resolve to lower indices."""
    if np.count_nonzero(x) <= k:
        return x.copy()
    order = np.lexsort((np.arange(x.size), -np.abs(x)))
    out = np.zeros_like(x)
    keep = order[:k]
    out[keep] = x[keep]
    return out


def truncated_power(
    r: np.ndarray,
    v0: np.ndarray,
    k: int,
    eps: float = 1e-6,
    max_iter: int = 1000,
) -> SparseEigenvector:
    """Power iteration with hard truncation to the top-k magnitudes.

    Stops when consecutive iterates differ by at most eps in l2 norm.
    For PSD inputs the Rayleigh quotient is checked to be non-decreasing;
    for indefinite inputs the check is skipped (logged).
    """
    r = _check_symmetric(r)
    if k < 1:
        raise ValueError("cardinality budget k must be at least 1")
    v = np.asarray(v0, dtype=float).copy()
    norm = np.linalg.norm(v)
    if norm == 0:
        raise ValueError("v0 must be nonzero")
    if abs(norm - 1.0) > 1e-8:
        warnings.warn("v0 is not unit norm; normalizing", RuntimeWarning)
    v /= norm

    is_psd = bool(np.linalg.eigvalsh(r)[0] >= _PSD_TOL)
    if not is_psd:
        logger.info("input not PSD; skipping the Rayleigh monotonicity check")
    rayleigh = float(v @ r @ v)
    restarts = 0
    converged = False
    it = 0
    rng = np.random.default_rng(0)
    for it in range(1, max_iter + 1):
        x = r @ v
        if not np.any(x):
            restarts += 1
            if restarts > 5:
                raise ArithmeticError("repeated zero iterates in truncated power method")
            logger.warning("zero iterate in truncated power method; restarting perturbed")
            v = v + rng.normal(scale=1e-6, size=v.size)
            v /= np.linalg.norm(v)
            continue
        x = _truncate_top_k(x, k)
        v_new = x / np.linalg.norm(x)
        if is_psd:
            new_rayleigh = float(v_new @ r @ v_new)
            if new_rayleigh < rayleigh - 1e-10 * max(1.0, abs(rayleigh)):
                raise ArithmeticError(
                    "Rayleigh quotient decreased on a PSD input "
                    f"({rayleigh:.12g} -> {new_rayleigh:.12g})"
                )
            rayleigh = new_rayleigh
        step = float(np.linalg.norm(v_new - v))
        v = v_new
        if step <= eps:
            converged = True
            break
    v = _canonical_sign(v)
    support = {int(i) for i in np.flatnonzero(v != 0.0)}
    return SparseEigenvector(v=v, k=k, support=support, converged=converged, iterations=it)


def two_stage_spca(
    r: np.ndarray,
    k: int,
    lam: float,
    sdp_tol: float = 1e-5,
    sdp_max_iter: int = 2000,
    eps: float = 1e-6,
    max_iter: int = 1000,
) -> SparseEigenvector:
    """Relaxation-initialized truncated power estimate of the sparse top eigenvector."""
    relaxed = sdp_relaxation(r, lam, tol=sdp_tol, max_iter=sdp_max_iter)
    v0 = leading_eigenvector(relaxed.w)
    est = truncated_power(r, v0, k, eps=eps, max_iter=max_iter)
    est.converged = est.converged and relaxed.converged
    return est


def sin_angle(u: np.ndarray, v: np.ndarray) -> float:
    """|sin| of the angle between two directions (sign-invariant)."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    nu, nv = np.linalg.norm(u), np.linalg.norm(v)
    if nu == 0 or nv == 0:
        raise ValueError("angle undefined for zero vectors")
    if abs(nu - 1.0) > 1e-8 or abs(nv - 1.0) > 1e-8:
        warnings.warn("non-unit input; normalizing before the angle", RuntimeWarning)
    cos = float(u @ v) / (nu * nv)
    return float(np.sqrt(max(0.0, 1.0 - min(1.0, cos * cos))))
