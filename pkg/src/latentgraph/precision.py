"""Sparse latent precision matrix estimators.

Graphical lasso (uniform and entrywise-weighted penalties, unpenalized
diagonal) by block coordinate descent, CLIME by columnwise linear
programming with min-magnitude symmetrization, the SCAD local-linear
refinement, the known-support constrained MLE, and lambda paths.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linprog

from ._kernels import glasso_recover_precision, glasso_sweeps

_PSD_TOL = -1e-8
_OFF_SUPPORT_WEIGHT = 1e8


@dataclass
class PrecisionEstimate:
    omega: np.ndarray
    lam: float
    method: str
    kkt_residual: float | None = None
    converged: bool = True
    info: dict = field(default_factory=dict)


def _check_square_symmetric(m, name="matrix"):
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"{name} must be square")
    if not np.allclose(m, m.T, atol=1e-8):
        raise ValueError(f"{name} must be symmetric")
    return 0.5 * (m + m.T)


def _require_psd(m, name="input"):
    min_eig = float(np.linalg.eigvalsh(m)[0])
    if min_eig < _PSD_TOL:
        raise ValueError(
            f"{name} has smallest eigenvalue {min_eig:.3e}; "
            "project it onto the PSD cone first (see project_psd_maxnorm)"
        )


def glasso_kkt_residual(omega: np.ndarray, cov: np.ndarray, penalties: np.ndarray) -> float:
    """Stationarity violation of the penalized log-det problem.

    With W = omega^{-1}: the diagonal requires W_jj = cov_jj; zero
    off-diagonal entries require |W - cov| <= penalty; nonzero entries
    require W - cov = penalty * sign(omega).
    """
    w = np.linalg.inv(omega)
    diff = w - cov
    res = float(np.max(np.abs(np.diag(diff))))
    off = ~np.eye(cov.shape[0], dtype=bool)
    # entries at the solver noise floor are treated as zeros
    zero = off & (np.abs(omega) <= 1e-8)
    active = off & (np.abs(omega) > 1e-8)
    if zero.any():
        res = max(res, float(np.max(np.abs(diff[zero]) - penalties[zero])))
    if active.any():
        res = max(
            res,
            float(np.max(np.abs(diff[active] - penalties[active] * np.sign(omega[active])))),
        )
    return res


def _solve_weighted_glasso(cov, penalties, *, tol, max_sweeps, warm=None):
    d = cov.shape[0]
    if warm is None:
        w = cov.copy()
        betas = np.zeros((d - 1, d))
    else:
        w, betas = warm
        w = w.copy()
        betas = betas.copy()
    sweeps, max_change = glasso_sweeps(
        cov, penalties, w, betas, tol, max_sweeps, tol * 0.1, 200
    )
    omega = glasso_recover_precision(w, betas)
    healthy = bool(np.all(np.isfinite(omega)) and np.all(np.diag(omega) > 0))
    converged = healthy and max_change < tol
    return omega, (w, betas), sweeps, converged, healthy


def glasso_weighted(
    cov: np.ndarray,
    penalties: np.ndarray,
    tol: float = 1e-6,
    max_sweeps: int = 500,
    warm=None,
) -> PrecisionEstimate:
    """Graphical lasso with an entrywise nonnegative penalty matrix.

    The penalty diagonal must be zero (the diagonal is never penalized).
    """
    cov = _check_square_symmetric(cov, "covariance input")
    _require_psd(cov, "covariance input")
    penalties = np.asarray(penalties, dtype=float)
    if penalties.shape != cov.shape:
        raise ValueError("penalty matrix shape mismatch")
    if np.any(penalties < 0):
        raise ValueError("penalty weights must be nonnegative")
    if np.any(np.diag(penalties) != 0):
        raise ValueError("penalty diagonal must be zero (diagonal is unpenalized)")
    penalties = 0.5 * (penalties + penalties.T)

    omega, state, sweeps, converged, healthy = _solve_weighted_glasso(
        cov, penalties, tol=tol, max_sweeps=max_sweeps, warm=warm
    )
    kkt = glasso_kkt_residual(omega, cov, penalties) if healthy else float("inf")
    return PrecisionEstimate(
        omega=omega,
        lam=float(penalties.max()),
        method="glasso_weighted",
        kkt_residual=kkt,
        converged=converged,
        info={"sweeps": sweeps, "state": state, "diverged": not healthy},
    )


def _uniform_penalties(d: int, lam: float) -> np.ndarray:
    pen = np.full((d, d), lam)
    np.fill_diagonal(pen, 0.0)
    return pen


def glasso(
    cov: np.ndarray,
    lam: float,
    tol: float = 1e-6,
    max_sweeps: int = 500,
    warm=None,
) -> PrecisionEstimate:
    """Graphical lasso with uniform off-diagonal penalty lam >= 0."""
    if lam < 0:
        raise ValueError("lambda must be nonnegative")
    cov = _check_square_symmetric(cov, "covariance input")
    est = glasso_weighted(
        cov, _uniform_penalties(cov.shape[0], lam), tol=tol, max_sweeps=max_sweeps, warm=warm
    )
    est.method = "glasso"
    est.lam = float(lam)
    return est


def scad_derivative(theta, lam: float, a: float = 3.7):
    """Derivative of the SCAD penalty at theta >= 0."""
    if a <= 2:
        raise ValueError(f"SCAD parameter a must exceed 2, got {a}")
    if lam < 0:
        raise ValueError("lambda must be nonnegative")
    theta_arr = np.asarray(theta, dtype=float)
    if np.any(theta_arr < 0):
        raise ValueError("theta must be nonnegative")
    out = np.where(
        theta_arr <= lam, lam, np.maximum(a * lam - theta_arr, 0.0) / (a - 1.0)
    )
    return float(out) if out.ndim == 0 else out


def scad_penalty(theta, lam: float, a: float = 3.7):
    """SCAD penalty value (integral of scad_derivative from 0 to |theta|)."""
    if a <= 2:
        raise ValueError(f"SCAD parameter a must exceed 2, got {a}")
    t = np.abs(np.asarray(theta, dtype=float))
    quad = (-t * t + 2.0 * a * lam * t - lam * lam) / (2.0 * (a - 1.0))
    out = np.where(t <= lam, lam * t, np.where(t <= a * lam, quad, 0.5 * (a + 1.0) * lam * lam))
    return float(out) if out.ndim == 0 else out


def adaptive_glasso_lla(
    cov: np.ndarray,
    lam: float,
    a: float = 3.7,
    init: PrecisionEstimate | np.ndarray | None = None,
    n_lla_steps: int = 2,
    tol: float = 1e-6,
    max_sweeps: int = 500,
) -> PrecisionEstimate:
    """SCAD-penalized precision estimate via local linear approximation.

    Each step solves a weighted graphical lasso whose entrywise weights
    are the SCAD derivative at the previous iterate's magnitudes. init
    defaults to the plain graphical lasso at the same lambda.
    """
    if n_lla_steps < 1:
        raise ValueError("need at least one LLA step")
    cov = _check_square_symmetric(cov, "covariance input")
    if init is None:
        init = glasso(cov, lam, tol=tol, max_sweeps=max_sweeps)
    omega = init.omega if isinstance(init, PrecisionEstimate) else np.asarray(init, float)
    warm = init.info.get("state") if isinstance(init, PrecisionEstimate) else None

    est = None
    for _ in range(n_lla_steps):
        pen = scad_derivative(np.abs(omega), lam, a)
        np.fill_diagonal(pen, 0.0)
        step = glasso_weighted(cov, pen, tol=tol, max_sweeps=max_sweeps, warm=warm)
        if step.info.get("diverged"):
            # the weighted problem is unbounded (zero weights + singular
            # input); keep the previous iterate and flag non-convergence
            if est is None:
                est = PrecisionEstimate(
                    omega=omega.copy(),
                    lam=float(lam),
                    method="scad_lla",
                    kkt_residual=(
                        init.kkt_residual if isinstance(init, PrecisionEstimate) else None
                    ),
                    converged=False,
                    info={"diverged_step": True},
                )
            else:
                est.converged = False
                est.info["diverged_step"] = True
            break
        est = step
        omega = est.omega
        warm = est.info.get("state")
    est.method = "scad_lla"
    est.lam = float(lam)
    return est


def oracle_precision(cov: np.ndarray, support, tol: float = 1e-6) -> PrecisionEstimate:
    """Constrained MLE with off-diagonal support restricted to the given edges."""
    cov = _check_square_symmetric(cov, "covariance input")
    d = cov.shape[0]
    pen = np.full((d, d), _OFF_SUPPORT_WEIGHT)
    for i, j in support:
        pen[i, j] = pen[j, i] = 0.0
    np.fill_diagonal(pen, 0.0)
    est = glasso_weighted(cov, pen, tol=tol)
    if est.info.get("diverged"):
        raise ArithmeticError(
            "support-constrained MLE is unbounded; the input is too close to singular"
        )
    est.method = "oracle"
    est.lam = 0.0
    off_support = pen >= _OFF_SUPPORT_WEIGHT
    max_leak = float(np.max(np.abs(est.omega[off_support]))) if off_support.any() else 0.0
    if max_leak > 1e-8:
        raise ArithmeticError(f"oracle solve leaked {max_leak:.2e} outside the support")
    return est


def _clime_column(r: np.ndarray, j: int, lam: float):
    """min ||w||_1 s.t. ||r w - e_j||_inf <= lam, as an LP in (w+, w-)."""
    d = r.shape[0]
    ej = np.zeros(d)
    ej[j] = 1.0
    c = np.ones(2 * d)
    block = np.hstack([r, -r])
    a_ub = np.vstack([block, -block])
    b_ub = np.concatenate([lam + ej, lam - ej])
    res = linprog(c, A_ub=a_ub, b_ub=b_ub, bounds=(0, None), method="highs")
    if not res.success:
        return None
    x = res.x
    return x[:d] - x[d:]


def _clime_min_feasible_lambda(r: np.ndarray, j: int) -> float:
    """Chebyshev LP: smallest lam for which column j is feasible."""
    d = r.shape[0]
    ej = np.zeros(d)
    ej[j] = 1.0
    # variables (w+, w-, s); minimize s with |r(w+ - w-) - e_j| <= s
    c = np.concatenate([np.zeros(2 * d), [1.0]])
    block = np.hstack([r, -r, -np.ones((d, 1))])
    a_ub = np.vstack([block, -np.hstack([r, -r, np.ones((d, 1))])])
    b_ub = np.concatenate([ej, -ej])
    res = linprog(c, A_ub=a_ub, b_ub=b_ub, bounds=(0, None), method="highs")
    return float(res.fun) if res.success else float("inf")


def clime(r: np.ndarray, lam: float) -> PrecisionEstimate:
    """CLIME estimate: columnwise l1 minimization + min-magnitude symmetrization."""
    if lam < 0:
        raise ValueError("lambda must be nonnegative")
    r = _check_square_symmetric(r, "correlation input")
    d = r.shape[0]
    raw = np.empty((d, d))
    for j in range(d):
        col = _clime_column(r, j, lam)
        if col is None:
            min_lam = _clime_min_feasible_lambda(r, j)
            raise ValueError(
                f"CLIME column {j} infeasible at lambda={lam:.6g}; "
                f"smallest feasible lambda is {min_lam:.6g}"
            )
        raw[:, j] = col
    # keep, for each (i, j), whichever of the two column solutions is smaller
    smaller = np.where(np.abs(raw) <= np.abs(raw.T), raw, raw.T)
    omega = 0.5 * (smaller + smaller.T)  # exact symmetry; values already agree
    feas = float(np.max(np.abs(r @ raw - np.eye(d))))
    return PrecisionEstimate(
        omega=omega,
        lam=float(lam),
        method="clime",
        kkt_residual=None,
        converged=True,
        info={"feasibility": feas, "raw": raw},
    )


def clime_threshold(est: PrecisionEstimate, tau_thresh: float) -> PrecisionEstimate:
    """Zero the off-diagonal entries below tau_thresh in magnitude."""
    if tau_thresh < 0:
        raise ValueError("threshold must be nonnegative")
    omega = est.omega.copy()
    off = ~np.eye(omega.shape[0], dtype=bool)
    omega[off & (np.abs(omega) < tau_thresh)] = 0.0
    return PrecisionEstimate(
        omega=omega,
        lam=est.lam,
        method=est.method,
        kkt_residual=est.kkt_residual,
        converged=est.converged,
        info={**est.info, "threshold": tau_thresh},
    )


def _glasso_lambda_max(cov: np.ndarray) -> float:
    off = cov.copy()
    np.fill_diagonal(off, 0.0)
    return float(np.max(np.abs(off)))


def _is_empty_graph(omega: np.ndarray, tol: float = 1e-8) -> bool:
    off = omega.copy()
    np.fill_diagonal(off, 0.0)
    return bool(np.max(np.abs(off)) <= tol)


def _clime_lambda_max(r: np.ndarray) -> float:
    d = r.shape[0]
    off = np.abs(r / np.diag(r)[None, :])
    np.fill_diagonal(off, 0.0)
    lam = float(np.max(off))
    for _ in range(40):
        if _is_empty_graph(clime(r, lam).omega):
            return lam
        lam *= 1.25
    raise ArithmeticError("could not locate an empty-graph lambda for CLIME")


def lambda_path(
    mat: np.ndarray,
    n_lambdas: int,
    method: str = "glasso",
    span: float = 100.0,
    **solver_kwargs,
) -> list[PrecisionEstimate]:
    """Estimates along a decreasing log-spaced lambda grid.

    The grid runs from the smallest empty-graph lambda down to that value
    divided by span. Glasso solves are warm-started along the path.
    """
    if n_lambdas < 2:
        raise ValueError("need at least 2 path points")
    mat = _check_square_symmetric(mat)
    if method == "glasso":
        lam_max = _glasso_lambda_max(mat)
    elif method == "clime":
        lam_max = _clime_lambda_max(mat)
    else:
        raise ValueError(f"unknown path method {method!r}")
    if lam_max <= 0:
        raise ValueError("input is diagonal; the lambda path is degenerate")
    lambdas = np.geomspace(lam_max, lam_max / span, n_lambdas)

    estimates = []
    warm = None
    for lam in lambdas:
        if method == "glasso":
            est = glasso(mat, float(lam), warm=warm, **solver_kwargs)
            warm = est.info.get("state")
        else:
            est = clime(mat, float(lam))
        estimates.append(est)
    return estimates
