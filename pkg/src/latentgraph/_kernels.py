"""Numba-compiled inner loops (merge-sort inversion count, glasso sweeps)."""

from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True)
def count_inversions(values):
    """Number of pairs i < j with values[i] > values[j] (strict)."""
    n = values.size
    arr = values.copy()
    buf = np.empty(n, dtype=arr.dtype)
    count = 0
    width = 1
    while width < n:
        for lo in range(0, n, 2 * width):
            mid = min(lo + width, n)
            hi = min(lo + 2 * width, n)
            i, j, k = lo, mid, lo
            while i < mid and j < hi:
                if arr[j] < arr[i]:
                    count += mid - i
                    buf[k] = arr[j]
                    j += 1
                else:
                    buf[k] = arr[i]
                    i += 1
                k += 1
            while i < mid:
                buf[k] = arr[i]
                i += 1
                k += 1
            while j < hi:
                buf[k] = arr[j]
                j += 1
                k += 1
            for m in range(lo, hi):
                arr[m] = buf[m]
        width *= 2
    return count


@njit(cache=True)
def _lasso_cd(gram, target, penalties, beta, tol, max_iter):
    """Coordinate descent for 0.5 b'Gb - t'b + sum_k pen_k |b_k|, in place."""
    p = beta.size
    fitted = gram @ beta
    for _ in range(max_iter):
        delta_max = 0.0
        for k in range(p):
            old = beta[k]
            z = target[k] - (fitted[k] - gram[k, k] * old)
            pen = penalties[k]
            if z > pen:
                new = (z - pen) / gram[k, k]
            elif z < -pen:
                new = (z + pen) / gram[k, k]
            else:
                new = 0.0
            diff = new - old
            if diff != 0.0:
                for m in range(p):
                    fitted[m] += gram[m, k] * diff
                beta[k] = new
                if abs(diff) > delta_max:
                    delta_max = abs(diff)
        if delta_max < tol:
            break
    return beta


@njit(cache=True)
def glasso_sweeps(cov, penalties, w, betas, tol, max_sweeps, inner_tol, inner_max):
    """Block coordinate descent over columns of the covariance estimate w.

    cov is the input matrix, penalties the entrywise weight matrix (zero
    diagonal). w and betas carry warm starts and are updated in place.
    Returns (sweeps_used, last_max_change).
    """
    d = cov.shape[0]
    p = d - 1
    w11 = np.empty((p, p))
    s12 = np.empty(p)
    pen12 = np.empty(p)
    beta = np.empty(p)
    sweeps = 0
    max_change = np.inf
    for sweep in range(max_sweeps):
        sweeps = sweep + 1
        max_change = 0.0
        for j in range(d):
            row = 0
            for a in range(d):
                if a == j:
                    continue
                col = 0
                for b in range(d):
                    if b == j:
                        continue
                    w11[row, col] = w[a, b]
                    col += 1
                s12[row] = cov[a, j]
                pen12[row] = penalties[a, j]
                beta[row] = betas[row, j]
                row += 1
            _lasso_cd(w11, s12, pen12, beta, inner_tol, inner_max)
            row = 0
            for a in range(d):
                if a == j:
                    continue
                new_w = 0.0
                for col in range(p):
                    new_w += w11[row, col] * beta[col]
                change = abs(new_w - w[a, j])
                if change > max_change:
                    max_change = change
                w[a, j] = new_w
                w[j, a] = new_w
                betas[row, j] = beta[row]
                row += 1
        if max_change < tol:
            break
        if not np.isfinite(max_change) or max_change > 1e8:
            # unbounded subproblem (possible when zero-weight entries meet a
            # singular input); bail out and let the caller flag divergence
            break
    return sweeps, max_change


@njit(cache=True)
def glasso_recover_precision(w, betas):
    """Rebuild the precision matrix from the dual solution (w, betas)."""
    d = w.shape[0]
    omega = np.empty((d, d))
    for j in range(d):
        dot = 0.0
        row = 0
        for a in range(d):
            if a == j:
                continue
            dot += w[a, j] * betas[row, j]
            row += 1
        theta_jj = 1.0 / (w[j, j] - dot)
        omega[j, j] = theta_jj
        row = 0
        for a in range(d):
            if a == j:
                continue
            omega[a, j] = -betas[row, j] * theta_jj
            row += 1
    # symmetrize (column solves agree only up to solver tolerance)
    for a in range(d):
        for b in range(a + 1, d):
            avg = 0.5 * (omega[a, b] + omega[b, a])
            omega[a, b] = avg
            omega[b, a] = avg
    return omega
