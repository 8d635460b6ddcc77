"""Rank-based latent correlation estimation for binary/continuous data.

Pairwise Kendall's tau statistics, cutoff estimation, bridge functions
linking latent correlations to population tau values, and assembly of the
full latent correlation matrix with pair-type dispatch.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq
from scipy.special import ndtr, ndtri

from ._kernels import count_inversions
from .normal import bivariate_normal_cdf

BINARY = "binary"
CONTINUOUS = "continuous"

# Off-diagonal estimates are clamped inside [-1 + CORRELATION_MARGIN, 1 - CORRELATION_MARGIN]
# so downstream solvers never see a singular correlation.
CORRELATION_MARGIN = 0.01

# Cutoff estimates are clamped to +-CUTOFF_CLAMP (twice the assumed bound on
# the true cutoffs, default bound 4).
CUTOFF_CLAMP = 8.0

_ROOT_FTOL = 1e-9
_SQRT2 = np.sqrt(2.0)


@dataclass
class MixedDataset:
    """n x d observation table with per-column type tags.

    Binary columns must contain only 0/1; no missing values allowed.
    """

    values: np.ndarray
    column_types: list[str] = field(default_factory=list)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.ndim != 2:
            raise ValueError("values must be a 2-D array")
        n, d = self.values.shape
        if n < 2:
            raise ValueError(f"need at least 2 observations, got {n}")
        if len(self.column_types) != d:
            raise ValueError(
                f"column_types has {len(self.column_types)} entries for {d} columns"
            )
        bad = set(self.column_types) - {BINARY, CONTINUOUS}
        if bad:
            raise ValueError(f"unknown column types: {sorted(bad)}")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("values contain non-finite entries")
        for j, kind in enumerate(self.column_types):
            if kind == BINARY:
                col = self.values[:, j]
                if not np.all((col == 0.0) | (col == 1.0)):
                    raise ValueError(f"binary column {j} contains values outside {{0, 1}}")

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def d(self) -> int:
        return self.values.shape[1]

    @property
    def binary_mask(self) -> np.ndarray:
        return np.array([k == BINARY for k in self.column_types])


def _check_pair(x, y):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.ndim != 1 or y.ndim != 1:
        raise ValueError("inputs must be 1-D vectors")
    if x.size != y.size:
        raise ValueError(f"length mismatch: {x.size} vs {y.size}")
    if x.size < 2:
        raise ValueError("need at least 2 observations")
    return x, y


def kendall_tau_binary(x, y) -> float:
    """Kendall's tau for two 0/1 vectors via the 2x2 contingency counts."""
    x, y = _check_pair(x, y)
    n = x.size
    n11 = float(x @ y)
    n10 = float(x.sum()) - n11
    n01 = float(y.sum()) - n11
    n00 = n - n11 - n10 - n01
    return 2.0 * (n11 * n00 - n10 * n01) / (n * (n - 1))


def _tied_pair_count(sorted_values) -> int:
    # sum over runs of equal values of c*(c-1)/2
    _, counts = np.unique(sorted_values, return_counts=True)
    return int((counts * (counts - 1) // 2).sum())


def kendall_tau_continuous(x, y) -> float:
    """Kendall's tau with the raw sign kernel (sign(0) = 0, no tie correction).

    O(n log n): sort by (x, y), then count inversions of y by merge sort.
    Agrees exactly with brute-force pair enumeration.
    """
    x, y = _check_pair(x, y)
    n = x.size
    order = np.lexsort((y, x))
    xs, ys = x[order], y[order]
    n0 = n * (n - 1) // 2
    ties_x = _tied_pair_count(xs)
    ties_y = _tied_pair_count(np.sort(y))
    # joint ties: runs of equal (x, y) rows in lexicographic order
    same = (np.diff(xs) == 0) & (np.diff(ys) == 0)
    run_breaks = np.flatnonzero(~same)
    run_lengths = np.diff(np.concatenate(([-1], run_breaks, [n - 1])))
    ties_xy = int((run_lengths * (run_lengths - 1) // 2).sum())
    discordant = count_inversions(ys)
    concordant_minus_discordant = n0 - ties_x - ties_y + ties_xy - 2 * discordant
    return 2.0 * concordant_minus_discordant / (n * (n - 1))


def _sign_rank_differences(y: np.ndarray) -> np.ndarray:
    """For each i, #(y_k < y_i) - #(y_k > y_i), computed in O(n log n)."""
    ys = np.sort(y)
    less = np.searchsorted(ys, y, side="left")
    greater = y.size - np.searchsorted(ys, y, side="right")
    return (less - greater).astype(float)


def kendall_tau_mixed(x_binary, y_continuous) -> float:
    """Kendall's tau with kernel (x_i - x_i') * sign(y_i - y_i').

    Uses the identity sum_{i<i'} (x_i - x_i') sign(y_i - y_i')
    = sum_i x_i (#(y < y_i) - #(y > y_i)).
    """
    x, y = _check_pair(x_binary, y_continuous)
    n = x.size
    return 2.0 * float(x @ _sign_rank_differences(y)) / (n * (n - 1))


def estimate_cutoff(x, clamp: float = CUTOFF_CLAMP) -> float:
    """Latent cutoff estimate from a binary column's mean.

    The mean is Winsorized into [1/(2n), 1 - 1/(2n)] first, so constant
    columns still yield a finite (clamped) cutoff.
    """
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or x.size < 1:
        raise ValueError("input must be a nonempty 1-D vector")
    n = x.size
    mean = float(np.clip(x.mean(), 1.0 / (2 * n), 1.0 - 1.0 / (2 * n)))
    return float(np.clip(ndtri(1.0 - mean), -clamp, clamp))


def _check_correlation(t: float):
    if not np.isfinite(t) or abs(t) >= 1.0:
        raise ValueError(f"latent correlation must satisfy |t| < 1, got {t!r}")


def bridge_binary(t: float, cut_j: float, cut_k: float) -> float:
    """Population Kendall's tau of a binary/binary pair with latent correlation t."""
    _check_correlation(t)
    return 2.0 * (
        bivariate_normal_cdf(cut_j, cut_k, t) - float(ndtr(cut_j)) * float(ndtr(cut_k))
    )


def bridge_mixed(t: float, cut: float) -> float:
    """Population Kendall's tau of a binary/continuous pair with latent correlation t."""
    _check_correlation(t)
    return 4.0 * bivariate_normal_cdf(cut, 0.0, t / _SQRT2) - 2.0 * float(ndtr(cut))


def continuous_pair_correlation(tau: float) -> float:
    """Latent correlation of a continuous/continuous pair: sin(pi tau / 2)."""
    if not np.isfinite(tau) or abs(tau) > 1.0:
        raise ValueError(f"tau must lie in [-1, 1], got {tau!r}")
    return float(np.sin(0.5 * np.pi * tau))


def _invert_monotone_bridge(bridge, tau: float, boundary: float) -> float:
    """Root of bridge(t) = tau on [-boundary, boundary], clamped at the ends.

    The bridge functions are strictly increasing in t, so a bracketed
    safeguarded solve (Brent) applies; tau values outside the attainable
    range map to the corresponding endpoint.
    """
    lo, hi = -boundary, boundary
    f_lo = bridge(lo) - tau
    if f_lo >= 0.0:
        return lo
    f_hi = bridge(hi) - tau
    if f_hi <= 0.0:
        return hi
    root = brentq(lambda t: bridge(t) - tau, lo, hi, xtol=1e-13, rtol=8.9e-16, maxiter=200)
    if abs(bridge(root) - tau) > _ROOT_FTOL:
        raise ArithmeticError("bridge inversion failed to reach function tolerance")
    return float(root)


def bridge_binary_inverse(
    tau: float, cut_j: float, cut_k: float, boundary: float = 1.0 - CORRELATION_MARGIN
) -> float:
    """Latent correlation solving bridge_binary(t; cut_j, cut_k) = tau."""
    return _invert_monotone_bridge(lambda t: bridge_binary(t, cut_j, cut_k), tau, boundary)


def bridge_mixed_inverse(
    tau: float, cut: float, boundary: float = 1.0 - CORRELATION_MARGIN
) -> float:
    """Latent correlation solving bridge_mixed(t; cut) = tau."""
    return _invert_monotone_bridge(lambda t: bridge_mixed(t, cut), tau, boundary)


def _binary_tau_matrix(xb: np.ndarray) -> np.ndarray:
    """All-pairs binary Kendall's tau via matrix contingency counts."""
    n = xb.shape[0]
    n11 = xb.T @ xb
    ones = xb.sum(axis=0)
    n10 = ones[:, None] - n11
    n01 = ones[None, :] - n11
    n00 = n - n11 - n10 - n01
    return 2.0 * (n11 * n00 - n10 * n01) / (n * (n - 1))


def kendall_tau_matrix(data: MixedDataset) -> np.ndarray:
    """All-pairs Kendall's tau with the pair-type kernels (diagonal zero)."""
    n, d = data.n, data.d
    tau = np.zeros((d, d))
    mask = data.binary_mask
    bin_idx = np.flatnonzero(mask)
    con_idx = np.flatnonzero(~mask)

    if bin_idx.size:
        xb = data.values[:, bin_idx]
        tau[np.ix_(bin_idx, bin_idx)] = _binary_tau_matrix(xb)

    sign_diffs = {j: _sign_rank_differences(data.values[:, j]) for j in con_idx}
    scale = 2.0 / (n * (n - 1))
    for a, j in enumerate(con_idx):
        for k in con_idx[a + 1 :]:
            t = kendall_tau_continuous(data.values[:, j], data.values[:, k])
            tau[j, k] = tau[k, j] = t
        for b in bin_idx:
            t = scale * float(data.values[:, b] @ sign_diffs[j])
            tau[b, j] = tau[j, b] = t
    np.fill_diagonal(tau, 0.0)
    return tau


def estimate_latent_correlation(
    data: MixedDataset,
    margin: float = CORRELATION_MARGIN,
    cutoff_clamp: float = CUTOFF_CLAMP,
) -> np.ndarray:
    """Latent correlation matrix estimate from mixed binary/continuous data.

    Entry (j, k) inverts the bridge matching the pair type: binary/binary
    pairs invert the binary bridge with both estimated cutoffs, mixed
    pairs invert the mixed bridge with the binary column's cutoff, and
    continuous pairs use the sine transform. Off-diagonal entries are
    clamped to [-1 + margin, 1 - margin]; the diagonal is exactly 1.
    """
    if data.n < 2:
        raise ValueError("need at least 2 observations")
    boundary = 1.0 - margin
    mask = data.binary_mask
    cutoffs = np.zeros(data.d)
    for j in np.flatnonzero(mask):
        col = data.values[:, j]
        if col.min() == col.max():
            warnings.warn(
                f"binary column {j} is constant; cutoff Winsorized", RuntimeWarning
            )
        cutoffs[j] = estimate_cutoff(col, clamp=cutoff_clamp)

    tau = kendall_tau_matrix(data)
    d = data.d
    r = np.eye(d)
    for j in range(d):
        for k in range(j + 1, d):
            if mask[j] and mask[k]:
                val = bridge_binary_inverse(tau[j, k], cutoffs[j], cutoffs[k], boundary)
            elif not mask[j] and not mask[k]:
                val = continuous_pair_correlation(tau[j, k])
            elif mask[j]:
                val = bridge_mixed_inverse(tau[j, k], cutoffs[j], boundary)
            else:
                val = bridge_mixed_inverse(tau[j, k], cutoffs[k], boundary)
            val = float(np.clip(val, -boundary, boundary))
            r[j, k] = r[k, j] = val
    return r
