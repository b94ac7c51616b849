"""Inverse-transform resampling in O(N) from sorted uniforms.

The core kernel walks the weight cumsum once for all N sorted uniforms,
so the total number of pointer advances is at most N.  Ancestor labels
are 0-based indices into the weight vector.
"""

from __future__ import annotations

import numpy as np
from numba import njit


def _check_weights(w):
    w = np.asarray(w, dtype=np.float64)
    if w.ndim != 1 or w.size == 0:
        raise ValueError("weights must be a nonempty 1-d array")
    if np.any(w < 0) or not np.all(np.isfinite(w)):
        raise ValueError("weights must be finite and nonnegative")
    s = w.sum()
    if s <= 0:
        raise ValueError("all weights are zero")
    if abs(s - 1.0) > 1e-9:
        raise ValueError(f"weights must be normalized (sum = {s})")
    return w


@njit(cache=True)
def _inverse_cdf_kernel(u, w):
    n = u.shape[0]
    nw = w.shape[0]
    labels = np.empty(n, dtype=np.int64)
    s = w[0]
    m = 0
    advances = 0
    for i in range(n):
        while s <= u[i] and m < nw - 1:
            m += 1
            s += w[m]
            advances += 1
        labels[i] = m
    return labels, advances


def inverse_cdf_ancestors(u_sorted, w, return_advances=False):
    """Ancestor labels a_i = min{m : sum(w[:m+1]) > u_i} for sorted u.

    Parameters
    ----------
    u_sorted : (n,) nondecreasing floats in [0, 1]; a value of exactly 1
        is nudged just below 1.
    w : (N,) normalized weights.
    return_advances : also return the number of cumsum advances (<= N).

    Returns
    -------
    (n,) int64 labels into ``w``, nondecreasing.
    """
    u = np.asarray(u_sorted, dtype=np.float64)
    if u.ndim != 1:
        raise ValueError("u must be 1-d")
    if np.any(np.diff(u) < 0):
        raise ValueError("u must be sorted nondecreasing")
    if np.any((u < 0) | (u > 1)):
        raise ValueError("u must lie in [0, 1]")
    w = _check_weights(w)
    u = np.minimum(u, np.nextafter(1.0, 0.0))
    labels, advances = _inverse_cdf_kernel(u, w)
    if return_advances:
        return labels, advances
    return labels


def multinomial_ancestors(w, n_draws, rng):
    """IID multinomial ancestor draw: label m with probability w[m].

    Implemented as the inverse-CDF walk over sorted IID uniforms, which
    is how a standard particle filter resamples.
    """
    if n_draws < 1:
        raise ValueError("n_draws must be >= 1")
    if not isinstance(rng, np.random.Generator):
        rng = np.random.default_rng(rng)
    u = np.sort(rng.random(n_draws))
    return inverse_cdf_ancestors(u, w)


def sorted_ancestors_by_state(u_sorted, w, order):
    """Ancestors drawn through the empirical CDF of state-ordered particles.

    ``order`` is the permutation sorting the particles (e.g. a Hilbert
    sort); the inverse-CDF walk runs over the permuted weights and labels
    are mapped back to the original particle indexing.
    """
    order = np.asarray(order)
    w = np.asarray(w, dtype=np.float64)
    if order.shape != w.shape:
        raise ValueError("order and w must have the same length")
    raw = inverse_cdf_ancestors(u_sorted, w[order])
    return order[raw]
