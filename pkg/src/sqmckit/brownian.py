"""Uniforms to Brownian increments on a delta = 1/M grid.

Two constructions of the same law: the forward walk (independent
N(0, delta) increments) and the bridge, which draws the terminal point
first and then fills midpoints coarse-to-fine so that the leading
uniforms carry most of the path's variance.  For M not a power of two
the fill order always bisects the largest unfilled gap, leftmost gap on
ties, taking the ceiling midpoint.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import ndtri

U_CLAMP = 1e-15


@dataclass(frozen=True)
class PathSpec:
    steps: int
    construction: str = "forward"

    def __post_init__(self):
        if self.steps < 1:
            raise ValueError("steps must be >= 1")
        if self.construction not in ("forward", "bridge"):
            raise ValueError("construction must be 'forward' or 'bridge'")

    @property
    def delta(self):
        return 1.0 / self.steps


def _gauss_inv(v):
    return ndtri(np.clip(v, U_CLAMP, 1.0 - U_CLAMP))


def increments_forward(v):
    """Per-step increments sqrt(delta) * Phi^{-1}(v_m), m = 1..M.

    ``v`` has shape (..., M); the last axis indexes the grid steps.
    """
    v = np.asarray(v, dtype=np.float64)
    m = v.shape[-1]
    return np.sqrt(1.0 / m) * _gauss_inv(v)


@lru_cache(maxsize=None)
def bridge_fill_order(m):
    """Grid indices in fill order: terminal M first, then gap bisections."""
    order = [m]
    filled = [0, m]
    while len(order) < m:
        gaps = [(filled[i + 1] - filled[i], filled[i], filled[i + 1])
                for i in range(len(filled) - 1)]
        length, lo, hi = max(gaps, key=lambda g: (g[0], -g[1]))
        if length < 2:
            break
        mid = lo + (length + 1) // 2
        order.append(mid)
        filled = sorted(filled + [mid])
    return tuple(order)


@lru_cache(maxsize=None)
def _bridge_plan(m):
    """For each fill after the terminal: (index, left anchor, right anchor)."""
    order = bridge_fill_order(m)
    plan = []
    filled = {0, m}
    for idx in order[1:]:
        lo = max(f for f in filled if f < idx)
        hi = min(f for f in filled if f > idx)
        plan.append((idx, lo, hi))
        filled.add(idx)
    return tuple(plan)


def increments_bridge(v):
    """Brownian-bridge construction of the same per-step increments.

    The first uniform drives the terminal value W_1 ~ N(0, 1); uniform
    k+1 fills the k-th midpoint of the plan with the conditional law
    N(((hi-i) W_lo + (i-lo) W_hi) / (hi-lo), delta (hi-i)(i-lo)/(hi-lo)).
    """
    v = np.asarray(v, dtype=np.float64)
    m = v.shape[-1]
    delta = 1.0 / m
    z = _gauss_inv(v)
    # path values W at grid indices 0..M relative to the interval start
    path = np.zeros(v.shape[:-1] + (m + 1,), dtype=np.float64)
    path[..., m] = z[..., 0]
    for k, (idx, lo, hi) in enumerate(_bridge_plan(m)):
        span = hi - lo
        mean = ((hi - idx) * path[..., lo] + (idx - lo) * path[..., hi]) / span
        var = delta * (hi - idx) * (idx - lo) / span
        path[..., idx] = mean + np.sqrt(var) * z[..., k + 1]
    return np.diff(path, axis=-1)


def increments(v, spec):
    if spec.construction == "bridge":
        return increments_bridge(v)
    return increments_forward(v)
