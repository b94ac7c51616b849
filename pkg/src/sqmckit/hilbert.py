"""Hilbert space-filling curve keys, their inverse, and particle ordering.

The encoder follows Skilling's transpose construction, vectorized over a
batch of points: coordinates are quantized to m bits per axis, converted
to the transposed Hilbert form, and interleaved into a single unsigned
key of d*m bits.  d*m must fit in 64 bits.  For d = 1 the curve is the
identity and sorting reduces to a plain stable argsort of the states.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import expit

PSI_CLAMP = 2.0 ** -30


@dataclass(frozen=True)
class HilbertConfig:
    dimension: int
    bits_per_axis: int

    def __post_init__(self):
        if self.dimension < 1 or self.bits_per_axis < 1:
            raise ValueError("dimension and bits_per_axis must be positive")
        if self.dimension * self.bits_per_axis > 64:
            raise ValueError("d * m must be <= 64")

    @classmethod
    def default_for(cls, dimension):
        return cls(dimension, max(1, 62 // dimension))


@dataclass(frozen=True)
class PsiTransform:
    """Componentwise affine-logistic squash of R^d into (0, 1)^d."""

    location: np.ndarray
    scale: np.ndarray

    def __post_init__(self):
        if np.any(np.asarray(self.scale) <= 0):
            raise ValueError("scale must be positive")

    @classmethod
    def from_cloud(cls, states, eps=1e-9):
        """Adaptive transform: center at the cloud mean, scale by 2 std."""
        x = np.atleast_2d(states)
        return cls(location=x.mean(axis=0), scale=2.0 * (x.std(axis=0) + eps))


def psi_apply(x, transform):
    """Map states to (0, 1)^d by logistic((x - location) / scale), clamped."""
    x = np.asarray(x, dtype=np.float64)
    if not np.all(np.isfinite(x)):
        raise ValueError("non-finite state passed to psi_apply")
    z = (x - transform.location) / transform.scale
    return np.clip(expit(z), PSI_CLAMP, 1.0 - PSI_CLAMP)


def _axes_to_key(axes, cfg):
    """Skilling transform, coordinates -> interleaved Hilbert integer."""
    d, m = cfg.dimension, cfg.bits_per_axis
    x = [axes[:, i].astype(np.uint64) for i in range(d)]
    q = np.uint64(1) << np.uint64(m - 1)
    one = np.uint64(1)
    while q > one:
        p = q - one
        for i in range(d):
            has = (x[i] & q) != 0
            t = np.where(has, 0, (x[0] ^ x[i]) & p).astype(np.uint64)
            x0_new = np.where(has, x[0] ^ p, x[0] ^ t).astype(np.uint64)
            x[i] = x[i] ^ t
            x[0] = x0_new
        q >>= one
    for i in range(1, d):
        x[i] = x[i] ^ x[i - 1]
    t = np.zeros_like(x[0])
    q = np.uint64(1) << np.uint64(m - 1)
    while q > one:
        t = np.where((x[d - 1] & q) != 0, t ^ (q - one), t).astype(np.uint64)
        q >>= one
    for i in range(d):
        x[i] = x[i] ^ t
    key = np.zeros_like(x[0])
    for j in range(m - 1, -1, -1):
        for i in range(d):
            key = (key << one) | ((x[i] >> np.uint64(j)) & one)
    return key


def _key_to_axes(keys, cfg):
    """Inverse Skilling transform, Hilbert integer -> coordinates."""
    d, m = cfg.dimension, cfg.bits_per_axis
    keys = np.asarray(keys, dtype=np.uint64)
    one = np.uint64(1)
    x = [np.zeros_like(keys) for _ in range(d)]
    pos = d * m
    for j in range(m - 1, -1, -1):
        for i in range(d):
            pos -= 1
            x[i] = (x[i] << one) | ((keys >> np.uint64(pos)) & one)
    t = x[d - 1] >> one
    for i in range(d - 1, 0, -1):
        x[i] = x[i] ^ x[i - 1]
    x[0] = x[0] ^ t
    q = np.uint64(2)
    top = np.uint64(1) << np.uint64(m)
    while q != top:
        p = q - one
        for i in range(d - 1, -1, -1):
            has = (x[i] & q) != 0
            t = np.where(has, 0, (x[0] ^ x[i]) & p).astype(np.uint64)
            x0_new = np.where(has, x[0] ^ p, x[0] ^ t).astype(np.uint64)
            x[i] = x[i] ^ t
            x[0] = x0_new
        q <<= one
    return np.stack(x, axis=1)


def hilbert_key(points, cfg):
    """Hilbert index of the grid cell containing each point of [0, 1)^d.

    Parameters
    ----------
    points : (n, d) array of floats in [0, 1); values are clamped into
        the unit cube before quantization.
    cfg : HilbertConfig

    Returns
    -------
    (n,) uint64 keys in [0, 2^(d m)).
    """
    pts = np.atleast_2d(np.asarray(points, dtype=np.float64))
    if pts.shape[1] != cfg.dimension:
        raise ValueError("points do not match cfg.dimension")
    side = 2.0 ** cfg.bits_per_axis
    cells = np.clip(np.floor(pts * side), 0, side - 1).astype(np.uint64)
    if cfg.dimension == 1:
        return cells[:, 0]
    return _axes_to_key(cells, cfg)


def hilbert_point(keys, cfg):
    """Center of the grid cell with the given Hilbert index.

    Inverse of `hilbert_key` in the sense that
    ``hilbert_key(hilbert_point(k)) == k`` for all k < 2^(d m).
    """
    keys = np.atleast_1d(np.asarray(keys, dtype=np.uint64))
    n_cells = 1 << (cfg.dimension * cfg.bits_per_axis)
    if np.any(keys >= n_cells):
        raise ValueError("key out of range")
    side = 2.0 ** cfg.bits_per_axis
    if cfg.dimension == 1:
        return (keys[:, None].astype(np.float64) + 0.5) / side
    axes = _key_to_axes(keys, cfg)
    return (axes.astype(np.float64) + 0.5) / side


def hilbert_sort_permutation(states, psi=None, cfg=None):
    """Permutation ordering particles along the Hilbert curve.

    For 1-dimensional states this is a plain stable argsort of the raw
    values.  Otherwise states are squashed by ``psi`` (adaptive transform
    of the cloud when not given) and ordered by Hilbert key; ties keep
    the original index order.
    """
    x = np.asarray(states, dtype=np.float64)
    if x.ndim == 1:
        x = x[:, None]
    if x.shape[1] == 1:
        return np.argsort(x[:, 0], kind="stable")
    if psi is None:
        psi = PsiTransform.from_cloud(x)
    if cfg is None:
        cfg = HilbertConfig.default_for(x.shape[1])
    keys = hilbert_key(psi_apply(x, psi), cfg)
    return np.argsort(keys, kind="stable")
