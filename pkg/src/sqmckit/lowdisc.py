"""Sobol and Van der Corput low-discrepancy point sets with nested scrambling.

Points are generated in Gray-code order from a bundled Joe-Kuo D(6)
direction-number table (1024 dimensions).  Scrambling is Owen-style nested
uniform scrambling where each node of the binary digit tree draws its swap
bit from a keyed 64-bit mix of (seed, dimension, node id), which gives
O(1) memory per point and bit-identical streams for equal seeds.
"""

from __future__ import annotations

import importlib.resources
from dataclasses import dataclass, field

import numpy as np

DEFAULT_TABLE = "joe_kuo_d6_1024.txt"
_TABLE_CACHE: dict[str, np.ndarray] = {}

_MIX_1 = np.uint64(0x9E3779B97F4A7C15)
_MIX_2 = np.uint64(0xBF58476D1CE4E5B9)
_MIX_3 = np.uint64(0x94D049BB133111EB)


class CapacityError(ValueError):
    """Requested dimension exceeds the direction-number table."""


def _load_table(name=DEFAULT_TABLE):
    """Parse the bundled direction-number file into per-dimension rows.

    Returns a list indexed by dimension-1 (entry 0 is dimension 2) of
    (degree, polynomial code, initial direction integers).
    """
    if name in _TABLE_CACHE:
        return _TABLE_CACHE[name]
    text = importlib.resources.files("sqmckit.data").joinpath(name).read_text()
    rows = []
    for line in text.splitlines()[1:]:
        parts = line.split()
        if not parts:
            continue
        s, a = int(parts[1]), int(parts[2])
        m = np.array([int(x) for x in parts[3:]], dtype=np.uint64)
        if len(m) != s:
            raise ValueError(f"malformed table line: {line!r}")
        rows.append((s, a, m))
    _TABLE_CACHE[name] = rows
    return rows


def _direction_matrix(dim, bits, table):
    """Direction integers V[j, k] = m_k 2^(bits-k) for dimensions 1..dim."""
    v = np.zeros((dim, bits), dtype=np.uint64)
    v[0] = np.uint64(1) << np.arange(bits - 1, -1, -1, dtype=np.uint64)
    for j in range(1, dim):
        s, a, m = table[j - 1]
        if not np.all((m % 2 == 1) & (m < (np.uint64(1) << np.arange(1, s + 1, dtype=np.uint64)))):
            raise ValueError(f"invalid initial direction integers for dimension {j + 1}")
        vj = v[j]
        for k in range(min(s, bits)):
            vj[k] = m[k] << np.uint64(bits - 1 - k)
        for k in range(s, bits):
            w = vj[k - s] ^ (vj[k - s] >> np.uint64(s))
            for i in range(1, s):
                if (a >> (s - 1 - i)) & 1:
                    w ^= vj[k - i]
            vj[k] = w
    return v


@dataclass
class SobolSpec:
    """Sobol generator setup: dimension, output digit count, direction table.

    Every direction integer m_k must be odd and < 2^k (set diagonal bit k of
    the generator matrix), which is checked when the matrix is built.
    """

    dimension: int
    bits: int = 32
    table_name: str = DEFAULT_TABLE
    _v: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if self.dimension < 1:
            raise ValueError("dimension must be >= 1")
        if not (1 <= self.bits <= 62):
            raise ValueError("bits must be in 1..62")
        table = _load_table(self.table_name)
        if self.dimension > len(table) + 1:
            raise CapacityError(
                f"dimension {self.dimension} exceeds table capacity {len(table) + 1}"
            )
        self._v = _direction_matrix(self.dimension, self.bits, table)


def _mix64(z):
    """SplitMix64 finalizer, vectorized over uint64 arrays (wrapping mod 2^64)."""
    with np.errstate(over="ignore"):
        z = (z + _MIX_1).astype(np.uint64)
        z = ((z ^ (z >> np.uint64(30))) * _MIX_2).astype(np.uint64)
        z = ((z ^ (z >> np.uint64(27))) * _MIX_3).astype(np.uint64)
    return z ^ (z >> np.uint64(31))


@dataclass(frozen=True)
class ScrambleState:
    """Keyed scrambling randomness; equal seeds give bit-identical streams."""

    seed: int

    def dim_keys(self, dim):
        base = np.uint64(self.seed & 0xFFFFFFFFFFFFFFFF)
        return _mix64(base ^ _mix64(np.arange(1, dim + 1, dtype=np.uint64)))


def _owen_scramble_ints(x, dim_keys, bits):
    """Nested-scramble integer digits: flip bit i by a hash of its tree node.

    The node at depth i is identified by the i-1 leading digits prefixed
    with a 1 bit, so nodes are unique across depths; xoring the
    per-dimension key separates the trees of different coordinates.
    ``x`` is (n, dim), ``dim_keys`` is (dim,).
    """
    out = np.zeros_like(x)
    one = np.uint64(1)
    keys = dim_keys[None, :]
    for i in range(1, bits + 1):
        shift = np.uint64(bits - i)
        node = (x >> (shift + one)) | (one << np.uint64(i - 1))
        flip = _mix64(node ^ keys) & one
        out |= (((x >> shift) & one) ^ flip) << shift
    return out


def sobol_ints(spec, scramble, n, skip=0):
    """Integer-valued Sobol points: (n, dimension) uint64 values < 2^bits."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if skip < 0 or skip + n > (1 << spec.bits):
        raise ValueError("skip + n out of generator range")
    idx = np.arange(skip, skip + n, dtype=np.uint64)
    gray = idx ^ (idx >> np.uint64(1))
    x = np.zeros((n, spec.dimension), dtype=np.uint64)
    for k in range(spec.bits):
        on = (gray >> np.uint64(k)) & np.uint64(1)
        if not on.any():
            continue
        x[on.astype(bool)] ^= spec._v[:, k]
    if scramble is not None:
        x = _owen_scramble_ints(x, scramble.dim_keys(spec.dimension), spec.bits)
    return x


def sobol_block(spec, scramble, n, skip=0):
    """A block of Sobol points in [0, 1)^dimension.

    Deterministic given (spec, scramble, skip).  With ``scramble=None`` the
    raw digital net is returned; its first coordinate runs through the
    base-2 radical-inverse values in Gray-code order.

    Parameters
    ----------
    spec : SobolSpec
    scramble : ScrambleState or None
    n : int
        Number of points.
    skip : int
        Index of the first point (0 is the origin of the net).

    Returns
    -------
    (n, dimension) float64 array.
    """
    x = sobol_ints(spec, scramble, n, skip)
    return x.astype(np.float64) * (2.0 ** -spec.bits)


def van_der_corput(n):
    """Base-2 radical inverse of integer index n >= 1 (scalar or array)."""
    n = np.asarray(n, dtype=np.uint64)
    if np.any(n < 1):
        raise ValueError("index must be >= 1")
    out = np.zeros(n.shape, dtype=np.float64)
    base = 0.5
    k = n.copy()
    while np.any(k > 0):
        out += (k & np.uint64(1)).astype(np.float64) * base
        k >>= np.uint64(1)
        base *= 0.5
    return out if out.shape else float(out)
