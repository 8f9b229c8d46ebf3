"""Counter-based uniform stream (Philox4x64-10).

Every variate is addressed by its position ``t`` in the draw order, so any
sub-range can be generated independently and in parallel with identical
results.  The draw order for a graph on ``n`` vertices is

    t = 0 .. n-1                      vertex weights W_1 .. W_n
    t = n + pair_index(n, i, j)       U_ij for i < j, lexicographic

Block ``b = t // 4`` is the Philox counter ``(b, 0, 0, 0)``; lane ``t % 4``
selects the output word.  The key is ``(seed, trial)``, which is how
per-trial streams are split off a base seed.  The raw 64-bit words agree
with ``numpy.random.Philox`` (which pre-increments its counter), and are
mapped to ``[0, 1)`` as ``(x >> 11) * 2**-53``.
"""
from dataclasses import dataclass

import numpy as np

from ._accel import njit, prange, use_numba

MASK64 = (1 << 64) - 1

_M0 = np.uint64(0xD2E7470EE14C6C93)
_M1 = np.uint64(0xCA5A826395121157)
_W0 = np.uint64(0x9E3779B97F4A7C15)
_W1 = np.uint64(0xBB67AE8584CAA73B)
_LO32 = np.uint64(0xFFFFFFFF)
_S32 = np.uint64(32)
_S11 = np.uint64(11)
_ZERO = np.uint64(0)
_TWO_M53 = 1.0 / 9007199254740992.0
_ROUNDS = 10


# ---------------------------------------------------------------------------
# numba kernel
# ---------------------------------------------------------------------------

@njit(cache=True, inline="always")
def _mulhilo(a, b):
    al = a & _LO32
    ah = a >> _S32
    bl = b & _LO32
    bh = b >> _S32
    ll = al * bl
    lh = al * bh
    hl = ah * bl
    hh = ah * bh
    mid = (ll >> _S32) + (lh & _LO32) + (hl & _LO32)
    hi = hh + (lh >> _S32) + (hl >> _S32) + (mid >> _S32)
    return hi, a * b


@njit(cache=True)
def _philox_block_nb(block, k0, k1):
    c0 = block
    c1 = _ZERO
    c2 = _ZERO
    c3 = _ZERO
    for r in range(_ROUNDS):
        if r > 0:
            k0 = k0 + _W0
            k1 = k1 + _W1
        hi0, lo0 = _mulhilo(_M0, c0)
        hi1, lo1 = _mulhilo(_M1, c2)
        c0 = hi1 ^ c1 ^ k0
        c1 = lo1
        c2 = hi0 ^ c3 ^ k1
        c3 = lo0
    return c0, c1, c2, c3


@njit(cache=True, parallel=True)
def _raw_nb(start, stop, k0, k1):
    out = np.empty(stop - start, dtype=np.uint64)
    if stop <= start:
        return out
    b_first = start // 4
    b_last = (stop - 1) // 4
    for bi in prange(b_last - b_first + 1):
        b = b_first + bi
        w0, w1, w2, w3 = _philox_block_nb(np.uint64(b), k0, k1)
        base = b * 4
        if base >= start and base < stop:
            out[base - start] = w0
        if base + 1 >= start and base + 1 < stop:
            out[base + 1 - start] = w1
        if base + 2 >= start and base + 2 < stop:
            out[base + 2 - start] = w2
        if base + 3 >= start and base + 3 < stop:
            out[base + 3 - start] = w3
    return out


@njit(cache=True, parallel=True)
def _uniform_nb(start, stop, k0, k1):
    raw = _raw_nb(start, stop, k0, k1)
    out = np.empty(raw.size, dtype=np.float64)
    for i in prange(raw.size):
        out[i] = np.float64(raw[i] >> _S11) * _TWO_M53
    return out


# ---------------------------------------------------------------------------
# numpy fallback
# ---------------------------------------------------------------------------

def _mulhilo_np(a, b):
    al = a & _LO32
    ah = a >> _S32
    bl = b & _LO32
    bh = b >> _S32
    ll = al * bl
    lh = al * bh
    hl = ah * bl
    hh = ah * bh
    mid = (ll >> _S32) + (lh & _LO32) + (hl & _LO32)
    hi = hh + (lh >> _S32) + (hl >> _S32) + (mid >> _S32)
    return hi, a * b


def _philox_blocks_np(blocks, k0, k1):
    c0 = blocks.astype(np.uint64)
    c1 = np.zeros_like(c0)
    c2 = np.zeros_like(c0)
    c3 = np.zeros_like(c0)
    k0 = np.uint64(k0)
    k1 = np.uint64(k1)
    with np.errstate(over="ignore"):
        for r in range(_ROUNDS):
            if r > 0:
                k0 = np.uint64((int(k0) + int(_W0)) & MASK64)
                k1 = np.uint64((int(k1) + int(_W1)) & MASK64)
            hi0, lo0 = _mulhilo_np(_M0, c0)
            hi1, lo1 = _mulhilo_np(_M1, c2)
            c0, c1, c2, c3 = hi1 ^ c1 ^ k0, lo1, hi0 ^ c3 ^ k1, lo0
    return np.stack([c0, c1, c2, c3], axis=1)


def _raw_np(start, stop, k0, k1):
    if stop <= start:
        return np.empty(0, dtype=np.uint64)
    b_first = start // 4
    b_last = (stop - 1) // 4
    blocks = np.arange(b_first, b_last + 1, dtype=np.uint64)
    words = _philox_blocks_np(blocks, k0, k1).reshape(-1)
    off = start - 4 * b_first
    return words[off:off + (stop - start)]


def _uniform_np(start, stop, k0, k1):
    raw = _raw_np(start, stop, k0, k1)
    return (raw >> _S11).astype(np.float64) * _TWO_M53


# ---------------------------------------------------------------------------
# public API
# ---------------------------------------------------------------------------

def pair_count(n):
    return n * (n - 1) // 2


def pair_index(n, i, j):
    """Lexicographic index of the 0-based pair ``i < j`` among all pairs of [n]."""
    return i * n - i * (i + 1) // 2 + (j - i - 1)


@dataclass(frozen=True)
class UniformStream:
    """Addressable stream of uniforms on [0, 1) keyed by ``(seed, trial)``."""

    seed: int
    trial: int = 0

    def __post_init__(self):
        if not isinstance(self.seed, (int, np.integer)) or isinstance(self.seed, bool):
            raise TypeError("seed must be an integer")

    @property
    def key(self):
        return np.uint64(int(self.seed) & MASK64), np.uint64(int(self.trial) & MASK64)

    def split(self, trial):
        """Independent stream for trial ``trial`` derived from the same seed."""
        return UniformStream(self.seed, trial)

    def raw(self, start, stop, backend=None):
        k0, k1 = self.key
        if _pick(backend) == "numba":
            return _raw_nb(np.int64(start), np.int64(stop), k0, k1)
        return _raw_np(int(start), int(stop), k0, k1)

    def uniforms(self, start, stop, backend=None):
        k0, k1 = self.key
        if _pick(backend) == "numba":
            return _uniform_nb(np.int64(start), np.int64(stop), k0, k1)
        return _uniform_np(int(start), int(stop), k0, k1)

    def weights(self, n, backend=None):
        """W_1..W_n (first n draws)."""
        return self.uniforms(0, n, backend)

    def pair_uniforms(self, n, backend=None):
        """U_ij for all pairs i<j of [n], in lexicographic order."""
        return self.uniforms(n, n + pair_count(n), backend)

    def pair_uniform(self, n, i, j):
        """Single U_ij for 0-based ``i < j``; addressed directly, no iteration."""
        t = n + pair_index(n, i, j)
        return float(self.uniforms(t, t + 1, "numpy")[0])


def _pick(backend):
    if backend is None:
        return "numba" if use_numba() else "numpy"
    if backend not in ("numba", "numpy"):
        raise ValueError(f"unknown backend {backend!r}")
    return backend
