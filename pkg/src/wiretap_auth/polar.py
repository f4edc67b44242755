"""Polar transform, bit-channel quality profiling, and successive
cancellation decoding.

Conventions
-----------
The transform computes ``x = v . P_n . G^{(x)r}`` over GF(2), where
``G = [[1,0],[1,1]]`` and ``P_n`` is the bit-reversal permutation:
the input is permuted once, then an in-place butterfly applies the
Kronecker power.  The map is an involution.

Quality indices and the decode schedule both follow the natural SC
order: index i of a profile is the synthetic channel of the i-th
decoded bit, which conditions on decisions 0..i-1.  Bit reversal
appears inside :func:`polar_transform` (and the matching LLR
permutation inside :func:`sc_decode`) only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bits import BitVector
from .channel import BscParam
from .errors import LengthMismatchError, NotPowerOfTwoError, TooLargeError

#: LLR magnitude used for noiseless (p = 0) channels, natural-log units.
LLR_CLAMP = 40.0


def _is_pow2(n: int) -> bool:
    return n > 0 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class PolarParams:
    """Block structure n = 2^r with r >= 1."""

    r: int
    n: int = 0

    def __post_init__(self):
        if self.r < 1:
            raise NotPowerOfTwoError(f"exponent must be >= 1, got r={self.r}")
        if self.n == 0:
            object.__setattr__(self, "n", 1 << self.r)
        elif self.n != 1 << self.r:
            raise NotPowerOfTwoError(f"n={self.n} is not 2^{self.r}")

    @classmethod
    def for_block_length(cls, n: int) -> "PolarParams":
        if not _is_pow2(n) or n < 2:
            raise NotPowerOfTwoError(f"block length must be a power of two >= 2, got {n}")
        return cls(n.bit_length() - 1)


@dataclass(frozen=True)
class QualityProfile:
    """Per-bit-channel reliability surrogate.

    ``z[i]`` upper-bounds the Bhattacharyya parameter of the i-th
    synthetic channel in decode order (0 = perfect, 1 = useless).
    """

    n: int
    z: np.ndarray

    def __post_init__(self):
        if len(self.z) != self.n:
            raise LengthMismatchError(f"profile length {len(self.z)} != n {self.n}")
        if np.any(self.z < 0) or np.any(self.z > 1):
            raise ValueError("quality values must lie in [0, 1]")


@dataclass(frozen=True)
class FrozenSpec:
    """Frozen positions and the values pinned there."""

    frozen_indices: np.ndarray
    frozen_values: BitVector

    def __post_init__(self):
        idx = np.asarray(self.frozen_indices, dtype=np.int64)
        object.__setattr__(self, "frozen_indices", idx)
        if idx.size != len(self.frozen_values):
            raise LengthMismatchError(
                f"{idx.size} frozen indices but {len(self.frozen_values)} values")
        if idx.size and (idx.min() < 0 or idx.size != np.unique(idx).size):
            raise ValueError("frozen indices must be unique and nonnegative")

    @classmethod
    def zeros(cls, indices) -> "FrozenSpec":
        idx = np.asarray(indices, dtype=np.int64)
        return cls(idx, BitVector.zeros(idx.size))

    def mask_and_values(self, n: int):
        """(bool mask, full-length value array) for a block of length n."""
        if self.frozen_indices.size and self.frozen_indices.max() >= n:
            raise ValueError(f"frozen index {self.frozen_indices.max()} >= n={n}")
        mask = np.zeros(n, dtype=bool)
        mask[self.frozen_indices] = True
        vals = np.zeros(n, dtype=np.uint8)
        vals[self.frozen_indices] = self.frozen_values.bits
        return mask, vals


def bit_reversal_permutation(n: int) -> np.ndarray:
    """Permutation pi with pi[i] = the r-bit reversal of i."""
    if not _is_pow2(n) or n < 2:
        raise NotPowerOfTwoError(f"{n} is not a power of two >= 2")
    r = n.bit_length() - 1
    perm = np.zeros(1, dtype=np.int64)
    for _ in range(r):
        perm = np.concatenate([2 * perm, 2 * perm + 1])
    return perm


def transform_rows(rows: np.ndarray) -> np.ndarray:
    """Apply the polar map to each row of a (trials, n) uint8 array."""
    n = rows.shape[-1]
    x = rows[..., bit_reversal_permutation(n)].copy()
    step = 1
    while step < n:
        y = x.reshape(-1, 2, step)
        y[:, 0, :] ^= y[:, 1, :]
        step *= 2
    return x.reshape(rows.shape)


def polar_transform(v: BitVector, pp: PolarParams) -> BitVector:
    """Codeword x = v . P_n . G^{(x)r}, computed in O(n log n)."""
    if len(v) != pp.n:
        raise LengthMismatchError(f"input length {len(v)} != n {pp.n}")
    return BitVector(transform_rows(v.bits[None, :])[0])


def base_bhattacharyya(ch: BscParam) -> float:
    """Z(W) = 2 sqrt(p(1-p)) for the BSC."""
    p = ch.crossover
    return 2.0 * math.sqrt(p * (1.0 - p))


def quality_profile(ch: BscParam, pp: PolarParams) -> QualityProfile:
    """Surrogate profile from r rounds of the pairwise recursion
    z- = 2z - z^2, z+ = z^2 seeded with the exact BSC value.

    The minus branch is an upper bound for the true Bhattacharyya
    parameter and the plus branch is exact, so z[i] >= Z(W_i)
    everywhere, with equality on the all-plus path.
    """
    z = np.array([base_bhattacharyya(ch)], dtype=np.float64)
    for _ in range(pp.r):
        z = np.stack([2.0 * z - z * z, z * z], axis=1).reshape(-1)
    return QualityProfile(pp.n, np.clip(z, 0.0, 1.0))


def exact_bitchannel_quality(ch: BscParam, pp: PolarParams):
    """Exact Z(W_i) and C(W_i) by enumerating outputs and prefixes.

    Feasible only at toy scale: the sum runs over all 2^n channel
    outputs and all input prefixes, so n is capped at 16 (and n = 16
    already takes minutes).  Serves as the independent oracle for
    :func:`quality_profile`.

    Returns
    -------
    (z_exact, c_exact) : pair of length-n float arrays
    """
    n = pp.n
    if n > 16:
        raise TooLargeError(f"exact enumeration capped at n=16, got {n}")
    p = ch.crossover
    # all inputs v (v_0 = MSB), their codewords packed into ints
    V = ((np.arange(1 << n)[:, None] >> np.arange(n - 1, -1, -1)[None, :]) & 1
         ).astype(np.uint8)
    X = transform_rows(V)
    weights = (1 << np.arange(n - 1, -1, -1)).astype(np.int64)
    xint = X.astype(np.int64) @ weights
    z_exact = np.zeros(n)
    c_exact = np.zeros(n)
    # keep the (2^n, chunk) likelihood matrix within a few hundred MB
    chunk = 1 << min(n, max(1, 25 - n))
    for y0 in range(0, 1 << n, chunk):
        yint = np.arange(y0, y0 + chunk, dtype=np.int64)
        dist = np.bitwise_count(xint[:, None] ^ yint[None, :]).astype(np.float64)
        with np.errstate(divide="ignore"):
            Wmat = np.exp(dist * np.log(p) + (n - dist) * np.log(1.0 - p)) \
                if 0.0 < p else np.where(dist == 0, 1.0, 0.0)
        for i in range(n):
            # v = prefix (i bits) | decision bit | free suffix, v_0 is MSB,
            # so rows for a fixed (prefix, bit) form a contiguous range
            S = Wmat.reshape(1 << i, 2, 1 << (n - 1 - i), chunk).sum(axis=2)
            S *= 0.5 ** (n - 1)
            w0, w1 = S[:, 0, :], S[:, 1, :]
            z_exact[i] += np.sqrt(w0 * w1).sum()
            pm = 0.5 * (w0 + w1)
            for w in (w0, w1):
                nz = w > 0
                c_exact[i] += 0.5 * (w[nz] * np.log2(w[nz] / pm[nz])).sum()
    return z_exact, c_exact


# ---------------------------------------------------------------------------
# successive cancellation decoding
# ---------------------------------------------------------------------------

def channel_llrs(y: np.ndarray, ch: BscParam) -> np.ndarray:
    """Per-position LLRs log P(y|0)/P(y|1) for BSC outputs, clamped to
    +/-LLR_CLAMP so p = 0 stays finite."""
    p = ch.crossover
    if p <= 0.0:
        mag = LLR_CLAMP
    elif p >= 0.5:
        mag = 0.0
    else:
        mag = min(math.log((1.0 - p) / p), LLR_CLAMP)
    return np.where(y == 0, mag, -mag).astype(np.float64)


def _f(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    # exact boxplus, numerically stable form
    return (np.sign(a) * np.sign(b) * np.minimum(np.abs(a), np.abs(b))
            + np.log1p(np.exp(-np.abs(a + b)))
            - np.log1p(np.exp(-np.abs(a - b))))


def _g(a: np.ndarray, b: np.ndarray, bit: np.ndarray) -> np.ndarray:
    return b + (1.0 - 2.0 * bit) * a


def sc_decode_llrs(llrs: np.ndarray, frozen_mask: np.ndarray,
                   frozen_values: np.ndarray) -> np.ndarray:
    """Batched SC decoding of pre-permuted LLRs.

    Parameters
    ----------
    llrs : (trials, n) float array
        Channel LLRs already permuted by the bit-reversal order (the
        same permutation the encoder applies to its input).
    frozen_mask, frozen_values : length-n arrays
        Shared across the batch.

    Returns
    -------
    (trials, n) uint8 array of decisions in natural decode order.

    Notes
    -----
    Decisions are per-bit maximum likelihood given earlier decisions,
    with ties (LLR exactly zero) resolved to 0.  Fully-frozen subtrees
    are emitted without touching their LLRs, which is exact because no
    decision depends on them.
    """
    trials, n = llrs.shape
    v_hat = np.zeros((trials, n), dtype=np.uint8)
    frozen_count = np.concatenate([[0], np.cumsum(frozen_mask)])

    def rec(L: np.ndarray, lo: int, hi: int) -> np.ndarray:
        m = hi - lo
        nfrozen = frozen_count[hi] - frozen_count[lo]
        if nfrozen == m:
            block = frozen_values[lo:hi]
            v_hat[:, lo:hi] = block
            beta = block.copy()
            step = 1
            while step < m:
                bb = beta.reshape(-1, 2, step)
                bb[:, 0, :] ^= bb[:, 1, :]
                step *= 2
            return np.broadcast_to(beta, (trials, m))
        if m == 1:
            b = (L[:, 0] < 0).astype(np.uint8)
            v_hat[:, lo] = b
            return b[:, None]
        h = m // 2
        b1 = rec(_f(L[:, :h], L[:, h:]), lo, lo + h)
        b2 = rec(_g(L[:, :h], L[:, h:], b1), lo + h, hi)
        return np.concatenate([b1 ^ b2, b2], axis=1)

    rec(llrs, 0, n)
    return v_hat


def sc_decode(y: BitVector, ch: BscParam, fs: FrozenSpec, pp: PolarParams) -> BitVector:
    """Decode one received block; returns the full estimate of v.

    Frozen positions are copied from ``fs``; every free position is the
    ML bit given the channel law and all earlier decisions.
    """
    if len(y) != pp.n:
        raise LengthMismatchError(f"received length {len(y)} != n {pp.n}")
    mask, vals = fs.mask_and_values(pp.n)
    llr = channel_llrs(y.bits, ch)[bit_reversal_permutation(pp.n)]
    return BitVector(sc_decode_llrs(llr[None, :], mask, vals)[0])


def sc_decode_rows(Y: np.ndarray, ch: BscParam, frozen_mask: np.ndarray,
                   frozen_values: np.ndarray) -> np.ndarray:
    """Batch decode of a (trials, n) array of received blocks."""
    n = Y.shape[-1]
    llr = channel_llrs(Y, ch)[:, bit_reversal_permutation(n)]
    return sc_decode_llrs(llr, frozen_mask, frozen_values)
