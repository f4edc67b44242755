"""Strong-secrecy polar coding: index partitioning and encode/decode.

Block positions are split by two thresholds: reliability toward the
legitimate receiver (good/bad) and residual capacity toward the
eavesdropper (poor/not poor).  The four intersections carry, in order,
the secret payload, frozen zeros, and random bits on the remaining
positions.  The CSV export labels them A, B, X, Y:

=====  ==================  =========================================
label  field               contents
=====  ==================  =========================================
A      info               payload bits (poor for Eve, good for Bob)
B      frozen             zeros (poor for Eve, bad for Bob)
X      random_unreliable  random bits (not poor for Eve, bad for Bob)
Y      random_reliable    random bits (not poor for Eve, good for Bob)
=====  ==================  =========================================
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .bits import BitVector, RngSeed
from .channel import BscParam, WiretapChannel
from .errors import DomainError, LengthMismatchError, MalformedInputError
from .polar import (PolarParams, QualityProfile, bit_reversal_permutation,
                    channel_llrs, quality_profile, sc_decode_llrs,
                    transform_rows)

SET_LABELS = ("A", "B", "X", "Y")


@dataclass(frozen=True)
class PartitionParams:
    """Thresholding constants for the index partition.

    ``sigma_override`` replaces the default eavesdropper capacity
    threshold 2^(-n^gamma) when given (useful for experimentation at
    tiny block lengths).
    """

    beta: float
    gamma: float
    sigma_override: float | None = None

    def __post_init__(self):
        if not 0.0 < self.beta < 0.5:
            raise DomainError(f"beta must be in (0, 0.5), got {self.beta}")
        if self.gamma <= 0.0:
            raise DomainError(f"gamma must be positive, got {self.gamma}")
        if self.sigma_override is not None and not 0.0 < self.sigma_override < 1.0:
            raise DomainError(f"sigma_override must be in (0, 1), got {self.sigma_override}")

    def sigma(self, n: int) -> float:
        """Eavesdropper capacity threshold; exponentially small in n."""
        if self.sigma_override is not None:
            return self.sigma_override
        return 2.0 ** (-(n ** self.gamma))


@dataclass(frozen=True)
class IndexPartition:
    """Disjoint cover of [0, n) into payload / frozen / random positions."""

    n: int
    info: np.ndarray
    frozen: np.ndarray
    random_unreliable: np.ndarray
    random_reliable: np.ndarray

    def __post_init__(self):
        sets = (self.info, self.frozen, self.random_unreliable, self.random_reliable)
        merged = np.concatenate(sets) if sets else np.array([], dtype=np.int64)
        if merged.size != self.n or np.unique(merged).size != self.n or (
                merged.size and (merged.min() < 0 or merged.max() >= self.n)):
            raise ValueError("partition sets must disjointly cover [0, n)")

    @property
    def has_info(self) -> bool:
        return self.info.size > 0

    def sizes(self) -> dict:
        return {"A": int(self.info.size), "B": int(self.frozen.size),
                "X": int(self.random_unreliable.size),
                "Y": int(self.random_reliable.size)}

    def labels(self) -> np.ndarray:
        """Per-index set label ('A'..'Y'), mainly for export."""
        out = np.empty(self.n, dtype="U1")
        for label, idx in zip(SET_LABELS, (self.info, self.frozen,
                                           self.random_unreliable,
                                           self.random_reliable)):
            out[idx] = label
        return out


def good_set(profile: QualityProfile, beta: float) -> np.ndarray:
    """Indices whose surrogate Bhattacharyya value beats 2^(-n^beta)/n."""
    thr = 2.0 ** (-(profile.n ** beta)) / profile.n
    return np.flatnonzero(profile.z < thr)


def poor_set(profile: QualityProfile, sigma: float) -> np.ndarray:
    """Indices whose surrogate capacity 1 - z is at most sigma."""
    if not 0.0 < sigma < 1.0:
        raise DomainError(f"sigma must be in (0, 1), got {sigma}")
    return np.flatnonzero(1.0 - profile.z <= sigma)


def partition(wc: WiretapChannel, pp: PolarParams,
              params: PartitionParams) -> IndexPartition:
    """Intersect the receiver's good/bad split with the eavesdropper's
    poor/not-poor split.  An empty payload set is legal; check
    ``result.has_info``."""
    z_main = quality_profile(wc.main, pp)
    z_eve = quality_profile(wc.eve, pp)
    good = np.zeros(pp.n, dtype=bool)
    good[good_set(z_main, params.beta)] = True
    poor = np.zeros(pp.n, dtype=bool)
    poor[poor_set(z_eve, params.sigma(pp.n))] = True
    return IndexPartition(
        n=pp.n,
        info=np.flatnonzero(poor & good),
        frozen=np.flatnonzero(poor & ~good),
        random_unreliable=np.flatnonzero(~poor & ~good),
        random_reliable=np.flatnonzero(~poor & good),
    )


class SecurePolarCode:
    """Immutable bundle of block structure, channels, and partition.

    Parameters
    ----------
    wc : WiretapChannel
    pp : PolarParams
    params : PartitionParams

    The partition is derived deterministically from the arguments, so
    re-construction is idempotent.
    """

    def __init__(self, wc: WiretapChannel, pp: PolarParams, params: PartitionParams):
        self.wc = wc
        self.pp = pp
        self.params = params
        self.profile_main = quality_profile(wc.main, pp)
        self.profile_eve = quality_profile(wc.eve, pp)
        self.partition = partition(wc, pp, params)
        n = pp.n
        self._frozen_mask = np.zeros(n, dtype=bool)
        self._frozen_mask[self.partition.frozen] = True
        self._frozen_values = np.zeros(n, dtype=np.uint8)
        self._free = np.flatnonzero(~self._frozen_mask)
        self._random = np.concatenate([self.partition.random_unreliable,
                                       self.partition.random_reliable])
        self._bitrev = bit_reversal_permutation(n)

    @property
    def n(self) -> int:
        return self.pp.n

    @property
    def info_size(self) -> int:
        return int(self.partition.info.size)

    def frozen_arrays(self):
        return self._frozen_mask, self._frozen_values


def secrecy_rate(code: SecurePolarCode) -> float:
    """Payload bits per channel use, |A| / n."""
    return code.info_size / code.n


def secure_encode(info: BitVector, code: SecurePolarCode, seed: RngSeed) -> BitVector:
    """Assemble payload, zeros, and seeded random bits, then transform."""
    return BitVector(secure_encode_rows(info.bits[None, :], code,
                                        seed.generator())[0])


def secure_encode_rows(info_rows: np.ndarray, code: SecurePolarCode,
                       rng: np.random.Generator) -> np.ndarray:
    """Batch form of :func:`secure_encode` on a (trials, |A|) array."""
    trials, k = info_rows.shape
    if k != code.info_size:
        raise LengthMismatchError(
            f"payload length {k} != |A| = {code.info_size}")
    v = np.zeros((trials, code.n), dtype=np.uint8)
    v[:, code.partition.info] = info_rows
    v[:, code._random] = rng.integers(0, 2, (trials, code._random.size),
                                      dtype=np.uint8)
    return transform_rows(v)


def secure_decode(y: BitVector, code: SecurePolarCode,
                  ch: BscParam | None = None) -> BitVector:
    """Recover the payload bits from one received block.

    SC decoding runs with the frozen set pinned to zero and every other
    position free; the payload is read off the info positions.  ``ch``
    defaults to the main channel (pass the eavesdropper's parameter to
    model Eve's decoder).  Raises :class:`MalformedInputError` for a
    wrong-length block, the only structural failure SC can detect.
    """
    if len(y) != code.n:
        raise MalformedInputError(f"received length {len(y)} != n {code.n}")
    return BitVector(secure_decode_rows(y.bits[None, :], code, ch)[0])


def secure_decode_rows(Y: np.ndarray, code: SecurePolarCode,
                       ch: BscParam | None = None) -> np.ndarray:
    """Batch form of :func:`secure_decode`; returns (trials, |A|)."""
    if Y.shape[-1] != code.n:
        raise MalformedInputError(f"received length {Y.shape[-1]} != n {code.n}")
    ch = ch or code.wc.main
    mask, vals = code.frozen_arrays()
    llr = channel_llrs(Y, ch)[:, code._bitrev]
    v_hat = sc_decode_llrs(llr, mask, vals)
    return v_hat[:, code.partition.info]


def export_partition(code: SecurePolarCode, path) -> None:
    """Write the per-index partition as CSV with columns
    index, z_main, z_eve, set."""
    labels = code.partition.labels()
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["index", "z_main", "z_eve", "set"])
        for i in range(code.n):
            writer.writerow([i, repr(float(code.profile_main.z[i])),
                             repr(float(code.profile_eve.z[i])), labels[i]])
