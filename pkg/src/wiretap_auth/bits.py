"""Bit vectors over GF(2) and reproducible random streams.

Bit 0 is the first transmitted position and maps to the most significant
bit of the first byte (and of the first hex nibble) in all packed
encodings.  Every module in the package shares this convention.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import LengthMismatchError

_GOLDEN64 = 0x9E3779B97F4A7C15
_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class RngSeed:
    """Seed for a deterministic, splittable random stream.

    The same (master_seed, stream_id) pair always reproduces the same
    stream: it is fed verbatim to ``numpy.random.default_rng``.  Derived
    seeds mix extra indices into ``stream_id`` with a splitmix64 step,
    so independent substreams can be labelled by (round, trial, ...)
    tuples.
    """

    master_seed: int
    stream_id: int = 0

    def generator(self) -> np.random.Generator:
        return np.random.default_rng((self.master_seed & _MASK64,
                                      self.stream_id & _MASK64))

    def derive(self, *indices: int) -> "RngSeed":
        """Child seed for substream labelled by ``indices``."""
        s = self.stream_id & _MASK64
        for k in indices:
            s = (s ^ (k & _MASK64)) * _GOLDEN64 & _MASK64
            s ^= s >> 31
            s = s * 0xBF58476D1CE4E5B9 & _MASK64
        return RngSeed(self.master_seed, s)


class BitVector:
    """Fixed-length sequence of bits with GF(2) arithmetic.

    Parameters
    ----------
    bits : array-like
        Values in {0, 1}; stored as a uint8 array indexed 0..len-1.
    """

    __slots__ = ("_bits",)

    def __init__(self, bits):
        arr = np.asarray(bits, dtype=np.uint8)
        if arr.ndim != 1:
            raise ValueError("BitVector requires a one-dimensional sequence")
        if arr.size and arr.max() > 1:
            raise ValueError("bit values must be 0 or 1")
        self._bits = arr

    # -- construction -------------------------------------------------
    @classmethod
    def zeros(cls, length: int) -> "BitVector":
        return cls(np.zeros(length, dtype=np.uint8))

    @classmethod
    def ones(cls, length: int) -> "BitVector":
        return cls(np.ones(length, dtype=np.uint8))

    @classmethod
    def from_string(cls, text: str) -> "BitVector":
        """Parse a binary string such as ``"1010"``."""
        if not all(c in "01" for c in text):
            raise ValueError(f"not a binary string: {text!r}")
        return cls(np.frombuffer(text.encode("ascii"), dtype=np.uint8) - ord("0"))

    @classmethod
    def from_bytes(cls, data: bytes, length: int) -> "BitVector":
        if length > 8 * len(data):
            raise LengthMismatchError(
                f"{len(data)} bytes hold at most {8 * len(data)} bits, need {length}")
        return cls(np.unpackbits(np.frombuffer(data, dtype=np.uint8))[:length])

    @classmethod
    def from_hex(cls, text: str, length: int | None = None) -> "BitVector":
        text = text.removeprefix("0x").removeprefix("0X")
        if length is None:
            length = 4 * len(text)
        if len(text) % 2:
            text += "0"
        return cls.from_bytes(bytes.fromhex(text), length)

    # -- encoding -----------------------------------------------------
    def to_bytes(self) -> bytes:
        return np.packbits(self._bits).tobytes()

    def to_hex(self) -> str:
        nibbles = (len(self._bits) + 3) // 4
        return self.to_bytes().hex()[:nibbles]

    def __str__(self) -> str:
        return "".join("01"[b] for b in self._bits)

    def __repr__(self) -> str:
        s = str(self)
        if len(s) > 32:
            s = s[:29] + "..."
        return f"BitVector({s!r}, len={len(self)})"

    # -- sequence protocol ---------------------------------------------
    def __len__(self) -> int:
        return self._bits.size

    def __getitem__(self, i):
        if isinstance(i, (int, np.integer)):
            return int(self._bits[i])
        return BitVector(self._bits[i].copy())

    def __setitem__(self, i, value):
        self._bits[i] = value

    def __eq__(self, other) -> bool:
        return (isinstance(other, BitVector)
                and len(self) == len(other)
                and bool(np.array_equal(self._bits, other._bits)))

    def __hash__(self):
        return hash((len(self), self.to_bytes()))

    def __xor__(self, other: "BitVector") -> "BitVector":
        return xor(self, other)

    # -- access ---------------------------------------------------------
    @property
    def bits(self) -> np.ndarray:
        """Underlying uint8 array; treat as read-only when shared."""
        return self._bits

    def copy(self) -> "BitVector":
        return BitVector(self._bits.copy())

    def count_ones(self) -> int:
        return int(self._bits.sum())


def xor(a: BitVector, b: BitVector) -> BitVector:
    """Elementwise mod-2 sum of two equal-length vectors."""
    if len(a) != len(b):
        raise LengthMismatchError(f"xor lengths differ: {len(a)} vs {len(b)}")
    return BitVector(a.bits ^ b.bits)


def random_bits(length: int, seed: RngSeed) -> BitVector:
    """Uniform random bits, deterministic per seed."""
    if length < 0:
        raise ValueError("length must be nonnegative")
    return BitVector(seed.generator().integers(0, 2, length, dtype=np.uint8))
