"""Balanced universal hashing from an LFSR-generated Toeplitz matrix.

A key is (generator polynomial, nonzero initial state, offset); the tag
of a t-bit message m is m.A + b over GF(2), where row i of the t-by-u
matrix A is the stream window (a_i, ..., a_{i+u-1}).  Keys are 3u bits
and the family is eps-balanced with eps <= t / 2^(u-1), provided the
polynomial is primitive so the stream has full period 2^u - 1.

Polynomials are represented as Python ints with bit i holding the
coefficient of x^i.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .bits import BitVector, RngSeed
from .errors import DomainError, LengthMismatchError, ZeroStateError

#: Primitive polynomials usable above the exact-verification cutoff.
#: Both entries were checked primitive offline (irreducibility by
#: Rabin's test; root order 2^u - 1 against the known factorizations).
CURATED_POLYS = {
    64: (1 << 64) | (1 << 9) | (1 << 8) | (1 << 7) | (1 << 6) | (1 << 3) | 1,
    101: (1 << 101) | (1 << 84) | (1 << 66) | (1 << 49) | (1 << 32) | (1 << 16) | 1,
}

#: Degrees at or below this get an exact primitivity check; above it,
#: only curated table members are accepted (factoring 2^u - 1 is no
#: longer cheap).
EXACT_CHECK_MAX_DEGREE = 24


@dataclass(frozen=True)
class GenPoly:
    """Generator polynomial; ``mask`` bit i is the coefficient of x^i.

    Constant and leading terms must both be 1 (necessary for a maximal
    period); primitivity itself is checked by :func:`validate_poly`.
    """

    mask: int

    def __post_init__(self):
        if self.mask < 0b11 or not self.mask & 1:
            raise ValueError("polynomial needs constant term 1 and degree >= 1")

    @property
    def degree(self) -> int:
        return self.mask.bit_length() - 1

    @classmethod
    def from_exponents(cls, *exponents: int) -> "GenPoly":
        mask = 0
        for e in exponents:
            mask |= 1 << e
        return cls(mask)

    def tap_positions(self) -> np.ndarray:
        """Exponents below the degree with nonzero coefficient."""
        u = self.degree
        return np.array([j for j in range(u) if (self.mask >> j) & 1],
                        dtype=np.int64)

    def __str__(self) -> str:
        terms = [f"x^{e}" if e > 1 else ("x" if e == 1 else "1")
                 for e in range(self.degree, -1, -1) if (self.mask >> e) & 1]
        return " + ".join(terms)


@dataclass(frozen=True)
class HashParams:
    """Message length t and tag length u, with t > u >= 1.

    ``epsilon`` records the balance bound t / 2^(u-1); a value >= 1 is
    vacuous and means the parameters give no security.
    """

    t: int
    u: int

    def __post_init__(self):
        if not self.t > self.u >= 1:
            raise DomainError(f"need t > u >= 1, got t={self.t}, u={self.u}")

    @property
    def epsilon(self) -> float:
        return self.t / 2.0 ** (self.u - 1)


@dataclass(frozen=True)
class LfsrHashKey:
    """Hash key: polynomial, nonzero initial state, and offset.

    Total key entropy is 3u bits: u free polynomial coefficients, u
    state bits, u offset bits.
    """

    poly: GenPoly
    init: BitVector
    offset: BitVector

    def __post_init__(self):
        u = self.poly.degree
        if len(self.init) != u or len(self.offset) != u:
            raise LengthMismatchError(
                f"init/offset must have length {u}, got "
                f"{len(self.init)}/{len(self.offset)}")
        if not self.init.bits.any():
            raise ZeroStateError("LFSR initial state must be nonzero")

    @property
    def u(self) -> int:
        return self.poly.degree


# ---------------------------------------------------------------------------
# GF(2) polynomial arithmetic and primitivity testing
# ---------------------------------------------------------------------------

def _poly_mulmod(a: int, b: int, mod: int) -> int:
    deg = mod.bit_length() - 1
    r = 0
    while b:
        if b & 1:
            r ^= a
        b >>= 1
        a <<= 1
        if (a >> deg) & 1:
            a ^= mod
    return r


def _poly_powmod(a: int, e: int, mod: int) -> int:
    r = 1
    while e:
        if e & 1:
            r = _poly_mulmod(r, a, mod)
        e >>= 1
        a = _poly_mulmod(a, a, mod)
    return r


def _gf2_mod(a: int, b: int) -> int:
    db = b.bit_length()
    while a.bit_length() >= db:
        a ^= b << (a.bit_length() - db)
    return a


def _gf2_gcd(a: int, b: int) -> int:
    while b:
        a, b = b, _gf2_mod(a, b)
    return a


def _prime_factors(m: int) -> list[int]:
    out = []
    d = 2
    while d * d <= m:
        if m % d == 0:
            out.append(d)
            while m % d == 0:
                m //= d
        d += 1
    if m > 1:
        out.append(m)
    return out


def _is_irreducible(mask: int) -> bool:
    # Rabin's test: x^(2^u) = x mod p, and gcd(x^(2^(u/ell)) - x, p) = 1
    # for every prime ell dividing u
    u = mask.bit_length() - 1
    t = 2
    for _ in range(u):
        t = _poly_mulmod(t, t, mask)
    if t != 2:
        return False
    for ell in _prime_factors(u):
        t = 2
        for _ in range(u // ell):
            t = _poly_mulmod(t, t, mask)
        if _gf2_gcd(t ^ 2, mask) != 1:
            return False
    return True


def _is_primitive(mask: int) -> bool:
    if not _is_irreducible(mask):
        return False
    u = mask.bit_length() - 1
    order = (1 << u) - 1
    for ell in _prime_factors(order):
        if _poly_powmod(2, order // ell, mask) == 1:
            return False
    return True


def validate_poly(poly: GenPoly) -> bool:
    """True when the polynomial is usable for the hash family.

    Degrees up to EXACT_CHECK_MAX_DEGREE get a full primitivity check;
    larger degrees are accepted only from the curated table.
    """
    u = poly.degree
    if u <= EXACT_CHECK_MAX_DEGREE:
        return _is_primitive(poly.mask)
    return CURATED_POLYS.get(u) == poly.mask


@lru_cache(maxsize=32)
def _primitive_polys_up_to_degree_12(u: int) -> tuple[int, ...]:
    # small enough to enumerate outright; used for uniform key sampling
    return tuple(m for m in range(1 << u, 1 << (u + 1))
                 if m & 1 and _is_primitive(m))


def generate_key(u: int, seed: RngSeed) -> LfsrHashKey:
    """Draw a fresh uniform key: polynomial from the primitive set (or
    the curated table), nonzero initial state, uniform offset."""
    rng = seed.generator()
    if u in CURATED_POLYS:
        mask = CURATED_POLYS[u]
    elif u <= 12:
        polys = _primitive_polys_up_to_degree_12(u)
        if not polys:
            raise DomainError(f"no primitive polynomial of degree {u}")
        mask = polys[int(rng.integers(len(polys)))]
    elif u <= EXACT_CHECK_MAX_DEGREE:
        # rejection sampling is uniform over the primitive set
        while True:
            mask = (1 << u) | 1 | (int(rng.integers(1 << (u - 1))) << 1)
            if _is_primitive(mask):
                break
    else:
        raise DomainError(
            f"no curated polynomial of degree {u}; supply a key explicitly")
    init = rng.integers(0, 2, u, dtype=np.uint8)
    if not init.any():
        init[int(rng.integers(u))] = 1
    offset = rng.integers(0, 2, u, dtype=np.uint8)
    return LfsrHashKey(GenPoly(mask), BitVector(init), BitVector(offset))


# ---------------------------------------------------------------------------
# stream generation and hashing
# ---------------------------------------------------------------------------

@lru_cache(maxsize=64)
def _stream_tables(mask: int, blocks: int):
    """Stacked GF(2) matrices mapping a state window to the next
    ``blocks * u`` output bits."""
    u = mask.bit_length() - 1
    taps = [j for j in range(u) if (mask >> j) & 1]
    rows = list(np.eye(u, dtype=np.uint8))
    step = np.zeros((u, u), dtype=np.uint8)
    for d in range(u):
        r = np.zeros(u, dtype=np.uint8)
        for j in taps:
            r ^= rows[d + j]
        rows.append(r)
        step[d] = r
    stack = np.zeros((blocks, u, u), dtype=np.uint8)
    stack[0] = step
    for k in range(1, blocks):
        stack[k] = (stack[k - 1].astype(np.uint32) @ step) % 2
    return stack.reshape(blocks * u, u).astype(np.uint32)


def lfsr_stream(key: LfsrHashKey, count: int) -> BitVector:
    """First ``count`` bits a_0, a_1, ... of the register's output.

    The first u bits are the initial state verbatim; later bits follow
    the recurrence given by the polynomial's tap positions.  Generated
    in blocks via a precomputed state-transition matrix.
    """
    if count < 0:
        raise ValueError("count must be nonnegative")
    if not key.init.bits.any():
        raise ZeroStateError("LFSR initial state must be nonzero")
    u = key.u
    if count <= u:
        return BitVector(key.init.bits[:count].copy())
    blocks = max(1, min(128, (count - u) // u + 1))
    table = _stream_tables(key.poly.mask, blocks)
    out = np.empty(u + -(-(count - u) // (blocks * u)) * blocks * u,
                   dtype=np.uint8)
    w = key.init.bits.astype(np.uint32)
    out[:u] = w
    pos = u
    while pos < count:
        blk = (table @ w) % 2
        out[pos:pos + blocks * u] = blk
        w = blk[-u:].astype(np.uint32)
        pos += blocks * u
    return BitVector(out[:count])


def hash_message(m: BitVector, key: LfsrHashKey, hp: HashParams) -> BitVector:
    """Tag = m.A + b with A the Toeplitz matrix of stream windows.

    Equivalent to the streaming rule: slide the u-bit window along the
    stream and accumulate it wherever the message bit is 1.  Computed
    column-wise so the inner loops stay vectorized.
    """
    if len(m) != hp.t:
        raise LengthMismatchError(f"message length {len(m)} != t {hp.t}")
    if key.u != hp.u:
        raise LengthMismatchError(f"key degree {key.u} != u {hp.u}")
    t, u = hp.t, hp.u
    stream = lfsr_stream(key, t + u - 1).bits
    mb = m.bits
    tag = np.empty(u, dtype=np.uint8)
    for j in range(u):
        # column j of A is the stream slice a_j .. a_{j+t-1}
        tag[j] = np.count_nonzero(mb & stream[j:j + t]) & 1
    return BitVector(tag ^ key.offset.bits)


def epsilon_bound(hp: HashParams) -> float:
    """Balance bound t / 2^(u-1); values >= 1 are vacuous."""
    return hp.epsilon


def lfsr_stream_rows(mask: int, init_rows: np.ndarray, count: int) -> np.ndarray:
    """Streams for many registers sharing one polynomial.

    ``init_rows`` is (trials, u); returns (trials, count).  Matches
    :func:`lfsr_stream` row by row.
    """
    u = mask.bit_length() - 1
    trials = init_rows.shape[0]
    if count <= u:
        return init_rows[:, :count].copy()
    blocks = max(1, min(128, (count - u) // u + 1))
    table = _stream_tables(mask, blocks)
    total = u + -(-(count - u) // (blocks * u)) * blocks * u
    out = np.empty((trials, total), dtype=np.uint8)
    w = init_rows.astype(np.uint32)
    out[:, :u] = w
    pos = u
    while pos < count:
        blk = (w @ table.T) % 2
        out[:, pos:pos + blocks * u] = blk
        w = blk[:, -u:].astype(np.uint32)
        pos += blocks * u
    return out[:, :count]


def hash_rows(m_rows: np.ndarray, stream_rows: np.ndarray,
              offset_rows: np.ndarray) -> np.ndarray:
    """Batched tags for per-row (message, stream, offset) triples.

    Matches :func:`hash_message` row by row; streams must have length
    t + u - 1.
    """
    t = m_rows.shape[1]
    u = offset_rows.shape[1]
    tags = np.empty((m_rows.shape[0], u), dtype=np.uint8)
    for j in range(u):
        tags[:, j] = (m_rows & stream_rows[:, j:j + t]).sum(axis=1) & 1
    return tags ^ offset_rows


# ---------------------------------------------------------------------------
# key serialization
# ---------------------------------------------------------------------------

def serialize_key(key: LfsrHashKey) -> str:
    """Hex encoding of the 3u key bits.

    Layout: u free polynomial coefficients (x^0 first), then the
    initial state a_0..a_{u-1}, then the offset b_0..b_{u-1}; packed
    with bit 0 as MSB of the first nibble.
    """
    u = key.u
    coeffs = np.array([(key.poly.mask >> j) & 1 for j in range(u)],
                      dtype=np.uint8)
    bits = np.concatenate([coeffs, key.init.bits, key.offset.bits])
    return BitVector(bits).to_hex()


def deserialize_key(text: str, u: int) -> LfsrHashKey:
    """Inverse of :func:`serialize_key` for a known tag length."""
    bits = BitVector.from_hex(text, 3 * u).bits
    mask = 1 << u
    for j in range(u):
        mask |= int(bits[j]) << j
    return LfsrHashKey(GenPoly(mask), BitVector(bits[u:2 * u].copy()),
                       BitVector(bits[2 * u:].copy()))


def key_bit_length(key: LfsrHashKey) -> int:
    """Serialized key size in bits; always exactly 3u."""
    return 3 * key.u
