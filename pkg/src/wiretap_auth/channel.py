"""Binary symmetric channels and wiretap-channel information quantities."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bits import BitVector, RngSeed
from .errors import DomainError, NoPositiveSecrecyError


@dataclass(frozen=True)
class BscParam:
    """Binary symmetric channel with crossover probability in [0, 0.5].

    Callers wanting a crossover above one half must relabel outputs
    first; only the canonical form is represented.
    """

    crossover: float

    def __post_init__(self):
        if not 0.0 <= self.crossover <= 0.5:
            raise DomainError(f"crossover must be in [0, 0.5], got {self.crossover}")


@dataclass(frozen=True)
class WiretapChannel:
    """Pair of BSCs: ``main`` toward the receiver, ``eve`` toward the tap.

    ``positive_secrecy`` records whether the eavesdropper's channel is
    strictly noisier (q > p); construction with q <= p is allowed but
    flagged through that attribute.
    """

    main: BscParam
    eve: BscParam

    @property
    def positive_secrecy(self) -> bool:
        return self.eve.crossover > self.main.crossover


def transmit(x: BitVector, ch: BscParam, seed: RngSeed) -> BitVector:
    """Send ``x`` through the BSC: each bit flips independently with
    probability ``ch.crossover``; deterministic per seed."""
    flips = seed.generator().random(len(x)) < ch.crossover
    return BitVector(x.bits ^ flips.astype(np.uint8))


def transmit_rows(rows: np.ndarray, ch: BscParam, rng: np.random.Generator) -> np.ndarray:
    """Batch form of :func:`transmit` on a (trials, n) uint8 array."""
    flips = rng.random(rows.shape) < ch.crossover
    return rows ^ flips.astype(np.uint8)


def binary_entropy(p: float) -> float:
    """h(p) = -p log2 p - (1-p) log2 (1-p) in bits, with 0 log 0 := 0."""
    if not 0.0 <= p <= 1.0:
        raise DomainError(f"probability must be in [0, 1], got {p}")
    if p in (0.0, 1.0):
        return 0.0
    return -p * math.log2(p) - (1.0 - p) * math.log2(1.0 - p)


def secrecy_capacity(wc: WiretapChannel) -> float:
    """Secrecy capacity h(q) - h(p) of the binary symmetric wiretap pair.

    Uniform input maximizes both mutual informations for symmetric
    channels, so the maximization over input distributions reduces to
    this closed form.  Requires q >= p.
    """
    p, q = wc.main.crossover, wc.eve.crossover
    if q < p:
        raise NoPositiveSecrecyError(
            f"eavesdropper crossover {q} below main crossover {p}")
    return binary_entropy(q) - binary_entropy(p)
