"""Concrete attacker strategies and Monte-Carlo success estimation.

The optimal adversary would need the exact key posterior given all
observed rounds, which is exponential in the key length; the strategies
here are restricted but run the honest verification pipeline end to
end.  None of them reads the key: they use only the public code
structure and whatever crossed the eavesdropper channel.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bits import BitVector, RngSeed, random_bits
from .channel import transmit_rows
from .errors import DomainError
from .lfsr_hash import (CURATED_POLYS, EXACT_CHECK_MAX_DEGREE,
                        _primitive_polys_up_to_degree_12, epsilon_bound,
                        hash_rows, lfsr_stream_rows)
from .protocol import ProtocolConfig, RoundTranscript
from .secure_code import (secure_decode, secure_decode_rows,
                          secure_encode, secure_encode_rows)

KINDS = ("impersonation", "substitution_type1", "substitution_type2")
VARIANTS_BY_KIND = {
    "impersonation": ("random_tag", "replay_codeword", "eve_decode_reuse"),
    "substitution_type1": ("bitflip_message",),
    "substitution_type2": ("random_tag", "eve_decode_reuse"),
}


@dataclass(frozen=True)
class AttackStrategy:
    """One (attack kind, concrete behaviour) pair.

    Type I substitutions never alter the tag transmission Bob already
    received; impersonations act before Alice's round.
    """

    kind: str
    variant: str

    def __post_init__(self):
        if self.kind not in KINDS:
            raise DomainError(f"unknown attack kind {self.kind!r}")
        if self.variant not in VARIANTS_BY_KIND[self.kind]:
            raise DomainError(
                f"variant {self.variant!r} not valid for {self.kind}")

    def __str__(self) -> str:
        return f"{self.kind}/{self.variant}"


def all_strategies() -> list[AttackStrategy]:
    return [AttackStrategy(k, v) for k in KINDS for v in VARIANTS_BY_KIND[k]]


@dataclass(frozen=True)
class AttackOutcome:
    """Monte-Carlo attack statistics with a Wilson 95% interval."""

    rounds: int
    successes: int
    success_rate: float
    wilson_ci: tuple[float, float]
    epsilon_bound: float = float("nan")
    note: str = ""

    def __post_init__(self):
        if self.successes > self.rounds or self.successes < 0:
            raise ValueError("successes must lie in [0, rounds]")


#: Returned when asked to estimate "success" of the honest protocol.
NOT_AN_ATTACK = AttackOutcome(0, 0, float("nan"), (0.0, 1.0),
                              note="not-an-attack")


def wilson_interval(successes: int, rounds: int, z: float = 1.959964) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion."""
    if rounds == 0:
        return (0.0, 1.0)
    phat = successes / rounds
    denom = 1.0 + z * z / rounds
    center = (phat + z * z / (2 * rounds)) / denom
    half = z * math.sqrt(phat * (1 - phat) / rounds
                         + z * z / (4 * rounds * rounds)) / denom
    return (max(0.0, center - half), min(1.0, center + half))


# ---------------------------------------------------------------------------
# single-round attack constructions
# ---------------------------------------------------------------------------

def _encode_guess(guess: BitVector, cfg: ProtocolConfig, seed: RngSeed) -> BitVector:
    """Embed a u-bit tag guess into a codeword using only public structure."""
    fill = random_bits(cfg.code.info_size - len(guess), seed.derive(1))
    payload = BitVector(np.concatenate([guess.bits, fill.bits]))
    return secure_encode(payload, cfg.code, seed.derive(2))


def _eve_tag_estimate(z_eve: BitVector, cfg: ProtocolConfig) -> BitVector:
    payload = secure_decode(z_eve, cfg.code, cfg.wc.eve)
    return BitVector(payload.bits[:cfg.hp.u].copy())


def impersonate(strategy: AttackStrategy, history, cfg: ProtocolConfig,
                seed: RngSeed, eve_payload: BitVector | None = None):
    """Forge a (message, channel word) pair before Alice's round.

    random_tag guesses the tag uniformly; replay_codeword resends the
    eavesdropper's noisy copy of an earlier round under the original
    message; eve_decode_reuse decodes that copy and re-embeds the tag
    estimate under a fresh message.  With no history both replay
    variants fall back to random_tag.
    """
    if strategy.kind != "impersonation":
        raise DomainError(f"not an impersonation strategy: {strategy}")
    variant = strategy.variant
    if variant != "random_tag" and not history:
        variant = "random_tag"
    if variant == "random_tag":
        m_o = random_bits(cfg.hp.t, seed.derive(10))
        guess = random_bits(cfg.hp.u, seed.derive(11))
        return m_o, _encode_guess(guess, cfg, seed.derive(12))
    prior = history[-1]
    if variant == "replay_codeword":
        return prior.m_sent.copy(), prior.z_eve.copy()
    # eve_decode_reuse
    est = eve_payload if eve_payload is not None \
        else _eve_tag_estimate(prior.z_eve, cfg)
    m_o = random_bits(cfg.hp.t, seed.derive(13))
    return m_o, _encode_guess(est, cfg, seed.derive(14))


def substitute_type1(m_j: BitVector, history, cfg: ProtocolConfig,
                     seed: RngSeed) -> BitVector:
    """Replace the message while Bob's received channel word stays as
    transmitted; bitflip_message flips one uniformly chosen bit, so the
    result always differs from m_j."""
    if len(m_j) == 0:
        raise DomainError("cannot substitute an empty message")
    pos = int(seed.generator().integers(len(m_j)))
    m_o = m_j.copy()
    m_o[pos] ^= 1
    return m_o


def substitute_type2(history, cfg: ProtocolConfig, seed: RngSeed,
                     strategy: AttackStrategy | None = None,
                     eve_payload: BitVector | None = None):
    """Forge both message and channel word after observing round j.

    eve_decode_reuse re-encodes Eve's tag estimate for a fresh message;
    random_tag pairs a fresh message with a uniform tag guess.
    """
    if not history:
        raise DomainError("type II substitution needs an observed round")
    variant = strategy.variant if strategy is not None else "eve_decode_reuse"
    prior = history[-1]
    m_o = random_bits(cfg.hp.t, seed.derive(20))
    if m_o == prior.m_sent:  # vanishing chance; force the inequality
        m_o[0] ^= 1
    if variant == "random_tag":
        guess = random_bits(cfg.hp.u, seed.derive(21))
    else:
        guess = eve_payload if eve_payload is not None \
            else _eve_tag_estimate(prior.z_eve, cfg)
    return m_o, _encode_guess(guess, cfg, seed.derive(22))


# ---------------------------------------------------------------------------
# Monte-Carlo estimation
# ---------------------------------------------------------------------------

def _sample_key_arrays(u: int, count: int, rng: np.random.Generator):
    """Fresh uniform key material as arrays: (poly masks, inits, offsets)."""
    if u in CURATED_POLYS:
        choices = (CURATED_POLYS[u],)
        masks = np.array(choices, dtype=object)[np.zeros(count, dtype=np.int64)]
    elif u <= 12:
        choices = _primitive_polys_up_to_degree_12(u)
        masks = np.array(choices, dtype=object)[rng.integers(len(choices), size=count)]
    elif u <= EXACT_CHECK_MAX_DEGREE:
        # rejection sampling stays uniform over the primitive set
        from .lfsr_hash import _is_primitive
        picked = []
        while len(picked) < count:
            mask = (1 << u) | 1 | (int(rng.integers(1 << (u - 1))) << 1)
            if _is_primitive(mask):
                picked.append(mask)
        masks = np.array(picked, dtype=object)
    else:
        raise DomainError(f"no curated polynomial of degree {u}")
    inits = rng.integers(0, 2, (count, u), dtype=np.uint8)
    zero = ~inits.any(axis=1)
    inits[zero, rng.integers(u, size=int(zero.sum()))] = 1
    offsets = rng.integers(0, 2, (count, u), dtype=np.uint8)
    return masks, inits, offsets


def _streams_for(masks, inits, count):
    """Per-row LFSR streams, grouped by polynomial."""
    out = np.empty((inits.shape[0], count), dtype=np.uint8)
    for mask in set(masks.tolist()):
        rows = np.flatnonzero(masks == mask)
        out[rows] = lfsr_stream_rows(mask, inits[rows], count)
    return out


def estimate_success(strategy: AttackStrategy | None, cfg: ProtocolConfig,
                     rounds: int, seed: RngSeed,
                     chunk_size: int = 4096) -> AttackOutcome:
    """Monte-Carlo success rate of a strategy against the protocol.

    Every round is an independent session with a fresh uniform key; the
    attack is mounted once and success means Bob accepts (for
    substitutions, additionally that the delivered message differs from
    the honest one).  Rounds are processed in seed-derived chunks whose
    verification work is batched; results are reproducible per seed.

    ``strategy=None`` is the honest protocol: there is nothing to
    succeed at, so the sentinel :data:`NOT_AN_ATTACK` comes back.
    """
    if strategy is None:
        return NOT_AN_ATTACK
    eps = epsilon_bound(cfg.hp)
    if rounds <= 0:
        return AttackOutcome(0, 0, 0.0, (0.0, 1.0), eps, str(strategy))
    t, u = cfg.hp.t, cfg.hp.u
    code = cfg.code
    successes = 0
    done = 0
    chunk_idx = 0
    needs_history = not (strategy.kind == "impersonation"
                         and strategy.variant == "random_tag")
    needs_eve = strategy.variant == "eve_decode_reuse"
    while done < rounds:
        c = min(chunk_size, rounds - done)
        cseed = seed.derive(chunk_idx)
        rng = cseed.generator()
        masks, inits, offsets = _sample_key_arrays(u, c, rng)
        streams = _streams_for(masks, inits, t + u - 1)
        m_honest = rng.integers(0, 2, (c, t), dtype=np.uint8)
        tags = hash_rows(m_honest, streams, offsets)
        fill = rng.integers(0, 2, (c, code.info_size - u), dtype=np.uint8)
        x_rows = secure_encode_rows(np.concatenate([tags, fill], axis=1),
                                    code, rng)
        y_rows = transmit_rows(x_rows, cfg.wc.main, rng)
        z_rows = transmit_rows(x_rows, cfg.wc.eve, rng)
        eve_rows = (secure_decode_rows(z_rows, code, cfg.wc.eve)[:, :u]
                    if needs_eve else None)

        m_attack = np.empty((c, t), dtype=np.uint8)
        y_attack = None if strategy.kind == "substitution_type1" \
            else np.empty((c, code.n), dtype=np.uint8)
        for i in range(c):
            rseed = cseed.derive(i)
            history = []
            if needs_history:
                history.append(RoundTranscript(
                    BitVector(m_honest[i]), BitVector(m_honest[i]),
                    BitVector(x_rows[i]), BitVector(y_rows[i]),
                    BitVector(z_rows[i]), "accept"))
            est = BitVector(eve_rows[i]) if needs_eve else None
            if strategy.kind == "impersonation":
                m_o, y_o = impersonate(strategy, history, cfg, rseed,
                                       eve_payload=est)
                m_attack[i], y_attack[i] = m_o.bits, y_o.bits
            elif strategy.kind == "substitution_type1":
                m_o = substitute_type1(BitVector(m_honest[i]), history,
                                       cfg, rseed)
                m_attack[i] = m_o.bits
            else:
                m_o, y_o = substitute_type2(history, cfg, rseed,
                                            strategy, eve_payload=est)
                m_attack[i], y_attack[i] = m_o.bits, y_o.bits

        # Bob's side, batched: decode what he received, hash what the
        # attacker delivered, compare
        received = y_rows if strategy.kind == "substitution_type1" else y_attack
        decoded_tags = secure_decode_rows(received, code)[:, :u]
        attack_tags = hash_rows(m_attack, streams, offsets)
        accept = (decoded_tags == attack_tags).all(axis=1)
        if strategy.kind != "impersonation":
            accept &= (m_attack != m_honest).any(axis=1)
        successes += int(accept.sum())
        done += c
        chunk_idx += 1
    rate = successes / rounds
    return AttackOutcome(rounds, successes, rate,
                         wilson_interval(successes, rounds), eps,
                         str(strategy))


def export_outcomes_csv(rows, path) -> None:
    """Write (scenario, outcome) pairs as CSV."""
    import csv

    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["scenario", "strategy", "rounds", "successes",
                         "rate", "ci_lo", "ci_hi", "epsilon_bound"])
        for scenario, outcome in rows:
            writer.writerow([
                scenario, outcome.note, outcome.rounds, outcome.successes,
                repr(float(outcome.success_rate)),
                repr(float(outcome.wilson_ci[0])),
                repr(float(outcome.wilson_ci[1])),
                repr(float(outcome.epsilon_bound)),
            ])
