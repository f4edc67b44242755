"""End-to-end authentication rounds: tag, secure-encode, transmit, verify.

The message itself travels over a public noiseless channel (an
adversary may replace it verbatim); only the tag codeword crosses the
wiretap pair.  Multiple rounds reuse one shared key.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .bits import BitVector, RngSeed, random_bits
from .channel import BscParam, WiretapChannel, transmit
from .errors import InsufficientSecureCapacityError, LengthMismatchError
from .lfsr_hash import HashParams, LfsrHashKey, generate_key, hash_message
from .polar import PolarParams
from .secure_code import (PartitionParams, SecurePolarCode, secure_decode,
                          secure_encode)


@dataclass(frozen=True)
class ProtocolConfig:
    """Everything both endpoints agree on ahead of time."""

    wc: WiretapChannel
    pp: PolarParams
    params: PartitionParams
    hp: HashParams
    key: LfsrHashKey
    code: SecurePolarCode

    def __post_init__(self):
        if self.hp.u != self.key.u:
            raise LengthMismatchError(
                f"tag length {self.hp.u} != key degree {self.key.u}")
        if self.hp.u > self.code.info_size:
            raise InsufficientSecureCapacityError(
                f"tag needs {self.hp.u} payload positions, code offers "
                f"{self.code.info_size}")


def build_config(p: float, q: float, r: int, beta: float, gamma: float,
                 t: int, u: int, seed: RngSeed,
                 key: LfsrHashKey | None = None,
                 sigma_override: float | None = None) -> ProtocolConfig:
    """Derive the partition for the given parameters and pick a key.

    Fails with :class:`InsufficientSecureCapacityError` when the secure
    set cannot carry a u-bit tag.
    """
    hp = HashParams(t, u)
    wc = WiretapChannel(BscParam(p), BscParam(q))
    pp = PolarParams(r)
    params = PartitionParams(beta, gamma, sigma_override)
    code = SecurePolarCode(wc, pp, params)
    if code.info_size < u:
        raise InsufficientSecureCapacityError(
            f"|A| = {code.info_size} < u = {u} at n={pp.n}, p={p}, q={q}")
    if key is None:
        key = generate_key(u, seed.derive(1001))
    return ProtocolConfig(wc, pp, params, hp, key, code)


def tag_payload(tag: BitVector, cfg: ProtocolConfig, seed: RngSeed) -> BitVector:
    """Tag followed by seeded random fill up to the payload width |A|."""
    fill = random_bits(cfg.code.info_size - len(tag), seed)
    return BitVector(np.concatenate([tag.bits, fill.bits]))


def authenticate_send(m: BitVector, cfg: ProtocolConfig,
                      seed: RngSeed) -> tuple[BitVector, BitVector]:
    """Alice's round: (message, tag codeword)."""
    if len(m) != cfg.hp.t:
        raise LengthMismatchError(f"message length {len(m)} != t {cfg.hp.t}")
    tag = hash_message(m, cfg.key, cfg.hp)
    payload = tag_payload(tag, cfg, seed.derive(1))
    return m, secure_encode(payload, cfg.code, seed.derive(2))


def verify(m_rx: BitVector, y: BitVector, cfg: ProtocolConfig) -> bool:
    """Bob's decision: decode the tag and compare against the received
    message's hash.  Any structural decode failure maps to reject."""
    if len(m_rx) != cfg.hp.t:
        return False
    try:
        payload = secure_decode(y, cfg.code)
    except ValueError:
        return False
    decoded_tag = BitVector(payload.bits[:cfg.hp.u].copy())
    return decoded_tag == hash_message(m_rx, cfg.key, cfg.hp)


@dataclass(frozen=True)
class RoundTranscript:
    """Everything observable in one protocol round."""

    m_sent: BitVector
    m_received: BitVector
    codeword: BitVector
    y_bob: BitVector
    z_eve: BitVector
    decision: str  # "accept" | "reject"

    def to_json_dict(self) -> dict:
        return {
            "m_sent": self.m_sent.to_hex(),
            "m_received": self.m_received.to_hex(),
            "codeword": self.codeword.to_hex(),
            "y_bob": self.y_bob.to_hex(),
            "z_eve": self.z_eve.to_hex(),
            "t": len(self.m_sent),
            "n": len(self.codeword),
            "decision": self.decision,
        }


def run_session(msgs, cfg: ProtocolConfig, seed: RngSeed) -> list[RoundTranscript]:
    """Authenticate a message sequence with one key, no adversary.

    Per round the message is delivered verbatim, the codeword crosses
    both channels, and Bob verifies.  Bit-identical per seed.
    """
    transcripts = []
    for j, m in enumerate(msgs):
        m_sent, x = authenticate_send(m, cfg, seed.derive(j, 0))
        y = transmit(x, cfg.wc.main, seed.derive(j, 1))
        z = transmit(x, cfg.wc.eve, seed.derive(j, 2))
        decision = "accept" if verify(m_sent, y, cfg) else "reject"
        transcripts.append(RoundTranscript(m_sent, m_sent, x, y, z, decision))
    return transcripts


def authentication_rate(cfg: ProtocolConfig) -> float:
    """Message bits authenticated per wiretap-channel use, t / n."""
    return cfg.hp.t / cfg.pp.n


def write_transcripts_jsonl(transcripts, path) -> None:
    """One JSON object per line, vectors hex-encoded."""
    with open(path, "w") as fh:
        for tr in transcripts:
            fh.write(json.dumps(tr.to_json_dict()) + "\n")
