"""Batch experiment runners emitting CSV/JSON rows for plotting.

Every run is deterministic given its seed, and every output starts
with a provenance header naming all parameters.  Timing columns are
wall-clock medians and naturally vary between machines and runs; all
other columns are byte-reproducible.
"""

from __future__ import annotations

import csv
import io
import json
import time
from dataclasses import dataclass, field
from statistics import median

import numpy as np

from . import __version__
from .bits import BitVector, RngSeed
from .channel import BscParam, WiretapChannel, secrecy_capacity, transmit_rows
from .errors import DomainError
from .lfsr_hash import HashParams, hash_message, hash_rows, lfsr_stream
from .polar import PolarParams
from .protocol import build_config
from .secure_code import (PartitionParams, SecurePolarCode, secrecy_rate,
                          secure_decode, secure_decode_rows, secure_encode,
                          secure_encode_rows)

DEFAULT_N_VALUES = (512, 1024, 2048, 4096, 8192)
DEFAULT_CHANNEL_PAIRS = ((0.1, 0.2), (0.1, 0.3), (0.1, 0.4),
                         (0.2, 0.3), (0.2, 0.4), (0.3, 0.4))


@dataclass(frozen=True)
class Scenario:
    """One row of the simulation-scenario table."""

    label: str
    p: float
    q: float
    t: int  # message length L(M)
    u: int  # tag length L(S)

    @property
    def key_bits(self) -> int:
        return 3 * self.u


SCENARIOS = {
    "A": Scenario("A", 0.1, 0.2, 2 ** 25, 101),
    "B": Scenario("B", 0.1, 0.3, 2 ** 25, 101),
    "C": Scenario("C", 0.1, 0.4, 2 ** 25, 101),
    "D": Scenario("D", 0.2, 0.3, 2 ** 20, 64),
    "E": Scenario("E", 0.2, 0.4, 2 ** 20, 64),
    "F": Scenario("F", 0.3, 0.4, 2 ** 20, 64),
}

SWEEP_VARIABLES = ("n", "beta", "gamma", "q")


@dataclass(frozen=True)
class SweepSpec:
    """A parameter grid over one variable with the rest held fixed."""

    variable: str
    grid: tuple
    fixed: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.variable not in SWEEP_VARIABLES:
            raise DomainError(f"sweep variable must be one of {SWEEP_VARIABLES}")
        if not self.grid:
            raise DomainError("sweep grid must be nonempty")
        object.__setattr__(self, "grid", tuple(self.grid))

    def points(self) -> list[dict]:
        return [{**self.fixed, self.variable: v} for v in self.grid]


def _build_code(p, q, n, beta, gamma, sigma=None) -> SecurePolarCode:
    return SecurePolarCode(WiretapChannel(BscParam(p), BscParam(q)),
                           PolarParams.for_block_length(n),
                           PartitionParams(beta, gamma, sigma))


def _eve_bob_errors(code: SecurePolarCode, trials: int, rng) -> tuple[float, int]:
    """(Eve per-bit error on the payload set, Bob block errors)."""
    k = code.info_size
    payload = rng.integers(0, 2, (trials, k), dtype=np.uint8)
    x = secure_encode_rows(payload, code, rng)
    y = transmit_rows(x, code.wc.main, rng)
    z = transmit_rows(x, code.wc.eve, rng)
    bob = secure_decode_rows(y, code)
    eve = secure_decode_rows(z, code, code.wc.eve)
    bob_block_errors = int((bob != payload).any(axis=1).sum())
    eve_bit_error = float((eve != payload).mean())
    return eve_bit_error, bob_block_errors


def exp_index_sets(n_values=DEFAULT_N_VALUES,
                   channel_pairs=DEFAULT_CHANNEL_PAIRS,
                   beta: float = 0.1, gamma: float = 0.1) -> list[dict]:
    """Partition cardinalities across block lengths and channel pairs."""
    rows = []
    for p, q in channel_pairs:
        for n in n_values:
            sizes = _build_code(p, q, n, beta, gamma).partition.sizes()
            rows.append({"p": p, "q": q, "n": n, "beta": beta, "gamma": gamma,
                         "A": sizes["A"], "B": sizes["B"],
                         "X": sizes["X"], "Y": sizes["Y"]})
    return rows


def exp_secrecy_rate(n_values=DEFAULT_N_VALUES, p: float = 0.1, q: float = 0.3,
                     beta: float = 0.1, gamma: float = 0.1) -> list[dict]:
    """Achieved payload rate |A|/n against the secrecy capacity."""
    wc = WiretapChannel(BscParam(p), BscParam(q))
    cap = secrecy_capacity(wc)
    rows = []
    for n in n_values:
        rate = secrecy_rate(_build_code(p, q, n, beta, gamma))
        rows.append({"p": p, "q": q, "n": n, "rate": rate,
                     "capacity": cap, "gap": cap - rate})
    return rows


def exp_eve_error(labels=("A", "B", "C", "D", "E", "F"),
                  n_values=DEFAULT_N_VALUES, trials: int = 100,
                  beta: float = 0.1, gamma: float = 0.1,
                  seed: RngSeed = RngSeed(0)) -> list[dict]:
    """Eve's per-bit error on the payload positions, per scenario and n.

    Rows whose payload set is empty report a null error rate, mirroring
    the missing bars in the reference results.  Bob's block-error count
    rides along as a sanity column.
    """
    rows = []
    for label in labels:
        sc = SCENARIOS[label]
        for n in n_values:
            code = _build_code(sc.p, sc.q, n, beta, gamma)
            if code.info_size == 0:
                rows.append({"scenario": label, "p": sc.p, "q": sc.q, "n": n,
                             "A": 0, "trials": 0, "eve_bit_error": None,
                             "bob_block_errors": None})
                continue
            rng = seed.derive(ord(label), n).generator()
            eve_err, bob_err = _eve_bob_errors(code, trials, rng)
            rows.append({"scenario": label, "p": sc.p, "q": sc.q, "n": n,
                         "A": code.info_size, "trials": trials,
                         "eve_bit_error": eve_err, "bob_block_errors": bob_err})
    return rows


def exp_beta_gamma(vary: str = "beta", grid=(0.05, 0.1, 0.15, 0.2),
                   fixed_value: float = 0.1, n: int = 8192, p: float = 0.1,
                   q: float = 0.3, trials: int = 50,
                   seed: RngSeed = RngSeed(0)) -> list[dict]:
    """Payload size and Eve error across a beta or gamma sweep."""
    if vary not in ("beta", "gamma"):
        raise DomainError(f"vary must be beta or gamma, got {vary!r}")
    rows = []
    for i, v in enumerate(grid):
        beta, gamma = (v, fixed_value) if vary == "beta" else (fixed_value, v)
        code = _build_code(p, q, n, beta, gamma)
        eve_err = None
        if code.info_size and trials:
            eve_err, _ = _eve_bob_errors(code, trials, seed.derive(i).generator())
        rows.append({"beta": beta, "gamma": gamma, "n": n, "p": p, "q": q,
                     "A": code.info_size, "eve_bit_error": eve_err})
    return rows


def exp_scenarios(trials: int = 100, scale: int = 0,
                  seed: RngSeed = RngSeed(0), r: int = 13,
                  beta: float = 0.1, gamma: float = 0.1,
                  timing_reps: int = 5) -> list[dict]:
    """Completeness, authentication rate, and timing per scenario.

    ``scale`` divides the message length by 2**scale (tag length and
    code unchanged) so desk-scale runs stay fast; the applied scale and
    effective length are recorded.  The authentication-rate column is
    the nominal t/n of the scenario.  Timing columns are medians of
    ``timing_reps`` single-shot calls.
    """
    rows = []
    for label, sc in sorted(SCENARIOS.items()):
        t_eff = max(sc.u + 1, sc.t >> scale)
        cfg = build_config(sc.p, sc.q, r, beta, gamma, t_eff, sc.u,
                           seed.derive(ord(label)))
        code, hp = cfg.code, cfg.hp
        rng = seed.derive(ord(label), 1).generator()
        # completeness over `trials` honest rounds, batched
        msgs = rng.integers(0, 2, (trials, t_eff), dtype=np.uint8)
        stream = lfsr_stream(cfg.key, t_eff + hp.u - 1).bits
        streams = np.broadcast_to(stream, (trials, stream.size))
        offsets = np.broadcast_to(cfg.key.offset.bits, (trials, hp.u))
        tags = hash_rows(msgs, streams, offsets)
        fill = rng.integers(0, 2, (trials, code.info_size - hp.u), dtype=np.uint8)
        x = secure_encode_rows(np.concatenate([tags, fill], axis=1), code, rng)
        y = transmit_rows(x, cfg.wc.main, rng)
        decoded = secure_decode_rows(y, code)[:, :hp.u]
        accepts = int((decoded == tags).all(axis=1).sum())

        # single-shot wall-clock medians
        m1 = BitVector(msgs[0])
        tag_time = _timed(lambda: hash_message(m1, cfg.key, hp), timing_reps)
        payload = BitVector(np.concatenate([tags[0], fill[0]]))
        enc_seed = seed.derive(ord(label), 2)
        encode_time = _timed(lambda: secure_encode(payload, code, enc_seed),
                             timing_reps)
        y0 = BitVector(y[0])
        decode_time = _timed(lambda: secure_decode(y0, code), timing_reps)

        rows.append({
            "scenario": label, "p": sc.p, "q": sc.q, "n": code.n,
            "t": sc.t, "u": sc.u, "key_bits": sc.key_bits,
            "scale": scale, "t_effective": t_eff,
            "trials": trials, "accepts": accepts, "rejects": trials - accepts,
            "auth_rate": sc.t / code.n,
            "epsilon_nominal": HashParams(sc.t, sc.u).epsilon,
            "tag_time_s": tag_time, "encode_time_s": encode_time,
            "decode_time_s": decode_time,
        })
    return rows


def _timed(fn, reps: int) -> float:
    samples = []
    for _ in range(reps):
        t0 = time.perf_counter()
        fn()
        samples.append(time.perf_counter() - t0)
    return median(samples)


# ---------------------------------------------------------------------------
# output
# ---------------------------------------------------------------------------

def provenance_header(name: str, params: dict) -> list[str]:
    items = " ".join(f"{k}={v}" for k, v in sorted(params.items()))
    return [f"# wiretap-auth {__version__} experiment={name}",
            f"# {items}" if items else "#"]


def rows_to_csv(rows: list[dict], name: str, params: dict) -> str:
    """CSV text with a provenance comment header."""
    buf = io.StringIO()
    for line in provenance_header(name, params):
        buf.write(line + "\n")
    if rows:
        writer = csv.DictWriter(buf, fieldnames=list(rows[0].keys()))
        writer.writeheader()
        for row in rows:
            writer.writerow({k: ("" if v is None else v) for k, v in row.items()})
    return buf.getvalue()


def rows_to_json(rows: list[dict], name: str, params: dict) -> str:
    return json.dumps({"experiment": name, "version": __version__,
                       "params": params, "rows": rows}, indent=2) + "\n"


def write_rows(rows: list[dict], name: str, params: dict, path,
               fmt: str = "csv") -> None:
    text = rows_to_csv(rows, name, params) if fmt == "csv" \
        else rows_to_json(rows, name, params)
    with open(path, "w") as fh:
        fh.write(text)
