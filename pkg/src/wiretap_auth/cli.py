"""Command-line front end.

Vectors are written as hex; inputs accept either a plain binary string
("1010...") or hex with an 0x prefix.  Exit code 0 on success, 2 on
parameter errors.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import __version__
from .adversary import AttackStrategy, estimate_success, export_outcomes_csv
from .bits import BitVector, RngSeed, random_bits
from .channel import BscParam, WiretapChannel
from .errors import DomainError
from .experiments import (DEFAULT_N_VALUES, SCENARIOS, exp_beta_gamma,
                          exp_eve_error, exp_index_sets, exp_scenarios,
                          exp_secrecy_rate, rows_to_csv, rows_to_json,
                          write_rows)
from .lfsr_hash import (HashParams, deserialize_key, generate_key,
                        hash_message, serialize_key)
from .polar import PolarParams
from .protocol import (build_config, run_session, write_transcripts_jsonl)
from .secure_code import (PartitionParams, SecurePolarCode, export_partition,
                          secure_decode, secure_encode)


def _parse_bits(text: str, length: int | None = None) -> BitVector:
    if text.startswith(("0x", "0X")):
        return BitVector.from_hex(text[2:], length)
    return BitVector.from_string(text)


def _add_channel_args(p: argparse.ArgumentParser):
    p.add_argument("--p", type=float, required=True, help="main channel crossover")
    p.add_argument("--q", type=float, required=True, help="eavesdropper crossover")
    p.add_argument("--n", type=int, required=True, help="block length (power of two)")
    p.add_argument("--beta", type=float, default=0.1)
    p.add_argument("--gamma", type=float, default=0.1)
    p.add_argument("--sigma", type=float, default=None,
                   help="override the eavesdropper capacity threshold")


def _code_from(args) -> SecurePolarCode:
    return SecurePolarCode(WiretapChannel(BscParam(args.p), BscParam(args.q)),
                           PolarParams.for_block_length(args.n),
                           PartitionParams(args.beta, args.gamma, args.sigma))


def _emit(args, text: str):
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_partition(args) -> int:
    code = _code_from(args)
    if args.out:
        export_partition(code, args.out)
    summary = {"n": code.n, "sizes": code.partition.sizes(),
               "secrecy_rate": code.info_size / code.n,
               "sigma": code.params.sigma(code.n)}
    sys.stdout.write(json.dumps(summary) + "\n")
    return 0


def cmd_hash(args) -> int:
    hp = HashParams(args.t, args.u)
    seed = RngSeed(args.seed)
    key = deserialize_key(args.key, args.u) if args.key \
        else generate_key(args.u, seed)
    m = _parse_bits(args.message, args.t) if args.message \
        else random_bits(args.t, seed.derive(1))
    tag = hash_message(m, key, hp)
    out = {"tag": tag.to_hex(), "key": serialize_key(key),
           "epsilon": hp.epsilon}
    _emit(args, json.dumps(out) + "\n")
    return 0


def cmd_encode(args) -> int:
    code = _code_from(args)
    payload = _parse_bits(args.payload, code.info_size) if args.payload \
        else random_bits(code.info_size, RngSeed(args.seed).derive(1))
    x = secure_encode(payload, code, RngSeed(args.seed))
    _emit(args, json.dumps({"codeword": x.to_hex(), "n": code.n,
                            "payload_bits": code.info_size}) + "\n")
    return 0


def cmd_decode(args) -> int:
    code = _code_from(args)
    y = _parse_bits(args.received, args.n)
    ch = code.wc.eve if args.eve else None
    payload = secure_decode(y, code, ch)
    _emit(args, json.dumps({"payload": payload.to_hex(),
                            "payload_bits": len(payload)}) + "\n")
    return 0


def cmd_authenticate(args) -> int:
    seed = RngSeed(args.seed)
    r = args.n.bit_length() - 1
    cfg = build_config(args.p, args.q, r, args.beta, args.gamma,
                       args.t, args.u, seed, sigma_override=args.sigma)
    rng = seed.derive(7).generator()
    msgs = [BitVector(rng.integers(0, 2, args.t, dtype=np.uint8))
            for _ in range(args.rounds)]
    transcripts = run_session(msgs, cfg, seed.derive(8))
    accepts = sum(tr.decision == "accept" for tr in transcripts)
    if args.out:
        write_transcripts_jsonl(transcripts, args.out)
    sys.stdout.write(json.dumps({"rounds": args.rounds, "accepts": accepts,
                                 "rejects": args.rounds - accepts,
                                 "auth_rate": args.t / args.n}) + "\n")
    return 0


def cmd_attack(args) -> int:
    seed = RngSeed(args.seed)
    r = args.n.bit_length() - 1
    cfg = build_config(args.p, args.q, r, args.beta, args.gamma,
                       args.t, args.u, seed, sigma_override=args.sigma)
    strategy = AttackStrategy(args.kind, args.variant)
    outcome = estimate_success(strategy, cfg, args.rounds, seed.derive(9))
    if args.out:
        export_outcomes_csv([(f"p={args.p},q={args.q},n={args.n}", outcome)],
                            args.out)
    sys.stdout.write(json.dumps({
        "strategy": str(strategy), "rounds": outcome.rounds,
        "successes": outcome.successes, "rate": outcome.success_rate,
        "ci": list(outcome.wilson_ci), "epsilon_bound": outcome.epsilon_bound,
    }) + "\n")
    return 0


def cmd_experiment(args) -> int:
    seed = RngSeed(args.seed)
    name = args.name
    params = {"seed": args.seed}
    if name == "index-sets":
        rows = exp_index_sets(n_values=args.n_list)
        params["n_values"] = list(args.n_list)
    elif name == "secrecy-rate":
        rows = exp_secrecy_rate(n_values=args.n_list, p=args.p, q=args.q)
        params.update(p=args.p, q=args.q, n_values=list(args.n_list))
    elif name == "eve-error":
        rows = exp_eve_error(labels=args.scenarios, n_values=args.n_list,
                             trials=args.trials, seed=seed)
        params.update(scenarios=",".join(args.scenarios), trials=args.trials)
    elif name == "beta-gamma":
        rows = exp_beta_gamma(vary=args.vary, grid=args.grid,
                              trials=args.trials, seed=seed)
        params.update(vary=args.vary, trials=args.trials)
    elif name == "scenarios":
        rows = exp_scenarios(trials=args.trials, scale=args.scale, seed=seed)
        params.update(trials=args.trials, scale=args.scale)
    else:
        raise DomainError(f"unknown experiment {name!r}")
    if args.out:
        write_rows(rows, name, params, args.out, args.format)
    else:
        text = rows_to_csv(rows, name, params) if args.format == "csv" \
            else rows_to_json(rows, name, params)
        sys.stdout.write(text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="wiretap-auth",
        description="Authentication over a binary symmetric wiretap channel")
    ap.add_argument("--version", action="version", version=__version__)
    ap.add_argument("--seed", type=int, default=0, help="master RNG seed")
    ap.add_argument("--out", default=None, help="output file path")
    ap.add_argument("--format", choices=("csv", "json"), default="csv")
    ap.add_argument("--scale", type=int, default=0,
                    help="divide message lengths by 2**scale")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("partition", help="derive and export an index partition")
    _add_channel_args(p)
    p.set_defaults(func=cmd_partition)

    p = sub.add_parser("hash", help="tag a message")
    p.add_argument("--t", type=int, required=True)
    p.add_argument("--u", type=int, required=True)
    p.add_argument("--key", default=None, help="hex key (3u bits)")
    p.add_argument("--message", default=None,
                   help="binary string or 0x-prefixed hex; random if omitted")
    p.set_defaults(func=cmd_hash)

    p = sub.add_parser("encode", help="secure-encode a payload")
    _add_channel_args(p)
    p.add_argument("--payload", default=None,
                   help="binary string or 0x-hex of |A| bits; random if omitted")
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("decode", help="decode a received block")
    _add_channel_args(p)
    p.add_argument("--received", required=True,
                   help="binary string or 0x-prefixed hex of n bits")
    p.add_argument("--eve", action="store_true",
                   help="decode with the eavesdropper's channel law")
    p.set_defaults(func=cmd_decode)

    p = sub.add_parser("authenticate", help="run honest protocol rounds")
    _add_channel_args(p)
    p.add_argument("--t", type=int, required=True)
    p.add_argument("--u", type=int, required=True)
    p.add_argument("--rounds", type=int, default=10)
    p.set_defaults(func=cmd_authenticate)

    p = sub.add_parser("attack", help="estimate an attacker's success rate")
    _add_channel_args(p)
    p.add_argument("--t", type=int, required=True)
    p.add_argument("--u", type=int, required=True)
    p.add_argument("--kind", required=True,
                   choices=("impersonation", "substitution_type1",
                            "substitution_type2"))
    p.add_argument("--variant", required=True)
    p.add_argument("--rounds", type=int, default=1000)
    p.set_defaults(func=cmd_attack)

    p = sub.add_parser("experiment", help="run a batch experiment")
    p.add_argument("name", choices=("index-sets", "secrecy-rate", "eve-error",
                                    "beta-gamma", "scenarios"))
    p.add_argument("--n-list", type=int, nargs="+", default=list(DEFAULT_N_VALUES))
    p.add_argument("--p", type=float, default=0.1)
    p.add_argument("--q", type=float, default=0.3)
    p.add_argument("--scenarios", nargs="+", default=list(SCENARIOS),
                   choices=list(SCENARIOS))
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--vary", choices=("beta", "gamma"), default="beta")
    p.add_argument("--grid", type=float, nargs="+",
                   default=[0.05, 0.1, 0.15, 0.2])
    p.set_defaults(func=cmd_experiment)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
