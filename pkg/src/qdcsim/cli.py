"""Command-line front end.

Exit codes: 0 success, 1 usage error, 2 protocol/authentication abort (or
a run that did not reproduce the message), 3 verification mismatch.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import secrets
import sys
from pathlib import Path

import numpy as np

from . import adversary, auth, densecode, identities, proto
from .bitstr import bits_to_hex, bits_to_str, parse_message
from .errors import InvalidArgument

EXIT_OK, EXIT_USAGE, EXIT_ABORT, EXIT_MISMATCH = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _bool(text: str) -> bool:
    t = text.lower()
    if t in ("true", "1", "yes", "on"):
        return True
    if t in ("false", "0", "no", "off"):
        return False
    raise argparse.ArgumentTypeError(f"expected true/false, got {text!r}")


def _fraction(text: str) -> float:
    v = float(text)
    if not 0 < v < 1:
        raise argparse.ArgumentTypeError("must lie strictly between 0 and 1")
    return v


def resolve_seed(seed: int | None) -> int:
    if seed is not None:
        return seed
    env = os.environ.get("QDC_SIM_SEED")
    if env:
        return int(env, 0)
    return secrets.randbits(63)


def _emit(payload: dict, out: str | None, summary: str) -> None:
    text = json.dumps(payload, sort_keys=True, indent=1) + "\n"
    if out:
        Path(out).write_text(text)
        print(summary)
    else:
        sys.stdout.write(text)


def auth_states_for(needed: int, check_fraction: float) -> int:
    n = needed
    while n - math.ceil(check_fraction * n) < needed:
        n += 1
    return n


# ------------------------------------------------------------ run


def _show(bits) -> str:
    return "0x" + bits_to_hex(bits) if len(bits) % 4 == 0 else bits_to_str(bits)


def cmd_run(args) -> int:
    seed = resolve_seed(args.seed)
    multiparty = args.variant in ("mp1", "mp2")
    try:
        if multiparty:
            if args.message is not None or args.message_a is None or args.message_b is None:
                raise InvalidArgument("mp1/mp2 take --message-a and --message-b")
            msg_a, msg_b = parse_message(args.message_a), parse_message(args.message_b)
        else:
            if args.message is None or args.message_a is not None or args.message_b is not None:
                raise InvalidArgument("p1/p2 take a single --message")
            msg_a, msg_b = parse_message(args.message), []
        config = proto.ProtocolConfig(
            args.variant, msg_a, msg_b, seed=seed, ecc=args.ecc,
            check_fraction=args.check_fraction, threshold=args.threshold,
        )
    except InvalidArgument as exc:
        print(f"qdcsim run: error: {exc}", file=sys.stderr)
        return EXIT_USAGE

    id_rng, auth_rng, proto_rng = (np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(3))
    users = ["alice", "bob", "charlie"] if multiparty else ["alice", "bob"]
    if args.registry:
        registry = auth.Registry.load(args.registry)
    else:
        registry = auth.Registry([auth.Identity.random(u, id_rng) for u in users])
    n_auth = auth_states_for(config.states_needed(), args.check_fraction)
    try:
        shared = auth.run_authentication(
            registry, users, n_auth, auth_rng,
            check_fraction=args.check_fraction, threshold=args.threshold,
        )
    except auth.AuthFailure as exc:
        tr = proto.Transcript(args.variant, seed, decision="abort", reason=str(exc),
                              auth_report=exc.report)
        _emit(tr.to_json(), args.out, f"authentication aborted: {exc}")
        return EXIT_ABORT

    tr = proto.run_protocol(config, shared, rng=proto_rng)
    ok = tr.accepted and tr.decoded == config.message and (
        not multiparty or tr.decoded_b == config.message_b
    )
    if tr.accepted:
        summary = f"{args.variant}: accepted, decoded {_show(tr.decoded)}"
        if multiparty:
            summary += f" / {_show(tr.decoded_b)}"
        summary += f", check error rate {tr.error_report.rate:.4f}"
    else:
        summary = f"{args.variant}: aborted ({tr.reason})"
    _emit(tr.to_json(), args.out, summary)
    return EXIT_OK if ok else EXIT_ABORT


# ------------------------------------------------------------ attack


def cmd_attack(args) -> int:
    seed = resolve_seed(args.seed)
    apply_h = args.apply_h if args.apply_h is not None else args.strategy == "zlw"
    try:
        if args.strategy == "zlw":
            if args.variant not in ("p1", "p2"):
                raise InvalidArgument("the zlw attack targets p1 or p2")
            strategy = adversary.AttackStrategy(f"zlw-{args.variant}", apply_h=apply_h, basis=args.basis)
        elif args.strategy == "eve":
            strategy = adversary.eve(args.variant, args.basis, apply_h)
        else:
            strategy = adversary.AttackStrategy("none", variant=args.variant)
    except InvalidArgument as exc:
        print(f"qdcsim attack: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    rng = np.random.default_rng(seed)
    report = adversary.run_attack_scenario(
        strategy, args.trials, rng, check_units=args.check_units, threshold=args.threshold, seed=seed
    )
    ex = report.exact
    summary = (
        f"{strategy.name} on {strategy.variant} (H={apply_h}): MI {ex['mi_bits']:.3f} bits, "
        f"accuracy {ex['accuracy']:.3f}, detect/unit {ex['detect_per_unit']:.3f}"
    )
    _emit(report.to_json(), args.out, summary)
    return EXIT_OK


# ------------------------------------------------------------ tables / verify


def _fmt_row(key, unit):
    return f"  {key[0]:>5}  {key[1]:>5}  ->  {identities.fmt_unit(unit)}"


def cmd_tables(args) -> int:
    status = EXIT_OK
    for variant in densecode.TABLES:
        stored = densecode.published_table(variant) if args.published else densecode.TABLES[variant]
        simulated = densecode.simulated_table(variant)
        layout = densecode.LAYOUTS[variant]
        print(f"[{variant}] announcement={layout.announcer_basis} measurement={layout.receiver_basis} "
              f"({len(simulated)} rows)")
        for key in sorted(simulated, key=lambda k: (str(simulated[k]), k)):
            print(_fmt_row(key, simulated[key]))
        diffs = identities.table_diff(stored, simulated)
        for d in diffs:
            print(f"  MISMATCH {variant} {d}")
        if diffs:
            status = EXIT_MISMATCH
    print("tables: " + ("all match" if status == EXIT_OK else "MISMATCH"))
    return status


def cmd_verify(args) -> int:
    results = identities.run_all()
    for name, ok, detail in results:
        print(f"{name}: {'PASS' if ok else 'FAIL'} ({detail})")
    failed = [name for name, ok, _ in results if not ok]
    print(f"{len(results) - len(failed)}/{len(results)} checks passed")
    return EXIT_OK if not failed else EXIT_MISMATCH


# ------------------------------------------------------------ auth-demo


def cmd_auth_demo(args) -> int:
    seed = resolve_seed(args.seed)
    id_rng, auth_rng, forge_rng = (np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(3))
    registry = auth.Registry([auth.Identity.random(u, id_rng) for u in ("alice", "bob")])
    forged = None
    if args.impersonate:
        forged = {"alice": auth.AuthKey(tuple(int(b) for b in forge_rng.integers(0, 2, args.n)))}
    tap = None
    if args.eve:
        tap = adversary.Interceptor(adversary.eve("p1"))
    payload = {"version": 1, "seed": seed, "n": args.n, "impersonate": args.impersonate, "eve": args.eve}
    try:
        shared = auth.run_authentication(
            registry, ["alice", "bob"], args.n, auth_rng,
            check_fraction=args.check_fraction, threshold=args.threshold,
            tap=tap, forged_keys=forged,
        )
    except InvalidArgument as exc:
        print(f"qdcsim auth-demo: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except auth.AuthFailure as exc:
        payload.update(decision="reject", report=exc.report.to_json())
        _emit(payload, args.out, f"rejected: {exc}")
        return EXIT_ABORT
    payload.update(decision="accept", surviving=len(shared), report=shared.report.to_json())
    _emit(payload, args.out, f"accepted: {len(shared)} shared states, error rate {shared.report.rate:.4f}")
    return EXIT_OK


# ------------------------------------------------------------ parser


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="qdcsim", description="Authenticated GHZ dense-coding protocol simulator")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    r = sub.add_parser("run", help="authenticate, then run one message transmission")
    r.add_argument("--variant", choices=proto.VARIANTS, required=True)
    r.add_argument("--message", help="hex (0x..) or binary message for p1/p2")
    r.add_argument("--message-a", help="Alice's message for mp1/mp2")
    r.add_argument("--message-b", help="Bob's message for mp1/mp2")
    r.add_argument("--seed", type=lambda s: int(s, 0))
    r.add_argument("--check-fraction", type=_fraction, default=0.25)
    r.add_argument("--threshold", type=float, default=0.05)
    r.add_argument("--ecc", choices=("identity", "repetition-3", "hamming-7-4"), default="hamming-7-4")
    r.add_argument("--registry", help="JSON identity registry file")
    r.add_argument("--out")
    r.set_defaults(func=cmd_run)

    a = sub.add_parser("attack", help="exact and Monte Carlo attack analysis")
    a.add_argument("--variant", choices=proto.VARIANTS, default="p1")
    a.add_argument("--strategy", choices=("zlw", "eve", "none"), default="zlw")
    a.add_argument("--apply-h", type=_bool, default=None)
    a.add_argument("--basis", choices=("Z", "X"), default="Z")
    a.add_argument("--trials", type=int, default=10_000)
    a.add_argument("--check-units", type=int, default=8)
    a.add_argument("--threshold", type=float, default=0.05)
    a.add_argument("--seed", type=lambda s: int(s, 0))
    a.add_argument("--out")
    a.set_defaults(func=cmd_attack)

    t = sub.add_parser("tables", help="regenerate decode tables and diff against stored rows")
    t.add_argument("--published", action="store_true",
                   help="diff against the rows as originally published instead")
    t.set_defaults(func=cmd_tables)

    v = sub.add_parser("verify", help="run the state-identity and codec check suite")
    v.set_defaults(func=cmd_verify)

    d = sub.add_parser("auth-demo", help="one authentication round")
    d.add_argument("--n", type=int, default=64)
    d.add_argument("--check-fraction", type=_fraction, default=0.25)
    d.add_argument("--threshold", type=float, default=0.05)
    d.add_argument("--impersonate", action="store_true", help="Alice unmasks with a random key")
    d.add_argument("--eve", action="store_true", help="Z-measure Alice's qubit in transit")
    d.add_argument("--seed", type=lambda s: int(s, 0))
    d.add_argument("--out")
    d.set_defaults(func=cmd_auth_demo)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "trials", 1) < 1:
        print("qdcsim attack: error: --trials must be at least 1", file=sys.stderr)
        return EXIT_USAGE
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
