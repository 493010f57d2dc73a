"""Command-line front end: ``iqot run|attack|audit``.

Exit codes: 0 pass, 1 usage or configuration error, 2 correctness failure or
failed verdict, 3 attack inapplicable.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .adversary import attack_non_interactive_id, scheme_from_dict
from .bitmath import BitString
from .errors import AttackInapplicable, IqotError
from .protocols import (
    SessionConfig,
    identification,
    kot,
    leaky_rot,
    ot,
    party_rng,
    rot,
    run_session,
    srot_binding,
)
from .verifier import (
    SecurityReport,
    audit_identification,
    audit_kot,
    audit_large_deviation,
    audit_ot,
    audit_rbeta,
    audit_rot_security_for_alice,
    audit_rot_security_for_bob,
    audit_srot,
    exact_condition,
)

PROTOCOLS = ("leaky-rot", "rot", "ot", "kot", "srot", "ident")
AUDITS = ("rot-alice", "rot-bob", "ot", "kot", "srot", "ident", "rbeta", "large-deviation")
OUTPUT_ENV = "IQOT_OUTPUT_DIR"

# binding meant by a bare --ideal
DEFAULT_IDEAL = {
    "leaky-rot": "leaky",
    "rot": "rot",
    "ot": "rot",
    "kot": "ot",
    "srot": "rot",
    "ident": "srot",
    "rot-alice": "rot",
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--k", type=int, default=4)
    p.add_argument("--ell", type=int, default=4)
    p.add_argument("--ellp", type=int, default=2, help="output width l'")
    p.add_argument("--q", type=int, default=4)
    p.add_argument("--n", type=int, default=None, help="code blocks (matrix size for large-deviation)")
    p.add_argument("--r", type=int, default=8)
    p.add_argument("--code-seed", type=int, default=0)
    p.add_argument("--kot-variant", choices=("k", "k-1"), default="k")
    p.add_argument("--d", type=int, default=None)
    p.add_argument("--wa", type=int, default=1)
    p.add_argument("--wb", type=int, default=1)
    p.add_argument("--ideal", nargs="?", const="default", default="", help="comma list of ideal bindings")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--session-id", type=int, default=0)
    p.add_argument("--trials", type=int, default=None)
    p.add_argument("--t", type=int, default=4)
    p.add_argument("--matrices", type=int, default=1)
    p.add_argument("--eps", type=float, default=None)
    p.add_argument("--strategy", default="single-computational")
    p.add_argument("--alice-strategy", choices=("junk", "guess"), default="junk")
    p.add_argument("--binding", choices=("srot", "kot"), default="srot")
    p.add_argument("--scheme", default=None, help="JSON scheme description file")
    p.add_argument("--kind", default=None, help="scheme kind when no file is given")
    p.add_argument("--out", default=None, help="output directory")
    p.add_argument("--parallel", type=int, default=1)
    p.add_argument("--config", default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="iqot", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    run = sub.add_parser("run", help="run one protocol session")
    run.add_argument("protocol", choices=PROTOCOLS)
    _add_common(run)
    attack = sub.add_parser("attack", help="attack a non-interactive identification scheme")
    _add_common(attack)
    audit = sub.add_parser("audit", help="audit one security condition")
    audit.add_argument("definition", choices=AUDITS)
    _add_common(audit)
    return parser


def read_config(path) -> dict:
    """Flat ``key = value`` lines; ``#`` starts a comment."""
    values = {}
    for number, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{number}: expected key = value")
        key, value = (part.strip() for part in line.split("=", 1))
        values[key.replace("-", "_")] = value
    return values


def parse_args(argv) -> argparse.Namespace:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.config:
        values = read_config(args.config)
        subparser = parser._subparsers._group_actions[0].choices[args.command]
        known = {a.dest for a in subparser._actions}
        unknown = sorted(set(values) - known)
        if unknown:
            raise UsageError(f"unknown config keys: {', '.join(unknown)}")
        subparser.set_defaults(**values)
        args = parser.parse_args(argv)  # flags override the file
    return args


def _ideal(args, name: str) -> frozenset:
    if not args.ideal:
        return frozenset()
    if args.ideal == "default":
        if name not in DEFAULT_IDEAL:
            raise UsageError(f"bare --ideal has no meaning for {name}")
        return frozenset({DEFAULT_IDEAL[name]})
    return frozenset(x.strip() for x in args.ideal.split(",") if x.strip())


def session_config(args, name: str, **overrides) -> SessionConfig:
    values = dict(
        k=args.k,
        ell=args.ell,
        ell_prime=args.ellp,
        q=args.q,
        n=24 if args.n is None else args.n,
        r=args.r,
        code_seed=args.code_seed,
        seed=args.seed,
        session_id=args.session_id,
        ideal=_ideal(args, name),
        kot_variant=args.kot_variant,
    )
    values.update(overrides)
    return SessionConfig(**values)


def _out_dir(args) -> Path:
    path = Path(args.out or os.environ.get(OUTPUT_ENV) or ".")
    path.mkdir(parents=True, exist_ok=True)
    return path


def _require_seed(args) -> int:
    if args.seed is None:
        raise UsageError("--seed is required")
    return args.seed


# ------------------------------------------------------------------------ run


def _fmt(value) -> str:
    if isinstance(value, (list, tuple)):
        return "[" + ", ".join(_fmt(v) for v in value) + "]"
    return str(value)


def cmd_run(args) -> int:
    seed = _require_seed(args)
    cfg = session_config(args, args.protocol)
    name = args.protocol
    extra = party_rng(seed, "auditor", cfg.session_id)
    expected = {}

    if name == "leaky-rot":
        d = 0 if args.d is None else args.d

        def body(s):
            s_, t_, value = leaky_rot(s, d)
            expected["bob"] = t_ if d else s_
            return (s_, t_), value

    elif name == "rot":
        d = 0 if args.d is None else args.d

        def body(s):
            pair, value = rot(s, d)
            expected["bob"] = pair[d]
            return pair, value

    elif name == "ot":
        d = 0 if args.d is None else args.d
        width = cfg.ot_width()
        a0, a1 = BitString.random(width, extra), BitString.random(width, extra)
        expected["bob"] = a1 if d else a0

        def body(s):
            return None, ot(s, a0, a1, d)

    elif name == "kot":
        d = 1 if args.d is None else args.d
        xs = [BitString.random(cfg.kot_width(), extra) for _ in range(cfg.k)]
        if not 1 <= d <= cfg.k:
            raise UsageError(f"--d must lie in 1..{cfg.k}")
        expected["bob"] = xs[d - 1]

        def body(s):
            return None, kot(s, xs, d)

    elif name == "srot":
        d = 1 if args.d is None else args.d

        def body(s):
            strings, value = srot_binding(s, d)
            expected["bob"] = strings[d - 1]
            return strings, value

    else:  # ident

        def body(s):
            return None, identification(s, args.wa, args.wb, args.binding)

        expected["bob"] = int(args.wa == args.wb)

    result = run_session(cfg, body, cfg.rngs())
    path = _out_dir(args) / f"{name}-seed{seed}-session{cfg.session_id}.jsonl"
    result.transcript.write(path)
    print(f"transcript: {path}")
    if result.aborted:
        print(f"abort: {result.abort}")
        return 2
    if name == "ident":
        print(f"G={result.bob}")
    else:
        print(f"alice: {_fmt(result.alice)}")
        print(f"bob: {_fmt(result.bob)}")
    ok = result.bob == expected["bob"] and not result.flags
    for flag in result.flags:
        print(f"flag: {flag}")
    if not ok:
        print("correctness failure", file=sys.stderr)
        return 2
    return 0


# --------------------------------------------------------------------- attack


def cmd_attack(args) -> int:
    seed = _require_seed(args)
    if args.scheme:
        spec = json.loads(Path(args.scheme).read_text())
    elif args.kind:
        spec = {"kind": args.kind, "k": args.k, "ell": args.ellp, "seed": seed}
    else:
        raise UsageError("give --scheme FILE or --kind")
    scheme = scheme_from_dict(spec)
    report = SecurityReport("attack", trials=1, seed=seed)
    path = _out_dir(args) / f"attack-seed{seed}.json"
    try:
        result = attack_non_interactive_id(scheme, party_rng(seed, "alice"))
    except AttackInapplicable as exc:
        report.flags.append(f"inapplicable: {exc.lemma}")
        report.details = {"scheme": spec, "violated": exc.lemma, "detail": exc.detail}
        report.write(path)
        print(f"attack inapplicable: {exc.lemma} ({exc.detail})", file=sys.stderr)
        return 3
    report.details = {
        "scheme": spec,
        "y": repr(result.y),
        "forced_inputs": [str(x) for x in result.forced_inputs],
        "acceptance": {str(w): g for w, g in result.acceptance.items()},
        "success": result.success,
    }
    report.conditions.append(
        exact_condition("accept-every-password", 1.0 - sum(result.acceptance.values()) / scheme.k, 0.0)
    )
    report.write(path)
    print("w_b  G")
    for w, g in result.acceptance.items():
        print(f"{w:>3}  {g}")
    print(f"success: {int(result.success)}")
    return 0 if result.success else 2


# ---------------------------------------------------------------------- audit


def cmd_audit(args) -> int:
    name = args.definition
    seed = 0 if args.seed is None else args.seed
    parallel = max(1, args.parallel)
    if name == "rot-alice":
        cfg = session_config(args, name, n=16 if args.n is None else args.n)
        report = audit_rot_security_for_alice(cfg, args.strategy, args.trials or 200, seed, args.eps, parallel)
    elif name == "rot-bob":
        cfg = session_config(args, name)
        report = audit_rot_security_for_bob(cfg, args.trials or 100, seed, parallel)
    elif name in ("ot", "kot", "srot"):
        # exhaustive audits run at message width l'
        cfg = session_config(args, name, ell=args.ellp)
        report = {"ot": audit_ot, "kot": audit_kot, "srot": audit_srot}[name](cfg)
    elif name == "ident":
        report = audit_identification(
            args.k, args.ell, args.trials or 10_000, seed, args.alice_strategy, eps=args.eps or 0.0, parallel=parallel
        )
    elif name == "rbeta":
        report = audit_rbeta(args.trials or 100, seed, args.ell, args.ellp)
    else:
        report = audit_large_deviation(16 if args.n is None else args.n, args.t, args.trials or 10_000, seed, args.matrices)
    report.seed = seed
    path = _out_dir(args) / f"audit-{name}-seed{seed}.json"
    report.write(path)
    print(report.summary())
    print(f"report: {path}")
    return 0 if report.passed else 2


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        args = parse_args(argv)
        command = {"run": cmd_run, "attack": cmd_attack, "audit": cmd_audit}[args.command]
        return command(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except (IqotError, ValueError, IndexError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
