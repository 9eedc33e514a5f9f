"""Command-line entry point.

Exit codes: 0 no violations, 1 violations found, 2 usage or parse error.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import oracle
from .axioms import AXIOMS, audit
from .bigraph import build_graph
from .blocks import find_safe_blocks
from .generate import GenConfig, enumerate_universe, generate, random_instances
from .instance import InstanceError, MatchingError, expand_capacities, format_matching, parse_instance, serialize_instance
from .mechanisms import MECHANISMS, da_mechanism, default_tiebreak, pi_sequential, rankmax_mechanism, safe_mechanism
from .sweep import sweep


class UsageError(Exception):
    pass


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _load(path: str):
    return parse_instance(_read(path))


def parse_tiebreak(text: str) -> dict:
    """``TIEBREAK <agent> : <institutions, most preferred first>`` per line."""
    out = {}
    for k, ln in enumerate(text.splitlines(), 1):
        ln = ln.strip()
        if not ln or ln.startswith("#"):
            continue
        head, sep, tail = ln.partition(":")
        hw = head.split()
        if not sep or len(hw) != 2 or hw[0] != "TIEBREAK":
            raise InstanceError("expected 'TIEBREAK <agent> : <institutions>'", k)
        out[hw[1]] = tail.split()
    return out


def _capacities(items) -> dict:
    caps = {}
    for item in items or ():
        d, sep, k = item.partition("=")
        if not sep:
            raise UsageError(f"capacity must look like NAME=K, got {item!r}")
        try:
            caps[d] = int(k)
        except ValueError:
            raise UsageError(f"capacity must be an integer, got {k!r}") from None
    return caps


def cmd_run(args) -> int:
    inst = _load(args.instance)
    if args.capacity:
        inst = expand_capacities(inst, _capacities(args.capacity))
    trace = None
    if args.mechanism == "safe":
        M, trace = safe_mechanism(inst)
    elif args.mechanism == "rankmax":
        M, trace = rankmax_mechanism(inst)
    elif args.mechanism == "da":
        tb = default_tiebreak(inst)
        if args.tiebreak:
            tb.update(parse_tiebreak(_read(args.tiebreak)))
        M = da_mechanism(inst, tb)
    else:
        M = pi_sequential(inst, args.pi or inst.baseline)
    if args.format == "jsonl":
        print(json.dumps({"matching": {d: a for a, d in sorted(M.pairs)}, "size": len(M)}))
        if args.trace and trace is not None:
            for k, s in enumerate(trace.steps, 1):
                print(json.dumps({"step": k, "institution": s.institution, "agent": s.agent, "blocks": [list(b) for b in s.blocks]}))
    else:
        if args.trace and trace is not None:
            sys.stdout.write(trace.format())
        sys.stdout.write(format_matching(inst, M))
    return 0


def _audit_universe(args):
    if args.instance:
        return [_load(args.instance)], args.instance
    if args.exhaustive:
        return enumerate_universe(args.n, args.m), f"exhaustive n={args.n} m={args.m}"
    if args.trials:
        return (
            random_instances(args.n, args.m, args.trials, seed=args.seed, p=args.p),
            f"random n={args.n} m={args.m} p={args.p} trials={args.trials} seed={args.seed}",
        )
    raise UsageError("give --instance FILE, --exhaustive, or --trials T")


def cmd_audit(args) -> int:
    axioms = list(AXIOMS) if args.axiom == "all" else args.axiom.split(",")
    for ax in axioms:
        if ax not in AXIOMS:
            raise UsageError(f"unknown axiom {ax!r}")
    insts, _ = _audit_universe(args)
    bad = 0
    for inst in insts:
        for ax in axioms:
            rep = audit(inst, args.mechanism, ax)
            bad += not rep.holds
            if args.format == "jsonl" or rep.verdict == "violated" or args.instance:
                print(rep.to_json())
    return 1 if bad else 0


def cmd_sweep(args) -> int:
    mechs = args.mechanisms.split(",")
    for m in mechs:
        if m not in MECHANISMS:
            raise UsageError(f"unknown mechanism {m!r}")
    axioms = list(AXIOMS) if args.axioms == "all" else [a for a in args.axioms.split(",") if a]
    for ax in axioms:
        if ax not in AXIOMS:
            raise UsageError(f"unknown axiom {ax!r}")
    args.instance = None
    insts, desc = _audit_universe(args)
    res = sweep(insts, mechs, axioms, desc, jobs=args.jobs)
    sys.stdout.write(res.to_json() + "\n" if args.format == "jsonl" else res.format_text())
    return 1 if res.violations else 0


def cmd_blocks(args) -> int:
    inst = _load(args.instance)
    G = build_graph(inst)
    for b in find_safe_blocks(G, inst.baseline):
        print(f"BLOCK {b.k} : {' '.join(b.institutions)} / {' '.join(b.agents)}")
    return 0


def cmd_gen(args) -> int:
    inst = generate(GenConfig(args.n, args.m, args.p, args.seed, args.baseline))
    sys.stdout.write(serialize_instance(inst))
    return 0


def cmd_oracle(args) -> int:
    inst = _load(args.instance)
    if inst.n * inst.m > 30:
        raise UsageError("oracle enumeration is limited to n*m <= 30")
    out = {
        "maximum_size": oracle.max_size(inst),
        "rank_maximal_signature": list(oracle.best_signature(inst)),
        "lexi_optimal_set": [d for d in inst.baseline if d in oracle.lexi_best_coverable(inst)],
    }
    if args.format == "jsonl":
        print(json.dumps(out))
    else:
        print(f"MAXIMUM_SIZE {out['maximum_size']}")
        print("SIGNATURE " + ",".join(map(str, out["rank_maximal_signature"])))
        print("LEXI_OPTIMAL " + " ".join(out["lexi_optimal_set"]))
    return 0


def build_parser() -> argparse.ArgumentParser:
    # Global flags are accepted before or after the subcommand; the copies on
    # subparsers use SUPPRESS so they never clobber a value given up front.
    p = argparse.ArgumentParser(prog="dichomatch", description=__doc__)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--format", choices=["text", "jsonl"], default="text")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS)
    common.add_argument("--jobs", type=int, default=argparse.SUPPRESS)
    common.add_argument("--format", choices=["text", "jsonl"], default=argparse.SUPPRESS)

    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", parents=[common], help="run a mechanism on an instance file")
    r.add_argument("--instance", required=True)
    r.add_argument("--mechanism", choices=sorted(MECHANISMS), required=True)
    r.add_argument("--tiebreak")
    r.add_argument("--pi", nargs="+")
    r.add_argument("--trace", action="store_true")
    r.add_argument("--capacity", action="append", metavar="NAME=K")
    r.set_defaults(func=cmd_run)

    def universe_args(q):
        q.add_argument("--instance")
        q.add_argument("--n", type=int, default=3)
        q.add_argument("--m", type=int, default=3)
        q.add_argument("--p", type=float, default=0.5)
        q.add_argument("--trials", type=int, default=0)
        q.add_argument("--exhaustive", action="store_true")

    a = sub.add_parser("audit", parents=[common], help="audit one axiom, emitting JSON lines")
    a.add_argument("--mechanism", choices=sorted(MECHANISMS), required=True)
    a.add_argument("--axiom", required=True, help="axiom name, comma list, or 'all'")
    universe_args(a)
    a.set_defaults(func=cmd_audit)

    s = sub.add_parser("sweep", parents=[common], help="aggregate audits over many instances")
    s.add_argument("--mechanisms", default="safe,rankmax")
    s.add_argument("--axioms", default="all")
    universe_args(s)
    s.set_defaults(func=cmd_sweep)

    b = sub.add_parser("blocks", parents=[common], help="list safe blocks")
    b.add_argument("--instance", required=True)
    b.set_defaults(func=cmd_blocks)

    g = sub.add_parser("gen", parents=[common], help="generate a random instance")
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--m", type=int, required=True)
    g.add_argument("--p", type=float, default=0.5)
    g.add_argument("--baseline", choices=["identity", "random"], default="identity")
    g.set_defaults(func=cmd_gen)

    o = sub.add_parser("oracle", parents=[common], help="brute-force maximum / rank-maximal reference")
    o.add_argument("--instance", required=True)
    o.set_defaults(func=cmd_oracle)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, InstanceError, MatchingError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
