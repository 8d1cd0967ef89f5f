"""``commprob`` command line.

Every command prints one JSON report on stdout (headed by a run manifest) and
a one-line summary on stderr.  Exit codes: 0 success, 1 counterexample or
property violation, 2 invalid input or usage.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from fractions import Fraction
from pathlib import Path

import sympy

from commprob import __version__, formula_engine as fe, group_core as gc, lift, ring_census
from commprob.group_core import FiniteGroup, GroupFormatError
from commprob.ring_core import (
    FiniteRing, RingFormatError, commuting_probability_bruteforce, commuting_probability_fast,
    validate,
)

OK, VIOLATION, BAD_INPUT = 0, 1, 2


class InputError(Exception):
    pass


def frac(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


def _digest(path: str) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _load_ring(path: str, check: bool = True) -> FiniteRing:
    try:
        ring = FiniteRing.load(path)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read ring file {path}: {exc}") from None
    except RingFormatError as exc:
        raise InputError(f"invalid ring file {path}: {exc}") from None
    if check:
        bad = validate(ring)
        if bad:
            v = bad[0]
            raise InputError(f"invalid ring file {path}: {v.kind} fails at {v.index} ({v.detail})")
    return ring


def _load_group(path: str) -> FiniteGroup:
    try:
        return FiniteGroup.load(path)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read group file {path}: {exc}") from None
    except (GroupFormatError, ValueError) as exc:
        raise InputError(f"invalid group file {path}: {exc}") from None


def _primes(text: str) -> list[int]:
    try:
        primes = [int(p) for p in text.split(",") if p.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad prime list {text!r}") from None
    bad = [p for p in primes if not sympy.isprime(p)]
    if bad:
        raise argparse.ArgumentTypeError(f"not prime: {bad}")
    return primes


def _fraction(text: str) -> Fraction:
    try:
        value = Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"bad rational {text!r}") from None
    if value <= 0:
        raise argparse.ArgumentTypeError("epsilon must be positive")
    return value


# -- handlers: each returns (exit code, report dict, summary line) --------------

def cmd_ring_prob(args):
    ring = _load_ring(args.file)
    report = {"size": ring.size, "commutative": ring.is_commutative()}
    values = {}
    if args.method in ("fast", "both"):
        values["fast"] = commuting_probability_fast(ring)
    if args.method in ("brute", "both"):
        try:
            values["brute"] = commuting_probability_bruteforce(ring, cap=args.cap)
        except ValueError as exc:
            raise InputError(str(exc)) from None
    report.update({k: frac(v) for k, v in values.items()})
    agree = len(set(values.values())) == 1
    value = next(iter(values.values()))
    report["probability"] = frac(value)
    report["agree"] = agree
    return (OK if agree else VIOLATION), report, frac(value) if agree else "methods disagree"


def cmd_ring_check(args):
    ring = _load_ring(args.file, check=False)
    bad = validate(ring)
    report = {"valid": not bad, "violations": [v.to_json() for v in bad]}
    if bad:
        return BAD_INPUT, report, f"invalid: {len(bad)} violation(s), first at {bad[0].index}"
    return OK, report, "valid"


def cmd_group_prob(args):
    g = _load_group(args.file)
    classes = gc.commuting_probability(g)
    pairs = gc.commuting_probability_pairs(g)
    report = {"order": g.order, "probability": frac(classes),
              "pair_count_probability": frac(pairs), "agree": classes == pairs}
    return (OK if classes == pairs else VIOLATION), report, frac(classes)


def cmd_group_invariants(args):
    g = _load_group(args.file)
    inv = gc.isoclinism_invariants(g)
    report = inv.to_json()
    report["stem_candidate"] = gc.is_stem_candidate(g)
    return OK, report, f"|Z|={inv.center_size} |G'|={inv.derived_size} class={inv.nilpotency_class}"


def cmd_group_formula_check(args):
    g = _load_group(args.file)
    res = gc.check_nilpotent_formula(g)
    cls = gc.nilpotency_class(g)
    report = {"formula": frac(res.formula), "counted": frac(res.counted), "match": res.match,
              "nilpotency_class": cls}
    # a match on a non-nilpotent group would contradict the "only if" direction
    code = VIOLATION if res.match and cls == gc.NOT_NILPOTENT else OK
    return code, report, f"formula {frac(res.formula)} vs counted {frac(res.counted)}"


def cmd_lift(args):
    ring = _load_ring(args.ringfile)
    try:
        group = lift.lift_ring_to_group(ring, max_ring_size=args.max_ring_size)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    report = {"ring_size": ring.size, "group_order": group.order}
    code = OK
    if args.verify:
        check = lift.check_lift(ring, group)
        report["verify"] = check.to_json()
        code = OK if check.ok else VIOLATION
    try:
        with open(args.output, "w") as fh:
            json.dump(group.to_json(), fh)
    except OSError as exc:
        raise InputError(f"cannot write {args.output}: {exc}") from None
    report["output"] = args.output
    return code, report, f"wrote group of order {group.order} to {args.output}"


def cmd_formula_value(args):
    try:
        shape = fe.PPartShape(args.p, args.e, args.f, args.g, relax=args.relax_center_index)
    except fe.ShapeError as exc:
        raise InputError(str(exc)) from None
    v = fe.p_part_value(shape)
    return OK, {"shape": [args.p, args.e, args.f, args.g], "value": frac(v)}, frac(v)


def cmd_formula_stem_value(args):
    try:
        shape = fe.StemShape(args.p, args.e, args.f, relax=args.relax_center_index)
    except fe.ShapeError as exc:
        raise InputError(str(exc)) from None
    v = fe.stem_p_part_value(shape)
    return OK, {"shape": shape.to_json(), "value": frac(v)}, frac(v)


def _search(fn):
    def handler(args):
        rep = fn(args.primes, args.max_factors, args.max_exp,
                 relax=args.relax_center_index, threads=args.threads)
        code = VIOLATION if rep.hits else OK
        return code, rep.to_json(), f"hits: {len(rep.hits)}"
    return handler


def cmd_formula_modp(args):
    rep = fe.numerator_mod_p_sweep(sympy.primerange(2, args.max_prime + 1), args.max_exp)
    return (VIOLATION if rep.hits else OK), rep.to_json(), f"hits: {len(rep.hits)}"


def cmd_formula_witness(args):
    try:
        shape = fe.accumulation_witness(args.p, args.g, args.epsilon, relax=args.relax_center_index)
    except (fe.ShapeError, ValueError) as exc:
        raise InputError(str(exc)) from None
    v = fe.stem_p_part_value(shape)
    target = Fraction(1, args.p ** args.g)
    report = {"shape": shape.to_json(), "value": frac(v), "target": frac(target),
              "distance": frac(abs(v - target)), "epsilon": frac(args.epsilon)}
    return OK, report, f"{frac(v)} (distance {frac(abs(v - target))})"


def cmd_census_run(args):
    try:
        rep = ring_census.collect_probabilities(
            args.order, dedupe=args.dedupe, verify=args.verify_conjecture,
            inverted=args.invert_predicate, budget=args.node_budget, threads=args.threads,
            dump=args.dump)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    code = VIOLATION if rep.violations else OK
    return code, rep.to_json(), f"rings: {rep.total}, violations: {len(rep.violations)}"


# -- parser --------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="commprob", description=__doc__.splitlines()[0])
    parser.add_argument("--threads", type=int, default=1, help="worker processes")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    ring = sub.add_parser("ring").add_subparsers(dest="action", required=True)
    p = ring.add_parser("prob", help="commuting probability of a ring file")
    p.add_argument("file")
    p.add_argument("--method", choices=["brute", "fast", "both"], default="fast")
    p.add_argument("--cap", type=int, default=4096, help="brute-force size cap")
    p.set_defaults(func=cmd_ring_prob, inputs=["file"])
    p = ring.add_parser("check", help="validate ring axioms")
    p.add_argument("file")
    p.set_defaults(func=cmd_ring_check, inputs=["file"])

    group = sub.add_parser("group").add_subparsers(dest="action", required=True)
    for name, func in [("prob", cmd_group_prob), ("invariants", cmd_group_invariants),
                       ("formula-check", cmd_group_formula_check)]:
        p = group.add_parser(name)
        p.add_argument("file")
        p.set_defaults(func=func, inputs=["file"])

    p = sub.add_parser("lift", help="lift a ring file to its circle group")
    p.add_argument("ringfile")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--verify", action="store_true")
    p.add_argument("--max-ring-size", type=int, default=lift.MAX_RING_SIZE)
    p.set_defaults(func=cmd_lift, inputs=["ringfile"])

    formula = sub.add_parser("formula").add_subparsers(dest="action", required=True)
    p = formula.add_parser("value")
    p.add_argument("-p", type=int, required=True)
    p.add_argument("--e", type=int, required=True)
    p.add_argument("--f", type=int, required=True)
    p.add_argument("--g", type=int, required=True)
    p.add_argument("--relax-center-index", action="store_true")
    p.set_defaults(func=cmd_formula_value)
    p = formula.add_parser("stem-value")
    p.add_argument("-p", type=int, required=True)
    p.add_argument("--e", type=int, required=True)
    p.add_argument("--f", type=int, required=True)
    p.add_argument("--relax-center-index", action="store_true")
    p.set_defaults(func=cmd_formula_stem_value)
    for name, fn in [("search-squarefree", fe.search_square_free),
                     ("search-reciprocal", fe.search_reciprocals)]:
        p = formula.add_parser(name)
        p.add_argument("--primes", type=_primes, default=[2, 3, 5, 7, 11, 13])
        p.add_argument("--max-factors", type=int, default=3)
        p.add_argument("--max-exp", type=int, default=12)
        p.add_argument("--relax-center-index", action="store_true")
        p.set_defaults(func=_search(fn))
    p = formula.add_parser("modp-sweep")
    p.add_argument("--max-prime", type=int, default=97)
    p.add_argument("--max-exp", type=int, default=20)
    p.set_defaults(func=cmd_formula_modp)
    p = formula.add_parser("witness")
    p.add_argument("-p", type=int, required=True)
    p.add_argument("-g", type=int, required=True)
    p.add_argument("--epsilon", type=_fraction, required=True)
    p.add_argument("--relax-center-index", action="store_true")
    p.set_defaults(func=cmd_formula_witness)

    census = sub.add_parser("census").add_subparsers(dest="action", required=True)
    p = census.add_parser("run")
    p.add_argument("--order", type=int, required=True)
    p.add_argument("--dedupe", action="store_true")
    p.add_argument("--verify-conjecture", action="store_true")
    p.add_argument("--invert-predicate", action="store_true", help=argparse.SUPPRESS)
    p.add_argument("--dump", metavar="DIR")
    p.add_argument("--node-budget", type=int, default=ring_census.DEFAULT_NODE_BUDGET)
    p.set_defaults(func=cmd_census_run)
    return parser


def _manifest(args, elapsed: float) -> dict:
    flags = {k: (str(v) if isinstance(v, Fraction) else v) for k, v in vars(args).items()
             if k not in ("func", "inputs", "command", "action")}
    digests = {}
    for attr in getattr(args, "inputs", []):
        path = getattr(args, attr)
        try:
            digests[path] = _digest(path)
        except OSError:
            digests[path] = None
    return {
        "subcommand": " ".join(x for x in (args.command, getattr(args, "action", None)) if x),
        "flags": flags,
        "input_digests": digests,
        "tool_version": __version__,
        "elapsed": round(elapsed, 6),
    }


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return BAD_INPUT if exc.code else OK
    start = time.perf_counter()
    try:
        code, report, summary = args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        report = {"error": str(exc)}
        code, summary = BAD_INPUT, None
    out = {"manifest": _manifest(args, time.perf_counter() - start)}
    out.update(report)
    print(json.dumps(out, indent=2))
    if summary:
        print(summary, file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
