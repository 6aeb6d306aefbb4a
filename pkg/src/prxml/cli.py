"""Command-line interface.

Exit codes: 0 for success or a positive answer, 1 for a negative answer
(not a possible world, invalid document, failing self-test), 2 for errors.
"""

from __future__ import annotations

import argparse
import os
import sys
from decimal import Decimal, localcontext
from fractions import Fraction
from pathlib import Path

from . import gen as gen_mod
from .algorithms import poss_unordered_single, prob_ordered_local
from .errors import PrxmlError
from .matches import (
    enumerate_matches,
    prob_explicit_conditioned,
    prob_explicit_local,
    prob_explicit_mie,
)
from .model import LOCAL_KINDS, classify
from .oracle import DEFAULT_CAP, enumerate_worlds, world_probability_bf
from .rewrite import flatten_mux, mie_to_cie, mux_to_mie
from .selfcheck import run_selftest
from .serialization import (
    FormatError,
    format_rational,
    parse_matches,
    parse_prxml,
    parse_xdoc,
    serialize_matches,
    serialize_prxml,
    serialize_xdoc,
)

EXIT_YES = 0
EXIT_NO = 1
EXIT_ERROR = 2


class UsageError(Exception):
    pass


def show_probability(q: Fraction) -> str:
    with localcontext() as ctx:
        ctx.prec = 6
        approx = Decimal(q.numerator) / Decimal(q.denominator)
    return f"{format_rational(q)} (= {approx:g})"


def _cap(args) -> int:
    if getattr(args, "cap", None) is not None:
        return args.cap
    env = os.environ.get("PRXML_CAP")
    return int(env) if env else DEFAULT_CAP


def _read(path: str) -> str:
    return Path(path).read_text(encoding="utf-8")


def _load_pair(args):
    d = parse_prxml(_read(args.document))
    w = parse_xdoc(_read(args.world))
    if d.ordered != w.ordered:
        raise UsageError("document and world disagree on (ordered ...)")
    return d, w


# ---------------------------------------------------------------------------
# Algorithm dispatch


def choose_poss_algo(d, relaxed: bool) -> str:
    profile = classify(d)
    if d.ordered and profile.within(LOCAL_KINDS):
        return "ordered-dp"
    if not d.ordered:
        if profile.within({"ind"}) or profile.within({"mux"}):
            return "unordered-single"
        if relaxed and profile.within({"mux", "ind"}) and profile.no_ind_under_mux:
            return "unordered-single"
    return "oracle"


def choose_prob_algo(d) -> str:
    if d.ordered and classify(d).within(LOCAL_KINDS):
        return "ordered-dp"
    return "oracle"


def choose_eposs_algo(d) -> str:
    profile = classify(d)
    if profile.within(LOCAL_KINDS):
        return "local"
    if profile.within({"mie"}):
        return "mie"
    return "oracle"


# ---------------------------------------------------------------------------
# Subcommands


def cmd_validate(args) -> int:
    try:
        parse_prxml(_read(args.file))
    except FormatError as exc:
        print(f"invalid: {exc}")
        return EXIT_NO
    print("valid")
    return EXIT_YES


def cmd_worlds(args) -> int:
    d = parse_prxml(_read(args.file))
    dist = enumerate_worlds(d, _cap(args))
    for key in sorted(dist.probs, key=lambda k: (-dist.probs[k], k)):
        print(f"{show_probability(dist.probs[key])}  {key}")
    print(f"{len(dist)} worlds, total {format_rational(dist.total())}")
    return EXIT_YES


def cmd_poss(args) -> int:
    d, w = _load_pair(args)
    algo = args.algo if args.algo != "auto" else choose_poss_algo(d, args.relaxed)
    if algo == "ordered-dp":
        answer = prob_ordered_local(d, w) > 0
    elif algo == "unordered-single":
        answer = poss_unordered_single(d, w, relaxed=args.relaxed)
    else:
        answer = world_probability_bf(d, w, _cap(args)) > 0
    print(f"{'possible world' if answer else 'not a possible world'} [{algo}]")
    return EXIT_YES if answer else EXIT_NO


def cmd_prob(args) -> int:
    d, w = _load_pair(args)
    algo = args.algo if args.algo != "auto" else choose_prob_algo(d)
    if algo == "ordered-dp":
        p = prob_ordered_local(d, w)
    else:
        p = world_probability_bf(d, w, _cap(args))
    print(show_probability(p))
    return EXIT_YES


def cmd_matches(args) -> int:
    d, w = _load_pair(args)
    ms = enumerate_matches(d, w, args.cap if args.cap is not None else 100_000)
    text = serialize_matches(ms)
    if args.emit:
        Path(args.emit).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    print(f"{len(ms)} candidate matches", file=sys.stderr if not args.emit else sys.stdout)
    return EXIT_YES


def cmd_eposs(args) -> int:
    d, w = _load_pair(args)
    if args.matches:
        ms = parse_matches(_read(args.matches))
    else:
        ms = enumerate_matches(d, w)
    algo = args.algo if args.algo != "auto" else choose_eposs_algo(d)
    if algo == "local":
        if classify(d).within(LOCAL_KINDS):
            p = prob_explicit_local(d, w, ms)
        else:
            p = prob_explicit_conditioned(d, w, ms)
    elif algo == "mie":
        p = prob_explicit_mie(d, w, ms)
    else:
        p = world_probability_bf(d, w, _cap(args))
    print(show_probability(p))
    return EXIT_YES if p > 0 else EXIT_NO


REWRITES = {"flat-mux": flatten_mux, "mie": mux_to_mie, "cie": lambda d: mie_to_cie(mux_to_mie(d))}


def cmd_rewrite(args) -> int:
    d = parse_prxml(_read(args.file))
    if args.to == "cie" and classify(d).within({"mie"}):
        out = mie_to_cie(d)
    else:
        out = REWRITES[args.to](d)
    text = serialize_prxml(out)
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return EXIT_YES


def cmd_gen(args) -> int:
    fmt, fn = gen_mod.GENERATORS[args.kind]
    instance = gen_mod.INPUT_PARSERS[fmt](_read(args.input))
    try:
        d, w = fn(instance)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    Path(args.output + ".prxml").write_text(serialize_prxml(d), encoding="utf-8")
    Path(args.output + ".xml.sexp").write_text(serialize_xdoc(w), encoding="utf-8")
    print(f"wrote {args.output}.prxml and {args.output}.xml.sexp")
    return EXIT_YES


def cmd_selftest(args) -> int:
    results = run_selftest(args.seed, args.rounds)
    for r in results:
        print(f"{'PASS' if r.ok else 'FAIL'}  {r.name}: {r.checks} checks, {r.failures} failures")
    return EXIT_YES if all(r.ok for r in results) else EXIT_NO


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="prxml", description="Possible worlds of probabilistic XML documents.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="parse and validate a .prxml file")
    p.add_argument("file")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("worlds", help="enumerate the possible-world distribution")
    p.add_argument("file")
    p.add_argument("--cap", type=int)
    p.set_defaults(func=cmd_worlds)

    p = sub.add_parser("poss", help="decide whether W is a possible world of D")
    p.add_argument("document")
    p.add_argument("world")
    p.add_argument("--algo", choices=["auto", "oracle", "unordered-single", "ordered-dp"], default="auto")
    p.add_argument("--relaxed", action="store_true",
                   help="let unordered-single accept mux+ind documents without ind under mux")
    p.add_argument("--cap", type=int)
    p.set_defaults(func=cmd_poss)

    p = sub.add_parser("prob", help="compute D(W)")
    p.add_argument("document")
    p.add_argument("world")
    p.add_argument("--algo", choices=["auto", "oracle", "ordered-dp"], default="auto")
    p.add_argument("--cap", type=int)
    p.set_defaults(func=cmd_prob)

    p = sub.add_parser("matches", help="enumerate candidate matches of W in D")
    p.add_argument("document")
    p.add_argument("world")
    p.add_argument("--cap", type=int)
    p.add_argument("--emit", metavar="FILE", help="write the matches to FILE")
    p.set_defaults(func=cmd_matches)

    p = sub.add_parser("eposs", help="compute D(W) given the candidate matches")
    p.add_argument("document")
    p.add_argument("world")
    p.add_argument("--matches", metavar="FILE", help="a .matches file (enumerated when omitted)")
    p.add_argument("--algo", choices=["auto", "local", "mie", "oracle"], default="auto")
    p.add_argument("--cap", type=int)
    p.set_defaults(func=cmd_eposs)

    p = sub.add_parser("rewrite", help="rewrite a document into another class")
    p.add_argument("file")
    p.add_argument("--to", choices=sorted(REWRITES), required=True)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_rewrite)

    p = sub.add_parser("gen", help="build a reduction gadget from a source instance")
    p.add_argument("kind", choices=sorted(gen_mod.GENERATORS))
    p.add_argument("input")
    p.add_argument("output", help="output prefix; writes OUTPUT.prxml and OUTPUT.xml.sexp")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("selftest", help="run randomized oracle-equivalence checks")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--rounds", type=int, default=40)
    p.set_defaults(func=cmd_selftest)
    return parser


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_ERROR if exc.code else EXIT_YES
    sys.setrecursionlimit(max(sys.getrecursionlimit(), 20_000))
    try:
        return args.func(args)
    except (UsageError, PrxmlError, OSError, ValueError) as exc:
        print(f"prxml {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_ERROR


def main() -> None:
    sys.exit(run())
