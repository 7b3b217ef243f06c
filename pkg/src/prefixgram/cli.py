"""Command-line interface: ``prefixgram {parse,prefix,next-token,transform,bench}``."""
from __future__ import annotations

import argparse
import sys

from .bench import ALGOS, bench_strings, read_strings, write_csv
from .errors import PrefixGramError, TotalsNotConverged
from .grammar import load_grammar
from .nexttoken import next_token
from .oracle import oracle_prefix_weight, oracle_weight
from .parse import BACKENDS, parse, prefix_parse
from .prefix import EOS
from .semiring import SEMIRINGS
from .transforms import TRANSFORMS, TransformReport, run_pipeline

EXIT_OK, EXIT_USAGE, EXIT_INPUT, EXIT_NONCONVERGENCE = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def format_weight(w, semiring) -> str:
    if semiring.exact:
        return "1" if w else "0"
    return f"{semiring.to_real(w):.12g}"


def _shared(p: argparse.ArgumentParser, inputs: bool = True):
    p.add_argument("--grammar", required=True, metavar="PATH")
    p.add_argument("--semiring", choices=sorted(SEMIRINGS), default="real")
    p.add_argument("--backend", choices=BACKENDS, default="cky")
    p.add_argument("--count-ops", action="store_true")
    p.add_argument("--seed", type=int, default=None)
    if inputs:
        g = p.add_mutually_exclusive_group()
        g.add_argument("--input", metavar="'tok tok ...'")
        g.add_argument("--strings", metavar="PATH")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="prefixgram", description="Weighted CFG parsing, prefix weights and next-token vectors.")
    sub = ap.add_subparsers(dest="command", parser_class=_Parser, metavar="COMMAND")
    sub.required = True

    p = sub.add_parser("parse", help="string weight w(x)")
    _shared(p)
    p = sub.add_parser("prefix", help="prefix weight of x")
    _shared(p)
    p = sub.add_parser("next-token", help="prefix weights of all one-token extensions")
    _shared(p)
    p.add_argument("--eos", action="store_true", help=f"also report {EOS}, i.e. w(x)")
    p = sub.add_parser("transform", help="apply transformations and print the grammar")
    _shared(p, inputs=False)
    p.add_argument("--pipeline", required=True, help="comma list over " + ",".join(TRANSFORMS))
    p.add_argument("--report", action="store_true", help="CSV size reports on stderr")
    p = sub.add_parser("bench", help="time every prefix of every string; CSV on stdout")
    _shared(p)
    p.add_argument("--algo", choices=ALGOS, default="parse")
    p.add_argument("--repeats", type=int, default=3)
    p.add_argument("--jobs", type=int, default=1, help="worker processes, one string at a time each")
    # debugging aid, deliberately left out of the help listing
    p = sub.add_parser("oracle")
    _shared(p)
    p.add_argument("--height", type=int, default=25)
    p.add_argument("--prefix", action="store_true")
    sub._choices_actions = [a for a in sub._choices_actions if a.dest != "oracle"]
    return ap


def _inputs(args) -> list[tuple]:
    if args.strings:
        return read_strings(args.strings)
    if args.input is None:
        raise UsageError("one of --input or --strings is required")
    return [tuple(args.input.split())]


def _print_vector(v, sr, out):
    for tok, w in v.items():
        out.write(f"{tok}\t{format_weight(w, sr)}\n")


def run(args, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    sr = SEMIRINGS[args.semiring]
    G = load_grammar(args.grammar, sr)
    cmd = args.command
    if cmd == "transform":
        steps = [s.strip() for s in args.pipeline.split(",") if s.strip()]
        unknown = [s for s in steps if s not in TRANSFORMS]
        if unknown or not steps:
            raise UsageError(f"unknown pipeline steps {unknown}; choose from {sorted(TRANSFORMS)}")
        H, reports = run_pipeline(G, steps)
        out.write(H.to_text())
        if args.report:
            err.write(TransformReport.CSV_HEADER + "\n")
            for r in reports:
                err.write(r.csv_row() + "\n")
        return EXIT_OK
    strings = _inputs(args)
    if cmd == "bench":
        if args.repeats < 1:
            raise UsageError("--repeats must be at least 1")
        if args.jobs < 1:
            raise UsageError("--jobs must be at least 1")
        recs = bench_strings(G, strings, args.algo, args.backend, args.repeats,
                             args.count_ops, args.seed, args.jobs)
        write_csv(recs, out)
        return EXIT_OK
    for k, x in enumerate(strings):
        if cmd == "next-token":
            if len(strings) > 1:
                out.write(("\n" if k else "") + f"# {' '.join(x)}\n")
            _print_vector(next_token(G, x, args.backend, eos=args.eos), sr, out)
            continue
        if cmd == "oracle":
            fn = oracle_prefix_weight if args.prefix else oracle_weight
            out.write(format_weight(fn(G, x, args.height), sr) + "\n")
            continue
        fn = parse if cmd == "parse" else prefix_parse
        res = fn(G, x, args.backend, count_ops=args.count_ops)
        line = format_weight(res.weight, sr)
        if args.count_ops:
            line += f"\tops={res.op_count}"
        out.write(line + "\n")
    return EXIT_OK


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return run(args)
    except UsageError as e:
        print(f"prefixgram: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except TotalsNotConverged as e:
        print(f"prefixgram: {e}", file=sys.stderr)
        return EXIT_NONCONVERGENCE
    except (PrefixGramError, SyntaxError, OSError) as e:
        print(f"prefixgram: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
