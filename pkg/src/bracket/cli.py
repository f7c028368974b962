"""Command-line front end: translate, compare, check, bench.

Exit codes: 0 success or Equal, 1 Distinguished or check failure,
2 usage or parse error, 3 Unknown.
"""

from __future__ import annotations

import argparse
import sys
from importlib import resources
from pathlib import Path

from .abstraction import ALGORITHM_HELP, Algorithm, OutputTooLarge, translate
from .lab import (Distinguished, Equal, GeneratorConfig, differential,
                  distinguishes, run_check, shrink)
from .metrics import Family, emit_csv, growth_experiment
from .syntax import ParseError, parse_cl, parse_lambda, print_cl, read_corpus
from .terms import DEFAULT_FUEL, FuelExhausted

EXIT_OK, EXIT_DIFFERENT, EXIT_USAGE, EXIT_UNKNOWN = 0, 1, 2, 3

DEFAULT_SEED = 0
DEFAULT_TRIALS = 1000
DEFAULT_MAX_SIZE = 40

KINDS = {"normal_forms": "beta-normal", "all_terms": "lambda", "cl_terms": "cl"}


class UsageError(Exception):
    pass


def _algorithm(name: str) -> Algorithm:
    try:
        return Algorithm.from_name(name)
    except ValueError:
        raise argparse.ArgumentTypeError(f"unknown algorithm {name!r}") from None


def _positive(text: str) -> int:
    n = int(text)
    if n < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return n


def _algorithm_table() -> str:
    width = max(len(a.value) for a in Algorithm)
    return "algorithms:\n" + "\n".join(
        f"  {a.value:<{width}}  {ALGORITHM_HELP[a]}" for a in Algorithm)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="bracket",
        description="Bracket abstraction algorithms and a differential test lab.",
        epilog=_algorithm_table(),
        formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = p.add_subparsers(dest="command", required=True)

    def cmd(name, help_):
        return sub.add_parser(name, help=help_, epilog=_algorithm_table(),
                              formatter_class=argparse.RawDescriptionHelpFormatter)

    t = cmd("translate", "translate a lambda term to combinators")
    t.add_argument("--alg", type=_algorithm, required=True)
    t.add_argument("term", nargs="?", help="term text, or '-' to read standard input")
    t.add_argument("--in-file", type=Path)
    t.add_argument("--trace", action="store_true",
                   help="print each fired equation before the result")

    c = cmd("compare", "search for a term two algorithms translate differently")
    c.add_argument("--alg-a", type=_algorithm, required=True)
    c.add_argument("--alg-b", type=_algorithm, required=True)
    kinds = c.add_mutually_exclusive_group()
    kinds.add_argument("--normal-forms", action="store_true",
                       help="random beta-normal terms (default)")
    kinds.add_argument("--all-terms", action="store_true", help="random lambda terms")
    kinds.add_argument("--cl-terms", action="store_true",
                       help="random CL terms, compared as abstractions of --var")
    c.add_argument("--var", default="x")
    c.add_argument("--trials", type=_positive)
    c.add_argument("--seed", type=int)
    c.add_argument("--max-size", type=_positive)
    c.add_argument("--corpus", type=str, help="one lambda term per line")
    c.add_argument("--shrink", action="store_true", help="minimise a found witness")

    k = cmd("check", "check the free-variable law and semantic correctness")
    k.add_argument("--alg", type=_algorithm, required=True)
    k.add_argument("--trials", type=_positive, default=DEFAULT_TRIALS)
    k.add_argument("--seed", type=int, default=DEFAULT_SEED)
    k.add_argument("--max-size", type=_positive, default=DEFAULT_MAX_SIZE)
    k.add_argument("--fuel", type=_positive, default=DEFAULT_FUEL)

    b = cmd("bench", "measure output size growth over a term family")
    b.add_argument("--alg", type=_algorithm, required=True)
    b.add_argument("--family", choices=[f.value for f in Family], required=True)
    b.add_argument("--max-n", type=int, default=DEFAULT_MAX_SIZE)
    b.add_argument("--out", type=Path, help="CSV destination (default: standard output)")
    return p


def _read_term_text(args) -> str:
    if args.in_file is not None:
        if args.term is not None:
            raise UsageError("give either a term or --in-file, not both")
        try:
            return args.in_file.read_text(encoding="utf-8")
        except OSError as e:
            raise UsageError(f"cannot read {args.in_file}: {e.strerror}") from None
    if args.term is None:
        raise UsageError("missing term")
    if args.term == "-":
        return sys.stdin.read()
    return args.term


def _corpus_path(name: str) -> Path:
    path = Path(name)
    if path.exists():
        return path
    bundled = resources.files("bracket") / "corpus" / path.name
    if bundled.is_file():
        return Path(str(bundled))
    raise UsageError(f"corpus file not found: {name}")


def cmd_translate(args, out) -> int:
    t = parse_lambda(_read_term_text(args))
    trace = [] if args.trace else None
    result = translate(args.alg, t, trace)
    for step in trace or ():
        print(step, file=out)
    print(print_cl(result), file=out)
    return EXIT_OK


def cmd_compare(args, out) -> int:
    kind = next((v for k, v in KINDS.items() if getattr(args, k)), "beta-normal")
    if args.corpus is not None:
        if any(getattr(args, k) is not None for k in ("trials", "seed", "max_size")):
            raise UsageError("--corpus cannot be combined with --trials, --seed or --max-size")
        if kind != "beta-normal" and not args.normal_forms:
            raise UsageError("--corpus cannot be combined with a generator kind")
        text = _corpus_path(args.corpus).read_text(encoding="utf-8")
        parse = parse_cl if args.cl_terms else parse_lambda
        source = [parse(line) for line in read_corpus(text)]
        if not args.cl_terms:
            kind = "lambda"
    else:
        source = GeneratorConfig(
            seed=DEFAULT_SEED if args.seed is None else args.seed,
            max_size=args.max_size or DEFAULT_MAX_SIZE)
    trials = args.trials or DEFAULT_TRIALS
    verdict = differential(args.alg_a, args.alg_b, source, trials, kind, args.var)
    if isinstance(verdict, Distinguished) and args.shrink and kind != "cl":
        pred = distinguishes(args.alg_a, args.alg_b,
                             require_beta_normal=kind == "beta-normal")
        w = shrink(verdict.witness, pred)
        verdict = Distinguished(w, translate(args.alg_a, w), translate(args.alg_b, w),
                                verdict.trial)
    out.write(verdict.to_text())
    if isinstance(verdict, Equal):
        return EXIT_OK
    if isinstance(verdict, Distinguished):
        return EXIT_DIFFERENT
    return EXIT_UNKNOWN


def cmd_check(args, out) -> int:
    cfg = GeneratorConfig(seed=args.seed, max_size=args.max_size)
    summary = run_check(args.alg, cfg, args.trials, args.fuel)
    out.write(summary.to_text())
    return EXIT_OK if summary.ok else EXIT_DIFFERENT


def cmd_bench(args, out) -> int:
    if args.max_n < 2:
        raise UsageError("--max-n must be at least 2")
    report = growth_experiment(args.alg, Family(args.family), args.max_n)
    csv = emit_csv(report)
    if args.out is None:
        out.write(csv)
        return EXIT_OK
    try:
        args.out.write_text(csv, encoding="utf-8")
    except OSError as e:
        raise UsageError(f"cannot write {args.out}: {e.strerror}") from None
    print(f"slope={report.fitted_slope:.4f}", file=out)
    return EXIT_OK


COMMANDS = {"translate": cmd_translate, "compare": cmd_compare,
            "check": cmd_check, "bench": cmd_bench}


def main(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_USAGE
    try:
        return COMMANDS[args.command](args, out)
    except (ParseError, UsageError) as e:
        print(f"bracket {args.command}: {e}", file=err)
        return EXIT_USAGE
    except (FuelExhausted, OutputTooLarge) as e:
        print(f"bracket {args.command}: budget exceeded: {e}", file=err)
        return EXIT_UNKNOWN
