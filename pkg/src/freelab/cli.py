"""Command-line entry point.

Results go to stdout in parseable form; diagnostics go to stderr. Exit codes:
0 success, 1 an experiment gate failed, 2 usage error.
"""
from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

import jsonschema

from . import experiments
from .freemoments import (
    MomentSequence,
    bernoulli_moments,
    free_additive_convolution,
    free_multiplicative_convolution,
    free_word_moment,
    mp_moments,
    point_moments,
    semicircle_moments,
    uniform_moments,
)
from .perm import CycleType
from .weingarten import asymptotic_phi, weingarten_table


class UsageError(Exception):
    pass


def _number(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"not a number: {text!r}") from exc


def moment_source(text: str, K: int) -> MomentSequence:
    """``mp:<lam>``, ``sc``, ``bernoulli``, ``point:<c>``, ``uniform:<a>:<b>``;
    ``cauchy`` is accepted by name but has no moments."""
    name, *args = text.strip().split(":")
    try:
        if name == "mp" and len(args) == 1:
            return mp_moments(_number(args[0]), K)
        if name == "sc" and not args:
            return semicircle_moments(K)
        if name == "bernoulli" and not args:
            return bernoulli_moments(K)
        if name == "point" and len(args) == 1:
            return point_moments(_number(args[0]), K)
        if name == "uniform" and len(args) == 2:
            return uniform_moments(_number(args[0]), _number(args[1]), K)
        if name == "cauchy" and not args:
            raise UsageError("cauchy has no moments")
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    raise UsageError(f"unknown moment source {text!r}")


def _fmt(x) -> int | float | str:
    if isinstance(x, complex):
        return str(x)
    if isinstance(x, Fraction) and x.denominator == 1:
        return int(x)
    if isinstance(x, int):
        return x
    f = float(x)
    return int(f) if f.is_integer() else f


def _print_json(obj) -> None:
    print(json.dumps(obj))


def cmd_weingarten(args) -> int:
    table = weingarten_table(args.n, args.N, cap=6)
    for t, value in table.rows():
        print(f"{t}\t{value}")
    return 0


def cmd_phi(args) -> int:
    parts = [int(p) for chunk in args.cycle_type for p in chunk.split(",") if p]
    print(asymptotic_phi(CycleType(tuple(parts))))
    return 0


def cmd_mp_moments(args) -> int:
    _print_json([_fmt(v) for v in mp_moments(_number(args.lam), args.K).values])
    return 0


def cmd_semicircle(args) -> int:
    _print_json([_fmt(v) for v in semicircle_moments(args.K).values])
    return 0


def cmd_free_moment(args) -> int:
    word = args.word.upper()
    K = args.K or max(1, word.count("W"), word.count("Y"))
    value = free_word_moment(word, moment_source(args.w, K), moment_source(args.y, K))
    _print_json(_fmt(value))
    return 0


def cmd_convolve(args) -> int:
    a, b = moment_source(args.a, args.K), moment_source(args.b, args.K)
    conv = free_additive_convolution if args.op == "add" else free_multiplicative_convolution
    _print_json([_fmt(v) for v in conv(a, b).values])
    return 0


def cmd_run(args) -> int:
    try:
        cfg = experiments.ExperimentConfig.from_json(args.config)
        if args.seed is not None:
            cfg = cfg.replace(master_seed=args.seed)
    except jsonschema.ValidationError as exc:
        raise UsageError(f"bad config: {exc.message}") from exc
    except (OSError, ValueError) as exc:
        raise UsageError(f"bad config: {exc}") from exc
    rec = experiments.run(cfg)
    text = experiments.emit_report(rec, args.format, args.out, include_timing=args.timing)
    if args.out is None:
        sys.stdout.write(text)
    for line in rec.summary_lines():
        print(line, file=sys.stderr)
    print(f"wall_time {rec.wall_time:.3f}s", file=sys.stderr)
    return 0 if rec.passed else 1


def cmd_report_schema(args) -> int:
    print(json.dumps({"config": experiments.CONFIG_SCHEMA, "report": experiments.REPORT_SCHEMA}, indent=2))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="freelab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("weingarten", help="exact Wg(N, .) on S_n, one row per cycle type")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--N", type=int, required=True)
    p.set_defaults(func=cmd_weingarten)

    p = sub.add_parser("phi", help="leading Weingarten coefficient of a cycle type")
    p.add_argument("--cycle-type", nargs="+", required=True, help="cycle lengths, e.g. '2 1' or '2,1'")
    p.set_defaults(func=cmd_phi)

    p = sub.add_parser("mp-moments", help="Marchenko-Pastur moments")
    p.add_argument("--lambda", dest="lam", required=True)
    p.add_argument("--K", type=int, default=8)
    p.set_defaults(func=cmd_mp_moments)

    p = sub.add_parser("semicircle-moments", help="unit semicircle moments")
    p.add_argument("--K", type=int, default=8)
    p.set_defaults(func=cmd_semicircle)

    p = sub.add_parser("free-moment", help="phi(word) for free w, y")
    p.add_argument("--word", required=True)
    p.add_argument("--w", required=True, help="moment source for w")
    p.add_argument("--y", required=True, help="moment source for y")
    p.add_argument("--K", type=int, default=None)
    p.set_defaults(func=cmd_free_moment)

    p = sub.add_parser("convolve", help="free additive/multiplicative convolution of moment sequences")
    p.add_argument("--op", choices=("add", "mul"), required=True)
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("--K", type=int, default=8)
    p.set_defaults(func=cmd_convolve)

    p = sub.add_parser("run", help="run an experiment from a JSON config")
    p.add_argument("--config", required=True)
    p.add_argument("--out", default=None)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--seed", type=int, default=None, help="override master_seed")
    p.add_argument("--timing", action="store_true", help="include wall time in the report")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("report-schema", help="print the config and report JSON schemas")
    p.set_defaults(func=cmd_report_schema)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, ValueError) as exc:
        print(f"freelab {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
