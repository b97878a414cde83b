"""``tapekit`` command line: batch subcommands with JSON output.

Exit status: 0 when the command succeeds and any judgment it checks holds,
1 when a checked judgment fails, 2 on a usage error or malformed input, and
3 when a transported judgment fails to re-verify (an internal fault).
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction
from typing import Optional, Sequence

from . import serialize as ser
from .casebook import build_majority, majority_report, vn_fairness_report
from .dist import law
from .errors import ArityError, DegenerateMeasureError, ParseError, TransportFault
from .extraction import extraction_soundness
from .lang import eval_code, parse_code, to_sexpr
from .modality import check_entailment, transport_entailment
from .tapes import ProductMeasure, builtin_map, parse_tape
from .trees import trace

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_FAULT = 0, 1, 2, 3


class UsageError(Exception):
    pass


def default_fuel() -> int:
    raw = os.environ.get("TAPEKIT_DEFAULT_FUEL", "1024")
    try:
        fuel = int(raw)
    except ValueError:
        raise UsageError(f"TAPEKIT_DEFAULT_FUEL must be an integer, got {raw!r}") from None
    if fuel <= 0:
        raise UsageError("TAPEKIT_DEFAULT_FUEL must be positive")
    return fuel


def _read_text(path: str) -> str:
    try:
        if path == "-":
            return sys.stdin.read()
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _read_json(path: str):
    try:
        return json.loads(_read_text(path))
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path} is not valid JSON: {exc}") from None


def _measure(args) -> ProductMeasure:
    if getattr(args, "measure", None):
        return ser.measure_from_json(_read_json(args.measure))
    return ProductMeasure()


def _fuel(args) -> int:
    return args.fuel if args.fuel is not None else default_fuel()


def _judgment_args(args) -> dict:
    kw = ser.judgment_args_from_json(_read_json(args.judgment), default_fuel())
    if args.fuel is not None:
        kw["fuel"] = args.fuel
    if args.mode is not None:
        kw["mode"] = args.mode
    if args.measure:
        kw["measure"] = _measure(args)
    return kw


# ---------------------------------------------------------------- commands

def cmd_eval(args):
    code = parse_code(_read_text(args.code))
    out = eval_code(code, parse_tape(args.tape), _fuel(args))
    return ser.outcome_to_json(out), EXIT_OK


def cmd_trace(args):
    code = parse_code(_read_text(args.code))
    return ser.tree_to_json(trace(code, args.arity, _fuel(args))), EXIT_OK


def cmd_law(args):
    code = parse_code(_read_text(args.code))
    return ser.law_to_json(law(trace(code, args.arity, _fuel(args)), _measure(args))), EXIT_OK


def cmd_entail(args):
    j = check_entailment(**_judgment_args(args))
    return ser.judgment_to_json(j), EXIT_OK if j.holds else EXIT_FAIL


def cmd_transport(args):
    if not args.map:
        raise UsageError("transport needs --map")
    k = builtin_map(args.map)
    j = check_entailment(**_judgment_args(args))
    if not j.holds:
        doc = ser.judgment_to_json(j)
        doc["error"] = "only holding judgments can be transported"
        return doc, EXIT_FAIL
    moved = transport_entailment(j, k)
    doc = ser.judgment_to_json(moved)
    doc["map"] = k.name
    return doc, EXIT_OK


def cmd_extract(args):
    kw = _judgment_args(args)
    j = check_entailment(**kw)
    rep = extraction_soundness(j, _measure(args) if args.measure else None)
    doc = {
        "measure": ser.measure_to_json(rep.measure),
        "judgment": ser.judgment_to_json(j),
        "rows": [{"code": to_sexpr(r.code), "lhs": ser.rat_str(r.lhs), "rhs": ser.rat_str(r.rhs)}
                 for r in rep.rows],
        "verdict": rep.verdict,
    }
    return doc, EXIT_OK if rep.verdict == "sound" else EXIT_FAIL


def cmd_casebook(args):
    if args.fixture == "vn":
        rep = vn_fairness_report(args.pairs, _measure(args))
        doc = {"fixture": "vn", "pairs": rep.pairs, "fuel": rep.fuel, "law": ser.law_to_json(rep.law),
               "expect_H": ser.rat_str(rep.expect_h), "expect_T": ser.rat_str(rep.expect_t),
               "checks": rep.checks}
    else:
        try:
            p = Fraction(args.p)
        except (ValueError, ZeroDivisionError):
            raise UsageError(f"bad bias {args.p!r}") from None
        if not 0 <= p <= 1:
            raise UsageError("bias must lie in [0,1]")
        if not 1 <= args.t <= args.k:
            raise UsageError("threshold must satisfy 1 <= t <= k")
        rep = majority_report(build_majority(args.k, args.t), p)
        doc = {"fixture": "majority", "k": rep.k, "t": rep.t, "p": ser.rat_str(rep.p),
               "base": ser.rat_str(rep.base), "amplified": ser.rat_str(rep.amplified),
               "closed_form": ser.rat_str(rep.closed_form), "oracle": ser.rat_str(rep.oracle),
               "checks": rep.checks}
    return doc, EXIT_OK if rep.ok else EXIT_FAIL


# ---------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--fuel", type=int, help="reduction budget (default $TAPEKIT_DEFAULT_FUEL or 1024)")
    common.add_argument("--out", help="write JSON here instead of stdout")
    measured = argparse.ArgumentParser(add_help=False)
    measured.add_argument("--measure", help="measure config JSON file (default: fair coin)")
    judged = argparse.ArgumentParser(add_help=False)
    judged.add_argument("judgment", help="judgment spec JSON file")
    judged.add_argument("--mode", choices=("pointwise", "as"))

    parser = argparse.ArgumentParser(prog="tapekit", description="Tape-based probabilistic semantics workbench.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", parents=[common], help="run code on one tape")
    p.add_argument("code", help="code file ('-' for stdin)")
    p.add_argument("tape", help="tape literal such as 0110:0 or :(01)*")
    p.set_defaults(run=cmd_eval)

    for name, fn, text in (("trace", cmd_trace, "decision tree of all runs"),
                           ("law", cmd_law, "output distribution under a measure")):
        p = sub.add_parser(name, parents=[common, measured] if name == "law" else [common], help=text)
        p.add_argument("code", help="code file ('-' for stdin)")
        p.add_argument("--arity", type=int, default=1, help="number of tape components")
        p.set_defaults(run=fn)

    for name, fn, text in (("entail", cmd_entail, "check an entailment judgment"),
                           ("transport", cmd_transport, "move a judgment along a tape map"),
                           ("extract", cmd_extract, "expected values of both sides of a judgment")):
        p = sub.add_parser(name, parents=[common, measured, judged], help=text)
        if name == "transport":
            p.add_argument("--map", help="built-in tape map, e.g. flip or split:3")
        p.set_defaults(run=fn)

    p = sub.add_parser("casebook", parents=[common, measured], help="worked examples")
    p.add_argument("fixture", choices=("vn", "majority"))
    p.add_argument("--pairs", type=int, default=2, help="vn: pairs inspected")
    p.add_argument("--p", default="2/3", help="majority: bias of the base coin")
    p.add_argument("--k", type=int, default=3, help="majority: repetitions")
    p.add_argument("--t", type=int, default=2, help="majority: acceptance threshold")
    p.set_defaults(run=cmd_casebook)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        doc, status = args.run(args)
    except (UsageError, ParseError, ArityError, DegenerateMeasureError, ValueError, KeyError) as exc:
        print(f"tapekit {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except TransportFault as exc:
        print(f"tapekit {args.command}: internal fault: {exc}", file=sys.stderr)
        return EXIT_FAULT
    text = ser.dumps(doc)
    if args.out:
        try:
            with open(args.out, "w", encoding="utf-8") as fh:
                fh.write(text)
        except OSError as exc:
            print(f"tapekit: cannot write {args.out}: {exc.strerror}", file=sys.stderr)
            return EXIT_USAGE
    else:
        sys.stdout.write(text)
    return status


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
