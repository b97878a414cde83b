"""JSON encodings of measures, truth values, laws, trees and judgments.

Rationals are always strings (``"3/8"``), addresses are ``"component,index"``
and tapes use the literal format of :func:`tapekit.tapes.parse_tape`.
"""
from __future__ import annotations

import json
from fractions import Fraction
from typing import Any, Optional

from .dist import BOTTOM, FinDist
from .errors import ParseError
from .lang import Bottom, Value, label, parse_code, parse_label, to_sexpr
from .modality import (ALMOST_SURE, POINTWISE, Const, Counterexample, CrispLift, EntailmentJudgment,
                       Proposition, TestTable)
from .tapes import Address, BitPattern, ProductMeasure, Tape, format_tape, parse_tape
from .trees import Branch, Leaf, TraceTree
from .truth import TruthValue


def dumps(doc: Any) -> str:
    """Canonical text: sorted keys, two-space indent, trailing newline."""
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def rational(text) -> Fraction:
    try:
        return Fraction(str(text))
    except (ValueError, ZeroDivisionError) as exc:
        raise ParseError(f"bad rational {text!r}") from exc


def rat_str(x: Fraction) -> str:
    return str(Fraction(x))


# ---------------------------------------------------------------- measures

def measure_to_json(m: ProductMeasure) -> dict:
    doc: dict = {"default_bias": rat_str(m.default),
                 "overrides": [{"component": a.component, "index": a.index, "bias": rat_str(p)}
                               for a, p in m.overrides]}
    if m.component_defaults:
        doc["component_biases"] = [{"component": c, "bias": rat_str(p)} for c, p in m.component_defaults]
    return doc


def measure_from_json(doc: dict) -> ProductMeasure:
    if not isinstance(doc, dict):
        raise ParseError("measure config must be a JSON object")
    try:
        over = tuple((Address(int(o["component"]), int(o["index"])), rational(o["bias"]))
                     for o in doc.get("overrides", []))
        comp = tuple((int(o["component"]), rational(o["bias"])) for o in doc.get("component_biases", []))
        return ProductMeasure(rational(doc.get("default_bias", "1/2")), over, comp)
    except (KeyError, TypeError) as exc:
        raise ParseError(f"malformed measure config: {exc}") from exc


# ---------------------------------------------------------------- truth values

def pattern_to_json(p: BitPattern) -> list:
    return [[str(a), b] for a, b in p]


def pattern_from_json(doc) -> BitPattern:
    try:
        return BitPattern({Address.parse(a): int(b) for a, b in doc})
    except (TypeError, ValueError) as exc:
        raise ParseError(f"malformed pattern {doc!r}") from exc


def tv_to_json(v: TruthValue) -> dict:
    doc = {"cells": [{"pattern": pattern_to_json(p), "value": rat_str(x)} for p, x in v.cells],
           "exceptions": [{"tape": format_tape(t), "value": rat_str(x)} for t, x in v.exceptions]}
    if v.note:
        doc["note"] = v.note
    return doc


def tv_from_json(doc) -> TruthValue:
    if isinstance(doc, (str, int)):
        return TruthValue.constant(rational(doc))
    try:
        cells = [(pattern_from_json(c["pattern"]), rational(c["value"])) for c in doc["cells"]]
        exc = [(parse_tape(e["tape"]), rational(e["value"])) for e in doc.get("exceptions", [])]
    except (KeyError, TypeError) as err:
        raise ParseError(f"malformed truth value: {err}") from err
    v = TruthValue(cells, exc)
    if len(v.support) <= 16 and not v.check_partition():
        raise ParseError("truth value cells do not partition the tape space")
    return v


# ---------------------------------------------------------------- outcomes, laws, trees

def outcome_to_json(out) -> dict:
    if isinstance(out, Bottom):
        return {"bottom": out.reason}
    return {"value": label(out.value)}


def law_to_json(d: FinDist) -> dict:
    return {("bottom" if z is BOTTOM else label(z)): rat_str(p) for z, p in d.items()}


def law_from_json(doc: dict) -> FinDist:
    return FinDist({(BOTTOM if k == "bottom" else parse_label(k)): rational(v) for k, v in doc.items()})


def tree_to_json(t: TraceTree) -> dict:
    if isinstance(t, Leaf):
        return {"leaf": outcome_to_json(t.outcome)}
    return {"branch": str(t.addr), "zero": tree_to_json(t.zero), "one": tree_to_json(t.one)}


def tree_from_json(doc: dict) -> TraceTree:
    if "leaf" in doc:
        leaf = doc["leaf"]
        if "bottom" in leaf:
            return Leaf(Bottom(leaf["bottom"]))
        return Leaf(Value(parse_label(leaf["value"])))
    return Branch(Address.parse(doc["branch"]), tree_from_json(doc["zero"]), tree_from_json(doc["one"]))


# ---------------------------------------------------------------- propositions and judgments

def prop_to_json(p: Proposition) -> dict:
    if isinstance(p, Const):
        return {"const": rat_str(p.value)}
    if isinstance(p, CrispLift):
        return {"crisp": sorted(label(x) for x in p.accept)}
    if isinstance(p, TestTable):
        doc: dict = {"table": [{"key": label(k), "value": tv_to_json(v)} for k, v in p.table.items()]}
        if p.default is not None:
            doc["default"] = tv_to_json(p.default)
        return doc
    raise ParseError(f"proposition {type(p).__name__} has no JSON form")


def prop_from_json(doc) -> Proposition:
    if not isinstance(doc, dict):
        raise ParseError("a proposition must be a JSON object")
    if "const" in doc:
        return Const(rational(doc["const"]))
    if "crisp" in doc:
        return CrispLift(parse_label(x) for x in doc["crisp"])
    if "table" in doc:
        table = {parse_label(row["key"]): tv_from_json(row["value"]) for row in doc["table"]}
        default = tv_from_json(doc["default"]) if "default" in doc else None
        return TestTable(table, default)
    raise ParseError(f"unknown proposition form {sorted(doc)}")


def counterexample_to_json(cex: Optional[Counterexample]) -> Optional[dict]:
    if cex is None:
        return None
    doc = {"code": to_sexpr(cex.code), "lhs": rat_str(cex.lhs), "rhs": rat_str(cex.rhs)}
    if isinstance(cex.where, Tape):
        doc["tape"] = format_tape(cex.where)
    else:
        doc["pattern"] = pattern_to_json(cex.where)
    return doc


def judgment_spec_to_json(j: EntailmentJudgment) -> dict:
    doc = {"phi": prop_to_json(j.phi), "evidence": to_sexpr(j.evidence), "psi": prop_to_json(j.psi),
           "universe": [to_sexpr(c) for c in j.universe], "fuel": j.fuel, "mode": j.mode,
           "space": j.space.arity}
    if j.measure is not None:
        doc["measure"] = measure_to_json(j.measure)
    return doc


def judgment_to_json(j: EntailmentJudgment) -> dict:
    return {"inputs": judgment_spec_to_json(j), "verdict": j.verdict,
            "counterexample": counterexample_to_json(j.counterexample)}


def judgment_args_from_json(doc: dict, default_fuel: int = 1024) -> dict:
    """Keyword arguments for :func:`tapekit.modality.check_entailment`.

    Accepts a bare judgment spec or a full report (its ``inputs`` are used),
    so the output of one command can feed the next.
    """
    if not isinstance(doc, dict):
        raise ParseError("a judgment spec must be a JSON object")
    doc = doc.get("inputs", doc)
    try:
        args = {
            "phi": prop_from_json(doc.get("phi", {"const": "1"})),
            "e": parse_code(doc["evidence"]),
            "psi": prop_from_json(doc["psi"]),
            "universe": [parse_code(c) for c in doc["universe"]],
            "fuel": int(doc.get("fuel", default_fuel)),
            "mode": doc.get("mode", POINTWISE),
            "space": int(doc.get("space", 1)),
            "measure": measure_from_json(doc["measure"]) if doc.get("measure") is not None else None,
        }
    except KeyError as exc:
        raise ParseError(f"judgment spec is missing {exc}") from exc
    except TypeError as exc:
        raise ParseError(f"malformed judgment spec: {exc}") from exc
    if args["mode"] not in (POINTWISE, ALMOST_SURE):
        raise ParseError(f"mode must be {POINTWISE!r} or {ALMOST_SURE!r}")
    return args
