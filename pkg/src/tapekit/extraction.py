"""Numbers out of truth values: expectations, event probabilities and laws.

Expectation is an exact finite sum over the cell decomposition.  Exceptional
tapes are null and contribute nothing, which is only sound when every bias
of the measure lies strictly inside (0,1).
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .dist import BOTTOM, FinDist, law
from .errors import DegenerateMeasureError
from .modality import EntailmentJudgment, diamond
from .tapes import ProductMeasure, TapeMapSpec, pattern_measure, pushforward_measure
from .trees import TraceTree, mca_apply
from .truth import TruthValue, _require_nondegenerate, tv_pullback

__all__ = ["expect", "law", "event_probability", "ExtractionReport", "extraction_soundness",
           "prob_one_collapse", "check_extract_reindex", "BOTTOM", "FinDist"]


def expect(v: TruthValue, m: ProductMeasure) -> Fraction:
    """``E_m(v)``, the integral of the step function ``v``."""
    if v.exceptions and not m.nondegenerate:
        raise DegenerateMeasureError("exceptional tapes may carry mass under a degenerate measure")
    return sum((val * pattern_measure(m, p) for p, val in v.cells), Fraction(0))


def event_probability(t: TraceTree, m: ProductMeasure, accept) -> Fraction:
    return law(t, m).prob(frozenset(accept))


@dataclass(frozen=True)
class ExtractionRow:
    code: object
    lhs: Fraction
    rhs: Fraction


@dataclass(frozen=True)
class ExtractionReport:
    measure: ProductMeasure
    rows: tuple
    judgment_verdict: str
    verdict: str

    @property
    def sound(self) -> bool:
        return self.verdict != "unsound"


def extraction_soundness(j: EntailmentJudgment, m: Optional[ProductMeasure] = None) -> ExtractionReport:
    """Expected precondition against expected diamond, code by code.

    For a holding judgment every row must satisfy ``lhs <= rhs``.  A failing
    judgment promises nothing and its report is marked ``vacuous``.
    """
    m = m or j.measure or ProductMeasure()
    rows = []
    for c in j.universe:
        rhs = diamond(mca_apply(j.evidence, c, j.space, j.fuel), j.psi)
        rows.append(ExtractionRow(c, expect(j.phi.at(c), m), expect(rhs, m)))
    if not j.holds:
        verdict = "vacuous"
    else:
        verdict = "sound" if all(r.lhs <= r.rhs for r in rows) else "unsound"
    return ExtractionReport(m, tuple(rows), j.verdict, verdict)


def prob_one_collapse(v: TruthValue, m: ProductMeasure) -> bool:
    """True iff ``v = 1`` almost surely; every cell has positive mass here."""
    _require_nondegenerate(m)
    return all(val == 1 for _, val in v.cells)


def check_extract_reindex(k: TapeMapSpec, v: TruthValue, m: ProductMeasure) -> bool:
    """``E_m(kappa^Omega v) == E_{kappa_* m}(v)``."""
    return expect(tv_pullback(k, v), m) == expect(v, pushforward_measure(k, m))
