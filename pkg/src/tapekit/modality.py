"""The partial-correctness tape modality and evidenced entailment.

``diamond(t, psi)`` is the truth value that runs the computation ``t`` on a
tape, scores divergence 0 and otherwise evaluates ``psi`` of the result on the
same tape.  An entailment ``phi |-e psi`` holds over a code universe when
``phi(c) <= diamond(e . c, psi)`` for every ``c``, either tape by tape or
almost surely.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Mapping, Optional, Sequence, Union

from .errors import PropositionUndefined, TransportFault
from .lang import Bottom, Code, Value
from .tapes import BitPattern, ProductMeasure, Tape, TapeMapSpec, TapeSpace, as_space
from .trees import (TRANSLATION_OVERHEAD, TraceTree, bind, leaves, mca_apply, ret,
                    translate_evidence)
from .truth import (TruthValue, _require_nondegenerate, first_violation, tv_equal,
                    tv_eval, tv_impl, tv_leq, tv_meet, tv_pullback)

POINTWISE = "pointwise"
ALMOST_SURE = "as"


class Proposition:
    """A map from codes (or outcome values) to truth values."""

    def at(self, x) -> TruthValue:
        raise NotImplementedError

    def pullback(self, k: TapeMapSpec) -> "Proposition":
        raise NotImplementedError


@dataclass(frozen=True)
class Const(Proposition):
    value: Fraction = Fraction(1)

    def at(self, x) -> TruthValue:
        return TruthValue.constant(self.value)

    def pullback(self, k):
        return self


TOP = Const(Fraction(1))


@dataclass(frozen=True)
class CrispLift(Proposition):
    """``psi_P(a)(r) = 1_P(a)``; never accepts divergence."""

    accept: frozenset

    def __init__(self, accept):
        accept = frozenset(accept)
        if any(isinstance(a, Bottom) for a in accept):
            raise ValueError("bottom is never an accepted outcome")
        object.__setattr__(self, "accept", accept)

    def at(self, x) -> TruthValue:
        return TruthValue.constant(1 if x in self.accept else 0)

    def pullback(self, k):
        return self


@dataclass(frozen=True, eq=False)
class TestTable(Proposition):
    __test__ = False  # not a pytest class

    table: Mapping[object, TruthValue]
    default: Optional[TruthValue] = None

    def at(self, x) -> TruthValue:
        try:
            return self.table[x]
        except KeyError:
            if self.default is not None:
                return self.default
            raise PropositionUndefined(f"test table has no entry for {x}") from None

    def pullback(self, k):
        return TestTable({x: tv_pullback(k, v) for x, v in self.table.items()},
                         None if self.default is None else tv_pullback(k, self.default))


@dataclass(frozen=True, eq=False)
class FnProp(Proposition):
    """A proposition given by a Python function; used for derived postconditions."""

    fn: Callable[[object], TruthValue]

    def at(self, x):
        return self.fn(x)

    def pullback(self, k):
        return FnProp(lambda x: tv_pullback(k, self.fn(x)))


def diamond(t: TraceTree, psi: Proposition,
            overrides: Optional[Mapping[Tape, object]] = None) -> TruthValue:
    """``<> x <- t. psi(x)``.

    ``overrides`` patches the computation's outcome on individual tapes
    (a null set under any nondegenerate measure); the patched values become
    exceptions of the result.
    """
    cells: list = []
    exceptions: list = []
    for path, out in leaves(t):
        if isinstance(out, Bottom):
            cells.append((path, 0))
            continue
        post = psi.at(out.value)
        for q, v in post.cells:
            m = path.merge(q)
            if m is not None:
                cells.append((m, v))
        for tape, v in post.exceptions:
            if path.matches(tape):
                exceptions.append((tape, v))
    for tape, out in (overrides or {}).items():
        if isinstance(out, Bottom):
            exceptions.append((tape, 0))
        else:
            exceptions.append((tape, tv_eval(psi.at(out.value if isinstance(out, Value) else out), tape)))
    return TruthValue(cells, exceptions)


@dataclass(frozen=True)
class Counterexample:
    code: Code
    where: Union[BitPattern, Tape]
    lhs: Fraction
    rhs: Fraction


@dataclass(frozen=True, eq=False)
class EntailmentJudgment:
    phi: Proposition
    evidence: Code
    psi: Proposition
    universe: tuple
    fuel: int
    mode: str = POINTWISE
    space: TapeSpace = TapeSpace(1)
    measure: Optional[ProductMeasure] = None
    verdict: str = "holds"
    counterexample: Optional[Counterexample] = None

    @property
    def holds(self) -> bool:
        return self.verdict == "holds"


def check_entailment(phi: Proposition, e: Code, psi: Proposition, universe: Sequence[Code],
                     fuel: int, mode: str = POINTWISE,
                     measure: Optional[ProductMeasure] = None,
                     space: Union[TapeSpace, int] = 1) -> EntailmentJudgment:
    if fuel <= 0:
        raise ValueError("fuel must be positive")
    if not universe:
        raise ValueError("the code universe must be nonempty")
    if mode not in (POINTWISE, ALMOST_SURE):
        raise ValueError(f"unknown mode {mode!r}")
    if mode == ALMOST_SURE:
        _require_nondegenerate(measure)
    space = as_space(space)
    cex = None
    for c in universe:
        rhs = diamond(mca_apply(e, c, space, fuel), psi)
        bad = first_violation(phi.at(c), rhs, almost_sure=mode == ALMOST_SURE)
        if bad is not None:
            cex = Counterexample(c, *bad)
            break
    return EntailmentJudgment(phi, e, psi, tuple(universe), fuel, mode, space, measure,
                              "fails" if cex else "holds", cex)


def recheck(j: EntailmentJudgment) -> EntailmentJudgment:
    return check_entailment(j.phi, j.evidence, j.psi, j.universe, j.fuel, j.mode, j.measure, j.space)


def transport_entailment(j: EntailmentJudgment, k: TapeMapSpec) -> EntailmentJudgment:
    """Move a holding judgment over ``k``'s destination space to its source space.

    The translated evidence runs :data:`TRANSLATION_OVERHEAD` extra steps, so
    the fuel budget grows by that constant.
    """
    if not j.holds:
        raise ValueError("only holding judgments can be transported")
    if j.space.arity != k.dst_arity:
        raise ValueError(f"judgment lives in arity {j.space.arity}, {k.name} produces arity {k.dst_arity}")
    out = check_entailment(j.phi.pullback(k), translate_evidence(k, j.evidence), j.psi.pullback(k),
                           j.universe, j.fuel + TRANSLATION_OVERHEAD, j.mode,
                           j.measure, k.src_space)
    if not out.holds:
        raise TransportFault(f"transport along {k.name} produced a failing judgment: {out.counterexample}")
    return out


# ---------------------------------------------------------------- axioms

@dataclass
class AxiomReport:
    instances: int = 0
    failures: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures


def diamond_after_return(x, psi: Proposition) -> bool:
    return tv_equal(psi.at(x), diamond(ret(x), psi))


def diamond_after_bind(t: TraceTree, f: Callable, psi: Proposition) -> bool:
    inner = FnProp(lambda x: diamond(f(x), psi))
    return tv_equal(diamond(t, inner), diamond(bind(t, f), psi))


def diamond_monotone(t: TraceTree, psi1: Proposition, psi2: Proposition, labels) -> bool:
    """Internal monotonicity at the top element: ``psi1 <= psi2`` everywhere gives ``<>psi1 <= <>psi2``."""
    if not all(tv_leq(psi1.at(x), psi2.at(x)) for x in labels):
        return True
    return tv_leq(diamond(t, psi1), diamond(t, psi2))


def diamond_internal_monotone(t: TraceTree, psi1: Proposition, psi2: Proposition, labels) -> bool:
    """``meet_x (psi1(x) => psi2(x)) <= (<>psi1 => <>psi2)`` with ``x`` over ``labels``."""
    lhs = TruthValue.constant(1)
    for x in labels:
        lhs = tv_meet(lhs, tv_impl(psi1.at(x), psi2.at(x)))
    return tv_leq(lhs, tv_impl(diamond(t, psi1), diamond(t, psi2)))


def check_modality_axioms(instances: int = 200, seed: int = 0, max_depth: int = 4) -> AxiomReport:
    """After-Return and After-Bind as exact equalities, plus internal monotonicity, on random instances."""
    from . import generators as gen

    rng = random.Random(seed)
    report = AxiomReport()
    for i in range(instances):
        labels = gen.LABELS
        t = gen.random_tree(rng, max_depth=max_depth)
        f = gen.random_continuation(rng, labels, max_depth=max_depth)
        psi = gen.random_postcondition(rng, labels)
        x = rng.choice(labels)
        if not diamond_after_return(x, psi):
            report.failures.append((i, "after-return"))
        if not diamond_after_bind(t, f, psi):
            report.failures.append((i, "after-bind"))
        psi1, psi2 = gen.random_ordered_postconditions(rng, labels)
        if not diamond_monotone(t, psi1, psi2, labels):
            report.failures.append((i, "monotonicity"))
        if not diamond_internal_monotone(t, psi, gen.random_postcondition(rng, labels), labels):
            report.failures.append((i, "internal-monotonicity"))
        report.instances += 1
    return report
