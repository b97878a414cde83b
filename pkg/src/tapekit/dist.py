"""Finitely supported distributions over outcomes, and the must modality.

:class:`FinDist` is the law layer: the pushforward of a tape measure along a
computation forgets which tapes produced which outcome and keeps only the
masses.  Divergence is an ordinary label, :data:`BOTTOM`.
"""
from __future__ import annotations

import random
from collections.abc import Mapping
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Optional, Sequence, Union

from .errors import DegenerateMeasureError
from .lang import Bottom, Code
from .tapes import (ProductMeasure, TapeMapSpec, TapeSpace, as_space, pattern_measure,
                    pushforward_measure, split_map)
from .trees import TraceTree, bind, bind_split, leaves, mca_apply


class _BottomLabel:
    """The divergence label; a singleton."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "BOTTOM"

    def __str__(self):
        return "bottom"

    def __reduce__(self):
        return (_BottomLabel, ())


BOTTOM = _BottomLabel()


def outcome_label(out) -> object:
    """Distribution key of a trace-tree outcome."""
    return BOTTOM if isinstance(out, Bottom) else out.value


class FinDist(Mapping):
    """Immutable map from outcome labels to positive rationals summing to 1."""

    __slots__ = ("_masses",)

    def __init__(self, masses: Union[Mapping, Iterable[tuple[object, object]]] = ()):
        items = masses.items() if isinstance(masses, Mapping) else masses
        acc: dict = {}
        for z, p in items:
            p = p if isinstance(p, Fraction) else Fraction(p)
            if p < 0:
                raise ValueError(f"negative mass {p} for {z!r}")
            acc[z] = acc.get(z, Fraction(0)) + p
        self._masses = {z: p for z, p in acc.items() if p != 0}
        total = sum(self._masses.values(), Fraction(0))
        if total != 1:
            raise ValueError(f"masses sum to {total}, not 1")

    def __getitem__(self, z):
        return self._masses[z]

    def __iter__(self):
        return iter(self._masses)

    def __len__(self):
        return len(self._masses)

    def __hash__(self):
        return hash(frozenset(self._masses.items()))

    def __repr__(self):
        body = ", ".join(f"{z}: {p}" for z, p in self._masses.items())
        return f"FinDist({{{body}}})"

    @property
    def support(self) -> frozenset:
        return frozenset(self._masses)

    def mass(self, z) -> Fraction:
        return self._masses.get(z, Fraction(0))

    def prob(self, accept) -> Fraction:
        return sum((p for z, p in self._masses.items() if z in accept), Fraction(0))

    def map(self, fn: Callable) -> "FinDist":
        return FinDist((fn(z), p) for z, p in self._masses.items())


def dirac(x) -> FinDist:
    return FinDist({x: Fraction(1)})


def dist_bind(d: FinDist, f: Callable[[object], FinDist]) -> FinDist:
    """Mixture ``sum_z d(z) f(z)``; divergence is strict, ``f(bottom) = dirac(bottom)``."""
    out: list = []
    for z, p in d.items():
        inner = dirac(BOTTOM) if z is BOTTOM else f(z)
        out.extend((w, p * q) for w, q in inner.items())
    return FinDist(out)


def law(t: TraceTree, m: ProductMeasure, overrides: Optional[Mapping] = None) -> FinDist:
    """Pushforward of ``m`` along the computation ``t``.

    ``overrides`` (outcome patches on single tapes) are null under a
    nondegenerate measure and so leave the law untouched; under a degenerate
    measure a single tape may carry mass, which this representation cannot
    account for.
    """
    if overrides and not m.nondegenerate:
        raise DegenerateMeasureError("outcome patches on single tapes need a nondegenerate measure")
    return FinDist((outcome_label(out), pattern_measure(m, path)) for path, out in leaves(t))


def must(d: FinDist, accept) -> bool:
    """``d |=must P``: every outcome with positive mass is accepted."""
    accept = frozenset(accept)
    if BOTTOM in accept:
        raise ValueError("bottom is never an accepted outcome")
    return d.support <= accept


@dataclass(frozen=True)
class MustJudgment:
    dist: FinDist
    accept: frozenset
    verdict: bool

    @classmethod
    def of(cls, d: FinDist, accept) -> "MustJudgment":
        accept = frozenset(accept)
        return cls(d, accept, must(d, accept))

    @property
    def rejected(self) -> list:
        return [z for z in self.dist if z not in self.accept]


@dataclass(frozen=True)
class MustCounterexample:
    code: Code
    outcome: object
    mass: Fraction


@dataclass(frozen=True, eq=False)
class MustEntailment:
    evidence: Code
    accept: frozenset
    universe: tuple
    fuel: int
    measure: ProductMeasure
    space: TapeSpace
    laws: tuple = ()
    verdict: str = "holds"
    counterexample: Optional[MustCounterexample] = None

    @property
    def holds(self) -> bool:
        return self.verdict == "holds"


def must_entail(phi, e: Code, accept, universe: Sequence[Code], m: ProductMeasure, fuel: int,
                space: Union[TapeSpace, int] = 1) -> MustEntailment:
    """``phi |-e must(accept)`` with application read as the tape-induced law.

    ``phi`` is a predicate on codes, a mapping from codes to booleans, or
    ``None`` for the always-true precondition.
    """
    if fuel <= 0:
        raise ValueError("fuel must be positive")
    if not universe:
        raise ValueError("the code universe must be nonempty")
    accept = frozenset(accept)
    if BOTTOM in accept:
        raise ValueError("bottom is never an accepted outcome")
    space = as_space(space)
    pre = _as_predicate(phi)
    laws, cex = [], None
    for c in universe:
        if not pre(c):
            continue
        d = law(mca_apply(e, c, space, fuel), m)
        laws.append((c, d))
        if cex is None and not must(d, accept):
            bad = next(z for z in d if z not in accept)
            cex = MustCounterexample(c, bad, d[bad])
    return MustEntailment(e, accept, tuple(universe), fuel, m, space, tuple(laws),
                          "fails" if cex else "holds", cex)


def _as_predicate(phi) -> Callable[[Code], bool]:
    if phi is None:
        return lambda c: True
    if isinstance(phi, Mapping):
        return lambda c: bool(phi.get(c, False))
    return lambda c: bool(phi(c))


# ---------------------------------------------------------------- laws and axioms

@dataclass
class DistReport:
    instances: int = 0
    failures: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures


def check_dist_monad_laws(instances: int = 200, seed: int = 0) -> DistReport:
    """Left identity, right identity and associativity as exact mass equality."""
    from . import generators as gen

    rng = random.Random(seed)
    report = DistReport()
    for i in range(instances):
        labels = gen.LABELS
        d = gen.random_findist(rng, labels)
        f = gen.random_kernel(rng, labels)
        g = gen.random_kernel(rng, labels)
        x = rng.choice(labels)
        if dist_bind(dirac(x), f) != f(x):
            report.failures.append((i, "left-identity"))
        if dist_bind(d, dirac) != d:
            report.failures.append((i, "right-identity"))
        if dist_bind(dist_bind(d, f), g) != dist_bind(d, lambda z: dist_bind(f(z), g)):
            report.failures.append((i, "associativity"))
        report.instances += 1
    return report


def check_must_modality_axioms(instances: int = 200, seed: int = 0) -> DistReport:
    """After-Return, After-Bind and monotonicity of the must modality as Boolean identities."""
    from . import generators as gen

    rng = random.Random(seed)
    report = DistReport()
    for i in range(instances):
        labels = gen.LABELS
        d = gen.random_findist(rng, labels)
        f = gen.random_kernel(rng, labels)
        accept = gen.random_accept(rng, labels)
        x = rng.choice(labels)
        if must(dirac(x), accept) != (x in accept):
            report.failures.append((i, "after-return"))
        bound = dist_bind(d, f)
        after = BOTTOM not in d and all(must(f(z), accept) for z in d.support)
        if must(bound, accept) != after:
            report.failures.append((i, "after-bind"))
        union = frozenset().union(*(dirac(BOTTOM).support if z is BOTTOM else f(z).support for z in d))
        if bound.support != union:
            report.failures.append((i, "bind-support"))
        wider = accept | gen.random_accept(rng, labels)
        if must(d, accept) and not must(d, wider):
            report.failures.append((i, "monotonicity"))
        report.instances += 1
    return report


def check_law_split_seq(t: TraceTree, f: Callable[[object], TraceTree],
                        m: ProductMeasure = ProductMeasure(),
                        k: Optional[TapeMapSpec] = None) -> bool:
    """``law(t >>=split f) == law(t) >>= (law . f)`` exactly.

    ``t`` and ``f(x)`` are single-stream computations.  Their laws are taken
    under the pushforward of ``m`` along the lane of ``k`` that feeds them.
    """
    k = k or split_map(2)
    m0 = pushforward_measure(k.lane_map(0), m)
    m1 = pushforward_measure(k.lane_map(1), m)
    lhs = law(bind_split(t, f, k), m)
    rhs = dist_bind(law(t, m0), lambda x: law(f(x), m1))
    return lhs == rhs


def check_law_plain_seq(t: TraceTree, f: Callable[[object], TraceTree],
                        m: ProductMeasure = ProductMeasure()) -> bool:
    """The same equation for ordinary bind, which shares the tape and can fail."""
    return law(bind(t, f), m) == dist_bind(law(t, m), lambda x: law(f(x), m))


@dataclass(frozen=True)
class BridgeResult:
    prob_one: bool
    must: bool

    @property
    def agrees(self) -> bool:
        return self.prob_one == self.must


def bridge_prob_one(t: TraceTree, m: ProductMeasure, accept,
                    overrides: Optional[Mapping] = None) -> BridgeResult:
    """Compare the tape-level probability-one collapse of ``<>t accept`` with must on the law."""
    from .extraction import prob_one_collapse
    from .modality import CrispLift, diamond

    v = diamond(t, CrispLift(accept), overrides)
    return BridgeResult(prob_one_collapse(v, m), must(law(t, m, overrides), accept))
