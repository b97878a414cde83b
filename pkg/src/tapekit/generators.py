"""Seeded random instances for the property suites.

Every generator takes an explicit :class:`random.Random` so a suite is a pure
function of its seed.
"""
from __future__ import annotations

import random
from fractions import Fraction
from typing import Callable, Optional

from .dist import BOTTOM, FinDist
from .lang import (FUEL_EXHAUSTED, STUCK, Bit, Bottom, Code, Con, Nat, Value, Var, app,
                   bracket_abstract, I, IfBit, K, Read, Remap, S, Fix)
from .tapes import Address, BitPattern, Tape, TapeMapSpec, TapeSpace, flip_map, drop_map
from .trees import Branch, Leaf, TraceTree, mca_apply
from .truth import TruthValue, tv_join, tv_meet

H, T = Con("H"), Con("T")
LABELS: tuple = (H, T, Bit(0), Bit(1))
VALUES: tuple = tuple(Fraction(x) for x in ("0", "1/4", "1/3", "1/2", "2/3", "3/4", "1"))
UNIVERSE: tuple = (H, T, Bit(0), Bit(1), Nat(2))


def _addresses(arity: int, max_index: int) -> list[Address]:
    return [Address(c, n) for c in range(arity) for n in range(max_index + 1)]


def random_tape(rng: random.Random, arity: int = 1, max_prefix: int = 6) -> Tape:
    streams = []
    for _ in range(arity):
        prefix = [rng.randint(0, 1) for _ in range(rng.randint(0, max_prefix))]
        tail = [rng.randint(0, 1) for _ in range(rng.randint(1, 3))]
        streams.append((prefix, tail))
    return Tape.from_streams(streams)


# ---------------------------------------------------------------- trees

def random_tree(rng: random.Random, max_depth: int = 4, labels=LABELS, arity: int = 1,
                max_index: int = 3, p_bottom: float = 0.15, p_leaf: float = 0.3) -> TraceTree:
    """A decision tree with distinct addresses along every path."""
    pool = _addresses(arity, max_index)

    def grow(depth: int, used: frozenset) -> TraceTree:
        free = [a for a in pool if a not in used]
        if depth == 0 or not free or rng.random() < p_leaf:
            if rng.random() < p_bottom:
                return Leaf(Bottom(rng.choice((FUEL_EXHAUSTED, STUCK))))
            return Leaf(Value(rng.choice(labels)))
        a = rng.choice(free)
        return Branch(a, grow(depth - 1, used | {a}), grow(depth - 1, used | {a}))

    return grow(max_depth, frozenset())


def random_continuation(rng: random.Random, labels=LABELS, max_depth: int = 3,
                        **tree_args) -> Callable[[object], TraceTree]:
    """A Kleisli arrow given by one random tree per label.

    Addresses may repeat those of the tree being bound, which exercises the
    path restriction in ``bind``.
    """
    table = {x: random_tree(rng, max_depth, labels, **tree_args) for x in labels}
    return table.__getitem__


def random_pair_continuation(rng: random.Random, labels=LABELS, max_depth: int = 3) -> Callable:
    """``x -> tree`` whose leaves are ``(x, y)`` pairs, so sequencing keeps both results."""
    table = {x: _tag(random_tree(rng, max_depth, labels), x) for x in labels}
    return table.__getitem__


def _tag(t: TraceTree, x) -> TraceTree:
    if isinstance(t, Branch):
        return Branch(t.addr, _tag(t.zero, x), _tag(t.one, x))
    if isinstance(t.outcome, Bottom):
        return t
    return Leaf(Value((x, t.outcome.value)))


# ---------------------------------------------------------------- truth values

def random_tv(rng: random.Random, arity: int = 1, max_depth: int = 3, max_index: int = 3,
              p_exception: float = 0.3, values=VALUES) -> TruthValue:
    """A random step function, optionally with up to two exceptional tapes."""
    pool = _addresses(arity, max_index)
    cells = []

    def grow(depth: int, path: dict) -> None:
        free = [a for a in pool if a not in path]
        if depth == 0 or not free or rng.random() < 0.3:
            cells.append((BitPattern(path), rng.choice(values)))
            return
        a = rng.choice(free)
        grow(depth - 1, {**path, a: 0})
        grow(depth - 1, {**path, a: 1})

    grow(max_depth, {})
    exceptions = []
    while rng.random() < p_exception and len(exceptions) < 2:
        exceptions.append((random_tape(rng, arity), rng.choice(values)))
    return TruthValue(cells, exceptions)


def random_accept(rng: random.Random, labels=LABELS) -> frozenset:
    return frozenset(x for x in labels if rng.random() < 0.5)


def random_postcondition(rng: random.Random, labels=LABELS, arity: int = 1):
    from .modality import CrispLift, TestTable

    if rng.random() < 0.4:
        return CrispLift(random_accept(rng, labels))
    return TestTable({x: random_tv(rng, arity) for x in labels}, default=random_tv(rng, arity))


def random_ordered_postconditions(rng: random.Random, labels=LABELS, arity: int = 1):
    """Two postconditions with ``psi1(x) <= psi2(x)`` at every label."""
    from .modality import CrispLift, TestTable

    if rng.random() < 0.3:
        small = random_accept(rng, labels)
        return CrispLift(small), CrispLift(small | random_accept(rng, labels))
    low = {x: random_tv(rng, arity) for x in labels}
    high = {x: tv_join(v, random_tv(rng, arity)) for x, v in low.items()}
    return TestTable(low), TestTable(high)


# ---------------------------------------------------------------- distributions

def random_findist(rng: random.Random, labels=LABELS, with_bottom: bool = True) -> FinDist:
    pool = list(labels) + ([BOTTOM] if with_bottom else [])
    support = rng.sample(pool, rng.randint(1, min(4, len(pool))))
    weights = [rng.randint(1, 4) for _ in support]
    total = sum(weights)
    return FinDist({z: Fraction(w, total) for z, w in zip(support, weights)})


def random_kernel(rng: random.Random, labels=LABELS) -> Callable[[object], FinDist]:
    table = {x: random_findist(rng, labels) for x in labels}
    return table.__getitem__


# ---------------------------------------------------------------- codes

def random_term(rng: random.Random, depth: int = 4) -> Code:
    """An arbitrary closed combinator term; may get stuck or loop."""
    if depth == 0 or rng.random() < 0.3:
        return rng.choice((S, K, I, H, T, Bit(0), Bit(1), Nat(rng.randint(0, 3))))
    return app(random_term(rng, depth - 1), random_term(rng, depth - 1))


def random_body(rng: random.Random, arity: int = 1, depth: int = 3, max_index: int = 3,
                var: str = "x") -> Code:
    """An open program in ``var`` built from bit tests, reads, remaps and a divergent loop."""
    if depth == 0 or rng.random() < 0.25:
        r = rng.random()
        if r < 0.35:
            return Var(var)
        if r < 0.7:
            return rng.choice(LABELS)
        if r < 0.85:
            return Read(rng.randrange(arity), rng.randint(0, max_index))
        return Fix(I)
    r = rng.random()
    if r < 0.75:
        addr = Read(rng.randrange(arity), rng.randint(0, max_index))
        return IfBit(addr, random_body(rng, arity, depth - 1, max_index, var),
                     random_body(rng, arity, depth - 1, max_index, var))
    if r < 0.9:
        inner = flip_map(arity) if arity > 1 or rng.random() < 0.5 else drop_map(1)
        return Remap(inner, random_body(rng, arity, depth - 1, max_index, var))
    return app(K, random_body(rng, arity, depth - 1, max_index, var), Var(var))


def random_evidence(rng: random.Random, arity: int = 1, depth: int = 3) -> Code:
    return bracket_abstract("x", random_body(rng, arity, depth))


def random_holding_judgment(rng: random.Random, space=1, universe=UNIVERSE, fuel: Optional[int] = None,
                            depth: int = 3):
    """A pointwise-holding judgment: ``phi(c)`` is ``diamond(e c, psi)`` met with a random value."""
    from .modality import TestTable, check_entailment, diamond

    arity = space.arity if isinstance(space, TapeSpace) else int(space)
    fuel = fuel if fuel is not None else rng.randint(16, 64)
    e = random_evidence(rng, arity, depth)
    psi = random_postcondition(rng, LABELS, arity)
    if not isinstance(psi, TestTable):
        psi = TestTable({x: psi.at(x) for x in LABELS}, default=random_tv(rng, arity))
    phi = {}
    for c in universe:
        d = diamond(mca_apply(e, c, arity, fuel), psi)
        phi[c] = tv_meet(d, random_tv(rng, arity))
    j = check_entailment(TestTable(phi), e, psi, universe, fuel, space=arity)
    assert j.holds, "generated judgment should hold by construction"
    return j


def random_map_instance(rng: random.Random, k: TapeMapSpec, **kw):
    """A holding judgment over the destination space of ``k``."""
    return random_holding_judgment(rng, k.dst_arity, **kw)
