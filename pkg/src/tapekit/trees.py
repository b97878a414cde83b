"""Finite decision trees over tape addresses.

A :class:`TraceTree` is an exact finite description of a measurable tape
computation ``R -> X_bot``: follow the bits of a tape from the root until a
leaf is reached.  Trees are produced by symbolically executing code
(:func:`trace`), and they carry the reader-monad structure (:func:`ret`,
:func:`bind`) in which sequential composition threads the same tape.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterator, Mapping, Union

from .lang import (App, Bottom, Code, NeedBit, Outcome, Remap, Value, Var,
                   bracket_abstract, free_vars, run)
from .tapes import (Address, BitPattern, EMPTY_PATTERN, Tape, TapeMapSpec,
                    TapeSpace, as_space, split_map)

#: steps added by :func:`translate_evidence` in front of the original run
TRANSLATION_OVERHEAD = 3


@dataclass(frozen=True)
class Leaf:
    outcome: Outcome


@dataclass(frozen=True)
class Branch:
    addr: Address
    zero: "TraceTree"
    one: "TraceTree"


TraceTree = Union[Leaf, Branch]


def trace(c: Code, space: Union[TapeSpace, int], fuel: int) -> TraceTree:
    """Symbolically execute ``c`` over all tapes of ``space``.

    The evaluator is rerun with a partial assignment; whenever it asks for an
    unassigned bit, the tree branches on that address.
    """
    if free_vars(c):
        raise ValueError(f"code has free variables {sorted(free_vars(c))}")
    arity = as_space(space).arity

    def explore(assign: dict) -> TraceTree:
        def reader(a: Address) -> int:
            try:
                return assign[a]
            except KeyError:
                raise NeedBit(a) from None

        try:
            return Leaf(run(c, reader, arity, fuel))
        except NeedBit as need:
            a = need.addr
            return Branch(a, explore({**assign, a: 0}), explore({**assign, a: 1}))

    return explore({})


def mca_apply(c1: Code, c2: Code, space, fuel: int) -> TraceTree:
    return trace(App(c1, c2), space, fuel)


def leaves(t: TraceTree) -> Iterator[tuple[BitPattern, Outcome]]:
    """Yield ``(path pattern, outcome)`` in zero-first depth-first order."""
    stack = [(t, {})]
    while stack:
        node, path = stack.pop()
        if isinstance(node, Leaf):
            yield BitPattern(path), node.outcome
        else:
            stack.append((node.one, {**path, node.addr: 1}))
            stack.append((node.zero, {**path, node.addr: 0}))


def outcome_at(t: TraceTree, tape: Tape) -> Outcome:
    while isinstance(t, Branch):
        t = t.one if tape.read(t.addr) else t.zero
    return t.outcome


def outcomes(t: TraceTree) -> list[Outcome]:
    seen = {}
    for _, out in leaves(t):
        seen.setdefault(out, None)
    return list(seen)


def depth(t: TraceTree) -> int:
    if isinstance(t, Leaf):
        return 0
    return 1 + max(depth(t.zero), depth(t.one))


def size(t: TraceTree) -> int:
    return sum(1 for _ in leaves(t))


def paths_distinct(t: TraceTree, seen: frozenset = frozenset()) -> bool:
    if isinstance(t, Leaf):
        return True
    if t.addr in seen:
        return False
    below = seen | {t.addr}
    return paths_distinct(t.zero, below) and paths_distinct(t.one, below)


def restrict(t: TraceTree, assign: Mapping[Address, int]) -> TraceTree:
    """Specialise ``t`` to tapes agreeing with ``assign``; constrained reads collapse."""
    if not assign:
        return t
    if isinstance(t, Leaf):
        return t
    if t.addr in assign:
        return restrict(t.one if assign[t.addr] else t.zero, assign)
    return Branch(t.addr, restrict(t.zero, assign), restrict(t.one, assign))


def prune(t: TraceTree) -> TraceTree:
    """Drop branches whose two children are identical."""
    if isinstance(t, Leaf):
        return t
    z, o = prune(t.zero), prune(t.one)
    return z if z == o else Branch(t.addr, z, o)


def map_outcomes(t: TraceTree, fn: Callable[[Outcome], Outcome]) -> TraceTree:
    if isinstance(t, Leaf):
        return Leaf(fn(t.outcome))
    return Branch(t.addr, map_outcomes(t.zero, fn), map_outcomes(t.one, fn))


# ---------------------------------------------------------------- monad

def ret(x) -> TraceTree:
    return Leaf(Value(x))


def bind(t: TraceTree, f: Callable[[object], TraceTree]) -> TraceTree:
    """Kleisli bind of the tape reader monad.

    ``f(x)`` is grafted at each value leaf and specialised to the path that
    led there, so a read of an address already decided on the path reuses
    that bit instead of branching again.
    """
    def go(node: TraceTree, path: dict) -> TraceTree:
        if isinstance(node, Branch):
            return Branch(node.addr,
                          go(node.zero, {**path, node.addr: 0}),
                          go(node.one, {**path, node.addr: 1}))
        if isinstance(node.outcome, Bottom):
            return node
        return restrict(f(node.outcome.value), path)

    return go(t, {})


def reindex(t: TraceTree, k: TapeMapSpec) -> TraceTree:
    """``kappa^M``: turn a computation over the destination space of ``k`` into one over its source."""
    def go(node: TraceTree, path: dict) -> TraceTree:
        if isinstance(node, Leaf):
            return node
        src = k.addr_map(node.addr)
        neg = k.negates(node.addr)
        if src in path:
            return go(node.one if path[src] ^ neg else node.zero, path)
        on0, on1 = (node.one, node.zero) if neg else (node.zero, node.one)
        return Branch(src, go(on0, {**path, src: 0}), go(on1, {**path, src: 1}))

    return go(t, {})


def bind_split(t: TraceTree, f: Callable[[object], TraceTree],
               k: TapeMapSpec | None = None) -> TraceTree:
    """Sequence ``t`` then ``f`` on independent sub-tapes.

    ``t`` and every ``f(x)`` are single-stream computations; ``t`` is routed
    through lane 0 of ``k`` (even positions for the default ``split:2``) and
    the continuation through lane 1 (odd positions).
    """
    k = k or split_map(2)
    first, second = k.lane_map(0), k.lane_map(1)
    return bind(reindex(t, first), lambda x: reindex(f(x), second))


def translate_evidence(k: TapeMapSpec, e: Code) -> Code:
    """``tr_kappa(e) = [x] remap_kappa (e x)``.

    Running the result on a tape ``r`` with input ``c`` takes exactly
    :data:`TRANSLATION_OVERHEAD` more steps than running ``e c`` on
    ``kappa(r)`` and yields the same outcome.
    """
    if free_vars(e):
        raise ValueError("evidence must be closed")
    return bracket_abstract("x", Remap(k, App(e, Var("x"))))


def pattern_of(assign: Mapping[Address, int]) -> BitPattern:
    return BitPattern(assign) if assign else EMPTY_PATTERN
