"""Tape-indexed truth values with Goedel-Heyting structure.

A :class:`TruthValue` is a step function ``R -> [0,1]``: a finite list of
pairwise-disjoint, jointly exhaustive :class:`~tapekit.tapes.BitPattern`
cells, each with a rational value, plus finitely many exceptional tapes
whose value overrides their cell.  Under a nondegenerate product measure
every cell has positive mass and every single tape is null, which is what
makes the almost-sure order decidable here.
"""
from __future__ import annotations

import itertools
from fractions import Fraction
from typing import Callable, Iterable, Optional, Sequence

from .errors import DegenerateMeasureError, EmptyFamily
from .tapes import (EMPTY_PATTERN, BitPattern, ProductMeasure, Tape,
                    TapeMapSpec, preimage_pattern, tape_preimages)

Cell = tuple[BitPattern, Fraction]


def _frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


class TruthValue:
    __slots__ = ("cells", "exceptions", "note")

    def __init__(self, cells: Iterable[tuple[BitPattern, object]],
                 exceptions: Iterable[tuple[Tape, object]] = (), note: str = ""):
        self.cells: tuple[Cell, ...] = tuple((p, _frac(v)) for p, v in cells)
        exc: dict[Tape, Fraction] = {}
        for tape, v in exceptions:
            exc[tape] = _frac(v)
        self.exceptions: tuple[tuple[Tape, Fraction], ...] = tuple(exc.items())
        self.note = note
        for _, v in (*self.cells, *self.exceptions):
            if not 0 <= v <= 1:
                raise ValueError(f"truth value {v} outside [0,1]")
        if not self.cells:
            raise ValueError("a truth value needs at least one cell")

    @classmethod
    def constant(cls, v) -> "TruthValue":
        return cls([(EMPTY_PATTERN, v)])

    @classmethod
    def indicator(cls, pattern: BitPattern, inside=1, outside=0) -> "TruthValue":
        """``inside`` on the pattern event, ``outside`` elsewhere."""
        cells = [(pattern, inside)]
        seen: dict = {}
        for a, b in pattern:
            cells.append((BitPattern({**seen, a: 1 - b}), outside))
            seen[a] = b
        return cls(cells)

    def with_exceptions(self, exceptions: Iterable[tuple[Tape, object]]) -> "TruthValue":
        return TruthValue(self.cells, [*self.exceptions, *exceptions], self.note)

    def drop_exceptions(self) -> "TruthValue":
        return TruthValue(self.cells)

    @property
    def support(self) -> frozenset:
        out = set()
        for p, _ in self.cells:
            out |= p.addresses
        return frozenset(out)

    def values(self) -> set[Fraction]:
        return {v for _, v in (*self.cells, *self.exceptions)}

    def __eq__(self, other) -> bool:
        if not isinstance(other, TruthValue):
            return NotImplemented
        return tv_equal(self, other)

    __hash__ = None

    def __repr__(self) -> str:
        cells = ", ".join(f"{dict((str(a), b) for a, b in p)}:{v}" for p, v in self.cells[:6])
        more = "" if len(self.cells) <= 6 else f", ... {len(self.cells)} cells"
        exc = f"; exceptions={[(str(t), str(v)) for t, v in self.exceptions]}" if self.exceptions else ""
        return f"TruthValue({cells}{more}{exc})"

    def check_partition(self, limit: int = 16) -> bool:
        """Brute-force check that the cells partition R (over at most ``limit`` support bits)."""
        addrs = sorted(self.support)
        if len(addrs) > limit:
            raise ValueError("support too large to enumerate")
        for bits in itertools.product((0, 1), repeat=len(addrs)):
            point = BitPattern(dict(zip(addrs, bits)))
            if sum(1 for p, _ in self.cells if p.compatible(point)) != 1:
                return False
        return True


def tv_eval(v: TruthValue, t: Tape) -> Fraction:
    for tape, val in v.exceptions:
        if tape == t:
            return val
    for p, val in v.cells:
        if p.matches(t):
            return val
    raise ValueError(f"no cell covers tape {t}; not a partition")


def refine(values: Sequence[TruthValue]) -> list[tuple[BitPattern, tuple[Fraction, ...]]]:
    """Common refinement of several partitions, keeping every operand's value per cell."""
    acc: list[tuple[BitPattern, tuple[Fraction, ...]]] = [(EMPTY_PATTERN, ())]
    for v in values:
        nxt = []
        for p, vals in acc:
            for q, w in v.cells:
                m = p.merge(q)
                if m is not None:
                    nxt.append((m, vals + (w,)))
        acc = nxt
    return acc


def _exception_tapes(values: Sequence[TruthValue]) -> list[Tape]:
    seen: dict[Tape, None] = {}
    for v in values:
        for t, _ in v.exceptions:
            seen.setdefault(t, None)
    return list(seen)


def tv_combine(fn: Callable[..., Fraction], *values: TruthValue) -> TruthValue:
    """Pointwise ``fn`` over the common refinement and over every exception tape."""
    cells = [(p, fn(*vals)) for p, vals in refine(values)]
    exc = [(t, fn(*(tv_eval(v, t) for v in values))) for t in _exception_tapes(values)]
    return TruthValue(cells, exc)


def godel_impl(a: Fraction, b: Fraction) -> Fraction:
    return Fraction(1) if a <= b else b


def tv_meet(a: TruthValue, b: TruthValue) -> TruthValue:
    return tv_combine(min, a, b)


def tv_join(a: TruthValue, b: TruthValue) -> TruthValue:
    return tv_combine(max, a, b)


def tv_impl(a: TruthValue, b: TruthValue) -> TruthValue:
    return tv_combine(godel_impl, a, b)


def _require_nondegenerate(m: Optional[ProductMeasure]) -> None:
    if m is None or not m.nondegenerate:
        raise DegenerateMeasureError("almost-sure reasoning needs every bias strictly inside (0,1)")


def first_violation(a: TruthValue, b: TruthValue, almost_sure: bool = False):
    """First place where ``a > b``: a ``BitPattern`` cell, a ``Tape`` exception, or ``None``.

    Cells are reported in the order of ``a``'s cells refined by ``b``'s.
    Exceptions are only inspected in pointwise mode.
    """
    for p, (x, y) in refine((a, b)):
        if x > y:
            return p, x, y
    if not almost_sure:
        for t in _exception_tapes((a, b)):
            x, y = tv_eval(a, t), tv_eval(b, t)
            if x > y:
                return t, x, y
    return None


def tv_leq(a: TruthValue, b: TruthValue) -> bool:
    """Pointwise order: every cell of the refinement and every exception tape."""
    return first_violation(a, b) is None


def tv_leq_as(a: TruthValue, b: TruthValue, m: ProductMeasure) -> bool:
    """Almost-sure order; exceptions are null and every cell has positive mass."""
    _require_nondegenerate(m)
    return first_violation(a, b, almost_sure=True) is None


def tv_equal(a: TruthValue, b: TruthValue) -> bool:
    """Equality as functions ``R -> [0,1]``."""
    if any(x != y for _, (x, y) in refine((a, b))):
        return False
    return all(tv_eval(a, t) == tv_eval(b, t) for t in _exception_tapes((a, b)))


def as_equiv(a: TruthValue, b: TruthValue, m: ProductMeasure) -> bool:
    _require_nondegenerate(m)
    return all(x == y for _, (x, y) in refine((a, b)))


def ess_sup(family: Sequence[TruthValue]) -> TruthValue:
    if not family:
        raise EmptyFamily("essential supremum of an empty family")
    return TruthValue([(p, max(vals)) for p, vals in refine(family)])


def ess_inf(family: Sequence[TruthValue]) -> TruthValue:
    if not family:
        raise EmptyFamily("essential infimum of an empty family")
    return TruthValue([(p, min(vals)) for p, vals in refine(family)])


def tv_pullback(k: TapeMapSpec, v: TruthValue) -> TruthValue:
    """``kappa^Omega(v) = v o kappa``, a truth value over the source space."""
    cells = []
    for p, val in v.cells:
        pre = preimage_pattern(k, p)
        if pre is not None:
            cells.append((pre, val))
    exceptions, dropped = [], []
    for t, val in v.exceptions:
        pre = tape_preimages(k, t)
        if pre is None:
            dropped.append(str(t))
        else:
            exceptions.extend((r, val) for r in pre)
    note = ""
    if dropped:
        note = f"dropped exceptions with no finite eventually-periodic preimage under {k.name}: {', '.join(dropped)}"
    return TruthValue(cells, exceptions, note)


def simplify(v: TruthValue) -> TruthValue:
    """Merge sibling cells that differ in one bit and carry the same value."""
    cells = dict(v.cells)
    changed = True
    while changed:
        changed = False
        for p, val in list(cells.items()):
            if p not in cells:
                continue
            for a, b in p:
                sib = p.extend(a, 1 - b)
                if cells.get(sib) == val:
                    del cells[p], cells[sib]
                    parent = BitPattern({x: y for x, y in p if x != a})
                    cells[parent] = val
                    changed = True
                    break
    return TruthValue(cells.items(), v.exceptions, v.note)
