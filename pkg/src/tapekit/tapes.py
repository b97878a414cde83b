"""Bit-stream tape spaces, cylinder events, product measures and affine tape maps.

A tape of arity ``k`` is a tuple of ``k`` infinite bit streams.  Only
eventually-periodic streams are represented: a finite prefix followed by a
repeating nonempty word.  Every value is kept in a canonical form (primitive
period, shortest prefix) so that structural equality is stream equality.
"""
from __future__ import annotations

import itertools
import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, NamedTuple, Optional

from .errors import ArityError, ParseError, UnsupportedPushforward

Bits = tuple[int, ...]


class Address(NamedTuple):
    component: int
    index: int

    def __str__(self) -> str:
        return f"{self.component},{self.index}"

    @classmethod
    def parse(cls, text: str) -> "Address":
        try:
            comp, idx = (int(p) for p in text.split(","))
        except ValueError:
            raise ParseError(f"bad address {text!r}, expected 'component,index'") from None
        if comp < 0 or idx < 0:
            raise ParseError(f"negative address {text!r}")
        return cls(comp, idx)


@dataclass(frozen=True)
class TapeSpace:
    arity: int = 1

    def __post_init__(self):
        if self.arity < 1:
            raise ArityError("tape space arity must be >= 1")

    def check(self, addr: Address) -> None:
        if not 0 <= addr.component < self.arity:
            raise ArityError(f"address {addr} outside arity-{self.arity} space")

    def prefix_tapes(self, depth: int, tail: int = 0) -> Iterator["Tape"]:
        """All tapes whose components are ``depth``-bit words followed by a constant tail."""
        words = list(itertools.product((0, 1), repeat=depth))
        for combo in itertools.product(words, repeat=self.arity):
            yield Tape.from_streams([(w, (tail,)) for w in combo])


def as_space(space) -> TapeSpace:
    if isinstance(space, TapeSpace):
        return space
    return TapeSpace(int(space))


# ---------------------------------------------------------------- streams

def _primitive_root(word: Bits) -> Bits:
    n = len(word)
    for d in range(1, n + 1):
        if n % d == 0 and word[:d] * (n // d) == word:
            return word[:d]
    return word


def _canonical_stream(prefix: Bits, tail: Bits) -> tuple[Bits, Bits]:
    if not tail:
        raise ParseError("periodic tail must be nonempty")
    tail = _primitive_root(tuple(tail))
    prefix = tuple(prefix)
    while prefix and prefix[-1] == tail[-1]:
        prefix = prefix[:-1]
        tail = (tail[-1],) + tail[:-1]
    return prefix, tail


def _stream_bit(stream: tuple[Bits, Bits], n: int) -> int:
    prefix, tail = stream
    if n < len(prefix):
        return prefix[n]
    return tail[(n - len(prefix)) % len(tail)]


def _check_bits(bits: Iterable[int]) -> Bits:
    out = tuple(int(b) for b in bits)
    if any(b not in (0, 1) for b in out):
        raise ParseError(f"not a bit word: {out}")
    return out


@dataclass(frozen=True)
class Tape:
    """An eventually-periodic point of ``R^(k)``; build with :meth:`from_streams` or :func:`parse_tape`."""

    streams: tuple[tuple[Bits, Bits], ...]

    @classmethod
    def from_streams(cls, streams) -> "Tape":
        canon = tuple(_canonical_stream(_check_bits(p), _check_bits(t)) for p, t in streams)
        if not canon:
            raise ArityError("a tape needs at least one component")
        return cls(canon)

    @classmethod
    def constant(cls, bit: int = 0, arity: int = 1) -> "Tape":
        return cls.from_streams([((), (bit,))] * arity)

    @property
    def arity(self) -> int:
        return len(self.streams)

    def read(self, addr: Address) -> int:
        if not 0 <= addr.component < self.arity:
            raise ArityError(f"address {addr} outside arity-{self.arity} tape")
        return _stream_bit(self.streams[addr.component], addr.index)

    def __str__(self) -> str:
        return format_tape(self)


def tape_read(t: Tape, a: Address) -> int:
    return t.read(a)


_COMPONENT_RE = re.compile(r"^([01]*):(0|1|\(([01]+)\)\*)$")


def parse_tape(text: str) -> Tape:
    """Parse ``<prefix>:<tail>``; components of a multi-stream tape are joined by ``|``."""
    streams = []
    for part in text.strip().split("|"):
        m = _COMPONENT_RE.match(part.strip())
        if not m:
            raise ParseError(f"bad tape literal component {part!r}")
        prefix = tuple(int(c) for c in m.group(1))
        tail = tuple(int(c) for c in (m.group(3) or m.group(2)))
        streams.append((prefix, tail))
    return Tape.from_streams(streams)


def format_tape(t: Tape) -> str:
    parts = []
    for prefix, tail in t.streams:
        tail_txt = str(tail[0]) if len(tail) == 1 else "(" + "".join(map(str, tail)) + ")*"
        parts.append("".join(map(str, prefix)) + ":" + tail_txt)
    return "|".join(parts)


# ---------------------------------------------------------------- events

class BitPattern:
    """A finite conjunction of bit constraints; the empty pattern is all of R."""

    __slots__ = ("_items", "_map", "_hash")

    def __init__(self, constraints: Mapping[Address, int] | Iterable[tuple[Address, int]] = ()):
        items = dict(constraints.items() if isinstance(constraints, Mapping) else constraints)
        for a, b in items.items():
            if b not in (0, 1):
                raise ValueError(f"constraint {a}={b} is not a bit")
        self._map = {Address(*a): int(b) for a, b in items.items()}
        self._items = tuple(sorted(self._map.items()))
        self._hash = hash(self._items)

    @classmethod
    def cylinder(cls, word: Iterable[int], component: int = 0, start: int = 0) -> "BitPattern":
        return cls({Address(component, start + i): b for i, b in enumerate(word)})

    def __len__(self) -> int:
        return len(self._items)

    def __iter__(self):
        return iter(self._items)

    def __contains__(self, addr) -> bool:
        return addr in self._map

    def get(self, addr: Address, default=None):
        return self._map.get(addr, default)

    def __eq__(self, other) -> bool:
        return isinstance(other, BitPattern) and self._items == other._items

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        body = " ".join(f"({a})={b}" for a, b in self._items)
        return f"BitPattern[{body}]"

    @property
    def addresses(self) -> frozenset:
        return frozenset(self._map)

    def items(self):
        return self._items

    def merge(self, other: "BitPattern") -> Optional["BitPattern"]:
        """Intersection of two events; ``None`` when they are disjoint."""
        small, big = (self, other) if len(self) <= len(other) else (other, self)
        for a, b in small._items:
            if big._map.get(a, b) != b:
                return None
        if len(small) == 0:
            return big
        merged = dict(big._map)
        merged.update(small._map)
        return BitPattern(merged)

    def compatible(self, other: "BitPattern") -> bool:
        small, big = (self, other) if len(self) <= len(other) else (other, self)
        return all(big._map.get(a, b) == b for a, b in small._items)

    def extend(self, addr: Address, bit: int) -> "BitPattern":
        d = dict(self._map)
        d[addr] = bit
        return BitPattern(d)

    def matches(self, t: Tape) -> bool:
        return all(t.read(a) == b for a, b in self._items)


EMPTY_PATTERN = BitPattern()


# ---------------------------------------------------------------- measures

def _as_fraction(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


@dataclass(frozen=True)
class ProductMeasure:
    """Independent Bernoulli bits; ``bias(a)`` is the probability that bit ``a`` is 1.

    Biases come from, in order of precedence: a per-address override, a
    per-component default, the global default.
    """

    default: Fraction = Fraction(1, 2)
    overrides: tuple[tuple[Address, Fraction], ...] = ()
    component_defaults: tuple[tuple[int, Fraction], ...] = ()
    _over: dict = field(init=False, repr=False, compare=False, hash=False)
    _comp: dict = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        object.__setattr__(self, "default", _as_fraction(self.default))
        comp = {int(c): _as_fraction(p) for c, p in self.component_defaults}
        over = {Address(*a): _as_fraction(p) for a, p in self.overrides}
        # canonical form: entries that repeat the inherited bias are dropped,
        # so equal measures compare equal
        comp = {c: p for c, p in comp.items() if p != self.default}
        over = {a: p for a, p in over.items() if p != comp.get(a.component, self.default)}
        object.__setattr__(self, "overrides", tuple(sorted(over.items())))
        object.__setattr__(self, "component_defaults", tuple(sorted(comp.items())))
        object.__setattr__(self, "_over", over)
        object.__setattr__(self, "_comp", comp)
        for p in self.biases():
            if not 0 <= p <= 1:
                raise ValueError(f"bias {p} outside [0,1]")

    @classmethod
    def fair(cls) -> "ProductMeasure":
        return cls()

    @classmethod
    def uniform(cls, p) -> "ProductMeasure":
        return cls(default=_as_fraction(p))

    def bias(self, addr: Address) -> Fraction:
        if addr in self._over:
            return self._over[addr]
        return self._comp.get(addr.component, self.default)

    def biases(self) -> list[Fraction]:
        return [self.default, *self._over.values(), *self._comp.values()]

    @property
    def nondegenerate(self) -> bool:
        return all(0 < p < 1 for p in self.biases())


def pattern_measure(m: ProductMeasure, p: Optional[BitPattern]) -> Fraction:
    """Probability of a pattern event (``None`` is the empty event)."""
    if p is None:
        return Fraction(0)
    total = Fraction(1)
    for a, b in p:
        q = m.bias(a)
        total *= q if b else 1 - q
    return total


# ---------------------------------------------------------------- tape maps

@dataclass(frozen=True)
class Lane:
    """How one destination component is read off the source: ``(i, n) -> (source, scale*n + offset)``."""

    source: int
    scale: int = 1
    offset: int = 0
    negate: bool = False

    def __post_init__(self):
        if self.scale < 1 or self.offset < 0 or self.source < 0:
            raise ValueError(f"invalid lane {self}")


@dataclass(frozen=True)
class TapeMapSpec:
    """A structured measurable map ``kappa : R^(src_arity) -> R^(dst_arity)``.

    Reading address ``a'`` of ``kappa(r)`` reads ``addr_map(a')`` of ``r``,
    negated when the lane of ``a'`` says so.
    """

    src_arity: int
    lanes: tuple[Lane, ...]
    name: str = "custom"

    def __post_init__(self):
        if not self.lanes:
            raise ArityError("a tape map needs at least one destination component")
        for lane in self.lanes:
            if lane.source >= self.src_arity:
                raise ArityError(f"lane source {lane.source} outside src arity {self.src_arity}")

    @property
    def dst_arity(self) -> int:
        return len(self.lanes)

    @property
    def src_space(self) -> TapeSpace:
        return TapeSpace(self.src_arity)

    @property
    def dst_space(self) -> TapeSpace:
        return TapeSpace(self.dst_arity)

    def addr_map(self, a: Address) -> Address:
        if not 0 <= a.component < self.dst_arity:
            raise ArityError(f"address {a} outside dst arity {self.dst_arity} of {self.name}")
        lane = self.lanes[a.component]
        return Address(lane.source, lane.scale * a.index + lane.offset)

    def negates(self, a: Address) -> int:
        return int(self.lanes[a.component].negate)

    def lane_map(self, i: int) -> "TapeMapSpec":
        """The single-lane map reading only destination component ``i``."""
        return TapeMapSpec(self.src_arity, (self.lanes[i],), f"{self.name}#{i}")

    @property
    def injective(self) -> bool:
        for (i, a), (j, b) in itertools.combinations(enumerate(self.lanes), 2):
            if a.source != b.source:
                continue
            # a.scale*n + a.offset == b.scale*m + b.offset has a solution in naturals
            # exactly when it has an integer one.
            if (b.offset - a.offset) % math.gcd(a.scale, b.scale) == 0:
                return False
        return True

    def __str__(self) -> str:
        return self.name


def compose(first: TapeMapSpec, second: TapeMapSpec) -> TapeMapSpec:
    """The map ``t -> second(first(t))``."""
    if second.src_arity != first.dst_arity:
        raise ArityError(f"cannot compose {first.name} ({first.dst_arity}) into {second.name} ({second.src_arity})")
    lanes = []
    for lane in second.lanes:
        inner = first.lanes[lane.source]
        lanes.append(Lane(inner.source, inner.scale * lane.scale,
                          inner.scale * lane.offset + inner.offset,
                          inner.negate != lane.negate))
    return TapeMapSpec(first.src_arity, tuple(lanes), f"{first.name};{second.name}")


def identity_map(arity: int = 1) -> TapeMapSpec:
    return TapeMapSpec(arity, tuple(Lane(i) for i in range(arity)),
                       "identity" if arity == 1 else f"identity:{arity}")


def flip_map(arity: int = 1) -> TapeMapSpec:
    return TapeMapSpec(arity, tuple(Lane(i, negate=True) for i in range(arity)),
                       "flip" if arity == 1 else f"flip:{arity}")


def drop_map(k: int) -> TapeMapSpec:
    return TapeMapSpec(1, (Lane(0, 1, k),), f"drop:{k}")


def split_map(k: int = 2) -> TapeMapSpec:
    if k < 1:
        raise ValueError("split arity must be >= 1")
    return TapeMapSpec(1, tuple(Lane(0, k, i) for i in range(k)), f"split:{k}")


def block_map(b: int) -> TapeMapSpec:
    """Group the stream into blocks of ``b`` bits and keep the head bit of each block."""
    return TapeMapSpec(1, (Lane(0, b, 0),), f"block:{b}")


def proj_map(i: int, k: int) -> TapeMapSpec:
    """Select component ``i`` of a ``k``-component tape."""
    return TapeMapSpec(k, (Lane(i),), f"proj:{i}/{k}")


def copy_map(k: int) -> TapeMapSpec:
    """Duplicate one stream into ``k`` identical components (not injective)."""
    return TapeMapSpec(1, tuple(Lane(0) for _ in range(k)), f"copy:{k}")


def builtin_map(name: str) -> TapeMapSpec:
    """Look up ``identity``, ``flip``, ``drop:<k>``, ``split:<k>``, ``block:<b>``, ``proj:<i>/<k>``, ``copy:<k>``."""
    head, _, arg = name.strip().partition(":")
    try:
        if head in ("identity", "flip"):
            n = int(arg) if arg else 1
            return identity_map(n) if head == "identity" else flip_map(n)
        if head == "drop":
            return drop_map(int(arg))
        if head == "split":
            return split_map(int(arg) if arg else 2)
        if head == "block":
            return block_map(int(arg))
        if head == "copy":
            return copy_map(int(arg))
        if head == "proj":
            i, k = arg.split("/")
            return proj_map(int(i), int(k))
    except (ValueError, ArityError):
        pass
    raise ParseError(f"unknown tape map {name!r}")


BUILTIN_MAP_NAMES = ("identity", "flip", "drop:<k>", "split:<k>", "block:<b>", "proj:<i>/<k>", "copy:<k>")


def apply_tapemap(k: TapeMapSpec, t: Tape) -> Tape:
    """``kappa(t)``, again eventually periodic."""
    if t.arity != k.src_arity:
        raise ArityError(f"{k.name} expects arity-{k.src_arity} tapes, got {t.arity}")
    streams = []
    for lane in k.lanes:
        prefix, tail = t.streams[lane.source]
        start = max(0, -(-(len(prefix) - lane.offset) // lane.scale))
        bits = [_stream_bit((prefix, tail), lane.scale * n + lane.offset) ^ lane.negate
                for n in range(start + len(tail))]
        streams.append((bits[:start], bits[start:]))
    return Tape.from_streams(streams)


def preimage_pattern(k: TapeMapSpec, p: BitPattern) -> Optional[BitPattern]:
    """``kappa^{-1}`` of a pattern event; ``None`` marks the empty event."""
    out: dict[Address, int] = {}
    for a, b in p:
        src = k.addr_map(a)
        want = b ^ k.negates(a)
        if out.setdefault(src, want) != want:
            return None
    return BitPattern(out)


def pushforward_measure(k: TapeMapSpec, m: ProductMeasure) -> ProductMeasure:
    """``kappa_* m`` as a product measure on the destination space."""
    if not k.injective:
        raise UnsupportedPushforward(f"{k.name} reads some source bit twice; its pushforward is not a product measure")

    def adjust(p: Fraction, lane: Lane) -> Fraction:
        return 1 - p if lane.negate else p

    comp = {}
    overrides = {}
    for i, lane in enumerate(k.lanes):
        comp[i] = adjust(m._comp.get(lane.source, m.default), lane)
        for a, p in m.overrides:
            if a.component != lane.source:
                continue
            q, r = divmod(a.index - lane.offset, lane.scale)
            if a.index >= lane.offset and r == 0:
                overrides[Address(i, q)] = adjust(p, lane)
    return ProductMeasure(m.default, tuple(overrides.items()), tuple(comp.items()))


def tape_preimages(k: TapeMapSpec, t: Tape) -> Optional[list[Tape]]:
    """All source tapes ``r`` with ``kappa(r) == t``.

    Returns ``None`` when the preimage is infinite (infinitely many source
    bits are never read by ``kappa``), and ``[]`` when ``t`` is not in the image.
    """
    if t.arity != k.dst_arity:
        raise ArityError(f"{k.name} produces arity-{k.dst_arity} tapes, got {t.arity}")
    streams = []
    free_total: list[tuple[int, int]] = []
    for c in range(k.src_arity):
        lanes = [(i, lane) for i, lane in enumerate(k.lanes) if lane.source == c]
        if not lanes:
            return None
        modulus = math.lcm(*(lane.scale for _, lane in lanes))
        for r in range(modulus):
            if not any(r % lane.scale == lane.offset % lane.scale for _, lane in lanes):
                return None
        period = math.lcm(*(lane.scale * len(t.streams[i][1]) for i, lane in lanes))
        start = max(lane.offset + lane.scale * len(t.streams[i][0]) for i, lane in lanes)
        start = start + (-start) % modulus
        bits: list[Optional[int]] = [None] * (start + period)
        for j in range(len(bits)):
            for i, lane in lanes:
                if j >= lane.offset and (j - lane.offset) % lane.scale == 0:
                    n = (j - lane.offset) // lane.scale
                    b = _stream_bit(t.streams[i], n) ^ lane.negate
                    if bits[j] is None:
                        bits[j] = b
                    elif bits[j] != b:
                        return []
        for j, b in enumerate(bits):
            if b is None:
                free_total.append((c, j))
        streams.append((bits, start))
    # Past ``start`` every residue class is covered and every read is periodic,
    # so the tail of the sampled window repeats; still confirm by mapping back.
    out = []
    for choice in itertools.product((0, 1), repeat=len(free_total)):
        filled = [list(bits) for bits, _ in streams]
        for (c, j), b in zip(free_total, choice):
            filled[c][j] = b
        cand = Tape.from_streams([(bits[:start], bits[start:])
                                  for bits, (_, start) in zip(filled, streams)])
        if apply_tapemap(k, cand) == t:
            out.append(cand)
    return out
