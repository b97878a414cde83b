"""The tape-consuming combinator language.

Terms are untyped combinatory logic (S, K, I) extended with naturals, bits,
pairs, named constants, ``fix``, a ``read`` primitive that consults the tape
and a ``remap`` primitive that reroutes every read performed while its
argument is evaluated through a :class:`~tapekit.tapes.TapeMapSpec`.

Evaluation is leftmost-outermost weak reduction with a step budget.  Each
primitive contraction costs one step.  Arguments are passed unevaluated;
strict positions (the scrutinee of ``if0``/``ifbit``, the operands of
``succ``/``pred``/``read``/``fst``/``snd``) are reduced to weak head normal
form in place.  A final value is normalised by also reducing pair components.
"""
from __future__ import annotations

import functools
import re
import sys
from dataclasses import dataclass
from typing import Callable, Iterable, Optional, Union

from .errors import ParseError
from .tapes import Address, Tape, TapeMapSpec, builtin_map


class Code:
    __slots__ = ()

    def __call__(self, *args: "Code") -> "Code":
        return app(self, *args)

    def __str__(self) -> str:
        return to_sexpr(self)


@dataclass(frozen=True, eq=True, repr=False)
class Prim(Code):
    name: str
    spec: Optional[TapeMapSpec] = None

    def __repr__(self):
        return f"Prim({to_sexpr(self)})"


@dataclass(frozen=True, repr=False)
class Nat(Code):
    value: int

    def __post_init__(self):
        if self.value < 0:
            raise ValueError("naturals are nonnegative")

    def __repr__(self):
        return f"Nat({self.value})"


@dataclass(frozen=True, repr=False)
class Bit(Code):
    value: int

    def __post_init__(self):
        if self.value not in (0, 1):
            raise ValueError("bits are 0 or 1")

    def __repr__(self):
        return f"Bit({self.value})"


_BITS = (Bit(0), Bit(1))


@dataclass(frozen=True, repr=False)
class Con(Code):
    name: str

    def __repr__(self):
        return f"Con({self.name})"


@dataclass(frozen=True, repr=False)
class Var(Code):
    name: str

    def __repr__(self):
        return f"Var({self.name})"


class App(Code):
    __slots__ = ("fun", "arg", "_hash")

    def __init__(self, fun: Code, arg: Code):
        self.fun = fun
        self.arg = arg
        self._hash = None

    def __hash__(self):
        # computed lazily: the evaluator builds many applications it never hashes
        if self._hash is None:
            self._hash = hash((self.fun, self.arg))
        return self._hash

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, App) or hash(other) != hash(self):
            return False
        return self.fun == other.fun and self.arg == other.arg

    def __repr__(self):
        return f"App({self.fun!r}, {self.arg!r})"


ARITY = {
    "S": 3, "K": 2, "I": 1,
    "succ": 1, "pred": 1, "if0": 3,
    "pair": 2, "fst": 1, "snd": 1,
    "ifbit": 3, "fix": 1, "read": 2, "remap": 1,
}

S, K, I = Prim("S"), Prim("K"), Prim("I")
SUCC, PRED, IF0 = Prim("succ"), Prim("pred"), Prim("if0")
PAIR, FST, SND = Prim("pair"), Prim("fst"), Prim("snd")
IFBIT, FIX, READ = Prim("ifbit"), Prim("fix"), Prim("read")
H, T = Con("H"), Con("T")


def _lit(x) -> Code:
    if isinstance(x, Code):
        return x
    if isinstance(x, int):
        return Nat(x)
    raise TypeError(f"cannot use {x!r} as code")


def app(f, *args) -> Code:
    out = _lit(f)
    for a in args:
        out = App(out, _lit(a))
    return out


def remap_prim(spec: TapeMapSpec) -> Prim:
    return Prim("remap", spec)


def Remap(spec: TapeMapSpec, body) -> Code:
    return App(remap_prim(spec), _lit(body))


def Read(component, index) -> Code:
    return app(READ, component, index)


def IfBit(b, on1, on0) -> Code:
    return app(IFBIT, b, on1, on0)


def IfZero(n, on0, other) -> Code:
    return app(IF0, n, on0, other)


def Pair(a, b) -> Code:
    return app(PAIR, a, b)


def Fix(f) -> Code:
    return app(FIX, f)


def spine(c: Code) -> tuple[Code, list[Code]]:
    args = []
    while isinstance(c, App):
        args.append(c.arg)
        c = c.fun
    args.reverse()
    return c, args


def _rebuild(head: Code, stack: list) -> Code:
    while stack:
        head = App(head, stack.pop())
    return head


def is_pair_value(c: Code) -> bool:
    head, args = spine(c)
    return head == PAIR and len(args) == 2


@functools.lru_cache(maxsize=4096)
def free_vars(c: Code) -> frozenset[str]:
    if isinstance(c, Var):
        return frozenset((c.name,))
    if isinstance(c, App):
        return free_vars(c.fun) | free_vars(c.arg)
    return frozenset()


def reads_tape(c: Code) -> bool:
    if isinstance(c, App):
        return reads_tape(c.fun) or reads_tape(c.arg)
    return c == READ


# ---------------------------------------------------------------- abstraction

def bracket_abstract(var: str, body: Code) -> Code:
    """S/K/I bracket abstraction with the eta rule ``[x](M x) = M``.

    >>> bracket_abstract("x", Var("x")) == I
    True
    """
    if var not in free_vars(body):
        return App(K, body)
    if isinstance(body, Var):
        return I
    assert isinstance(body, App)
    if body.arg == Var(var) and var not in free_vars(body.fun):
        return body.fun
    return app(S, bracket_abstract(var, body.fun), bracket_abstract(var, body.arg))


def lam(params: Union[str, Iterable[str]], body: Code) -> Code:
    names = [params] if isinstance(params, str) else list(params)
    for name in reversed(names):
        body = bracket_abstract(name, body)
    return body


def substitute(body: Code, var: str, value: Code) -> Code:
    if isinstance(body, Var):
        return value if body.name == var else body
    if isinstance(body, App):
        return App(substitute(body.fun, var, value), substitute(body.arg, var, value))
    return body


# ---------------------------------------------------------------- outcomes

@dataclass(frozen=True)
class Value:
    value: object

    def __str__(self):
        return label(self.value)


@dataclass(frozen=True)
class Bottom:
    reason: str = "fuel-exhausted"

    def __str__(self):
        return f"bottom({self.reason})"


Outcome = Union[Value, Bottom]
FUEL_EXHAUSTED = "fuel-exhausted"
STUCK = "stuck"


class NeedBit(Exception):
    """Raised by a partial tape reader when an unassigned address is read."""

    def __init__(self, addr: Address):
        super().__init__(addr)
        self.addr = addr


class _OutOfFuel(Exception):
    pass


class _Stuck(Exception):
    pass


Reader = Callable[[Address], int]


class _Machine:
    def __init__(self, reader: Reader, arity: int, fuel: int):
        self.reader = reader
        self.arity = arity
        self.fuel = fuel
        self.steps = 0

    def whnf(self, term: Code, frames: tuple) -> Code:
        # Spine machine: ``head`` applied to ``stack`` reversed (first argument last).
        # S, K, I and ifbit dominate real runs, so they are tested first.
        head, stack = term, []
        while True:
            while type(head) is App:
                stack.append(head.arg)
                head = head.fun
            if type(head) is Prim:
                name = head.name
                n = ARITY[name]
                if len(stack) < n:
                    return _rebuild(head, stack)
                if self.steps >= self.fuel:
                    if name == "pair":
                        break
                    raise _OutOfFuel
                if name == "I":
                    self.steps += 1
                    head = stack.pop()
                elif name == "K":
                    self.steps += 1
                    head = stack.pop()
                    stack.pop()
                elif name == "S":
                    self.steps += 1
                    a0, a1, a2 = stack.pop(), stack.pop(), stack.pop()
                    stack.append(App(a1, a2))
                    stack.append(a2)
                    head = a0
                elif name == "ifbit":
                    self.steps += 1
                    a0 = stack.pop()
                    v = a0 if type(a0) is Bit else self.whnf(a0, frames)
                    if type(v) is not Bit:
                        raise _Stuck
                    on1, on0 = stack.pop(), stack.pop()
                    head = on1 if v.value else on0
                elif name == "read":
                    self.steps += 1
                    comp = self.nat(stack.pop(), frames)
                    idx = self.nat(stack.pop(), frames)
                    head = _BITS[self.read(comp, idx, frames)]
                elif name == "fix":
                    self.steps += 1
                    a0 = stack.pop()
                    stack.append(App(FIX, a0))
                    head = a0
                elif name == "pair":
                    break
                else:
                    self.steps += 1
                    args = [stack.pop() for _ in range(n)]
                    head = self.contract(head, args, frames)
            elif isinstance(head, (Nat, Bit, Con)):
                if stack:
                    raise _Stuck
                return head
            else:
                raise _Stuck
        # a saturated pair: a value when it has exactly two components
        if len(stack) == 2:
            return _rebuild(head, stack)
        raise _Stuck

    def normalize(self, term: Code, frames: tuple) -> Code:
        v = self.whnf(term, frames)
        if type(v) is App and is_pair_value(v):
            _, (a, b) = spine(v)
            return Pair(self.normalize(a, frames), self.normalize(b, frames))
        return v

    def nat(self, term, frames) -> int:
        v = term if type(term) is Nat else self.whnf(term, frames)
        if not isinstance(v, Nat):
            raise _Stuck
        return v.value

    def contract(self, p: Prim, a: list[Code], frames: tuple) -> Code:
        """One contraction of the primitives the spine loop does not inline."""
        name = p.name
        if name == "remap":
            return self.normalize(a[0], frames + (p.spec,))
        if name == "succ":
            return Nat(self.nat(a[0], frames) + 1)
        if name == "pred":
            return Nat(max(0, self.nat(a[0], frames) - 1))
        if name == "if0":
            return a[1] if self.nat(a[0], frames) == 0 else a[2]
        if name in ("fst", "snd"):
            v = self.whnf(a[0], frames)
            if not is_pair_value(v):
                raise _Stuck
            _, (x, y) = spine(v)
            return x if name == "fst" else y
        raise _Stuck  # pragma: no cover

    def read(self, comp: int, idx: int, frames: tuple) -> int:
        # innermost frame is last; each frame maps its dst space into its src space
        neg = 0
        arity = len(frames[-1].lanes) if frames else self.arity
        for spec in reversed(frames):
            lanes = spec.lanes
            if len(lanes) != arity or comp >= arity:
                raise _Stuck
            lane = lanes[comp]
            neg ^= lane.negate
            comp, idx = lane.source, lane.scale * idx + lane.offset
            arity = spec.src_arity
        if arity != self.arity or comp >= arity:
            raise _Stuck
        return self.reader(Address(comp, idx)) ^ neg


def _ensure_recursion(limit: int = 20000):
    if sys.getrecursionlimit() < limit:
        sys.setrecursionlimit(limit)


def run(c: Code, reader: Reader, arity: int, fuel: int) -> Outcome:
    """Evaluate ``c`` against an arbitrary bit reader.  :class:`NeedBit` propagates."""
    _ensure_recursion()
    machine = _Machine(reader, arity, fuel)
    try:
        return Value(machine.normalize(c, ()))
    except _OutOfFuel:
        return Bottom(FUEL_EXHAUSTED)
    except _Stuck:
        return Bottom(STUCK)


def eval_code(c: Code, t: Tape, fuel: int) -> Outcome:
    """Run closed code ``c`` on tape ``t`` for at most ``fuel`` reduction steps."""
    if free_vars(c):
        raise ValueError(f"code has free variables {sorted(free_vars(c))}")

    def reader(a: Address) -> int:
        return t.read(a)

    return run(c, reader, t.arity, fuel)


def steps_used(c: Code, t: Tape, fuel: int) -> int:
    machine = _Machine(t.read, t.arity, fuel)
    _ensure_recursion()
    try:
        machine.normalize(c, ())
    except (_OutOfFuel, _Stuck):
        pass
    return machine.steps


# ---------------------------------------------------------------- syntax

_KEYWORD_PRIMS = {"succ": SUCC, "pred": PRED, "pair": PAIR, "fst": FST, "snd": SND,
                  "fix": FIX, "read": READ, "if0": IF0, "ifbit": IFBIT,
                  "S": S, "K": K, "I": I}
_TOKEN = re.compile(r"\s*(\(|\)|[^\s()]+)")


def _tokenize(text: str) -> list[str]:
    text = re.sub(r";[^\n]*", "", text)
    pos, out = 0, []
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            if text[pos:].strip():
                raise ParseError(f"cannot tokenize near {text[pos:pos + 20]!r}")
            break
        out.append(m.group(1))
        pos = m.end()
    return out


def _read_form(tokens: list[str], pos: int):
    if pos >= len(tokens):
        raise ParseError("unexpected end of input")
    tok = tokens[pos]
    if tok == ")":
        raise ParseError("unexpected ')'")
    if tok != "(":
        return tok, pos + 1
    items, pos = [], pos + 1
    while True:
        if pos >= len(tokens):
            raise ParseError("missing ')'")
        if tokens[pos] == ")":
            return items, pos + 1
        item, pos = _read_form(tokens, pos)
        items.append(item)


def _atom(tok: str) -> Code:
    if tok.isdigit():
        return Nat(int(tok))
    if tok in ("b0", "b1"):
        return Bit(int(tok[1]))
    if tok in _KEYWORD_PRIMS:
        return _KEYWORD_PRIMS[tok]
    if tok.startswith("@remap:"):
        return remap_prim(builtin_map(tok[len("@remap:"):]))
    if re.fullmatch(r"[A-Za-z_][\w'\-]*", tok):
        return Var(tok)
    raise ParseError(f"bad atom {tok!r}")


_FIXED_FORMS = {"read": 2, "if0": 3, "ifbit": 3, "fix": 1, "succ": 1, "pred": 1,
                "pair": 2, "fst": 1, "snd": 1}


def _build(form) -> Code:
    if isinstance(form, str):
        return _atom(form)
    if not form:
        raise ParseError("empty form ()")
    head = form[0]
    if isinstance(head, list):
        return app(_build(head), *map(_build, form[1:]))
    if head == "app":
        if len(form) < 2:
            raise ParseError("(app) needs a function")
        return app(*map(_build, form[1:]))
    if head == "lam":
        if len(form) != 3:
            raise ParseError("(lam x body) takes a name and a body")
        params = form[1] if isinstance(form[1], list) else [form[1]]
        if not all(isinstance(p, str) for p in params):
            raise ParseError("lam parameters must be names")
        return lam(params, _build(form[2]))
    if head == "con":
        if len(form) != 2 or not isinstance(form[1], str):
            raise ParseError("(con NAME)")
        return Con(form[1])
    if head == "remap":
        if len(form) != 3 or not isinstance(form[1], str):
            raise ParseError("(remap <mapname> body)")
        return Remap(builtin_map(form[1]), _build(form[2]))
    if head in _FIXED_FORMS:
        n = _FIXED_FORMS[head]
        if len(form) - 1 != n:
            raise ParseError(f"({head} ...) takes {n} argument(s)")
        return app(_KEYWORD_PRIMS[head], *map(_build, form[1:]))
    return app(_atom(head), *map(_build, form[1:]))


def parse_code(text: str, closed: bool = True) -> Code:
    tokens = _tokenize(text)
    form, pos = _read_form(tokens, 0)
    if pos != len(tokens):
        raise ParseError("trailing input after code")
    code = _build(form)
    if closed and free_vars(code):
        raise ParseError(f"unbound names {sorted(free_vars(code))}")
    return code


def to_sexpr(c: Code) -> str:
    if isinstance(c, Nat):
        return str(c.value)
    if isinstance(c, Bit):
        return f"b{c.value}"
    if isinstance(c, Con):
        return f"(con {c.name})"
    if isinstance(c, Var):
        return c.name
    if isinstance(c, Prim):
        if c.name == "remap":
            return f"@remap:{c.spec.name}"
        return c.name
    head, args = spine(c)
    if isinstance(head, Prim) and head.name == "remap":
        inner = f"(remap {head.spec.name} {to_sexpr(args[0])})"
        rest = args[1:]
        return inner if not rest else "(app " + " ".join([inner, *map(to_sexpr, rest)]) + ")"
    if isinstance(head, Prim) and _FIXED_FORMS.get(head.name) == len(args):
        return "(" + " ".join([head.name, *map(to_sexpr, args)]) + ")"
    return "(app " + " ".join(map(to_sexpr, [head, *args])) + ")"


def label(x) -> str:
    """Short printable name of an outcome: constants by name, bits as ``b0``/``b1``."""
    if isinstance(x, Con):
        return x.name
    if isinstance(x, Nat):
        return str(x.value)
    if isinstance(x, Bit):
        return f"b{x.value}"
    if isinstance(x, Code):
        return to_sexpr(x)
    return str(x)


def parse_label(text: str) -> Code:
    text = text.strip()
    if text.startswith("("):
        return parse_code(text)
    if text.isdigit():
        return Nat(int(text))
    if text in ("b0", "b1"):
        return Bit(int(text[1]))
    if re.fullmatch(r"[A-Za-z_][\w'\-]*", text):
        return Con(text)
    raise ParseError(f"bad outcome label {text!r}")
