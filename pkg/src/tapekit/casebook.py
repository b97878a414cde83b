"""Worked examples: von Neumann unbiasing and majority-of-k amplification.

Both fixtures are exact.  The von Neumann code scans a stream two bits at a
time; at a finite fuel only the first ``k`` pairs are ever inspected, so its
law has a divergence mass of ``2^-k``.  The majority fixture runs a base
verifier once per component of a ``k``-component tape, counts acceptances
against a threshold and is then transported to a single stream along
``split:k``.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb

from .dist import BOTTOM, FinDist, law
from .extraction import expect
from .lang import (Bit, Bottom, Code, Con, IfBit, Read, Remap, Value, Var, app, bracket_abstract,
                   eval_code, parse_code, run, I)
from .modality import (CrispLift, EntailmentJudgment, TestTable, check_entailment,
                       diamond, transport_entailment)
from .tapes import (Address, ProductMeasure, Tape, apply_tapemap, flip_map, proj_map,
                    split_map)
from .trees import TraceTree, mca_apply, trace
from .truth import TruthValue, tv_combine, tv_equal, tv_pullback

H, T = Con("H"), Con("T")

VN_SOURCE = """
(fix (lam loop
  (ifbit (read 0 0)
    (ifbit (remap flip (read 0 1)) (con T) (remap drop:2 loop))
    (ifbit (remap identity (read 0 1)) (con H) (remap drop:2 loop)))))
"""
VN_CODE: Code = parse_code(VN_SOURCE)

# Both branches read the second bit through a remap so that every pair costs
# the same 12 steps whatever its bits.  A decision on pair k-1 is done after
# 12k-1 steps and the first read of pair k needs 12k+6, so any fuel in
# [12k-1, 12k+5] inspects exactly k pairs.
VN_STEPS_PER_PAIR = 12


def vn_fuel(k: int) -> int:
    """Fuel that lets the scanner inspect exactly ``k`` pairs."""
    return VN_STEPS_PER_PAIR * k + 2


def swap(out):
    """Exchange ``H`` and ``T``; divergence stays put."""
    if isinstance(out, Bottom):
        return out
    if isinstance(out, Value):
        return Value(swap(out.value))
    return {H: T, T: H}.get(out, out)


@dataclass(frozen=True)
class VnFixture:
    pairs: int
    code: Code
    fuel: int

    def tree(self) -> TraceTree:
        return trace(self.code, 1, self.fuel)

    def alpha(self, side: Con) -> TruthValue:
        """The truth value "the scanner returns ``side``"."""
        return diamond(self.tree(), CrispLift({side}))


def build_vn(k: int) -> VnFixture:
    if k < 0:
        raise ValueError("pair budget must be nonnegative")
    return VnFixture(k, VN_CODE, vn_fuel(k))


def vn_expected_law(k: int) -> FinDist:
    tail = Fraction(1, 2 ** k)
    return FinDist({H: (1 - tail) / 2, T: (1 - tail) / 2, BOTTOM: tail})


def vn_oracle_law(k: int, m: ProductMeasure = ProductMeasure()) -> FinDist:
    """Brute force: run the code on every zero-tail tape with a ``2k``-bit prefix."""
    fx = build_vn(k)
    runs = []
    for bits in itertools.product((0, 1), repeat=2 * k):
        out = run(fx.code, _zero_tail_reader(bits), 1, fx.fuel)
        runs.append((bits, BOTTOM if isinstance(out, Bottom) else out.value))
    return prefix_law(runs, m)


def _zero_tail_reader(bits):
    """Reader of the single-stream tape ``bits`` followed by zeros."""
    n = len(bits)

    def read(a: Address) -> int:
        return bits[a.index] if a.index < n else 0

    return read


def prefix_law(runs, m: ProductMeasure) -> FinDist:
    """Law from ``(prefix bits, outcome)`` pairs covering every prefix of one length once."""
    if not m.overrides and not m.component_defaults:
        # i.i.d. bits: the weight depends only on the number of ones
        counts: dict = {}
        for bits, z in runs:
            key = (z, sum(bits), len(bits))
            counts[key] = counts.get(key, 0) + 1
        p = m.default
        return FinDist((z, c * p ** ones * (1 - p) ** (n - ones)) for (z, ones, n), c in counts.items())
    masses = []
    for bits, z in runs:
        w = Fraction(1)
        for n, b in enumerate(bits):
            q = m.bias(Address(0, n))
            w *= q if b else 1 - q
        masses.append((z, w))
    return FinDist(masses)


@dataclass
class VnReport:
    pairs: int
    fuel: int
    law: FinDist
    flip_swaps_alpha: bool
    expect_h: Fraction
    expect_t: Fraction
    swap_conjugation: bool
    checks: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(self.checks.values())


def vn_fairness_report(k: int, m: ProductMeasure = ProductMeasure()) -> VnReport:
    fx = build_vn(k)
    tree = fx.tree()
    alpha_h, alpha_t = fx.alpha(H), fx.alpha(T)
    flipped = tv_equal(tv_pullback(flip_map(), alpha_h), alpha_t)
    eh, et = expect(alpha_h, m), expect(alpha_t, m)
    conj = True
    for bits in itertools.product((0, 1), repeat=2 * k):
        t = Tape.from_streams([(bits, (0,))])
        if eval_code(fx.code, apply_tapemap(flip_map(), t), fx.fuel) != swap(eval_code(fx.code, t, fx.fuel)):
            conj = False
            break
    d = law(tree, m)
    half = (1 - Fraction(1, 2 ** k)) / 2
    checks = {"flip-swaps-alpha": flipped, "swap-conjugation": conj, "equal-expectations": eh == et}
    if m == ProductMeasure():
        checks["fair-value"] = eh == half
        checks["law"] = d == vn_expected_law(k)
    return VnReport(k, fx.fuel, d, flipped, eh, et, conj, checks)


# ---------------------------------------------------------------- majority

def member_code(accept, y: Code) -> Code:
    """A code computing the bit ``y in accept`` for bit-valued ``y``."""
    accept = frozenset(accept)
    if not accept <= {Bit(0), Bit(1)}:
        raise ValueError("majority fixtures accept bit outcomes only")
    if accept == {Bit(1)}:
        return IfBit(y, Bit(1), Bit(0))
    if accept == {Bit(0)}:
        return IfBit(y, Bit(0), Bit(1))
    return IfBit(y, Bit(int(bool(accept))), Bit(int(bool(accept))))


def threshold_code(k: int, t: int, e: Code, accept) -> Code:
    """``e_{k,t}``: run ``e x`` on each component in turn and answer ``b1`` once ``t`` runs accepted.

    The run on component ``i`` is wrapped in ``remap proj:i/k``; the decision
    tree stops early once the outcome is settled.
    """
    x = Var("x")

    def node(i: int, count: int) -> Code:
        if count >= t:
            return Bit(1)
        if count + (k - i) < t:
            return Bit(0)
        run = Remap(proj_map(i, k), member_code(accept, app(e, x)))
        return IfBit(run, node(i + 1, count + 1), node(i + 1, count))

    return bracket_abstract("x", node(0, 0))


BASE_COIN: Code = Read(0, 0)


@dataclass(frozen=True, eq=False)
class MajorityFixture:
    k: int
    t: int
    e: Code
    accept: frozenset
    universe: tuple = (BASE_COIN,)
    base_fuel: int = 64

    def __post_init__(self):
        if not 1 <= self.t <= self.k:
            raise ValueError("threshold must satisfy 1 <= t <= k")

    @property
    def fuel(self) -> int:
        return self.base_fuel * self.k + 16

    @property
    def evidence(self) -> Code:
        return threshold_code(self.k, self.t, self.e, self.accept)

    def base_alpha(self, c: Code) -> TruthValue:
        """Single-stream acceptance of ``e c``."""
        return diamond(mca_apply(self.e, c, 1, self.base_fuel), CrispLift(self.accept))

    def threshold_phi(self, c: Code) -> TruthValue:
        """``phi_{>=t}(c)``: at least ``t`` components accept, as a truth value on the ``k``-space."""
        parts = [tv_pullback(proj_map(i, self.k), self.base_alpha(c)) for i in range(self.k)]
        return tv_combine(lambda *vs: Fraction(int(sum(v == 1 for v in vs) >= self.t)), *parts)

    def judgment(self) -> EntailmentJudgment:
        phi = TestTable({c: self.threshold_phi(c) for c in self.universe})
        return check_entailment(phi, self.evidence, CrispLift({Bit(1)}), self.universe,
                                self.fuel, space=self.k)


def build_majority(k: int = 3, t: int = 2, e: Code = I, accept=frozenset({Bit(1)}),
                   universe=(BASE_COIN,)) -> MajorityFixture:
    return MajorityFixture(k, t, e, frozenset(accept), tuple(universe))


def majority_closed_form(k: int, t: int, p) -> Fraction:
    """``P(Binomial(k, p) >= t)``; for ``k=3, t=2`` this is ``3p^2 - 2p^3``."""
    p = Fraction(p)
    return sum((comb(k, j) * p ** j * (1 - p) ** (k - j) for j in range(t, k + 1)), Fraction(0))


def majority_oracle(fx: MajorityFixture, transported: EntailmentJudgment, c: Code, p, bits: int = 1) -> Fraction:
    """Enumerate every ``k*bits``-bit prefix of one stream and run the transported evidence."""
    m = ProductMeasure.uniform(p)
    total = Fraction(0)
    n = fx.k * bits
    for word in itertools.product((0, 1), repeat=n):
        out = eval_code(app(transported.evidence, c), Tape.from_streams([(word, (0,))]), transported.fuel)
        if out == Value(Bit(1)):
            w = Fraction(1)
            for i, b in enumerate(word):
                q = m.bias(Address(0, i))
                w *= q if b else 1 - q
            total += w
    return total


@dataclass
class MajorityReport:
    k: int
    t: int
    p: Fraction
    base: Fraction
    amplified: Fraction
    closed_form: Fraction
    oracle: Fraction
    lhs: Fraction
    judgment_holds: bool
    transported_holds: bool
    checks: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(self.checks.values())


def majority_report(fx: MajorityFixture, p, c: Code = None, oracle_bits: int = 1) -> MajorityReport:
    """Check, transport along ``split:k`` and extract the acceptance probability at bias ``p``."""
    p = Fraction(p)
    c = fx.universe[0] if c is None else c
    m = ProductMeasure.uniform(p)
    j = fx.judgment()
    moved = transport_entailment(j, split_map(fx.k)) if j.holds else None
    base = expect(fx.base_alpha(c), m)
    if moved is not None:
        rhs = diamond(mca_apply(moved.evidence, c, 1, moved.fuel), moved.psi)
        amplified = expect(rhs, m)
        lhs = expect(moved.phi.at(c), m)
        oracle = majority_oracle(fx, moved, c, p, oracle_bits)
    else:
        amplified = lhs = oracle = Fraction(-1)
    closed = majority_closed_form(fx.k, fx.t, base)
    checks = {
        "k-tape-judgment": j.holds,
        "transported-judgment": moved is not None and moved.holds,
        "closed-form": amplified == closed,
        "oracle": amplified == oracle,
        "extraction-sound": lhs <= amplified,
    }
    return MajorityReport(fx.k, fx.t, p, base, amplified, closed, oracle, lhs, j.holds,
                          moved is not None, checks)
