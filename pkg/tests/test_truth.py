import random
from fractions import Fraction

import pytest

from bruteforce import GENERIC_TAIL, assignments, grid, tape_from
from tapekit import generators as gen
from tapekit.casebook import build_vn
from tapekit.errors import DegenerateMeasureError, EmptyFamily
from tapekit.lang import Con
from tapekit.tapes import Address, BitPattern, ProductMeasure, Tape, apply_tapemap, builtin_map, parse_tape
from tapekit.truth import (TruthValue, as_equiv, ess_inf, ess_sup, godel_impl, simplify, tv_eval, tv_impl,
                           tv_join, tv_leq, tv_leq_as, tv_meet, tv_pullback)

A = Address
H, T = Con("H"), Con("T")
FAIR = ProductMeasure()
ONE = TruthValue.constant(1)
R0 = Tape.constant(0)
# constant 1 except at the all-zeros tape, where it is 0
BETA_PRIME = ONE.with_exceptions([(R0, 0)])


def _zero_tail_tapes(depth=6):
    return [tape_from(a, 1, (0,)) for a in assignments(grid(1, depth))]


def test_eval_examples():
    assert tv_eval(ONE, parse_tape("0101:1")) == 1
    assert tv_eval(BETA_PRIME, R0) == 0
    assert tv_eval(BETA_PRIME, parse_tape("1:0")) == 1
    assert tv_eval(build_vn(2).alpha(H), parse_tape("01:0")) == 1


def test_godel_operations():
    half, third = TruthValue.constant(Fraction(1, 2)), TruthValue.constant(Fraction(1, 3))
    assert tv_impl(half, half) == ONE
    assert tv_impl(ONE, third) == third
    assert godel_impl(Fraction(2, 3), Fraction(1, 3)) == Fraction(1, 3)
    fx = build_vn(2)
    assert tv_meet(fx.alpha(H), fx.alpha(T)) == TruthValue.constant(0)


def test_strictness_fixture():
    assert not tv_leq(ONE, BETA_PRIME)
    assert tv_leq_as(ONE, BETA_PRIME, FAIR)
    assert tv_leq(BETA_PRIME, ONE)


def test_reflexive_and_strict_gap():
    rng = random.Random(7)
    for _ in range(20):
        v = gen.random_tv(rng)
        assert tv_leq(v, v) and tv_leq_as(v, v, FAIR)
    cyl = BitPattern({A(0, 0): 1})
    hi = TruthValue.indicator(cyl, Fraction(1, 2), 0)
    lo = TruthValue.indicator(cyl, Fraction(1, 4), 0)
    assert not tv_leq(hi, lo) and not tv_leq_as(hi, lo, FAIR)
    assert tv_leq(lo, hi)


def test_degenerate_measures_are_rejected():
    for bias in (0, 1):
        m = ProductMeasure.uniform(bias)
        with pytest.raises(DegenerateMeasureError):
            tv_leq_as(ONE, BETA_PRIME, m)
        with pytest.raises(DegenerateMeasureError):
            as_equiv(ONE, BETA_PRIME, m)
    m = ProductMeasure(Fraction(1, 2), ((A(0, 3), Fraction(1)),))
    with pytest.raises(DegenerateMeasureError):
        tv_leq_as(ONE, ONE, m)


@pytest.mark.parametrize("as_mode", [False, True])
def test_heyting_adjunction_on_random_triples(as_mode):
    rng = random.Random(17 + as_mode)
    leq = (lambda x, y: tv_leq_as(x, y, FAIR)) if as_mode else tv_leq
    hits = 0
    for _ in range(200):
        a, b, c = gen.random_tv(rng), gen.random_tv(rng), gen.random_tv(rng)
        left = leq(tv_meet(a, c), b)
        assert left == leq(c, tv_impl(a, b))
        hits += left
    assert 0 < hits < 200  # both sides of the biconditional are exercised


def test_operations_agree_with_pointwise_values():
    rng = random.Random(9)
    ops = [(tv_meet, min), (tv_join, max), (tv_impl, godel_impl)]
    tapes = _zero_tail_tapes()
    for _ in range(60):
        a, b = gen.random_tv(rng), gen.random_tv(rng)
        points = tapes + [t for t, _ in a.exceptions + b.exceptions]
        for op, fn in ops:
            v = op(a, b)
            for t in points:
                assert tv_eval(v, t) == fn(tv_eval(a, t), tv_eval(b, t))


def test_ess_bounds():
    rng = random.Random(3)
    v = gen.random_tv(rng, p_exception=1.0)
    assert ess_sup([v]) == v.drop_exceptions()
    assert ess_sup([ONE, BETA_PRIME]) == ONE
    fx = build_vn(3)
    assert ess_inf([fx.alpha(H), fx.alpha(T)]) == TruthValue.constant(0)
    with pytest.raises(EmptyFamily):
        ess_sup([])
    with pytest.raises(EmptyFamily):
        ess_inf([])


def test_ess_sup_is_least_essential_upper_bound():
    rng = random.Random(21)
    for _ in range(50):
        fam = [gen.random_tv(rng) for _ in range(rng.randint(1, 4))]
        s, i = ess_sup(fam), ess_inf(fam)
        assert not s.exceptions and not i.exceptions
        for v in fam:
            assert tv_leq_as(v, s, FAIR) and tv_leq_as(i, v, FAIR)
        # any essential upper bound of the family sits above the supremum
        u = tv_join(s, gen.random_tv(rng))
        assert all(tv_leq_as(v, u, FAIR) for v in fam) and tv_leq_as(s, u, FAIR)


def test_as_equiv_examples():
    assert as_equiv(ONE, BETA_PRIME, FAIR)
    v = gen.random_tv(random.Random(1))
    assert as_equiv(v, v, FAIR)
    half = Fraction(1, 2)
    left = TruthValue.indicator(BitPattern({A(0, 0): 0}), half, 0)
    right = TruthValue.indicator(BitPattern({A(0, 0): 1}), half, 0)
    assert not as_equiv(left, right, FAIR)


def test_as_order_is_a_preorder_and_coarser_than_pointwise():
    rng = random.Random(5)
    m = ProductMeasure.uniform(Fraction(1, 3))
    for _ in range(100):
        a, b, c = (gen.random_tv(rng) for _ in range(3))
        if tv_leq(a, b):
            assert tv_leq_as(a, b, m)
        if tv_leq_as(a, b, m) and tv_leq_as(b, c, m):
            assert tv_leq_as(a, c, m)
        if as_equiv(a, b, m):
            assert as_equiv(b, a, m)
        ab = tv_meet(a, b)
        assert as_equiv(ab, tv_meet(b, a), m)


def test_pullback_examples():
    v = gen.random_tv(random.Random(2), p_exception=1.0)
    assert tv_pullback(builtin_map("identity"), v) == v
    for k in (1, 2, 3):
        fx = build_vn(k)
        assert tv_pullback(builtin_map("flip"), fx.alpha(H)) == fx.alpha(T)
    odd = TruthValue.indicator(BitPattern({A(1, 0): 1}))
    pulled = tv_pullback(builtin_map("split:2"), odd)
    assert pulled == TruthValue.indicator(BitPattern({A(0, 1): 1}))
    assert tv_eval(pulled, parse_tape("01:0")) == 1
    assert tv_eval(pulled, parse_tape("10:0")) == 0


@pytest.mark.parametrize("name", ["identity", "flip", "drop:2", "split:2", "split:3", "block:2",
                                  "proj:0/2"])
def test_pullback_is_precomposition(name):
    k = builtin_map(name)
    rng = random.Random(len(name))
    pts = [tape_from(a, k.src_arity, GENERIC_TAIL) for a in assignments(grid(k.src_arity, 8 // k.src_arity))]
    for _ in range(40):
        v = gen.random_tv(rng, arity=k.dst_arity)
        pv = tv_pullback(k, v)
        exc = {t for t, _ in v.exceptions}
        for t in pts:
            image = apply_tapemap(k, t)
            if image in exc and pv.note:
                continue  # that exception was dropped: its preimage is not finite
            assert tv_eval(pv, t) == tv_eval(v, image)


def test_pullback_notes_dropped_exceptions():
    v = ONE.with_exceptions([(R0, 0)])
    pv = tv_pullback(builtin_map("block:2"), v)
    assert pv.note and not pv.exceptions
    assert tv_pullback(builtin_map("drop:2"), v).exceptions  # four preimages
    assert len(tv_pullback(builtin_map("drop:2"), v).exceptions) == 4


@pytest.mark.parametrize("name", ["flip", "drop:1", "split:2", "block:3"])
def test_pullback_commutes_with_operations_and_is_monotone(name):
    k = builtin_map(name)
    rng = random.Random(31)
    for _ in range(60):
        a, b = gen.random_tv(rng, arity=k.dst_arity), gen.random_tv(rng, arity=k.dst_arity)
        for op in (tv_meet, tv_join, tv_impl):
            assert tv_pullback(k, op(a, b)) == op(tv_pullback(k, a), tv_pullback(k, b))
        c = tv_join(a, b)
        assert tv_leq(tv_pullback(k, a), tv_pullback(k, c))


def test_simplify_preserves_the_function():
    rng = random.Random(8)
    for _ in range(50):
        v = gen.random_tv(rng)
        s = simplify(v)
        assert s == v and len(s.cells) <= len(v.cells)
    split = TruthValue([(BitPattern({A(0, 0): 0}), 1), (BitPattern({A(0, 0): 1}), 1)])
    assert simplify(split).cells == ((BitPattern({}), Fraction(1)),)


def test_construction_errors():
    with pytest.raises(ValueError):
        TruthValue.constant(Fraction(3, 2))
    with pytest.raises(ValueError):
        TruthValue([])
    gap = TruthValue([(BitPattern({A(0, 0): 0}), 1)])
    assert not gap.check_partition()
    with pytest.raises(ValueError):
        tv_eval(gap, parse_tape("1:0"))
