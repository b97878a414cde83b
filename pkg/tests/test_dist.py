import random
from fractions import Fraction

import pytest

from tapekit import generators as gen
from tapekit.casebook import VN_CODE, build_majority, vn_fuel
from tapekit.dist import (BOTTOM, FinDist, MustJudgment, bridge_prob_one, check_dist_monad_laws,
                          check_law_plain_seq, check_law_split_seq, check_must_modality_axioms, dirac,
                          dist_bind, law, must, must_entail)
from tapekit.errors import DegenerateMeasureError
from tapekit.lang import FUEL_EXHAUSTED, Bit, Bottom, Con, I, Read, Value, bracket_abstract
from tapekit.modality import CrispLift, diamond
from tapekit.tapes import Address, ProductMeasure, Tape, split_map
from tapekit.trees import Branch, Leaf, bind, bind_split, leaves, mca_apply, ret, trace, translate_evidence
from tapekit.truth import as_equiv

A = Address
H, T = Con("H"), Con("T")
FAIR = ProductMeasure()
READ = trace(Read(0, 0), 1, 5)


def test_findist_validation():
    with pytest.raises(ValueError):
        FinDist({H: Fraction(1, 2)})
    with pytest.raises(ValueError):
        FinDist({H: Fraction(3, 2), T: Fraction(-1, 2)})
    d = FinDist([(H, Fraction(1, 2)), (H, Fraction(1, 4)), (T, Fraction(1, 4)), (BOTTOM, 0)])
    assert d == {H: Fraction(3, 4), T: Fraction(1, 4)} and BOTTOM not in d
    assert d.mass(BOTTOM) == 0 and d.prob({H}) == Fraction(3, 4)


def test_bind_examples():
    f = lambda z: FinDist({H: Fraction(1, 3), T: Fraction(2, 3)})
    assert dist_bind(dirac(H), f) == f(H)
    coin = FinDist({H: Fraction(1, 2), T: Fraction(1, 2)})
    swapped = dist_bind(coin, lambda z: dirac(T if z == H else H))
    assert swapped == coin
    half_dead = FinDist({H: Fraction(1, 2), BOTTOM: Fraction(1, 2)})
    assert dist_bind(half_dead, f)[BOTTOM] >= Fraction(1, 2)
    assert dist_bind(half_dead, lambda z: dirac(BOTTOM)) == dirac(BOTTOM)


def test_dist_monad_laws():
    report = check_dist_monad_laws(200, seed=1)
    assert report.instances == 200 and report.ok, report.failures


def test_must_examples():
    assert must(dirac(H), {H})
    assert not must(FinDist({H: Fraction(1, 2), T: Fraction(1, 2)}), {H})
    for k in (1, 2, 4):
        assert not must(law(trace(VN_CODE, 1, vn_fuel(k)), FAIR), {H, T})
    with pytest.raises(ValueError):
        must(dirac(H), {H, BOTTOM})
    j = MustJudgment.of(FinDist({H: Fraction(1, 2), T: Fraction(1, 2)}), {H})
    assert not j.verdict and j.rejected == [T]


def test_must_axioms():
    report = check_must_modality_axioms(200, seed=2)
    assert report.instances == 200 and report.ok, report.failures


def test_must_entail_examples():
    wrap = bracket_abstract("x", H)
    assert must_entail(None, wrap, {H}, gen.UNIVERSE, FAIR, 10).holds
    reader = bracket_abstract("x", Read(0, 0))
    j = must_entail(None, reader, {Bit(0)}, [H], FAIR, 10)
    assert not j.holds
    assert (j.counterexample.outcome, j.counterexample.mass) == (Bit(1), Fraction(1, 2))
    # a precondition can switch codes off
    assert must_entail({H: False}, reader, {Bit(0)}, [H], FAIR, 10).holds
    assert must_entail(lambda c: c == T, reader, {Bit(0)}, [H, T], FAIR, 10).verdict == "fails"


def test_must_entail_after_split_transport():
    fx = build_majority(3, 2)
    moved = translate_evidence(split_map(3), fx.evidence)
    # every run terminates with a verdict bit, so the law avoids bottom
    j = must_entail(None, moved, {Bit(0), Bit(1)}, fx.universe, ProductMeasure.uniform(Fraction(2, 3)),
                    fx.fuel + 3)
    assert j.holds
    assert must_entail(None, moved, {Bit(1)}, fx.universe, FAIR, fx.fuel + 3).verdict == "fails"


def test_must_entail_bad_inputs():
    with pytest.raises(ValueError):
        must_entail(None, I, {H}, [], FAIR, 10)
    with pytest.raises(ValueError):
        must_entail(None, I, {BOTTOM}, [H], FAIR, 10)
    with pytest.raises(ValueError):
        must_entail(None, I, {H}, [H], FAIR, 0)


def test_law_of_split_bind_examples():
    pair = lambda x: gen._tag(READ, x)
    assert check_law_split_seq(READ, pair)
    assert law(bind_split(READ, pair), FAIR) == {(Bit(i), Bit(j)): Fraction(1, 4) for i in (0, 1) for j in (0, 1)}
    const = lambda x: READ
    assert law(bind_split(READ, const), FAIR) == law(READ, FAIR)
    assert check_law_split_seq(READ, const)


def test_law_of_split_bind_on_generated_pairs():
    rng = random.Random(3)
    measures = [FAIR, ProductMeasure.uniform(Fraction(1, 3)),
                ProductMeasure(Fraction(1, 5), ((A(0, 1), Fraction(3, 4)), (A(0, 4), Fraction(2, 3))))]
    for _ in range(50):
        t = gen.random_tree(rng, max_depth=3)
        f = gen.random_pair_continuation(rng, max_depth=3)
        for m in measures:
            assert check_law_split_seq(t, f, m)
        assert check_law_split_seq(t, f, FAIR, split_map(3))


def test_plain_bind_breaks_the_law_equation():
    same_bit = lambda x: gen._tag(READ, x)
    assert not check_law_plain_seq(READ, same_bit)
    correlated = law(bind(READ, same_bit), FAIR)
    assert correlated == {(Bit(0), Bit(0)): Fraction(1, 2), (Bit(1), Bit(1)): Fraction(1, 2)}


def test_law_ignores_null_outcome_patches():
    t = Branch(A(0, 0), Leaf(Value(H)), Leaf(Value(T)))
    patches = {Tape.constant(0): Value(T)}
    assert law(t, FAIR, patches) == law(t, FAIR)
    with pytest.raises(DegenerateMeasureError):
        law(t, ProductMeasure.uniform(1), patches)


def test_equal_laws_do_not_make_equal_truth_values():
    left = Branch(A(0, 0), Leaf(Value(H)), Leaf(Value(T)))
    right = Branch(A(0, 3), Leaf(Value(T)), Leaf(Value(H)))
    assert law(left, FAIR) == law(right, FAIR)
    assert not as_equiv(diamond(left, CrispLift({H})), diamond(right, CrispLift({H})), FAIR)


def test_bridge_examples():
    r = bridge_prob_one(ret(H), FAIR, {H})
    assert r.prob_one and r.must
    r = bridge_prob_one(trace(VN_CODE, 1, vn_fuel(2)), FAIR, {H, T})
    assert not r.prob_one and not r.must
    t = Branch(A(0, 0), Leaf(Value(H)), Leaf(Value(H)))
    r = bridge_prob_one(t, FAIR, {H}, {Tape.constant(1): Bottom(FUEL_EXHAUSTED)})
    assert r.prob_one and r.must


def test_bridge_biconditional_on_generated_instances():
    rng = random.Random(5)
    measures = [FAIR, ProductMeasure.uniform(Fraction(1, 3))]
    agree = {True: 0, False: 0}
    for i in range(50):
        t = gen.random_tree(rng, p_bottom=0.05)
        accept = gen.random_accept(rng)
        if i % 5 == 0:
            # accept every proper outcome: must reduces to termination
            accept = frozenset(out.value for _, out in leaves(t) if isinstance(out, Value))
        patches = {gen.random_tape(rng): Value(rng.choice(gen.LABELS))} if i % 7 == 0 else None
        for m in measures:
            r = bridge_prob_one(t, m, accept, patches)
            assert r.agrees
            agree[r.must] += 1
    assert agree[True] and agree[False]


def test_law_of_applied_code():
    e = bracket_abstract("x", Read(0, 1))
    d = law(mca_apply(e, H, 1, 10), ProductMeasure(Fraction(1, 2), ((A(0, 1), Fraction(1, 6)),)))
    assert d == {Bit(0): Fraction(5, 6), Bit(1): Fraction(1, 6)}
    assert law(trace(I, 1, 3), FAIR) == dirac(I)
    assert law(Leaf(Bottom("stuck")), FAIR) == dirac(BOTTOM)
