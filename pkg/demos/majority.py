"""
Majority of three independent runs
==================================

A base verifier accepts with probability p.  Running it on three tape
components and accepting when two agree gives 3p^2 - 2p^3.  The three-tape
judgment is moved onto a single tape by interleaving (``split:3``), and the
translated evidence is re-checked there.
"""
from fractions import Fraction

from tapekit import ProductMeasure, expect, transport_entailment
from tapekit.casebook import build_majority, majority_report
from tapekit.modality import diamond
from tapekit.tapes import split_map
from tapekit.trees import mca_apply

fx = build_majority(3, 2)
j = fx.judgment()
print("three-tape judgment holds:", j.holds)

moved = transport_entailment(j, split_map(3))
print("after split:3 it holds on one tape:", moved.holds, "with fuel", moved.fuel)

# extracted acceptance on the single tape, for several coin biases
for p in (Fraction(1, 4), Fraction(1, 2), Fraction(2, 3), Fraction(3, 4)):
    m = ProductMeasure.uniform(p)
    c = fx.universe[0]
    accept = expect(diamond(mca_apply(moved.evidence, c, 1, moved.fuel), moved.psi), m)
    print(f"p={str(p):>4}  accept={str(accept):>6}  3p^2-2p^3={3 * p**2 - 2 * p**3}")

# the report bundles the same numbers with a brute-force oracle
rep = majority_report(fx, Fraction(2, 3))
print({name: ok for name, ok in rep.checks.items()})

# improvement happens only above one half
for p in (Fraction(1, 4), Fraction(1, 2), Fraction(5, 8)):
    r = majority_report(fx, p)
    print(p, "improves" if r.amplified > r.base else "does not improve")
