"""
Null sets, strictness and the bridge to distributions
====================================================

Truth values are step functions on tapes, plus finitely many exceptional
tapes.  A single eventually-periodic tape has probability zero, so an
exception can break a pointwise entailment without touching the almost-sure
one, the expectation, or the law.
"""
from tapekit import ProductMeasure, Tape, TruthValue, check_entailment, expect
from tapekit.dist import bridge_prob_one, law
from tapekit.lang import Con, I, Value
from tapekit.modality import TOP, TestTable
from tapekit.serialize import law_to_json
from tapekit.tapes import Address
from tapekit.trees import Branch, Leaf

fair = ProductMeasure()
H, T = Con("H"), Con("T")

# 1 everywhere except on the all-zeros tape
dented = TruthValue.constant(1).with_exceptions([(Tape.constant(0), 0)])
psi = TestTable({H: dented})

pointwise = check_entailment(TOP, I, psi, [H], fuel=10)
almost = check_entailment(TOP, I, psi, [H], fuel=10, mode="as", measure=fair)
print("pointwise:", pointwise.verdict, "at", pointwise.counterexample.where)
print("almost surely:", almost.verdict)
print("expectation of the dented value:", expect(dented, fair))

# patch an always-H computation on the same null tape
t = Branch(Address(0, 0), Leaf(Value(H)), Leaf(Value(H)))
patch = {Tape.constant(0): Value(T)}
print("law with and without the patch:", law_to_json(law(t, fair, patch)), law_to_json(law(t, fair)))
r = bridge_prob_one(t, fair, {H}, patch)
print("probability one:", r.prob_one, " must on the law:", r.must)

# a degenerate coin gives the single tape all the mass, so patches are refused
try:
    law(t, ProductMeasure.uniform(0), patch)
except Exception as exc:
    print(type(exc).__name__ + ":", exc)
