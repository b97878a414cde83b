"""
Unbiasing a coin by scanning pairs
==================================

A scanner reads the tape two bits at a time.  ``01`` answers H, ``10``
answers T, and a repeated pair sends it on to the next pair.  With a finite
fuel budget only the first few pairs are inspected, and the rest of the mass
is divergence.
"""
from fractions import Fraction

from tapekit import ProductMeasure, eval_code, parse_tape
from tapekit.casebook import VN_SOURCE, build_vn, vn_fairness_report
from tapekit.dist import law
from tapekit.serialize import law_to_json
from tapekit.lang import Con
from tapekit.tapes import builtin_map
from tapekit.truth import tv_pullback

print(VN_SOURCE.strip())

# a few single runs
fx = build_vn(3)
for literal in ("01:0", "10:0", "0010:0", "1101:0", ":0"):
    print(f"{literal:>8}  ->", eval_code(fx.code, parse_tape(literal), fx.fuel))

# the decision tree over all tapes gives the law exactly
for k in (1, 2, 3, 8):
    print(k, "pairs:", law_to_json(law(build_vn(k).tree(), ProductMeasure())))

# the answer is fair even when the coin is not
biased = ProductMeasure.uniform(Fraction(1, 5))
print("bias 1/5:", law_to_json(law(fx.tree(), biased)))

# flipping every bit swaps which patterns are decisive for H and for T
alpha_h, alpha_t = fx.alpha(Con("H")), fx.alpha(Con("T"))
print("flip pulls alpha_H back to alpha_T:", tv_pullback(builtin_map("flip"), alpha_h) == alpha_t)

report = vn_fairness_report(3)
for name, ok in report.checks.items():
    print(f"  {name:<22} {ok}")
