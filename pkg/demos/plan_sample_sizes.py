"""Walk-through: sizing a two-stage SMART for non-inferiority and
equivalence questions.

Everything here runs off standardized effect sizes, so no outcome-scale
parameters are needed until you want to translate a margin in outcome
units (see design_estimands.py for that step).
"""

from smartnie import (
    attrition_inflate,
    eq_power,
    eq_sample_size_delta0,
    eq_sample_size_search,
    ni_power,
    ni_sample_size,
)

print("=== Non-inferiority ===")
print("A new adaptive intervention is acceptable if the active control's")
print("advantage is below the margin. With the margin and the postulated")
print("true difference standardized into a single effect size, the trial")
print("size follows directly:\n")
for eta in (0.379, 0.30, 0.223):
    result = ni_sample_size(eta, alpha=0.05, beta=0.20)
    print(f"  effect size {eta:5.3f}  ->  N = {result.n:4d}   "
          f"(achieved power {result.achieved_power:.3f})")

print()
print("Halving the effect size roughly quadruples the trial:")
for eta in (0.379, 0.1895):
    print(f"  {eta:6.4f} -> N = {ni_sample_size(eta).n}")

print()
print("=== Equivalence (TOST) ===")
print("With no true difference the closed form applies:\n")
for eta_theta in (0.307, 0.265, 0.244):
    result = eq_sample_size_delta0(eta_theta)
    print(f"  standardized margin {eta_theta:5.3f} -> N = {result.n:4d} "
          f"(power {result.achieved_power:.3f})")

print()
print("A nonzero postulated difference needs the iterative search:")
res0 = eq_sample_size_search(0.30, 0.0)
res1 = eq_sample_size_search(0.30, 0.10)
print(f"  margin 0.30, difference 0.00 -> N = {res0.n}")
print(f"  margin 0.30, difference 0.10 -> N = {res1.n}")
print(f"  power at the smaller N would be "
      f"{eq_power(res0.n, 0.30, 0.10):.3f} (below the 0.80 target)")

print()
print("=== Attrition ===")
print("Dropout shrinks the analyzable sample; enroll ahead of it:")
for dropout in (0.1, 0.2):
    n = eq_sample_size_delta0(0.265).n
    print(f"  N = {n}, dropout {dropout:.0%} -> enroll {attrition_inflate(n, dropout)}")

print()
print("Power at a few fixed trial sizes (non-inferiority, effect 0.25):")
for n in (100, 200, 300, 500):
    print(f"  N = {n:3d} -> power {ni_power(n, 0.25):.3f}")
