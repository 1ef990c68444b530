"""Walk-through: from a hypothesized SMART design to standardized effect
sizes.

The design is the six cell means (one per intervention sequence), a
common outcome SD, and the two response rates.  From it we get each
embedded AI's mean, the variance of its weighted mean estimate, the
covariance shared-path pairs pick up through common responders, and
finally the standardized quantities that plug into the planning formulas.
"""

from smartnie import (
    SmartDesign,
    ai_mean,
    ai_pair,
    ai_variance_coeff,
    diff_variance,
    embedded_ai,
    ni_sample_size,
    shared_cov_coeff,
    standardized_quantities,
)

design = SmartDesign(
    cell_means={
        ("a", "a"): 1.62,    # responders to the app keep improving
        ("a", "m"): 3.50,    # non-responders, modest augmentation
        ("a", "v"): 1.05,    # non-responders, vigorous augmentation
        ("ac", "ac"): 1.49,
        ("ac", "m"): 2.43,
        ("ac", "v"): 2.43,
    },
    sigma=3.0,
    gamma_a=0.30,
    gamma_ac=0.50,
)

print("Embedded AI means (response-rate mixtures of two cells):")
for ai_id in ("d1", "d2", "d3", "d4"):
    ai = embedded_ai(ai_id)
    print(f"  {ai_id} = start {ai.stage1!r}, give {ai.nonresponder_tactic!r} "
          f"to non-responders -> mean {ai_mean(design, ai):.4f}")

print()
print("Variance coefficients (N x variance of the weighted mean):")
for ai_id in ("d1", "d3", "d4"):
    print(f"  {ai_id}: {ai_variance_coeff(design, embedded_ai(ai_id)):8.3f}")

pair_dp = ai_pair("d3", "d1")   # control first
pair_sp = ai_pair("d3", "d4")
print()
print(f"d3 vs d1 is a {pair_dp.path}-path comparison;"
      f" d3 vs d4 is {pair_sp.path}-path.")
print(f"Shared-path covariance coefficient: "
      f"{shared_cov_coeff(design, pair_sp):.3f}")
print(f"Variance of the mean difference at N = 250: "
      f"DP {diff_variance(design, pair_dp, 250):.4f}, "
      f"SP {diff_variance(design, pair_sp, 250):.4f}")

print()
theta = 3.0
delta = ai_mean(design, pair_dp.first) - ai_mean(design, pair_dp.second)
eta_theta, eta_delta, eta = standardized_quantities(design, pair_dp, theta, delta)
print(f"Margin {theta} in outcome units, true difference {delta:.3f}:")
print(f"  standardized margin     {eta_theta:.4f}")
print(f"  standardized difference {eta_delta:.4f}")
print(f"  overall effect size     {eta:.4f}")
print(f"  required N for 80% power at alpha 0.05: {ni_sample_size(eta).n}")
