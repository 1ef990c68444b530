"""smartnie: design and analysis of two-stage SMARTs with non-inferiority
and equivalence tests.

The package covers the full workflow: standardized effect sizes and
variance coefficients for embedded adaptive interventions (``design``),
sample-size and power planning (``planning``), IPW estimation and z-type
testing of trial data (``inference``), and a seeded Monte Carlo validator
(``simulation``).  A command-line front end (``cli``) and a small HTTP
facade (``service``) expose the same operations.
"""

from .design import (
    CELLS,
    AiPair,
    EmbeddedAI,
    SmartDesign,
    ai_mean,
    ai_pair,
    ai_variance_coeff,
    diff_variance,
    embedded_ai,
    shared_cov_coeff,
    standardized_quantities,
)
from .inference import (
    PositivityError,
    RandomizationProbs,
    TestReport,
    TrialRecord,
    bf_upper_bound,
    equivalence_test,
    estimate_ai_mean,
    estimate_design,
    ht_ai_mean,
    ipw_weight,
    ni_test,
)
from .planning import (
    PlanInput,
    PlanResult,
    attrition_inflate,
    eq_power,
    eq_sample_size_delta0,
    eq_sample_size_search,
    ni_power,
    ni_sample_size,
    plan,
    power_curve,
)
from .simulation import (
    McEstimate,
    ScenarioParams,
    SeedSpec,
    SimScenario,
    TestSpec,
    build_scenario,
    generate_trial,
    mc_power,
    mc_power_robust,
    presets,
    sample_randomized_trial,
    type1_rate,
)
from .statkernel import std_normal_cdf, std_normal_pdf, std_normal_quantile

__version__ = "0.1.0"

__all__ = [
    "CELLS",
    "AiPair",
    "EmbeddedAI",
    "SmartDesign",
    "ai_mean",
    "ai_pair",
    "ai_variance_coeff",
    "diff_variance",
    "embedded_ai",
    "shared_cov_coeff",
    "standardized_quantities",
    "PositivityError",
    "RandomizationProbs",
    "TestReport",
    "TrialRecord",
    "bf_upper_bound",
    "equivalence_test",
    "estimate_ai_mean",
    "estimate_design",
    "ht_ai_mean",
    "ipw_weight",
    "ni_test",
    "PlanInput",
    "PlanResult",
    "attrition_inflate",
    "eq_power",
    "eq_sample_size_delta0",
    "eq_sample_size_search",
    "ni_power",
    "ni_sample_size",
    "plan",
    "power_curve",
    "McEstimate",
    "ScenarioParams",
    "SeedSpec",
    "SimScenario",
    "TestSpec",
    "build_scenario",
    "generate_trial",
    "mc_power",
    "mc_power_robust",
    "presets",
    "sample_randomized_trial",
    "type1_rate",
    "std_normal_cdf",
    "std_normal_pdf",
    "std_normal_quantile",
    "__version__",
]
