"""Prototypical two-stage SMART designs and their population estimands.

A design is fully described by the six cell means mu[(stage1, stage2)], a
common outcome SD, the two response rates, and the randomization
probabilities.  The four embedded adaptive interventions (AIs) d1..d4 mix
a responder cell with a non-responder cell; every planning and inference
formula in the package is built from four quantities computed here:

* ``ai_mean``            -- population mean of an embedded AI
* ``ai_variance_coeff``  -- N * Var of the IPW mean of an AI
* ``shared_cov_coeff``   -- N * Cov between the two AIs of a shared-path pair
* ``diff_variance``      -- variance of the difference of two AI means

Variance coefficients are stored N-free so that planning formulas never
carry the sample size twice.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Dict, Mapping, Tuple

__all__ = [
    "CELLS",
    "Cell",
    "SmartDesign",
    "EmbeddedAI",
    "AiPair",
    "EMBEDDED_AIS",
    "embedded_ai",
    "ai_pair",
    "ai_mean",
    "ai_variance_coeff",
    "shared_cov_coeff",
    "diff_variance",
    "standardized_quantities",
]

Cell = Tuple[str, str]

#: The six intervention sequences of the prototypical design.
CELLS: Tuple[Cell, ...] = (
    ("a", "a"), ("a", "m"), ("a", "v"),
    ("ac", "ac"), ("ac", "m"), ("ac", "v"),
)


def _check_prob_interior(name: str, p: float) -> float:
    p = float(p)
    if not 0.0 < p < 1.0:
        raise ValueError(f"{name} must lie strictly inside (0, 1), got {p}")
    return p


@dataclass(frozen=True)
class SmartDesign:
    """Cell means, common SD, response rates and randomization probabilities."""

    cell_means: Mapping[Cell, float]
    sigma: float
    gamma_a: float
    gamma_ac: float
    pi_a: float = 0.5
    pi_a_v: float = 0.5
    pi_ac_v: float = 0.5

    def __post_init__(self) -> None:
        missing = [c for c in CELLS if c not in self.cell_means]
        if missing:
            raise ValueError(f"cell_means is missing cells {missing}")
        for cell in CELLS:
            v = float(self.cell_means[cell])
            if not math.isfinite(v):
                raise ValueError(f"cell mean {cell} must be finite, got {v}")
        object.__setattr__(self, "cell_means", dict(self.cell_means))
        if not self.sigma > 0:
            raise ValueError(f"sigma must be positive, got {self.sigma}")
        for name in ("pi_a", "pi_a_v", "pi_ac_v"):
            _check_prob_interior(name, getattr(self, name))
        for name in ("gamma_a", "gamma_ac"):
            g = float(getattr(self, name))
            if not 0.0 <= g <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {g}")
            if g in (0.0, 1.0):
                warnings.warn(
                    f"{name}={g} is a degenerate design: one second-stage "
                    "stratum is empty and would never be re-randomized",
                    stacklevel=3,
                )

    def gamma(self, stage1: str) -> float:
        return self.gamma_a if stage1 == "a" else self.gamma_ac

    def pi_stage1(self, stage1: str) -> float:
        return self.pi_a if stage1 == "a" else 1.0 - self.pi_a

    def pi_stage2(self, stage1: str, tactic: str) -> float:
        pi_v = self.pi_a_v if stage1 == "a" else self.pi_ac_v
        return pi_v if tactic == "v" else 1.0 - pi_v


@dataclass(frozen=True)
class EmbeddedAI:
    """One of the four AIs embedded in the design (see ``EMBEDDED_AIS``)."""

    id: str
    stage1: str
    nonresponder_tactic: str

    def __post_init__(self) -> None:
        expected = EMBEDDED_AIS.get(self.id)
        if expected is None:
            raise ValueError(f"unknown embedded AI id {self.id!r}; use d1..d4")
        if (self.stage1, self.nonresponder_tactic) != expected:
            raise ValueError(
                f"{self.id} must map to stage1={expected[0]!r}, "
                f"tactic={expected[1]!r}"
            )

    @property
    def responder_cell(self) -> Cell:
        return (self.stage1, self.stage1)

    @property
    def nonresponder_cell(self) -> Cell:
        return (self.stage1, self.nonresponder_tactic)


#: d1 = start with a, vigorous augmentation for non-responders; d2 = (a, m);
#: d3 = (ac, v); d4 = (ac, m).  Responders always continue stage-1 treatment.
EMBEDDED_AIS: Dict[str, Tuple[str, str]] = {
    "d1": ("a", "v"),
    "d2": ("a", "m"),
    "d3": ("ac", "v"),
    "d4": ("ac", "m"),
}


def embedded_ai(ai_id: str) -> EmbeddedAI:
    """Look up one of d1..d4."""
    if ai_id not in EMBEDDED_AIS:
        raise ValueError(f"unknown embedded AI id {ai_id!r}; use d1..d4")
    stage1, tactic = EMBEDDED_AIS[ai_id]
    return EmbeddedAI(ai_id, stage1, tactic)


@dataclass(frozen=True)
class AiPair:
    """An ordered pair of embedded AIs; ``first`` is the active control.

    The path relation is derived from the stage-1 options and never
    user-supplied: AIs starting on the same arm are shared-path, otherwise
    distinct-path.
    """

    first: EmbeddedAI
    second: EmbeddedAI
    path: str = field(init=False)

    def __post_init__(self) -> None:
        if self.first.id == self.second.id:
            raise ValueError("an AI pair needs two different embedded AIs")
        derived = "shared" if self.first.stage1 == self.second.stage1 else "distinct"
        object.__setattr__(self, "path", derived)


def ai_pair(control: str, new: str) -> AiPair:
    """Build a pair from AI ids, control first."""
    return AiPair(embedded_ai(control), embedded_ai(new))


def ai_mean(design: SmartDesign, ai: EmbeddedAI) -> float:
    """Population mean of an embedded AI: the response-rate mixture of its
    responder and non-responder cell means."""
    g = design.gamma(ai.stage1)
    return (g * design.cell_means[ai.responder_cell]
            + (1.0 - g) * design.cell_means[ai.nonresponder_cell])


def ai_variance_coeff(design: SmartDesign, ai: EmbeddedAI) -> float:
    """N * Var of the IPW mean of an AI, for general randomization
    probabilities.

    With both probabilities at 1/2 this reduces to
    2(2-g) sigma^2 + g(2-g) m11^2 + (3 - 2g - g^2) m12^2 - 2g(1-g) m11 m12,
    which the tests assert as an identity.
    """
    g = design.gamma(ai.stage1)
    p1 = design.pi_stage1(ai.stage1)
    p2 = design.pi_stage2(ai.stage1, ai.nonresponder_tactic)
    m11 = design.cell_means[ai.responder_cell]
    m12 = design.cell_means[ai.nonresponder_cell]
    s2 = design.sigma ** 2
    return ((1.0 - g + g * p2) / (p1 * p2) * s2
            + g * (1.0 - g * p1) / p1 * m11 ** 2
            + (1.0 - g) * (1.0 - (1.0 - g) * p1 * p2) / (p1 * p2) * m12 ** 2
            - 2.0 * g * (1.0 - g) * m11 * m12)


def shared_cov_coeff(design: SmartDesign, pair: AiPair) -> float:
    """N * Cov between the IPW means of a shared-path pair.

    The two AIs share every responder on their common arm, which is the
    only source of covariance.
    """
    if pair.path != "shared":
        raise ValueError("covariance is defined for shared-path pairs only")
    stage1 = pair.first.stage1
    g = design.gamma(stage1)
    p1 = design.pi_stage1(stage1)
    m11 = design.cell_means[(stage1, stage1)]
    return (g / p1 * (design.sigma ** 2 + m11 ** 2)
            - ai_mean(design, pair.first) * ai_mean(design, pair.second))


def diff_variance(design: SmartDesign, pair: AiPair, n: int) -> float:
    """Variance of the difference of the two observed AI means at trial
    size n."""
    if n < 1:
        raise ValueError(f"n must be at least 1, got {n}")
    coeff = (ai_variance_coeff(design, pair.first)
             + ai_variance_coeff(design, pair.second))
    if pair.path == "shared":
        coeff -= 2.0 * shared_cov_coeff(design, pair)
    # coeff is nonnegative by Cauchy-Schwarz; guard float round-off only.
    return max(coeff, 0.0) / n


def standardized_quantities(
    design: SmartDesign, pair: AiPair, theta: float, delta: float
) -> Tuple[float, float, float]:
    """Standardized margin, standardized mean difference and their
    difference (the overall standardized effect size) for a pair.

    The scale is sqrt of the half-sum of the two variance coefficients,
    minus the covariance coefficient for shared-path pairs, so that equal
    effect sizes imply equal required sample sizes across paths.
    """
    half = diff_variance(design, pair, 1) / 2.0
    if half <= 0.0:
        raise ValueError(
            "the variance scale of the pair is not positive; the two AIs "
            "are perfectly correlated (degenerate design)"
        )
    scale = math.sqrt(half)
    eta_theta = theta / scale
    eta_delta = delta / scale
    return eta_theta, eta_delta, eta_theta - eta_delta
