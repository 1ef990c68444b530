"""Sample-size and power computation for non-inferiority and equivalence
comparisons of embedded AIs.

Everything is driven by standardized effect sizes: the margin and the true
mean difference divided by the pair-appropriate variance scale (half-sum
of variance coefficients, covariance-corrected for shared-path pairs).
With the effect size in hand the formulas are path-free, so equal effect
sizes give equal sample sizes for distinct- and shared-path comparisons.

Sample sizes round up: the returned N is the smallest integer whose
power reaches the target.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence, Tuple, Union

from .design import AiPair, SmartDesign, standardized_quantities
from .statkernel import std_normal_cdf, std_normal_quantile

__all__ = [
    "PlanInput",
    "PlanResult",
    "CurveRow",
    "ni_sample_size",
    "ni_power",
    "eq_power",
    "eq_sample_size_delta0",
    "eq_sample_size_search",
    "attrition_inflate",
    "power_curve",
    "plan",
]

_MAX_N = 10_000_000


def _check_level(name: str, p: float) -> float:
    if not 0.0 < p < 1.0:
        raise ValueError(f"{name} must lie strictly inside (0, 1), got {p}")
    return float(p)


@dataclass(frozen=True)
class PlanResult:
    """A required sample size together with the power it achieves."""

    n: int
    achieved_power: float
    inputs: dict = field(default_factory=dict)


def ni_power(n: int, eta: float, alpha: float = 0.05) -> float:
    """Power of the non-inferiority test at trial size n and overall
    standardized effect size eta."""
    if n < 1:
        raise ValueError(f"n must be at least 1, got {n}")
    _check_level("alpha", alpha)
    z_a = std_normal_quantile(1.0 - alpha)
    return std_normal_cdf(-z_a + eta * math.sqrt(n / 2.0))


def ni_sample_size(
    eta: float, alpha: float = 0.05, beta: float = 0.20
) -> PlanResult:
    """Smallest N giving power 1-beta for a non-inferiority comparison at
    standardized effect size eta = eta(theta) - eta(delta).

    The same formula serves distinct- and shared-path pairs: the path only
    enters through the variance scale already folded into eta.
    """
    _check_level("alpha", alpha)
    _check_level("beta", beta)
    if not eta > 0.0:
        raise ValueError(
            "the margin does not exceed the true difference (eta <= 0): "
            "the null is true and no sample size achieves the target power"
        )
    z_a = std_normal_quantile(1.0 - alpha)
    z_b = std_normal_quantile(1.0 - beta)
    n = math.ceil(2.0 * (z_a + z_b) ** 2 / eta ** 2)
    return PlanResult(n, ni_power(n, eta, alpha),
                      {"mode": "ni", "eta": eta, "alpha": alpha, "beta": beta})


def eq_power(
    n: int, eta_theta: float, eta_delta: float, alpha: float = 0.05
) -> float:
    """Power of the TOST equivalence test at trial size n.

    Slightly negative values of the underlying expression (possible for
    tiny n) are reported as 0.
    """
    if n < 1:
        raise ValueError(f"n must be at least 1, got {n}")
    _check_level("alpha", alpha)
    if not abs(eta_delta) < eta_theta:
        raise ValueError(
            f"|eta_delta| = {abs(eta_delta)} must be below eta_theta = "
            f"{eta_theta}; outside the band the alternative is false"
        )
    z_a = std_normal_quantile(1.0 - alpha)
    root = math.sqrt(n / 2.0)
    raw = (std_normal_cdf(-z_a + (eta_theta - eta_delta) * root)
           - std_normal_cdf(z_a - (eta_theta + eta_delta) * root))
    return min(max(raw, 0.0), 1.0)


def eq_sample_size_delta0(
    eta_theta: float, alpha: float = 0.05, beta: float = 0.20
) -> PlanResult:
    """Closed-form N for the equivalence test when the postulated true
    difference is zero."""
    _check_level("alpha", alpha)
    _check_level("beta", beta)
    if not eta_theta > 0.0:
        raise ValueError(f"eta_theta must be positive, got {eta_theta}")
    z_a = std_normal_quantile(1.0 - alpha)
    z_b2 = std_normal_quantile(1.0 - beta / 2.0)
    n = math.ceil(2.0 * (z_a + z_b2) ** 2 / eta_theta ** 2)
    return PlanResult(n, eq_power(n, eta_theta, 0.0, alpha),
                      {"mode": "eq", "eta_theta": eta_theta, "eta_delta": 0.0,
                       "alpha": alpha, "beta": beta})


def eq_sample_size_search(
    eta_theta: float,
    eta_delta: float,
    alpha: float = 0.05,
    beta: float = 0.20,
) -> PlanResult:
    """Smallest integer N with eq_power(N) >= 1-beta, by bisection.

    eq_power is nondecreasing in N on the valid region, so bisection on
    [2, 1e7] finds the exact integer threshold.
    """
    _check_level("alpha", alpha)
    _check_level("beta", beta)
    target = 1.0 - beta
    if not abs(eta_delta) < eta_theta:
        raise ValueError(
            f"|eta_delta| = {abs(eta_delta)} must be below eta_theta = "
            f"{eta_theta}; at or beyond the band N diverges"
        )
    lo, hi = 2, _MAX_N
    if eq_power(hi, eta_theta, eta_delta, alpha) < target:
        raise ValueError(
            f"target power {target} is unreachable below N = {_MAX_N} for "
            f"eta_theta={eta_theta}, eta_delta={eta_delta}"
        )
    if eq_power(lo, eta_theta, eta_delta, alpha) >= target:
        hi = lo
    while lo < hi:
        mid = (lo + hi) // 2
        if eq_power(mid, eta_theta, eta_delta, alpha) >= target:
            hi = mid
        else:
            lo = mid + 1
    return PlanResult(hi, eq_power(hi, eta_theta, eta_delta, alpha),
                      {"mode": "eq", "eta_theta": eta_theta,
                       "eta_delta": eta_delta, "alpha": alpha, "beta": beta})


def attrition_inflate(n: int, dropout: float) -> int:
    """Inflate a sample size so that the planned N survives the expected
    dropout fraction."""
    if n < 1:
        raise ValueError(f"n must be at least 1, got {n}")
    if not 0.0 <= dropout < 1.0:
        raise ValueError(f"dropout must lie in [0, 1), got {dropout}")
    return math.ceil(n / (1.0 - dropout))


@dataclass(frozen=True)
class PlanInput:
    """Inputs for a planning run.

    Either pass standardized quantities directly (``eta_theta`` plus
    ``eta_delta``), or raw ``theta``/``delta`` together with a design and
    pair, in which case the standardized values are derived by the design
    module so the two entry points cannot disagree.
    """

    mode: str                       # "ni" | "eq"
    eta_theta: Optional[float] = None
    eta_delta: float = 0.0
    alpha: float = 0.05
    beta: float = 0.20
    theta: Optional[float] = None
    delta: Optional[float] = None
    design: Optional[SmartDesign] = None
    pair: Optional[AiPair] = None
    dropout: float = 0.0

    def resolved_etas(self) -> Tuple[float, float]:
        if self.eta_theta is not None:
            return self.eta_theta, self.eta_delta
        if self.design is None or self.pair is None or self.theta is None:
            raise ValueError(
                "either eta_theta or (theta, delta, design, pair) must be given"
            )
        e_t, e_d, _ = standardized_quantities(
            self.design, self.pair, self.theta,
            0.0 if self.delta is None else self.delta,
        )
        return e_t, e_d


def plan(inp: PlanInput) -> PlanResult:
    """Dispatch a PlanInput to the appropriate sample-size routine and
    apply attrition inflation."""
    if inp.mode not in ("ni", "eq"):
        raise ValueError(f"mode must be 'ni' or 'eq', got {inp.mode!r}")
    eta_theta, eta_delta = inp.resolved_etas()
    if inp.mode == "ni":
        result = ni_sample_size(eta_theta - eta_delta, inp.alpha, inp.beta)
    elif eta_delta == 0.0:
        result = eq_sample_size_delta0(eta_theta, inp.alpha, inp.beta)
    else:
        result = eq_sample_size_search(eta_theta, eta_delta, inp.alpha, inp.beta)
    if inp.dropout:
        inflated = attrition_inflate(result.n, inp.dropout)
        inputs = dict(result.inputs, dropout=inp.dropout, n_enrolled=inflated)
        return PlanResult(result.n, result.achieved_power, inputs)
    return result


@dataclass(frozen=True)
class CurveRow:
    n: int
    eta_theta: float
    eta_delta: float
    analytic_power: float
    mc_power: Optional[float] = None
    mc_se: Optional[float] = None

    @property
    def eta(self) -> float:
        return self.eta_theta - self.eta_delta


GridPoint = Union[float, Tuple[float, float]]
McHook = Callable[[int, float, float], Tuple[float, float]]


def power_curve(
    mode: str,
    n_list: Sequence[int],
    grid: Sequence[GridPoint],
    alpha: float = 0.05,
    mc: Optional[McHook] = None,
) -> List[CurveRow]:
    """Tabulate power over a grid of effect sizes for a list of trial
    sizes.

    Grid points are overall effect sizes (floats, eta_delta taken as 0)
    for non-inferiority, or (eta_theta, eta_delta) tuples for equivalence.
    When ``mc`` is given it is called as mc(n, eta_theta, eta_delta) and
    must return a (power estimate, standard error) pair that is recorded
    alongside the analytic value.
    """
    if mode not in ("ni", "eq"):
        raise ValueError(f"mode must be 'ni' or 'eq', got {mode!r}")
    if not n_list or not grid:
        raise ValueError("n_list and grid must both be non-empty")
    rows: List[CurveRow] = []
    for n in n_list:
        for point in grid:
            if isinstance(point, tuple):
                eta_theta, eta_delta = point
            else:
                eta_theta, eta_delta = float(point), 0.0
            if mode == "ni":
                analytic = ni_power(n, eta_theta - eta_delta, alpha)
            else:
                analytic = eq_power(n, eta_theta, eta_delta, alpha)
            mc_p = mc_se = None
            if mc is not None:
                mc_p, mc_se = mc(n, eta_theta, eta_delta)
            rows.append(CurveRow(n, eta_theta, eta_delta, analytic, mc_p, mc_se))
    return rows
