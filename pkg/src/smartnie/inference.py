"""Analysis of individual-level SMART data.

The estimators follow the inverse-probability-weighting route: responders
carry weight 1/pi_T1, re-randomized non-responders 1/(pi_T1 * pi_T1,T2),
and an AI mean is the weighted average of the outcomes of everyone whose
trajectory is consistent with that AI.  Tests plug estimated response
rates, cell means and a pooled outcome variance into the theoretical
variance of the mean difference (see :mod:`smartnie.design`) and refer the
resulting z statistic to the standard normal.

All functions are pure; record sequences are only read.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Dict, Iterable, Optional, Sequence, Tuple

from .design import (
    CELLS,
    AiPair,
    Cell,
    EmbeddedAI,
    SmartDesign,
    ai_mean,
    diff_variance,
)
from .statkernel import std_normal_cdf, std_normal_quantile

__all__ = [
    "TrialRecord",
    "RandomizationProbs",
    "TestReport",
    "PositivityError",
    "ipw_weight",
    "is_consistent",
    "estimate_ai_mean",
    "ht_ai_mean",
    "estimate_design",
    "ni_test",
    "equivalence_test",
    "bf_upper_bound",
]

#: Below this trial size the large-sample normal reference is shaky and
#: some intervention sequences may hold only a handful of participants.
SMALL_TRIAL_N = 80

_STAGE2_BY_STAGE1 = {"a": ("a", "m", "v"), "ac": ("ac", "m", "v")}


class PositivityError(ValueError):
    """Raised when an intervention sequence required by the analysis holds
    no participants."""

    def __init__(self, cells: Sequence[Cell]):
        self.cells = tuple(cells)
        pretty = ", ".join(f"({t1}, {t2})" for t1, t2 in self.cells)
        super().__init__(f"no participants observed in cell(s) {pretty}")


@dataclass(frozen=True)
class TrialRecord:
    """One participant's observed trajectory (stage-1 arm, response flag,
    stage-2 assignment, primary outcome)."""

    id: str
    stage1: str
    response: int
    stage2: str
    outcome: float

    def __post_init__(self) -> None:
        if self.stage1 not in ("a", "ac"):
            raise ValueError(f"stage1 must be 'a' or 'ac', got {self.stage1!r}")
        if self.response not in (0, 1):
            raise ValueError(f"response must be 0 or 1, got {self.response!r}")
        if self.response == 1:
            if self.stage2 != self.stage1:
                raise ValueError(
                    f"responder stage2 must equal stage1 "
                    f"({self.stage1!r}), got {self.stage2!r}"
                )
        elif self.stage2 not in ("m", "v"):
            raise ValueError(
                f"non-responder stage2 must be 'm' or 'v', got {self.stage2!r}"
            )
        if not math.isfinite(float(self.outcome)):
            raise ValueError(f"outcome must be finite, got {self.outcome!r}")

    @property
    def cell(self) -> Cell:
        return (self.stage1, self.stage2)


@dataclass(frozen=True)
class RandomizationProbs:
    """Declared randomization probabilities (stage 1 in favor of 'a';
    stage 2 in favor of 'v' among non-responders of each arm)."""

    pi_a: float = 0.5
    pi_a_v: float = 0.5
    pi_ac_v: float = 0.5

    def __post_init__(self) -> None:
        for name in ("pi_a", "pi_a_v", "pi_ac_v"):
            p = getattr(self, name)
            if not 0.0 < p < 1.0:
                raise ValueError(f"{name} must lie strictly inside (0, 1), got {p}")

    def pi_stage1(self, stage1: str) -> float:
        return self.pi_a if stage1 == "a" else 1.0 - self.pi_a

    def pi_stage2(self, stage1: str, tactic: str) -> float:
        pi_v = self.pi_a_v if stage1 == "a" else self.pi_ac_v
        return pi_v if tactic == "v" else 1.0 - pi_v


def ipw_weight(record: TrialRecord, probs: RandomizationProbs) -> float:
    """Inverse-probability weight of one record: 1/pi_T1 for responders,
    1/(pi_T1 * pi_T1,T2) for re-randomized non-responders."""
    w = 1.0 / probs.pi_stage1(record.stage1)
    if record.response == 0:
        w /= probs.pi_stage2(record.stage1, record.stage2)
    return w


def is_consistent(record: TrialRecord, ai: EmbeddedAI) -> bool:
    """Whether the record's trajectory is consistent with the AI (the
    indicator inside the weighted mean)."""
    if record.stage1 != ai.stage1:
        return False
    if record.response == 1:
        return True
    return record.stage2 == ai.nonresponder_tactic


# ---------------------------------------------------------------------------
# Cell summaries: the sufficient statistics every estimator runs on.
# ---------------------------------------------------------------------------

@dataclass
class CellStats:
    count: int = 0
    mean: float = 0.0
    sse: float = 0.0  # sum of squared deviations from the cell mean

    def push(self, y: float) -> None:
        # Welford update keeps the one-pass variance numerically stable.
        self.count += 1
        d = y - self.mean
        self.mean += d / self.count
        self.sse += d * (y - self.mean)


CellTable = Dict[Cell, CellStats]


def summarize_records(records: Iterable[TrialRecord]) -> CellTable:
    """Group records into the six design cells."""
    cells: CellTable = {c: CellStats() for c in CELLS}
    for rec in records:
        if rec.cell not in cells:
            raise ValueError(f"record {rec.id!r} maps to unknown cell {rec.cell}")
        cells[rec.cell].push(float(rec.outcome))
    return cells


def _cells_from_arrays(counts, means, sses) -> CellTable:
    return {
        c: CellStats(count=int(counts[c]), mean=float(means[c]), sse=float(sses[c]))
        for c in CELLS
    }


def _arm_total(cells: CellTable, stage1: str) -> int:
    return sum(cells[(stage1, t2)].count for t2 in _STAGE2_BY_STAGE1[stage1])


def _n_total(cells: CellTable) -> int:
    return sum(s.count for s in cells.values())


def empirical_probs(cells: CellTable) -> RandomizationProbs:
    """Randomization fractions actually realized in the data."""
    n = _n_total(cells)
    na = _arm_total(cells, "a")
    nav, nam = cells[("a", "v")].count, cells[("a", "m")].count
    nacv, nacm = cells[("ac", "v")].count, cells[("ac", "m")].count
    if n == 0 or na in (0, n) or nav + nam == 0 or nacv + nacm == 0:
        raise ValueError("cannot form empirical randomization fractions: "
                         "an arm or a re-randomized stratum is empty")
    return RandomizationProbs(na / n, nav / (nav + nam), nacv / (nacv + nacm))


def _ai_weighted_sums(
    cells: CellTable, ai: EmbeddedAI, probs: RandomizationProbs
) -> Tuple[float, float]:
    """(sum of w*y, sum of w) over records consistent with the AI."""
    w_r = 1.0 / probs.pi_stage1(ai.stage1)
    w_n = w_r / probs.pi_stage2(ai.stage1, ai.nonresponder_tactic)
    r = cells[ai.responder_cell]
    nr = cells[ai.nonresponder_cell]
    wy = w_r * r.count * r.mean + w_n * nr.count * nr.mean
    w = w_r * r.count + w_n * nr.count
    return wy, w


def _estimate_ai_mean_cells(
    cells: CellTable, ai: EmbeddedAI, probs: RandomizationProbs
) -> float:
    empty = [c for c in (ai.responder_cell, ai.nonresponder_cell)
             if cells[c].count == 0]
    if len(empty) == 2:
        raise PositivityError(empty)
    wy, w = _ai_weighted_sums(cells, ai, probs)
    return wy / w


def estimate_ai_mean(
    records: Sequence[TrialRecord],
    ai: EmbeddedAI,
    probs: RandomizationProbs = RandomizationProbs(),
) -> float:
    """Weighted mean outcome of the records consistent with an AI
    (weighted outcome sum over weight sum)."""
    return _estimate_ai_mean_cells(summarize_records(records), ai, probs)


def ht_ai_mean(
    records: Sequence[TrialRecord],
    ai: EmbeddedAI,
    probs: RandomizationProbs = RandomizationProbs(),
) -> float:
    """Weighted outcome sum divided by the trial size instead of the weight
    sum.

    This is the estimator whose exact variance the design-module
    coefficients describe; the two versions agree whenever the realized
    randomization fractions equal the declared probabilities (the weight
    sum is then the trial size).
    """
    cells = summarize_records(records)
    n = _n_total(cells)
    if n == 0:
        raise PositivityError([ai.responder_cell, ai.nonresponder_cell])
    wy, _ = _ai_weighted_sums(cells, ai, probs)
    return wy / n


def _estimate_design_cells(
    cells: CellTable, probs: RandomizationProbs
) -> Tuple[SmartDesign, int]:
    empty = [c for c in CELLS if cells[c].count == 0]
    if empty:
        raise PositivityError(empty)
    n = _n_total(cells)
    df = n - len(CELLS)
    if df < 1:
        raise ValueError(
            f"{n} observations leave no degrees of freedom for the pooled "
            "outcome variance"
        )
    sigma2 = sum(s.sse for s in cells.values()) / df
    design = SmartDesign(
        cell_means={c: cells[c].mean for c in CELLS},
        sigma=math.sqrt(sigma2),
        gamma_a=cells[("a", "a")].count / _arm_total(cells, "a"),
        gamma_ac=cells[("ac", "ac")].count / _arm_total(cells, "ac"),
        pi_a=probs.pi_a,
        pi_a_v=probs.pi_a_v,
        pi_ac_v=probs.pi_ac_v,
    )
    return design, n


def estimate_design(
    records: Sequence[TrialRecord],
    probs: RandomizationProbs = RandomizationProbs(),
) -> SmartDesign:
    """Plug-in design estimate: per-arm responder proportions, cell sample
    means, and a pooled (degrees-of-freedom weighted) within-cell variance
    under the equal-variance working model."""
    design, _ = _estimate_design_cells(summarize_records(records), probs)
    return design


# ---------------------------------------------------------------------------
# Tests
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TestReport:
    """Outcome of a non-inferiority or TOST equivalence test."""

    kind: str                      # "non_inferiority" | "equivalence"
    pair: AiPair
    n: int
    mean_first: float              # control AI
    mean_second: float             # new AI
    theta: float
    alpha: float
    z_ni: float
    p_ni: float
    z_ns: Optional[float]
    p_ns: Optional[float]
    bf_bound_ni: float
    bf_bound_ns: Optional[float]
    decision: str                  # "reject_null" | "fail_to_reject"

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "control": self.pair.first.id,
            "new": self.pair.second.id,
            "path": self.pair.path,
            "n": self.n,
            "mean_first": self.mean_first,
            "mean_second": self.mean_second,
            "theta": self.theta,
            "alpha": self.alpha,
            "z_ni": self.z_ni,
            "p_ni": self.p_ni,
            "z_ns": self.z_ns,
            "p_ns": self.p_ns,
            "bf_bound_ni": self.bf_bound_ni,
            "bf_bound_ns": self.bf_bound_ns,
            "decision": self.decision,
        }


def bf_upper_bound(p: float) -> float:
    """Upper bound on the Bayes factor in favor of the alternative implied
    by a p-value: 1/(-e * p * ln p) for p below 1/e, otherwise 1 (the bound
    is not informative there)."""
    if not 0.0 < p < 1.0:
        raise ValueError(f"p-value must lie strictly inside (0, 1), got {p}")
    if p >= 1.0 / math.e:
        return 1.0
    return 1.0 / (-math.e * p * math.log(p))


def _bf_or_limit(p: float) -> float:
    # report pipeline only: p-values can underflow to exactly 0 or round
    # to 1 in extreme data; the bound's limits there are +inf and 1
    if p <= 0.0:
        return math.inf
    if p >= 1.0:
        return 1.0
    return bf_upper_bound(p)


def _test_from_cells(
    cells: CellTable,
    pair: AiPair,
    theta: float,
    alpha: float,
    probs: RandomizationProbs,
    kind: str,
    use_empirical_probs: bool = False,
    warn_small: bool = True,
) -> TestReport:
    if kind == "equivalence":
        if not theta > 0:
            raise ValueError(f"the equivalence margin must be positive, got {theta}")
    elif theta < 0:
        raise ValueError(f"the non-inferiority margin cannot be negative, got {theta}")
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie strictly inside (0, 1), got {alpha}")
    weight_probs = empirical_probs(cells) if use_empirical_probs else probs

    design, n = _estimate_design_cells(cells, probs)
    if warn_small and n < SMALL_TRIAL_N:
        warnings.warn(
            f"trial size {n} is below {SMALL_TRIAL_N}; some intervention "
            "sequences may hold very few participants and the normal "
            "approximation may be poor",
            stacklevel=3,
        )
    mean_first = _estimate_ai_mean_cells(cells, pair.first, weight_probs)
    mean_second = _estimate_ai_mean_cells(cells, pair.second, weight_probs)
    vhat = diff_variance(design, pair, n)
    if vhat <= 0.0:
        raise ValueError("estimated variance of the mean difference is zero")
    se = math.sqrt(vhat)
    diff = mean_first - mean_second

    z_ni = (diff - theta) / se
    p_ni = std_normal_cdf(z_ni)
    bf_ni = _bf_or_limit(p_ni)
    if kind == "non_inferiority":
        decision = "reject_null" if p_ni < alpha else "fail_to_reject"
        return TestReport(kind, pair, n, mean_first, mean_second, theta, alpha,
                          z_ni, p_ni, None, None, bf_ni, None, decision)

    z_ns = (diff + theta) / se
    p_ns = 1.0 - std_normal_cdf(z_ns)
    bf_ns = _bf_or_limit(p_ns)
    decision = "reject_null" if (p_ni < alpha and p_ns < alpha) else "fail_to_reject"
    return TestReport(kind, pair, n, mean_first, mean_second, theta, alpha,
                      z_ni, p_ni, z_ns, p_ns, bf_ni, bf_ns, decision)


def ni_test(
    records: Sequence[TrialRecord],
    pair: AiPair,
    theta: float,
    alpha: float = 0.05,
    probs: RandomizationProbs = RandomizationProbs(),
    use_empirical_probs: bool = False,
) -> TestReport:
    """Non-inferiority z-test of the new AI (``pair.second``) against the
    control (``pair.first``) at margin theta.

    Rejecting concludes that the control's advantage is below theta.  A
    zero margin turns this into a one-sided superiority test.
    """
    return _test_from_cells(summarize_records(records), pair, theta, alpha,
                            probs, "non_inferiority", use_empirical_probs)


def equivalence_test(
    records: Sequence[TrialRecord],
    pair: AiPair,
    theta: float,
    alpha: float = 0.05,
    probs: RandomizationProbs = RandomizationProbs(),
    use_empirical_probs: bool = False,
) -> TestReport:
    """TOST equivalence test: a non-inferiority and a non-superiority
    sub-test, each at level alpha; equivalence is declared only when both
    reject.  Equivalently, the (1 - 2 alpha) confidence interval of the
    mean difference lies inside (-theta, theta)."""
    return _test_from_cells(summarize_records(records), pair, theta, alpha,
                            probs, "equivalence", use_empirical_probs)


def _z_alpha(alpha: float) -> float:
    return std_normal_quantile(1.0 - alpha)
