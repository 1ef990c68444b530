"""Seeded Monte Carlo machinery: scenario construction, the SMART data
generator, and replication-level power / Type-I-error estimators.

Scenarios are built from latent-progress parameters: a latent variable L
determines responder status via a cutoff, the cell means are linear in the
latent means (overall for responders, truncated below the cutoff for
non-responders), and outcomes are drawn per intervention sequence from
normal distributions around those cell means.

Cell counts are deterministic (expected counts, rounded up per cell), so
the realized trial can slightly exceed the nominal size; the realized
total is what the analysis sees.  Every replication draws from an RNG
stream derived by hashing (master seed, replication index), which makes
Monte Carlo estimates independent of execution order and safe to
parallelize.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from .design import (
    CELLS,
    AiPair,
    Cell,
    EmbeddedAI,
    SmartDesign,
    ai_mean,
    ai_pair,
    standardized_quantities,
)
from .inference import (
    CellStats,
    CellTable,
    RandomizationProbs,
    TrialRecord,
    _test_from_cells,
)
from .planning import (
    CurveRow,
    eq_power,
    eq_sample_size_search,
    ni_power,
    ni_sample_size,
)
from .statkernel import std_normal_pdf, std_normal_quantile

__all__ = [
    "ScenarioParams",
    "SimScenario",
    "SeedSpec",
    "TestSpec",
    "McEstimate",
    "build_scenario",
    "cell_counts",
    "generate_trial",
    "sample_randomized_trial",
    "mc_power",
    "mc_power_robust",
    "type1_rate",
    "presets",
    "preset_row",
    "scenario_power_curve",
]


@dataclass(frozen=True)
class ScenarioParams:
    """Generator inputs: outcome SD, response rates, latent-variable
    parameters, and the linear coefficients mapping latent means to cell
    means."""

    sigma: float
    gamma_a: float
    gamma_ac: float
    mu_La: float
    sigma_L: float
    zeta0: float
    zeta1a: float
    zeta1ac: float
    xi0: float
    xi1a: float
    xi1ac: float
    xi2_a_m: float
    xi2_a_v: float
    xi2_ac_m: float
    xi2_ac_v: float
    theta: float
    alpha: float = 0.05
    beta: float = 0.20

    def __post_init__(self) -> None:
        if not self.sigma > 0:
            raise ValueError(f"sigma must be positive, got {self.sigma}")
        if not self.sigma_L > 0:
            raise ValueError(f"sigma_L must be positive, got {self.sigma_L}")
        if not self.theta > 0:
            raise ValueError(f"theta must be positive, got {self.theta}")
        for name in ("alpha", "beta"):
            p = getattr(self, name)
            if not 0.0 < p < 1.0:
                raise ValueError(f"{name} must lie strictly inside (0, 1), got {p}")


@dataclass(frozen=True)
class SimScenario:
    """A fully derived simulation scenario (see :func:`build_scenario`)."""

    params: ScenarioParams
    latent_cutoff: float
    mu_Lac: float
    mu_La_NR: float
    mu_Lac_NR: float
    design: SmartDesign
    ai_means: Dict[str, float]
    delta_dp: float        # mean(d3) - mean(d1)
    delta_sp: float        # mean(d3) - mean(d4)

    @property
    def cell_means(self) -> Dict[Cell, float]:
        return self.design.cell_means

    def delta(self, path: str) -> float:
        if path == "distinct":
            return self.delta_dp
        if path == "shared":
            return self.delta_sp
        raise ValueError(f"path must be 'distinct' or 'shared', got {path!r}")

    def standardized(
        self, pair: AiPair, theta: Optional[float] = None,
        delta: Optional[float] = None,
    ) -> Tuple[float, float, float]:
        """(eta_theta, eta_delta, eta) for a pair, defaulting to the
        scenario's margin and the pair's true mean difference."""
        if theta is None:
            theta = self.params.theta
        if delta is None:
            delta = ai_mean(self.design, pair.first) - ai_mean(self.design, pair.second)
        return standardized_quantities(self.design, pair, theta, delta)


def _truncated_below_mean(mu: float, sigma: float, cutoff: float) -> float:
    """Mean of Normal(mu, sigma^2) truncated to lie below the cutoff."""
    u = (cutoff - mu) / sigma
    phi = std_normal_pdf(u)
    big_phi = 0.5 * math.erfc(-u / math.sqrt(2.0))
    return mu - sigma * phi / big_phi


def build_scenario(params: ScenarioParams) -> SimScenario:
    """Derive the latent cutoff, truncated non-responder means, cell means
    and AI means from generator parameters."""
    p = params
    for name in ("gamma_a", "gamma_ac"):
        g = getattr(p, name)
        if not 0.0 < g < 1.0:
            raise ValueError(
                f"{name}={g}: response rates of 0 or 1 leave the truncated "
                "non-responder mean undefined"
            )
    cutoff = p.mu_La + p.sigma_L * std_normal_quantile(1.0 - p.gamma_a)
    mu_lac = cutoff - p.sigma_L * std_normal_quantile(1.0 - p.gamma_ac)
    mu_la_nr = _truncated_below_mean(p.mu_La, p.sigma_L, cutoff)
    mu_lac_nr = _truncated_below_mean(mu_lac, p.sigma_L, cutoff)
    cell_means: Dict[Cell, float] = {
        ("a", "a"): p.zeta0 + p.zeta1a * p.mu_La,
        ("a", "v"): p.xi0 + p.xi1a * p.mu_La + p.xi2_a_v * mu_la_nr,
        ("a", "m"): p.xi0 + p.xi1a * p.mu_La + p.xi2_a_m * mu_la_nr,
        ("ac", "ac"): p.zeta0 + p.zeta1ac * mu_lac,
        ("ac", "v"): p.xi0 + p.xi1ac * mu_lac + p.xi2_ac_v * mu_lac_nr,
        ("ac", "m"): p.xi0 + p.xi1ac * mu_lac + p.xi2_ac_m * mu_lac_nr,
    }
    design = SmartDesign(cell_means, p.sigma, p.gamma_a, p.gamma_ac)
    means = {d: ai_mean(design, EmbeddedAI(d, *_AI_DEF[d])) for d in _AI_DEF}
    return SimScenario(
        params=p,
        latent_cutoff=cutoff,
        mu_Lac=mu_lac,
        mu_La_NR=mu_la_nr,
        mu_Lac_NR=mu_lac_nr,
        design=design,
        ai_means=means,
        delta_dp=means["d3"] - means["d1"],
        delta_sp=means["d3"] - means["d4"],
    )


_AI_DEF = {"d1": ("a", "v"), "d2": ("a", "m"), "d3": ("ac", "v"), "d4": ("ac", "m")}


@dataclass(frozen=True)
class SeedSpec:
    """Addressing of one replication's RNG stream: the stream is a pure
    function of (master seed, replication index)."""

    master_seed: int
    replication: int = 0

    def rng(self) -> np.random.Generator:
        return np.random.default_rng(
            np.random.SeedSequence((int(self.master_seed), int(self.replication)))
        )


def _as_seed(seed: Union[int, SeedSpec]) -> SeedSpec:
    return seed if isinstance(seed, SeedSpec) else SeedSpec(int(seed))


def cell_counts(n: int, gamma_a: float, gamma_ac: float) -> Dict[Cell, int]:
    """Deterministic per-cell counts: half the trial per arm (first arm
    rounded up), responder share per the response rate, non-responders
    split evenly between tactics, each count rounded up, so the realized
    total can exceed n."""
    if n < 4:
        raise ValueError(f"n must be at least 4 to populate every cell, got {n}")
    n_a = math.ceil(n / 2)
    n_ac = n - n_a
    raw = {
        ("a", "a"): n_a * gamma_a,
        ("a", "v"): n_a * (1.0 - gamma_a) / 2.0,
        ("a", "m"): n_a * (1.0 - gamma_a) / 2.0,
        ("ac", "ac"): n_ac * gamma_ac,
        ("ac", "v"): n_ac * (1.0 - gamma_ac) / 2.0,
        ("ac", "m"): n_ac * (1.0 - gamma_ac) / 2.0,
    }
    return {cell: int(math.ceil(v)) for cell, v in raw.items()}


def _draw_cells(
    scenario: SimScenario,
    counts: Dict[Cell, int],
    rng: np.random.Generator,
    robust: bool = False,
) -> Dict[Cell, np.ndarray]:
    """Draw each cell's outcomes in the fixed cell order.

    Under ``robust`` each cell's SD is first drawn uniformly from
    (max(0.5, sigma - 1), sigma + 1), one draw per cell per replication.
    """
    sigma = scenario.params.sigma
    out: Dict[Cell, np.ndarray] = {}
    for cell in CELLS:
        sd = rng.uniform(max(0.5, sigma - 1.0), sigma + 1.0) if robust else sigma
        out[cell] = rng.normal(scenario.cell_means[cell], sd, counts[cell])
    return out


def generate_trial(
    scenario: SimScenario, n: int, seed: Union[int, SeedSpec]
) -> List[TrialRecord]:
    """Generate one simulated SMART of nominal size n (realized size may
    exceed n through per-cell rounding)."""
    counts = cell_counts(n, scenario.params.gamma_a, scenario.params.gamma_ac)
    draws = _draw_cells(scenario, counts, _as_seed(seed).rng())
    records: List[TrialRecord] = []
    i = 0
    for cell in CELLS:
        stage1, stage2 = cell
        response = 1 if stage1 == stage2 else 0
        for y in draws[cell]:
            i += 1
            records.append(TrialRecord(f"p{i:05d}", stage1, response, stage2, float(y)))
    return records


def sample_latent_draws(
    scenario: SimScenario, n: int, seed: Union[int, SeedSpec]
) -> Tuple[np.ndarray, np.ndarray]:
    """Latent progress draws for both arms (used to validate that the
    cutoff reproduces the response rates; the outcome generator itself
    works from the derived cell means)."""
    rng = _as_seed(seed).rng()
    n_a = math.ceil(n / 2)
    la = rng.normal(scenario.params.mu_La, scenario.params.sigma_L, n_a)
    lac = rng.normal(scenario.mu_Lac, scenario.params.sigma_L, n - n_a)
    return la, lac


def sample_randomized_trial(
    design: SmartDesign, n: int, seed: Union[int, SeedSpec]
) -> List[TrialRecord]:
    """Simulate a SMART with genuinely sequential randomization: stage-1
    assignment, responder status and stage-2 assignment are all random for
    every participant.

    This sampler backs the moment checks of the design-module variance and
    covariance coefficients, which describe exactly this sampling scheme;
    the table generator above fixes the cell counts instead.
    """
    if n < 1:
        raise ValueError(f"n must be at least 1, got {n}")
    rng = _as_seed(seed).rng()
    stage1 = np.where(rng.random(n) < design.pi_a, "a", "ac")
    gam = np.where(stage1 == "a", design.gamma_a, design.gamma_ac)
    response = (rng.random(n) < gam).astype(int)
    pi_v = np.where(stage1 == "a", design.pi_a_v, design.pi_ac_v)
    tactic = np.where(rng.random(n) < pi_v, "v", "m")
    stage2 = np.where(response == 1, stage1, tactic)
    means = np.array([design.cell_means[(t1, t2)]
                      for t1, t2 in zip(stage1, stage2)])
    y = rng.normal(means, design.sigma)
    return [
        TrialRecord(f"p{i + 1:05d}", str(stage1[i]), int(response[i]),
                    str(stage2[i]), float(y[i]))
        for i in range(n)
    ]


@dataclass(frozen=True)
class TestSpec:
    """Which test a Monte Carlo run replicates: mode, the control/new
    orientation, margin and level."""

    __test__ = False  # keep pytest from collecting this as a test class

    mode: str                  # "ni" | "eq"
    control: str               # control AI id (advantage bounded by theta)
    new: str
    theta: float
    alpha: float = 0.05

    def __post_init__(self) -> None:
        if self.mode not in ("ni", "eq"):
            raise ValueError(f"mode must be 'ni' or 'eq', got {self.mode!r}")

    @property
    def pair(self) -> AiPair:
        return ai_pair(self.control, self.new)

    @property
    def path(self) -> str:
        return self.pair.path

    @property
    def kind(self) -> str:
        return "non_inferiority" if self.mode == "ni" else "equivalence"


@dataclass(frozen=True)
class McEstimate:
    """A Monte Carlo rejection-rate estimate with its binomial SE."""

    estimate: float
    se: float
    reps: int
    n: int
    master_seed: int


def _default_n(scenario: SimScenario, spec: TestSpec) -> int:
    eta_t, eta_d, eta = scenario.standardized(spec.pair, spec.theta)
    if spec.mode == "ni":
        return ni_sample_size(eta, spec.alpha, scenario.params.beta).n
    return eq_sample_size_search(eta_t, eta_d, spec.alpha, scenario.params.beta).n


def _rep_rejects(
    scenario: SimScenario,
    counts: Dict[Cell, int],
    spec: TestSpec,
    master: int,
    rep: int,
    robust: bool,
) -> bool:
    rng = SeedSpec(master, rep).rng()
    draws = _draw_cells(scenario, counts, rng, robust=robust)
    cells: CellTable = {}
    for cell in CELLS:
        y = draws[cell]
        m = y.mean()
        cells[cell] = CellStats(count=y.size, mean=float(m),
                                sse=float(((y - m) ** 2).sum()))
    report = _test_from_cells(
        cells, spec.pair, spec.theta, spec.alpha, RandomizationProbs(),
        spec.kind, warn_small=False,
    )
    return report.decision == "reject_null"


def mc_power(
    scenario: SimScenario,
    spec: TestSpec,
    reps: int,
    seed: Union[int, SeedSpec],
    n: Optional[int] = None,
    robust: bool = False,
    n_jobs: int = 1,
) -> McEstimate:
    """Fraction of simulated trials whose test rejects.

    ``n`` defaults to the planning-formula sample size for the scenario's
    own effect size; pass it explicitly to replicate a published row or a
    power-curve point.  Replication r draws from the stream keyed by
    (master seed, r), so estimates do not depend on worker count or
    scheduling.
    """
    if reps < 1:
        raise ValueError(f"reps must be at least 1, got {reps}")
    master = _as_seed(seed).master_seed
    if n is None:
        n = _default_n(scenario, spec)
    counts = cell_counts(n, scenario.params.gamma_a, scenario.params.gamma_ac)

    def run(r: int) -> bool:
        return _rep_rejects(scenario, counts, spec, master, r, robust)

    if n_jobs > 1:
        with ThreadPoolExecutor(max_workers=n_jobs) as pool:
            rejected = sum(pool.map(run, range(reps)))
    else:
        rejected = sum(run(r) for r in range(reps))
    p_hat = rejected / reps
    se = math.sqrt(p_hat * (1.0 - p_hat) / reps)
    return McEstimate(p_hat, se, reps, n, master)


def mc_power_robust(
    scenario: SimScenario,
    spec: TestSpec,
    reps: int,
    seed: Union[int, SeedSpec],
    n: Optional[int] = None,
    n_jobs: int = 1,
) -> McEstimate:
    """Power estimate under the equal-variance stress test: each cell's SD
    is redrawn per replication from (max(0.5, sigma - 1), sigma + 1) while
    the analysis keeps its equal-variance working model."""
    return mc_power(scenario, spec, reps, seed, n=n, robust=True, n_jobs=n_jobs)


def type1_rate(
    scenario: SimScenario,
    spec: TestSpec,
    reps: int,
    seed: Union[int, SeedSpec],
    n: int,
    n_jobs: int = 1,
) -> McEstimate:
    """Rejection rate of the equivalence TOST under a no-effect
    configuration (true mean difference at the margin)."""
    if spec.mode != "eq":
        raise ValueError("Type-I rate checks apply to the equivalence test")
    delta = (ai_mean(scenario.design, spec.pair.first)
             - ai_mean(scenario.design, spec.pair.second))
    ratio = abs(delta) / spec.theta
    if not 0.8 <= ratio <= 1.2:
        raise ValueError(
            f"scenario is not a boundary configuration: |true difference| = "
            f"{abs(delta):.4f} vs margin {spec.theta} (ratio {ratio:.2f})"
        )
    return mc_power(scenario, spec, reps, seed, n=n, n_jobs=n_jobs)


# ---------------------------------------------------------------------------
# Presets
# ---------------------------------------------------------------------------

_GAMMA_GRID = (0.50, 0.45, 0.40, 0.35, 0.30)

_XI2ACV_SWEEP = (3.4, 3.2, 3.0, 2.8, 2.6, 2.4, 2.2, 2.0, 1.8, 1.5, 1.3, 1.0,
                 0.8, 0.6, 0.4, 0.2, 0.0, -0.2, -0.4, -0.6, -0.8, -2.0, -2.2,
                 -2.4, -2.6)


def _rows_power_curve() -> Tuple[ScenarioParams, ...]:
    base = dict(sigma=2, gamma_a=0.3, gamma_ac=0.4, mu_La=2, sigma_L=0.2,
                zeta0=0.02, zeta1a=0.5, zeta1ac=0.8, xi0=0.03, xi1a=0.25,
                xi1ac=0.5, xi2_a_m=1.3, xi2_a_v=1.3, xi2_ac_m=0.8, theta=2.0)
    return tuple(ScenarioParams(xi2_ac_v=v, **base) for v in _XI2ACV_SWEEP)


def _rows_ni(shared: bool) -> Tuple[ScenarioParams, ...]:
    base = dict(sigma=3, gamma_a=0.30, mu_La=2, sigma_L=0.2, zeta0=0.02,
                zeta1a=0.8, zeta1ac=0.7, xi0=0.03, xi1a=0.5, xi1ac=0.4,
                xi2_a_m=1.3, xi2_ac_v=0.8)
    rows = []
    for theta in (3.0, 2.5):
        if shared:
            tweak = dict(xi2_a_v=0.3, xi2_ac_m=-0.38 if theta == 3.0 else -0.53)
        else:
            tweak = dict(xi2_a_v=0.01 if theta == 3.0 else -0.20, xi2_ac_m=0.8)
        for gac in _GAMMA_GRID:
            rows.append(ScenarioParams(gamma_ac=gac, theta=theta, **base, **tweak))
    return tuple(rows)


def _rows_eq(shared: bool) -> Tuple[ScenarioParams, ...]:
    base = dict(sigma=4, mu_La=2, sigma_L=0.2, zeta0=0.02, zeta1a=0.5,
                zeta1ac=0.5, xi0=0.03, xi1a=0.25, xi1ac=0.25, xi2_a_m=1.0,
                xi2_a_v=1.0, xi2_ac_v=0.95, theta=2.0,
                xi2_ac_m=0.94 if shared else 1.0)
    return tuple(ScenarioParams(gamma_a=g, gamma_ac=g, **base)
                 for g in _GAMMA_GRID)


def _rows_type1() -> Tuple[ScenarioParams, ...]:
    return (ScenarioParams(sigma=4, gamma_a=0.45, gamma_ac=0.45, mu_La=2,
                           sigma_L=0.2, zeta0=0.02, zeta1a=0.5, zeta1ac=0.5,
                           xi0=0.03, xi1a=0.25, xi1ac=0.25, xi2_a_m=-1.01,
                           xi2_a_v=1.0, xi2_ac_m=0.95, xi2_ac_v=-1.0,
                           theta=2.0),)


@dataclass(frozen=True)
class Preset:
    """A named family of generator parameter rows plus the test it is
    meant to exercise."""

    name: str
    description: str
    mode: str                  # "ni" | "eq"
    control: str
    new: str
    rows: Tuple[ScenarioParams, ...]


def presets() -> Dict[str, Preset]:
    """The built-in scenario families used for validation and the power
    curves."""
    return {
        "power_curve": Preset(
            "power_curve",
            "theta = 2 sweep of the vigorous-augmentation coefficient on the "
            "ac arm; drives the power curves for all four test settings",
            "ni", "d3", "d1", _rows_power_curve()),
        "ni_distinct": Preset(
            "ni_distinct",
            "non-inferiority, distinct-path pair (control d3 vs new d1); "
            "margins 3.0 and 2.5 over a grid of ac response rates",
            "ni", "d3", "d1", _rows_ni(shared=False)),
        "ni_shared": Preset(
            "ni_shared",
            "non-inferiority, shared-path pair (control d3 vs new d4); "
            "margins 3.0 and 2.5 over a grid of ac response rates",
            "ni", "d3", "d4", _rows_ni(shared=True)),
        "eq_distinct": Preset(
            "eq_distinct",
            "equivalence, distinct-path pair, margin 2, near-zero true "
            "difference, common response-rate grid",
            "eq", "d3", "d1", _rows_eq(shared=False)),
        "eq_shared": Preset(
            "eq_shared",
            "equivalence, shared-path pair, margin 2, near-zero true "
            "difference, common response-rate grid",
            "eq", "d3", "d4", _rows_eq(shared=True)),
        "type1_distinct": Preset(
            "type1_distinct",
            "equivalence Type-I check, distinct-path pair with the true "
            "difference pinned at the margin",
            "eq", "d3", "d1", _rows_type1()),
        "type1_shared": Preset(
            "type1_shared",
            "equivalence Type-I check, shared-path pair with the true "
            "difference pinned at the margin",
            "eq", "d3", "d4", _rows_type1()),
    }


def preset_row(name: str, row: int) -> Tuple[Preset, ScenarioParams]:
    """Look up a preset row by 1-based index."""
    table = presets()
    if name not in table:
        raise ValueError(f"unknown preset {name!r}; known: {sorted(table)}")
    preset = table[name]
    if not 1 <= row <= len(preset.rows):
        raise ValueError(
            f"preset {name!r} has rows 1..{len(preset.rows)}, got {row}"
        )
    return preset, preset.rows[row - 1]


def scenario_power_curve(
    preset: Preset,
    path: str,
    mode: str,
    n_list: Sequence[int],
    reps: int = 0,
    seed: Union[int, SeedSpec] = 0,
    alpha: float = 0.05,
    n_jobs: int = 1,
):
    """Power-curve rows driven by a preset's scenarios.

    For each trial size and each scenario row the analytic power is
    evaluated at the scenario's standardized quantities; when ``reps`` is
    positive a Monte Carlo estimate at that size is attached.
    """
    if path not in ("distinct", "shared"):
        raise ValueError(f"path must be 'distinct' or 'shared', got {path!r}")
    if not n_list:
        raise ValueError("n_list must be non-empty")
    new_ai = "d1" if path == "distinct" else "d4"
    rows: List[CurveRow] = []
    for n in n_list:
        for params in preset.rows:
            scenario = build_scenario(params)
            spec = TestSpec(mode, "d3", new_ai, params.theta, alpha)
            eta_t, eta_d, eta = scenario.standardized(spec.pair, params.theta)
            if mode == "ni":
                analytic = ni_power(n, eta, alpha)
            else:
                if abs(eta_d) >= eta_t:
                    continue  # outside the equivalence band: no power defined
                analytic = eq_power(n, eta_t, eta_d, alpha)
            mc_p = mc_se = None
            if reps:
                est = mc_power(scenario, spec, reps, seed, n=n, n_jobs=n_jobs)
                mc_p, mc_se = est.estimate, est.se
            rows.append(CurveRow(n, eta_t, eta_d, analytic, mc_p, mc_se))
    return rows
