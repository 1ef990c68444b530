"""Tests for scenario construction, the trial generator and Monte Carlo
estimators."""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.stats import norm as scipy_norm

from smartnie.design import ai_mean, ai_pair, embedded_ai
from smartnie.inference import RandomizationProbs, equivalence_test, ni_test
from smartnie.simulation import (
    ScenarioParams,
    SeedSpec,
    TestSpec,
    build_scenario,
    cell_counts,
    generate_trial,
    mc_power,
    mc_power_robust,
    preset_row,
    presets,
    sample_latent_draws,
    sample_randomized_trial,
    scenario_power_curve,
    type1_rate,
)


def make_params(**kw):
    base = dict(sigma=3, gamma_a=0.3, gamma_ac=0.5, mu_La=2, sigma_L=0.2,
                zeta0=0.02, zeta1a=0.8, zeta1ac=0.7, xi0=0.03, xi1a=0.5,
                xi1ac=0.4, xi2_a_m=1.3, xi2_a_v=0.01, xi2_ac_m=0.8,
                xi2_ac_v=0.8, theta=3.0)
    base.update(kw)
    return ScenarioParams(**base)


class TestBuildScenario:
    def test_median_response_keeps_cutoff_at_latent_mean(self):
        sc = build_scenario(make_params(gamma_a=0.5, sigma_L=0.2))
        assert sc.latent_cutoff == pytest.approx(2.0, abs=1e-12)

    def test_cutoff_and_truncated_mean(self):
        # frozen from the scipy quantile/density oracle
        sc = build_scenario(make_params(gamma_a=0.30))
        assert sc.latent_cutoff == pytest.approx(
            2 + 0.2 * scipy_norm.ppf(0.7), abs=1e-12)
        assert sc.latent_cutoff == pytest.approx(2.1049, abs=1e-4)
        assert sc.mu_La_NR == pytest.approx(1.9007, abs=1e-4)

    def test_cutoff_shared_across_arms(self):
        sc = build_scenario(make_params(gamma_a=0.3, gamma_ac=0.5))
        # arm-ac latent mean is placed so both arms share the cutoff
        implied = sc.mu_Lac + 0.2 * scipy_norm.ppf(1 - 0.5)
        assert implied == pytest.approx(sc.latent_cutoff)

    def test_reference_effect_size(self):
        sc = build_scenario(make_params())
        _, _, eta = sc.standardized(ai_pair("d3", "d1"))
        assert eta == pytest.approx(0.379, abs=1e-3)
        assert sc.ai_means["d1"] == pytest.approx(1.2203, abs=2e-4)

    def test_deltas(self):
        sc = build_scenario(make_params())
        assert sc.delta_dp == pytest.approx(sc.ai_means["d3"] - sc.ai_means["d1"])
        assert sc.delta_sp == pytest.approx(sc.ai_means["d3"] - sc.ai_means["d4"])
        assert sc.delta("distinct") == sc.delta_dp

    @pytest.mark.parametrize("gamma", [0.0, 1.0])
    def test_degenerate_response_rate_rejected(self, gamma):
        with pytest.raises(ValueError, match="truncated"):
            build_scenario(make_params(gamma_a=gamma))

    @given(st.floats(0.05, 0.95), st.floats(0.05, 0.95), st.floats(0.5, 4.0),
           st.floats(0.05, 1.5))
    @settings(max_examples=60)
    def test_truncated_means_below_cutoff(self, ga, gac, mu_la, sigma_l):
        sc = build_scenario(make_params(gamma_a=ga, gamma_ac=gac,
                                        mu_La=mu_la, sigma_L=sigma_l))
        assert sc.mu_La_NR < min(sc.latent_cutoff, mu_la)
        assert sc.mu_Lac_NR < min(sc.latent_cutoff, sc.mu_Lac)

    def test_cutoff_reproduces_response_rate_empirically(self):
        sc = build_scenario(make_params(gamma_a=0.3, gamma_ac=0.45))
        la, lac = sample_latent_draws(sc, 400_000, seed=5)
        for draws, gamma in ((la, 0.3), (lac, 0.45)):
            frac = float((draws > sc.latent_cutoff).mean())
            se = math.sqrt(gamma * (1 - gamma) / draws.size)
            assert abs(frac - gamma) < 3 * se


class TestCellCounts:
    def test_step_counts_with_rounding(self):
        counts = cell_counts(100, 0.3, 0.5)
        assert counts[("a", "a")] == 15
        assert counts[("a", "v")] == 18
        assert counts[("a", "m")] == 18
        # arm-a total exceeds its nominal 50 through the ceiling
        assert counts[("a", "a")] + counts[("a", "v")] + counts[("a", "m")] == 51

    def test_exact_when_divisible(self):
        counts = cell_counts(120, 0.5, 0.5)
        assert sum(counts.values()) == 120

    def test_too_small_rejected(self):
        with pytest.raises(ValueError):
            cell_counts(3, 0.3, 0.5)


class TestGenerateTrial:
    def test_deterministic_for_seed(self):
        sc = build_scenario(make_params())
        a = generate_trial(sc, 100, SeedSpec(42, 3))
        b = generate_trial(sc, 100, SeedSpec(42, 3))
        assert a == b

    def test_different_replications_differ(self):
        sc = build_scenario(make_params())
        a = generate_trial(sc, 100, SeedSpec(42, 0))
        b = generate_trial(sc, 100, SeedSpec(42, 1))
        assert a != b

    def test_records_structurally_valid(self):
        sc = build_scenario(make_params())
        records = generate_trial(sc, 101, seed=9)
        counts = cell_counts(101, 0.3, 0.5)
        assert len(records) == sum(counts.values())
        for r in records:
            if r.response == 1:
                assert r.stage2 == r.stage1
            else:
                assert r.stage2 in ("m", "v")

    def test_minimum_size(self):
        sc = build_scenario(make_params())
        with pytest.raises(ValueError):
            generate_trial(sc, 3, seed=1)


class TestRandomizedSampler:
    def test_reproducible(self):
        sc = build_scenario(make_params())
        assert (sample_randomized_trial(sc.design, 50, seed=4)
                == sample_randomized_trial(sc.design, 50, seed=4))

    def test_all_cells_reachable(self):
        sc = build_scenario(make_params())
        records = sample_randomized_trial(sc.design, 4000, seed=4)
        seen = {r.cell for r in records}
        assert len(seen) == 6


class TestMcPower:
    def test_same_seed_same_estimate(self):
        sc = build_scenario(make_params())
        spec = TestSpec("ni", "d3", "d1", 3.0)
        a = mc_power(sc, spec, 150, seed=11, n=87)
        b = mc_power(sc, spec, 150, seed=11, n=87)
        assert a == b

    def test_parallel_equals_serial(self):
        sc = build_scenario(make_params())
        spec = TestSpec("ni", "d3", "d1", 3.0)
        serial = mc_power(sc, spec, 120, seed=11, n=87, n_jobs=1)
        parallel = mc_power(sc, spec, 120, seed=11, n=87, n_jobs=4)
        assert serial.estimate == parallel.estimate

    def test_agrees_with_record_level_pipeline(self):
        # the fast path must equal generate_trial + ni_test rep by rep
        sc = build_scenario(make_params())
        spec = TestSpec("ni", "d3", "d1", 3.0)
        reps = 40
        est = mc_power(sc, spec, reps, seed=21, n=87)
        rejected = 0
        for r in range(reps):
            records = generate_trial(sc, 87, SeedSpec(21, r))
            report = ni_test(records, ai_pair("d3", "d1"), 3.0, 0.05,
                             RandomizationProbs())
            rejected += report.decision == "reject_null"
        assert est.estimate == pytest.approx(rejected / reps)

    def test_huge_effect_size_saturates(self):
        # boost the new AI far above the control: rejection is certain
        sc = build_scenario(make_params(xi2_a_v=3.0))
        spec = TestSpec("ni", "d3", "d1", 3.0)
        assert sc.standardized(ai_pair("d3", "d1"))[2] > 0.5
        est = mc_power(sc, spec, 100, seed=3, n=500)
        assert est.estimate == 1.0

    def test_reps_validation(self):
        sc = build_scenario(make_params())
        with pytest.raises(ValueError):
            mc_power(sc, TestSpec("ni", "d3", "d1", 3.0), 0, seed=1, n=87)

    def test_se_formula(self):
        sc = build_scenario(make_params())
        est = mc_power(sc, TestSpec("ni", "d3", "d1", 3.0), 100, seed=5, n=87)
        assert est.se == pytest.approx(
            math.sqrt(est.estimate * (1 - est.estimate) / 100))

    def test_default_n_from_planning(self):
        from smartnie.planning import ni_sample_size

        sc = build_scenario(make_params())
        _, _, eta = sc.standardized(ai_pair("d3", "d1"))
        est = mc_power(sc, TestSpec("ni", "d3", "d1", 3.0), 10, seed=5)
        assert est.n == ni_sample_size(eta).n

    def test_robust_reproducible_and_distinct(self):
        sc = build_scenario(make_params())
        spec = TestSpec("ni", "d3", "d1", 3.0)
        a = mc_power_robust(sc, spec, 120, seed=11, n=87)
        b = mc_power_robust(sc, spec, 120, seed=11, n=87)
        assert a == b
        plain = mc_power(sc, spec, 120, seed=11, n=87)
        # same streams, different draw pattern: estimates may differ
        assert a.reps == plain.reps

    def test_equivalence_mode(self):
        _, params = preset_row("eq_shared", 1)
        sc = build_scenario(params)
        spec = TestSpec("eq", "d3", "d4", 2.0)
        est = mc_power(sc, spec, 200, seed=17, n=182)
        assert 0.7 < est.estimate < 0.95
        # cross-check a few replications against the record-level TOST
        for r in range(5):
            records = generate_trial(sc, 182, SeedSpec(17, r))
            report = equivalence_test(records, ai_pair("d3", "d4"), 2.0)
            assert isinstance(report.p_ns, float)


class TestMeanAgreement:
    def test_replication_means_match_population_values(self):
        # generator step means agree with the design-module AI means
        _, params = preset_row("eq_distinct", 1)  # gamma 0.5: no rounding
        sc = build_scenario(params)
        reps, n = 4000, 160
        sums = {d: 0.0 for d in ("d1", "d3")}
        for r in range(reps):
            records = generate_trial(sc, n, SeedSpec(99, r))
            from smartnie.inference import estimate_ai_mean

            for d in sums:
                sums[d] += estimate_ai_mean(records, embedded_ai(d))
        for d, total in sums.items():
            target = ai_mean(sc.design, embedded_ai(d))
            mc_mean = total / reps
            # SE of the replication average of the AI-mean estimator
            from smartnie.design import ai_variance_coeff

            se = math.sqrt(ai_variance_coeff(sc.design, embedded_ai(d)) / n / reps)
            assert abs(mc_mean - target) < 4 * se


class TestType1:
    def test_requires_eq_mode(self):
        _, params = preset_row("type1_shared", 1)
        sc = build_scenario(params)
        with pytest.raises(ValueError):
            type1_rate(sc, TestSpec("ni", "d3", "d4", 2.0), 10, seed=1, n=175)

    def test_requires_boundary_scenario(self):
        _, params = preset_row("eq_shared", 1)  # near-zero true difference
        sc = build_scenario(params)
        with pytest.raises(ValueError, match="boundary"):
            type1_rate(sc, TestSpec("eq", "d3", "d4", 2.0), 10, seed=1, n=182)

    def test_boundary_rate_controlled(self):
        _, params = preset_row("type1_shared", 1)
        sc = build_scenario(params)
        est = type1_rate(sc, TestSpec("eq", "d3", "d4", 2.0), 400, seed=23, n=175)
        assert est.estimate <= 0.05 + 3 * max(est.se, 0.011)


class TestPresets:
    def test_names(self):
        assert set(presets()) == {
            "power_curve", "ni_distinct", "ni_shared", "eq_distinct",
            "eq_shared", "type1_distinct", "type1_shared"}

    def test_ni_distinct_row1_parameters(self):
        _, params = preset_row("ni_distinct", 1)
        assert (params.sigma, params.gamma_a, params.mu_La, params.sigma_L) == \
            (3, 0.30, 2, 0.2)
        assert params.gamma_ac == 0.50
        assert params.theta == 3.0

    def test_power_curve_sweep(self):
        preset = presets()["power_curve"]
        sweep = [p.xi2_ac_v for p in preset.rows]
        assert sweep[:4] == [3.4, 3.2, 3.0, 2.8]
        assert sweep[-1] == -2.6
        assert len(sweep) == 25

    def test_eq_presets_margin_and_sigma(self):
        for name in ("eq_distinct", "eq_shared"):
            for p in presets()[name].rows:
                assert p.theta == 2.0 and p.sigma == 4

    def test_row_lookup_validation(self):
        with pytest.raises(ValueError):
            preset_row("nope", 1)
        with pytest.raises(ValueError):
            preset_row("eq_shared", 6)

    def test_type1_scenarios_sit_at_margin(self):
        for name, pair in (("type1_distinct", ("d3", "d1")),
                           ("type1_shared", ("d3", "d4"))):
            _, params = preset_row(name, 1)
            sc = build_scenario(params)
            delta = (ai_mean(sc.design, embedded_ai(pair[0]))
                     - ai_mean(sc.design, embedded_ai(pair[1])))
            assert abs(delta) == pytest.approx(2.0, abs=0.05)


class TestScenarioCurve:
    def test_rows_cover_grid(self):
        preset = presets()["power_curve"]
        rows = scenario_power_curve(preset, "distinct", "ni", [100, 200])
        assert len(rows) == 2 * len(preset.rows)
        assert {r.n for r in rows} == {100, 200}

    def test_power_monotone_in_n_at_fixed_effect(self):
        # larger trials push power toward 1 for positive effect sizes and
        # toward 0 for negative ones
        preset = presets()["power_curve"]
        rows = scenario_power_curve(preset, "distinct", "ni", [100, 200, 300, 500])
        by_effect = {}
        for r in rows:
            by_effect.setdefault(round(r.eta, 9), []).append((r.n, r.analytic_power))
        for eta, pts in by_effect.items():
            pts.sort()
            powers = [p for _, p in pts]
            if eta > 0:
                # strictly increasing until the float ceiling at 1.0
                assert all(b > a or b == 1.0 for a, b in zip(powers, powers[1:]))
            else:
                assert all(b < a or b == 0.0 for a, b in zip(powers, powers[1:]))

    def test_mc_column_filled_when_reps_given(self):
        preset = presets()["eq_shared"]
        rows = scenario_power_curve(preset, "shared", "eq", [150], reps=30, seed=2)
        assert all(r.mc_power is not None for r in rows)
