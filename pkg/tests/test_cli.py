"""Tests for the command-line front end: parsing, rendering, exit codes,
and exact agreement with library results."""

import io
import json

import pytest

from smartnie.cli import (
    main,
    parse_trial_csv,
    render_report,
    report_from_json,
)
from smartnie.design import ai_pair
from smartnie.inference import RandomizationProbs, equivalence_test, ni_test
from smartnie.planning import eq_sample_size_delta0, ni_sample_size
from smartnie.simulation import (
    SeedSpec,
    build_scenario,
    generate_trial,
    preset_row,
)

VALID_CSV = (
    "id,stage1,response,stage2,outcome\n"
    "p1,a,1,a,3.2\n"
    "p2,a,0,v,1.5\n"
    "p3,ac,1,ac,4.0\n"
    "p4,ac,0,m,2.5\n"
)


def run_cli(*argv):
    buf = io.StringIO()
    rc = main(list(argv), out=buf)
    return rc, buf.getvalue()


def write_trial_csv(tmp_path, n=120, preset=("eq_shared", 1), seed=8):
    _, params = preset_row(*preset)
    records = generate_trial(build_scenario(params), n, SeedSpec(seed))
    path = tmp_path / "trial.csv"
    lines = ["id,stage1,response,stage2,outcome"]
    lines += [f"{r.id},{r.stage1},{r.response},{r.stage2},{r.outcome!r}"
              for r in records]
    path.write_text("\n".join(lines) + "\n")
    return path, records


class TestParseTrialCsv:
    def test_valid_file(self, tmp_path):
        p = tmp_path / "t.csv"
        p.write_text(VALID_CSV)
        records = parse_trial_csv(str(p))
        assert len(records) == 4
        assert records[1].stage2 == "v"
        assert records[3].outcome == 2.5

    def test_responder_invariant_cites_line(self, tmp_path):
        p = tmp_path / "t.csv"
        p.write_text("id,stage1,response,stage2,outcome\np1,a,1,v,3.2\n")
        with pytest.raises(ValueError, match="line 2: responder stage2"):
            parse_trial_csv(str(p))

    def test_missing_header(self, tmp_path):
        p = tmp_path / "t.csv"
        p.write_text("")
        with pytest.raises(ValueError, match="missing header"):
            parse_trial_csv(str(p))

    def test_wrong_header(self, tmp_path):
        p = tmp_path / "t.csv"
        p.write_text("id,arm,response,stage2,outcome\n")
        with pytest.raises(ValueError, match="line 1: bad header"):
            parse_trial_csv(str(p))

    def test_bad_enum_cites_line(self, tmp_path):
        p = tmp_path / "t.csv"
        p.write_text("id,stage1,response,stage2,outcome\np1,b,1,b,3.2\n")
        with pytest.raises(ValueError, match="line 2"):
            parse_trial_csv(str(p))

    def test_non_numeric_outcome(self, tmp_path):
        p = tmp_path / "t.csv"
        p.write_text("id,stage1,response,stage2,outcome\np1,a,1,a,abc\n")
        with pytest.raises(ValueError, match="line 2: outcome"):
            parse_trial_csv(str(p))

    def test_bad_response_flag(self, tmp_path):
        p = tmp_path / "t.csv"
        p.write_text("id,stage1,response,stage2,outcome\np1,a,2,a,1.0\n")
        with pytest.raises(ValueError, match="line 2: response"):
            parse_trial_csv(str(p))


class TestSampleSizeCommand:
    def test_ni_reference(self):
        rc, out = run_cli("samplesize", "--mode", "ni", "--path", "distinct",
                          "--eta", "0.379", "--alpha", "0.05", "--beta", "0.20")
        assert rc == 0
        assert out.splitlines()[0] == "N=87"

    def test_eq_reference(self):
        rc, out = run_cli("samplesize", "--mode", "eq", "--path", "shared",
                          "--eta-theta", "0.307", "--delta", "0")
        assert rc == 0
        assert out.splitlines()[0] == "N=182"

    def test_matches_library(self):
        rc, out = run_cli("samplesize", "--mode", "ni", "--eta", "0.2718")
        assert rc == 0
        assert out.splitlines()[0] == f"N={ni_sample_size(0.2718).n}"

    def test_dropout_line(self):
        rc, out = run_cli("samplesize", "--mode", "eq", "--eta-theta", "0.265",
                          "--dropout", "0.2")
        assert "N=244" in out and "N_inflated=305" in out

    def test_usage_error_missing_eta(self):
        with pytest.raises(SystemExit) as exc:
            run_cli("samplesize", "--mode", "ni")
        assert exc.value.code == 2

    def test_validation_error_exit_1(self, capsys):
        rc, _ = run_cli("samplesize", "--mode", "ni", "--eta", "0")
        assert rc == 1
        assert "margin does not exceed" in capsys.readouterr().err


class TestPowerCommand:
    def test_matches_library(self):
        from smartnie.planning import ni_power

        rc, out = run_cli("power", "--mode", "ni", "--n", "87", "--eta", "0.379")
        assert rc == 0
        assert out.strip() == f"power={ni_power(87, 0.379):.6f}"


class TestAnalyzeCommand:
    def test_text_report_matches_library(self, tmp_path):
        path, records = write_trial_csv(tmp_path)
        rc, out = run_cli("analyze", "--data", str(path), "--mode", "eq",
                          "--control", "d3", "--new", "d4", "--theta", "2.0")
        assert rc == 0
        report = equivalence_test(records, ai_pair("d3", "d4"), 2.0, 0.05,
                                  RandomizationProbs())
        assert f"p-value (non-inferiority): {report.p_ni:.4f}" in out
        assert f"p-value (non-superiority): {report.p_ns:.4f}" in out
        assert f"decision: {report.decision}" in out

    def test_json_report_round_trips(self, tmp_path):
        path, records = write_trial_csv(tmp_path)
        rc, out = run_cli("analyze", "--data", str(path), "--mode", "ni",
                          "--control", "d3", "--new", "d4", "--theta", "2.0",
                          "--format", "json")
        assert rc == 0
        report = ni_test(records, ai_pair("d3", "d4"), 2.0)
        assert report_from_json(out) == report
        # full precision in the machine document
        assert json.loads(out)["p_ni"] == report.p_ni

    def test_positivity_error_exit_1(self, tmp_path, capsys):
        p = tmp_path / "t.csv"
        p.write_text(VALID_CSV)  # only 4 cells populated
        rc, _ = run_cli("analyze", "--data", str(p), "--mode", "ni",
                        "--control", "d3", "--new", "d1", "--theta", "1.0")
        assert rc == 1
        assert "no participants" in capsys.readouterr().err

    def test_malformed_csv_exit_1(self, tmp_path, capsys):
        p = tmp_path / "t.csv"
        p.write_text("id,stage1,response,stage2,outcome\np1,a,1,v,3.2\n")
        rc, _ = run_cli("analyze", "--data", str(p), "--mode", "ni",
                        "--control", "d3", "--new", "d1", "--theta", "1.0")
        assert rc == 1
        assert "line 2" in capsys.readouterr().err


class TestSimulateCommand:
    def test_byte_identical_for_same_seed(self):
        argv = ("simulate", "--preset", "ni_distinct", "--row", "1",
                "--reps", "150", "--seed", "42", "--n", "87")
        rc1, out1 = run_cli(*argv)
        rc2, out2 = run_cli(*argv)
        assert rc1 == rc2 == 0
        assert out1 == out2
        assert "estimate=" in out1 and "se=" in out1

    def test_env_seed_fallback(self, monkeypatch):
        monkeypatch.setenv("SMARTNIE_SEED", "42")
        _, via_env = run_cli("simulate", "--preset", "ni_distinct", "--row", "1",
                             "--reps", "100", "--n", "87")
        monkeypatch.delenv("SMARTNIE_SEED")
        _, via_flag = run_cli("simulate", "--preset", "ni_distinct", "--row", "1",
                              "--reps", "100", "--n", "87", "--seed", "42")
        assert via_env == via_flag

    def test_matches_library(self):
        from smartnie.simulation import TestSpec, mc_power

        rc, out = run_cli("simulate", "--preset", "eq_shared", "--row", "1",
                          "--reps", "120", "--seed", "7", "--n", "182")
        preset, params = preset_row("eq_shared", 1)
        est = mc_power(build_scenario(params),
                       TestSpec("eq", "d3", "d4", 2.0, 0.05), 120, 7, n=182)
        assert f"estimate={est.estimate:.4f}" in out

    def test_unknown_preset_exit_1(self, capsys):
        rc, _ = run_cli("simulate", "--preset", "bogus")
        assert rc == 1
        assert "unknown preset" in capsys.readouterr().err


class TestCurvesCommand:
    def test_writes_csv_with_exact_header(self, tmp_path):
        out_path = tmp_path / "curves.csv"
        rc, msg = run_cli("curves", "--mode", "ni", "--n-list", "100,200",
                          "--eta-grid", "0.1:0.4:0.1", "--out", str(out_path))
        assert rc == 0
        raw = out_path.read_bytes()
        assert raw.startswith(b"n,eta,analytic_power,mc_power,se\n")
        assert b"\r" not in raw
        lines = raw.decode().splitlines()
        assert len(lines) == 1 + 2 * 4

    def test_rows_increase_with_n(self, tmp_path):
        out_path = tmp_path / "curves.csv"
        run_cli("curves", "--mode", "ni", "--n-list", "100,200,300,500",
                "--eta-grid", "0.25", "--out", str(out_path))
        rows = out_path.read_text().splitlines()[1:]
        powers = [float(r.split(",")[2]) for r in rows]
        assert powers == sorted(powers)

    def test_preset_grid_with_mc(self, tmp_path):
        out_path = tmp_path / "curves.csv"
        rc, _ = run_cli("curves", "--mode", "eq", "--path", "shared",
                        "--preset", "eq_shared", "--n-list", "150",
                        "--reps", "40", "--seed", "3", "--out", str(out_path))
        assert rc == 0
        first = out_path.read_text().splitlines()[1].split(",")
        assert first[3] != "" and first[4] != ""

    def test_usage_error_leaves_no_file(self, tmp_path):
        out_path = tmp_path / "curves.csv"
        with pytest.raises(SystemExit) as exc:
            run_cli("curves", "--mode", "ni", "--n-list", "100",
                    "--out", str(out_path))
        assert exc.value.code == 2
        assert not out_path.exists()

    def test_validation_error_leaves_no_file(self, tmp_path):
        out_path = tmp_path / "curves.csv"
        rc, _ = run_cli("curves", "--mode", "ni", "--n-list", "100",
                        "--preset", "bogus", "--out", str(out_path))
        assert rc == 1
        assert not out_path.exists()


class TestPresetsCommand:
    def test_lists_names(self):
        rc, out = run_cli("presets")
        assert rc == 0
        for name in ("ni_distinct", "eq_shared", "power_curve"):
            assert name in out

    def test_dump_parses_as_json(self):
        rc, out = run_cli("presets", "--name", "ni_distinct")
        assert rc == 0
        doc = json.loads(out)
        assert doc["name"] == "ni_distinct"
        assert len(doc["rows"]) == 10
        assert doc["rows"][0]["sigma"] == 3

    def test_unknown_name(self, capsys):
        rc, _ = run_cli("presets", "--name", "bogus")
        assert rc == 1


class TestConfigPrecedence:
    def test_flags_beat_config_beat_defaults(self, tmp_path):
        conf = tmp_path / "run.json"
        conf.write_text(json.dumps({"alpha": 0.10, "beta": 0.10}))
        # config value applies when the flag is absent
        _, out_conf = run_cli("--config", str(conf), "samplesize",
                              "--mode", "ni", "--eta", "0.3")
        expected_conf = ni_sample_size(0.3, alpha=0.10, beta=0.10).n
        assert out_conf.splitlines()[0] == f"N={expected_conf}"
        # explicit flag wins over the config
        _, out_flag = run_cli("--config", str(conf), "samplesize",
                              "--mode", "ni", "--eta", "0.3", "--alpha", "0.05")
        expected_flag = ni_sample_size(0.3, alpha=0.05, beta=0.10).n
        assert out_flag.splitlines()[0] == f"N={expected_flag}"

    def test_unknown_config_key_rejected(self, tmp_path):
        conf = tmp_path / "run.json"
        conf.write_text(json.dumps({"bogus_key": 1}))
        rc, _ = run_cli("--config", str(conf), "samplesize",
                        "--mode", "ni", "--eta", "0.3")
        assert rc == 1


class TestRenderReport:
    def test_text_fields(self, tmp_path):
        _, records = write_trial_csv(tmp_path)
        report = equivalence_test(records, ai_pair("d3", "d4"), 2.0)
        text = render_report(report, "text")
        assert "mean outcome, control AI (d3)" in text
        assert "BF upper bound (non-superiority)" in text
        assert text.count("p-value") == 2

    def test_json_round_trip_identity(self, tmp_path):
        _, records = write_trial_csv(tmp_path)
        report = ni_test(records, ai_pair("d3", "d4"), 2.0)
        assert report_from_json(render_report(report, "json")) == report

    def test_unknown_format(self, tmp_path):
        _, records = write_trial_csv(tmp_path)
        report = ni_test(records, ai_pair("d3", "d4"), 2.0)
        with pytest.raises(ValueError):
            render_report(report, "yaml")
