"""Command-line front end.

Subcommands map one-to-one onto library operations; the CLI only parses,
dispatches and renders, so any number it prints equals the corresponding
library result exactly.  Exit codes: 0 success, 2 usage error, 1 data or
validation error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from typing import List, Optional, Sequence

from . import __version__
from .design import ai_pair
from .inference import (
    PositivityError,
    RandomizationProbs,
    TestReport,
    TrialRecord,
    equivalence_test,
    ni_test,
)
from .planning import (
    attrition_inflate,
    eq_power,
    eq_sample_size_delta0,
    eq_sample_size_search,
    ni_power,
    ni_sample_size,
    power_curve,
)
from .simulation import (
    TestSpec,
    build_scenario,
    mc_power,
    preset_row,
    presets,
    scenario_power_curve,
)

__all__ = ["main", "parse_trial_csv", "render_report", "report_from_json"]

TRIAL_HEADER = "id,stage1,response,stage2,outcome"
SEED_ENV_VAR = "SMARTNIE_SEED"


# ---------------------------------------------------------------------------
# Trial CSV ingestion
# ---------------------------------------------------------------------------

def parse_trial_csv(path: str) -> List[TrialRecord]:
    """Parse a trial CSV (header ``id,stage1,response,stage2,outcome``).

    The parse is all-or-nothing; the first malformed row aborts with a
    1-based line number in the message.
    """
    with open(path, "r", encoding="utf-8", newline="") as fh:
        lines = fh.read().splitlines()
    if not lines or not lines[0].strip():
        raise ValueError(f"{path}: missing header; expected {TRIAL_HEADER!r}")
    header = lines[0].strip()
    if header != TRIAL_HEADER:
        raise ValueError(
            f"{path}: line 1: bad header {header!r}; expected {TRIAL_HEADER!r}"
        )
    records: List[TrialRecord] = []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        fields = next(csv.reader([line]))
        if len(fields) != 5:
            raise ValueError(
                f"{path}: line {lineno}: expected 5 fields, got {len(fields)}"
            )
        rec_id, stage1, response, stage2, outcome = (f.strip() for f in fields)
        if response not in ("0", "1"):
            raise ValueError(
                f"{path}: line {lineno}: response must be 0 or 1, got {response!r}"
            )
        try:
            y = float(outcome)
        except ValueError:
            raise ValueError(
                f"{path}: line {lineno}: outcome {outcome!r} is not a decimal"
            ) from None
        try:
            records.append(TrialRecord(rec_id, stage1, int(response), stage2, y))
        except ValueError as exc:
            raise ValueError(f"{path}: line {lineno}: {exc}") from None
    return records


# ---------------------------------------------------------------------------
# Report rendering
# ---------------------------------------------------------------------------

def render_report(report: TestReport, fmt: str = "text") -> str:
    """Render a TestReport as human-readable text (rounded for display) or
    as a machine-readable JSON document at full precision."""
    if fmt == "json":
        return json.dumps(dict(report.to_dict(), version=__version__),
                          indent=2, sort_keys=True) + "\n"
    if fmt != "text":
        raise ValueError(f"format must be 'text' or 'json', got {fmt!r}")
    kind = "Non-inferiority" if report.kind == "non_inferiority" else "Equivalence"
    lines = [
        f"{kind} test ({report.pair.path}-path), margin theta={report.theta:g}, "
        f"alpha={report.alpha:g}",
        f"n: {report.n}",
        f"mean outcome, control AI ({report.pair.first.id}): "
        f"{report.mean_first:.4f}",
        f"mean outcome, new AI ({report.pair.second.id}): "
        f"{report.mean_second:.4f}",
        f"Z (non-inferiority): {report.z_ni:.4f}",
        f"p-value (non-inferiority): {report.p_ni:.4f}",
        f"BF upper bound (non-inferiority): {report.bf_bound_ni:.2f}",
    ]
    if report.kind == "equivalence":
        lines += [
            f"Z (non-superiority): {report.z_ns:.4f}",
            f"p-value (non-superiority): {report.p_ns:.4f}",
            f"BF upper bound (non-superiority): {report.bf_bound_ns:.2f}",
        ]
    lines.append(f"decision: {report.decision}")
    return "\n".join(lines) + "\n"


def report_from_json(text: str) -> TestReport:
    """Inverse of the JSON rendering (ignores the version stamp)."""
    d = json.loads(text)
    return TestReport(
        kind=d["kind"],
        pair=ai_pair(d["control"], d["new"]),
        n=d["n"],
        mean_first=d["mean_first"],
        mean_second=d["mean_second"],
        theta=d["theta"],
        alpha=d["alpha"],
        z_ni=d["z_ni"],
        p_ni=d["p_ni"],
        z_ns=d["z_ns"],
        p_ns=d["p_ns"],
        bf_bound_ni=d["bf_bound_ni"],
        bf_bound_ns=d["bf_bound_ns"],
        decision=d["decision"],
    )


# ---------------------------------------------------------------------------
# Argument plumbing
# ---------------------------------------------------------------------------

def _add_seed(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=None,
                   help=f"master seed (falls back to ${SEED_ENV_VAR}, then 0)")


def _resolve_seed(value: Optional[int]) -> int:
    if value is not None:
        return value
    env = os.environ.get(SEED_ENV_VAR)
    return int(env) if env else 0


def _probs_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--pi-a", type=float, default=0.5,
                   help="stage-1 probability of arm a (default 0.5)")
    p.add_argument("--pi-a-v", type=float, default=0.5,
                   help="stage-2 probability of v among arm-a non-responders")
    p.add_argument("--pi-ac-v", type=float, default=0.5,
                   help="stage-2 probability of v among arm-ac non-responders")


def _parse_int_list(text: str) -> List[int]:
    try:
        return [int(tok) for tok in text.split(",") if tok.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated int list: {text!r}")


def _parse_float_list(text: str) -> List[float]:
    """Comma list '0.1,0.2' or range 'start:stop:step' (stop inclusive)."""
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise argparse.ArgumentTypeError(f"range must be start:stop:step: {text!r}")
        start, stop, step = (float(v) for v in parts)
        if step <= 0:
            raise argparse.ArgumentTypeError("range step must be positive")
        out = []
        v = start
        while v <= stop + 1e-12:
            out.append(round(v, 12))
            v += step
        return out
    try:
        return [float(tok) for tok in text.split(",") if tok.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated float list: {text!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="smartnie",
        description="Plan, analyze and simulate two-stage SMARTs for "
                    "non-inferiority and equivalence questions.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("--config", default=None,
                        help="JSON file of defaults; explicit flags win")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("samplesize", help="required sample size")
    p.add_argument("--mode", choices=("ni", "eq"), required=True)
    p.add_argument("--path", choices=("distinct", "shared"), default="distinct",
                   help="documentation only: the path is already folded "
                        "into a standardized effect size")
    p.add_argument("--eta", type=float, default=None,
                   help="overall standardized effect size (ni)")
    p.add_argument("--eta-theta", type=float, default=None,
                   help="standardized margin")
    p.add_argument("--eta-delta", "--delta", dest="eta_delta", type=float,
                   default=0.0, help="standardized true difference (default 0)")
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--beta", type=float, default=0.20)
    p.add_argument("--dropout", type=float, default=0.0)

    p = sub.add_parser("power", help="analytic power at a trial size")
    p.add_argument("--mode", choices=("ni", "eq"), required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--eta", type=float, default=None)
    p.add_argument("--eta-theta", type=float, default=None)
    p.add_argument("--eta-delta", "--delta", dest="eta_delta", type=float, default=0.0)
    p.add_argument("--alpha", type=float, default=0.05)

    p = sub.add_parser("analyze", help="test a trial data file")
    p.add_argument("--data", required=True, help="trial CSV path")
    p.add_argument("--mode", choices=("ni", "eq"), required=True)
    p.add_argument("--control", required=True, choices=("d1", "d2", "d3", "d4"))
    p.add_argument("--new", required=True, choices=("d1", "d2", "d3", "d4"))
    p.add_argument("--theta", type=float, required=True)
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--empirical-probs", action="store_true",
                   help="weight by realized randomization fractions instead "
                        "of the declared probabilities")
    _probs_args(p)

    p = sub.add_parser("simulate", help="Monte Carlo rejection rate for a preset")
    p.add_argument("--preset", required=True)
    p.add_argument("--row", type=int, default=1, help="1-based preset row")
    p.add_argument("--n", type=int, default=None,
                   help="trial size (default: from the planning formula)")
    p.add_argument("--reps", type=int, default=1000)
    p.add_argument("--robust", action="store_true",
                   help="redraw per-cell SDs each replication")
    p.add_argument("--jobs", type=int, default=1)
    _add_seed(p)

    p = sub.add_parser("curves", help="power-curve table (CSV)")
    p.add_argument("--mode", choices=("ni", "eq"), required=True)
    p.add_argument("--path", choices=("distinct", "shared"), default="distinct")
    p.add_argument("--n-list", type=_parse_int_list, required=True,
                   help="comma-separated trial sizes, e.g. 100,200,300,500")
    p.add_argument("--eta-grid", type=_parse_float_list, default=None,
                   help="effect-size grid: comma list or start:stop:step")
    p.add_argument("--preset", default=None,
                   help="derive the grid from a preset's scenarios")
    p.add_argument("--reps", type=int, default=0,
                   help="Monte Carlo replications per point (0 = analytic only)")
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", required=True, help="output CSV path")
    _add_seed(p)

    p = sub.add_parser("presets", help="list or dump scenario presets")
    p.add_argument("--name", default=None, help="dump one preset as JSON")

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--cors-origin", action="append", default=None,
                   help="allowed CORS origin (repeatable)")
    p.add_argument("--reps-cap", type=int, default=10_000)
    p.add_argument("--ui-dir", default=None,
                   help="directory of built web-planner assets to serve at /")

    return parser


def _apply_config(parser: argparse.ArgumentParser, argv: Sequence[str]) -> argparse.Namespace:
    """Parse argv with JSON-config fallback: flags > file > defaults."""
    args = parser.parse_args(argv)
    if not args.config:
        return args
    with open(args.config, "r", encoding="utf-8") as fh:
        conf = json.load(fh)
    if not isinstance(conf, dict):
        raise ValueError(f"{args.config}: config must be a JSON object")
    # Re-parse with config values as defaults so explicit flags still win.
    defaults = {k.replace("-", "_"): v for k, v in conf.items()}
    known = {a.dest for a in parser._actions}
    for subparsers_action in (a for a in parser._actions
                              if isinstance(a, argparse._SubParsersAction)):
        sp = subparsers_action.choices.get(args.command)
        if sp is not None:
            known |= {a.dest for a in sp._actions}
            sp.set_defaults(**{k: v for k, v in defaults.items()
                               if k in {a.dest for a in sp._actions}})
    unknown = set(defaults) - known
    if unknown:
        raise ValueError(f"{args.config}: unknown config keys {sorted(unknown)}")
    return parser.parse_args(argv)


# ---------------------------------------------------------------------------
# Subcommand implementations
# ---------------------------------------------------------------------------

def _cmd_samplesize(args, out: io.TextIOBase, parser) -> int:
    if args.mode == "ni":
        if args.eta is not None:
            eta = args.eta
        elif args.eta_theta is not None:
            eta = args.eta_theta - args.eta_delta
        else:
            parser.error("samplesize --mode ni needs --eta or --eta-theta")
        result = ni_sample_size(eta, args.alpha, args.beta)
    else:
        if args.eta_theta is None:
            parser.error("samplesize --mode eq needs --eta-theta")
        if args.eta_delta == 0.0:
            result = eq_sample_size_delta0(args.eta_theta, args.alpha, args.beta)
        else:
            result = eq_sample_size_search(args.eta_theta, args.eta_delta,
                                           args.alpha, args.beta)
    out.write(f"N={result.n}\n")
    out.write(f"achieved_power={result.achieved_power:.4f}\n")
    if args.dropout:
        out.write(f"N_inflated={attrition_inflate(result.n, args.dropout)}\n")
    return 0


def _cmd_power(args, out: io.TextIOBase, parser) -> int:
    if args.mode == "ni":
        if args.eta is not None:
            eta = args.eta
        elif args.eta_theta is not None:
            eta = args.eta_theta - args.eta_delta
        else:
            parser.error("power --mode ni needs --eta or --eta-theta")
        value = ni_power(args.n, eta, args.alpha)
    else:
        if args.eta_theta is None:
            parser.error("power --mode eq needs --eta-theta")
        value = eq_power(args.n, args.eta_theta, args.eta_delta, args.alpha)
    out.write(f"power={value:.6f}\n")
    return 0


def _cmd_analyze(args, out: io.TextIOBase) -> int:
    records = parse_trial_csv(args.data)
    probs = RandomizationProbs(args.pi_a, args.pi_a_v, args.pi_ac_v)
    pair = ai_pair(args.control, args.new)
    test = ni_test if args.mode == "ni" else equivalence_test
    report = test(records, pair, args.theta, args.alpha, probs,
                  use_empirical_probs=args.empirical_probs)
    out.write(render_report(report, args.format))
    return 0


def _cmd_simulate(args, out: io.TextIOBase) -> int:
    preset, params = preset_row(args.preset, args.row)
    scenario = build_scenario(params)
    spec = TestSpec(preset.mode, preset.control, preset.new,
                    params.theta, params.alpha)
    est = mc_power(scenario, spec, args.reps, _resolve_seed(args.seed),
                   n=args.n, robust=args.robust, n_jobs=args.jobs)
    out.write(
        f"preset={preset.name} row={args.row} mode={preset.mode} "
        f"pair={preset.control}/{preset.new} theta={params.theta:g}\n"
    )
    out.write(
        f"estimate={est.estimate:.4f} se={est.se:.4f} reps={est.reps} "
        f"n={est.n} seed={est.master_seed}\n"
    )
    return 0


def _format_curve_csv(rows) -> str:
    buf = ["n,eta,analytic_power,mc_power,se"]
    for r in rows:
        mc = f"{r.mc_power:.6f}" if r.mc_power is not None else ""
        se = f"{r.mc_se:.6f}" if r.mc_se is not None else ""
        buf.append(f"{r.n},{r.eta:.6f},{r.analytic_power:.6f},{mc},{se}")
    return "\n".join(buf) + "\n"


def _cmd_curves(args, out: io.TextIOBase, parser) -> int:
    if (args.eta_grid is None) == (args.preset is None):
        parser.error("curves needs exactly one of --eta-grid or --preset")
    if args.preset is not None:
        preset = presets().get(args.preset)
        if preset is None:
            raise ValueError(f"unknown preset {args.preset!r}")
        rows = scenario_power_curve(preset, args.path, args.mode, args.n_list,
                                    reps=args.reps, seed=_resolve_seed(args.seed),
                                    alpha=args.alpha, n_jobs=args.jobs)
    else:
        rows = power_curve(args.mode, args.n_list, args.eta_grid, args.alpha)
    content = _format_curve_csv(rows)
    # Built fully before writing: a failure above leaves no partial file.
    with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(content)
    out.write(f"wrote {len(rows)} rows to {args.out}\n")
    return 0


def _cmd_presets(args, out: io.TextIOBase) -> int:
    table = presets()
    if args.name is None:
        for name, preset in table.items():
            out.write(f"{name}: {len(preset.rows)} row(s); {preset.description}\n")
        return 0
    if args.name not in table:
        raise ValueError(f"unknown preset {args.name!r}; known: {sorted(table)}")
    preset = table[args.name]
    doc = {
        "name": preset.name,
        "description": preset.description,
        "mode": preset.mode,
        "control": preset.control,
        "new": preset.new,
        "rows": [vars(r).copy() for r in preset.rows],
    }
    out.write(json.dumps(doc, indent=2) + "\n")
    return 0


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    app = create_app(reps_cap=args.reps_cap, cors_origins=args.cors_origin,
                     static_dir=args.ui_dir)
    uvicorn.run(app, host=args.host, port=args.port)
    return 0


def main(argv: Optional[Sequence[str]] = None, out: io.TextIOBase = None) -> int:
    parser = build_parser()
    out = out or sys.stdout
    try:
        args = _apply_config(parser, list(argv) if argv is not None else sys.argv[1:])
        if args.command == "samplesize":
            return _cmd_samplesize(args, out, parser)
        if args.command == "power":
            return _cmd_power(args, out, parser)
        if args.command == "analyze":
            return _cmd_analyze(args, out)
        if args.command == "simulate":
            return _cmd_simulate(args, out)
        if args.command == "curves":
            return _cmd_curves(args, out, parser)
        if args.command == "presets":
            return _cmd_presets(args, out)
        if args.command == "serve":
            return _cmd_serve(args)
        parser.error(f"unknown command {args.command!r}")
    except (PositivityError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
