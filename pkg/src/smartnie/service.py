"""Stateless HTTP facade over planning, analysis and simulation.

Every response is a pure function of the request body (plus the seed it
carries), echoes the interpreted inputs, and stamps the package version.
Nothing is persisted; uploaded records live only for the request.
"""

from __future__ import annotations

from typing import List, Optional

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from . import __version__
from .design import ai_pair
from .inference import (
    PositivityError,
    RandomizationProbs,
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
)
from .simulation import TestSpec, build_scenario, mc_power, preset_row, presets

__all__ = ["create_app"]

DEFAULT_REPS_CAP = 10_000
DEFAULT_CORS_ORIGINS = ["http://localhost:5173", "http://127.0.0.1:5173"]


class PlanRequest(BaseModel):
    mode: str
    path: Optional[str] = None
    eta: Optional[float] = None
    eta_theta: Optional[float] = None
    eta_delta: float = 0.0
    alpha: float = 0.05
    beta: float = 0.20
    dropout: float = 0.0
    n: Optional[int] = None   # evaluate power at this size instead of sizing


class RecordIn(BaseModel):
    id: str
    stage1: str
    response: int
    stage2: str
    outcome: float


class ProbsIn(BaseModel):
    pi_a: float = 0.5
    pi_a_v: float = 0.5
    pi_ac_v: float = 0.5


class AnalyzeRequest(BaseModel):
    records: List[RecordIn]
    mode: str
    control: str
    new: str
    theta: float
    alpha: float = 0.05
    probs: ProbsIn = Field(default_factory=ProbsIn)
    use_empirical_probs: bool = False


class SimulateRequest(BaseModel):
    preset: str
    row: int = 1
    n: Optional[int] = None
    reps: int = 1000
    seed: int = 0
    robust: bool = False


def _error(status: int, code: str, detail: str) -> JSONResponse:
    return JSONResponse(status_code=status,
                        content={"error": code, "detail": detail})


def create_app(
    reps_cap: int = DEFAULT_REPS_CAP,
    cors_origins: Optional[List[str]] = None,
    static_dir: Optional[str] = None,
) -> FastAPI:
    """Build the service application.

    ``reps_cap`` bounds per-request Monte Carlo work so the synchronous
    endpoints stay interactive; ``cors_origins`` defaults to the bundled
    UI's dev origin only.
    """
    app = FastAPI(title="smartnie", version=__version__)

    from fastapi.middleware.cors import CORSMiddleware

    app.add_middleware(
        CORSMiddleware,
        allow_origins=cors_origins if cors_origins is not None else DEFAULT_CORS_ORIGINS,
        allow_methods=["*"],
        allow_headers=["*"],
    )

    @app.exception_handler(RequestValidationError)
    async def _on_bad_body(request: Request, exc: RequestValidationError):
        return _error(400, "invalid_body", str(exc.errors()))

    @app.exception_handler(PositivityError)
    async def _on_positivity(request: Request, exc: PositivityError):
        return _error(422, "positivity", str(exc))

    @app.exception_handler(ValueError)
    async def _on_value_error(request: Request, exc: ValueError):
        return _error(400, "invalid_input", str(exc))

    @app.post("/api/plan")
    def handle_plan(req: PlanRequest):
        if req.mode not in ("ni", "eq"):
            return _error(400, "invalid_mode", f"mode must be 'ni' or 'eq', got {req.mode!r}")
        if not 0.0 < req.alpha < 1.0 or not 0.0 < req.beta < 1.0:
            return _error(400, "level_out_of_range",
                          "alpha and beta must lie strictly inside (0, 1)")
        if not 0.0 <= req.dropout < 1.0:
            return _error(400, "dropout_out_of_range",
                          "dropout must lie in [0, 1)")
        if req.n is not None and req.n < 1:
            return _error(400, "invalid_n", "n must be at least 1")
        if req.mode == "ni":
            eta = req.eta if req.eta is not None else (
                None if req.eta_theta is None else req.eta_theta - req.eta_delta)
            if eta is None:
                return _error(400, "missing_eta", "ni planning needs eta or eta_theta")
            if eta <= 0:
                return _error(400, "eta_nonpositive",
                              "margin must exceed the true difference (eta > 0)")
            if req.n is not None:
                n, power = req.n, ni_power(req.n, eta, req.alpha)
            else:
                result = ni_sample_size(eta, req.alpha, req.beta)
                n, power = result.n, result.achieved_power
        else:
            if req.eta_theta is None:
                return _error(400, "missing_eta", "eq planning needs eta_theta")
            if req.eta_theta <= 0:
                return _error(400, "eta_nonpositive", "eta_theta must be positive")
            if abs(req.eta_delta) >= req.eta_theta:
                return _error(400, "delta_outside_margin",
                              "|eta_delta| must be below eta_theta")
            if req.n is not None:
                n, power = req.n, eq_power(req.n, req.eta_theta, req.eta_delta,
                                           req.alpha)
            elif req.eta_delta == 0.0:
                result = eq_sample_size_delta0(req.eta_theta, req.alpha, req.beta)
                n, power = result.n, result.achieved_power
            else:
                result = eq_sample_size_search(req.eta_theta, req.eta_delta,
                                               req.alpha, req.beta)
                n, power = result.n, result.achieved_power
        body = {
            "n": n,
            "achieved_power": power,
            "inputs": req.model_dump(),
            "version": __version__,
        }
        if req.dropout:
            body["n_inflated"] = attrition_inflate(n, req.dropout)
        return body

    @app.post("/api/analyze")
    def handle_analyze(req: AnalyzeRequest):
        if req.mode not in ("ni", "eq"):
            return _error(400, "invalid_mode", f"mode must be 'ni' or 'eq', got {req.mode!r}")
        try:
            records = [TrialRecord(r.id, r.stage1, r.response, r.stage2, r.outcome)
                       for r in req.records]
        except ValueError as exc:
            return _error(400, "invalid_record", str(exc))
        probs = RandomizationProbs(req.probs.pi_a, req.probs.pi_a_v, req.probs.pi_ac_v)
        pair = ai_pair(req.control, req.new)
        test = ni_test if req.mode == "ni" else equivalence_test
        report = test(records, pair, req.theta, req.alpha, probs,
                      use_empirical_probs=req.use_empirical_probs)
        return {
            "report": report.to_dict(),
            "inputs": req.model_dump(exclude={"records"}) | {"n_records": len(records)},
            "version": __version__,
        }

    @app.post("/api/simulate")
    def handle_simulate(req: SimulateRequest):
        if req.reps < 1:
            return _error(400, "invalid_reps", "reps must be at least 1")
        if req.reps > reps_cap:
            return _error(400, "reps_over_cap",
                          f"reps={req.reps} exceeds the per-request cap {reps_cap}")
        preset, params = preset_row(req.preset, req.row)
        scenario = build_scenario(params)
        spec = TestSpec(preset.mode, preset.control, preset.new,
                        params.theta, params.alpha)
        est = mc_power(scenario, spec, req.reps, req.seed, n=req.n, robust=req.robust)
        return {
            "estimate": est.estimate,
            "se": est.se,
            "reps": est.reps,
            "n": est.n,
            "seed": est.master_seed,
            "inputs": req.model_dump(),
            "version": __version__,
        }

    @app.get("/api/presets")
    def handle_presets():
        return {
            "presets": [
                {"name": p.name, "rows": len(p.rows), "mode": p.mode,
                 "control": p.control, "new": p.new,
                 "description": p.description}
                for p in presets().values()
            ],
            "version": __version__,
        }

    if static_dir:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=static_dir, html=True), name="ui")

    return app
