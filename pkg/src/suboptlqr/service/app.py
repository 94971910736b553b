"""HTTP surface of the synthesis toolbox.

Endpoints mirror the CLI verbs: POST /synthesize, /analyze, /simulate, and
/demo, plus GET /health. Domain errors are returned as structured JSON
envelopes; the HTTP status encodes the error category (422 validation,
409 infeasible, 500 numerical).
"""

from __future__ import annotations

import dataclasses

import numpy as np
from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse

from .. import __version__
from ..analysis import evaluate_cost
from ..demo import demo_config
from ..errors import ConfigInvalid, ControlError
from ..reporting import trajectory_csv
from ..sim import consensus_error, cost_tail_estimate, quadrature_cost, simulate
from ..synthesis import (
    GainDesign,
    GainMethod,
    admissibility,
    c_interval,
    design_gain,
    design_gain_single,
)
from ..tolerances import Tolerances
from .build import BuiltProblem, build_problem, gain_from_model, gain_to_model
from .models import (
    AnalyzeRequest,
    AnalyzeResponse,
    DemoRequest,
    DemoResponse,
    HealthResponse,
    IntervalModel,
    ModeCostModel,
    ProblemModel,
    SimulateRequest,
    SimulateResponse,
    SimulationSummary,
    SynthesizeResponse,
)

_STATUS_BY_CATEGORY = {"validation": 422, "infeasible": 409, "numerical": 500}


def create_app() -> FastAPI:
    app = FastAPI(
        title="suboptlqr",
        version=__version__,
        description=(
            "Suboptimal distributed LQR consensus control: gain synthesis, "
            "cost certification, and closed-loop simulation."
        ),
    )

    @app.exception_handler(RequestValidationError)
    async def _schema_error(request: Request,
                            exc: RequestValidationError) -> JSONResponse:
        # default handler echoes the offending input, which may not be JSON
        # serializable (NaN/inf); report location and message only
        detail = [
            {"loc": list(err.get("loc", [])), "msg": str(err.get("msg", "")),
             "type": str(err.get("type", ""))}
            for err in exc.errors()
        ]
        return JSONResponse(status_code=422, content={"detail": detail})

    @app.exception_handler(ControlError)
    async def _control_error(request: Request, exc: ControlError) -> JSONResponse:
        body = {
            "type": type(exc).__name__,
            "category": exc.category,
            "message": str(exc),
        }
        if exc.field:
            body["field"] = exc.field
        if exc.details:
            body["details"] = exc.details
        status = _STATUS_BY_CATEGORY.get(exc.category, 500)
        return JSONResponse(status_code=status, content={"error": body})

    @app.get("/health", response_model=HealthResponse)
    def health() -> HealthResponse:
        tol = Tolerances.from_env()
        return HealthResponse(status="ok", version=__version__,
                              tolerances=dataclasses.asdict(tol))

    @app.post("/synthesize", response_model=SynthesizeResponse)
    def synthesize(problem: ProblemModel) -> SynthesizeResponse:
        tol = Tolerances.from_env()
        built = build_problem(problem, tol)
        return _synthesize(built, tol)

    @app.post("/analyze", response_model=AnalyzeResponse)
    def analyze(request: AnalyzeRequest) -> AnalyzeResponse:
        tol = Tolerances.from_env()
        _require_distributed(request.problem.method)
        built = build_problem(request.problem, tol)
        if request.gain is not None:
            design = gain_from_model(built, request.gain)
            if not GainMethod(design.method).distributed:
                raise ConfigInvalid(
                    "analysis needs a distributed gain design", field="gain"
                )
        else:
            design = _design(built, tol)
        return _analyze(built, design, tol)

    @app.post("/simulate", response_model=SimulateResponse)
    def run_simulation(request: SimulateRequest) -> SimulateResponse:
        tol = Tolerances.from_env()
        _require_distributed(request.problem.method)
        built = build_problem(request.problem, tol)
        if request.uncontrolled:
            k = np.zeros((built.dynamics.input_dim, built.dynamics.state_dim))
        elif request.gain is not None:
            k = gain_from_model(built, request.gain).K
        else:
            k = _design(built, tol).K
        summary, csv_text = _simulate(built, k, tol)
        return SimulateResponse(summary=summary, csv=csv_text)

    @app.post("/demo", response_model=DemoResponse)
    def demo(request: DemoRequest | None = None) -> DemoResponse:
        tol = Tolerances.from_env()
        cfg = demo_config()
        if request is not None:
            if request.dt is not None:
                cfg["simulation"]["dt"] = request.dt
            if request.horizon is not None:
                cfg["simulation"]["horizon"] = request.horizon
        built = build_problem(ProblemModel.model_validate(cfg), tol)
        synthesis = _synthesize(built, tol)
        design = gain_from_model(built, synthesis.gain)
        certificate = _analyze(built, design, tol)
        controlled, controlled_csv = _simulate(built, design.K, tol)
        k_zero = np.zeros_like(design.K)
        uncontrolled, uncontrolled_csv = _simulate(built, k_zero, tol)
        assert built.spec is not None
        return DemoResponse(
            lambda2=built.spec.lambda2,
            lambda_max=built.spec.lambda_max,
            synthesis=synthesis,
            certificate=certificate,
            controlled=controlled,
            uncontrolled=uncontrolled,
            controlled_csv=controlled_csv,
            uncontrolled_csv=uncontrolled_csv,
        )

    return app


def _require_distributed(method_tag: str) -> None:
    if not GainMethod(method_tag).distributed:
        raise ConfigInvalid(
            "this operation needs a distributed method (thm3, thm4, thm5-*)",
            field="method",
        )


def _design(built: BuiltProblem, tol: Tolerances) -> GainDesign:
    if built.method is GainMethod.SINGLE_SYSTEM:
        return design_gain_single(built.dynamics, built.weights, built.x0,
                                  built.gamma, built.epsilon, tol)
    return design_gain(built.dynamics, built.weights, built.method,
                       built.design_spectral, c=built.c,
                       epsilon=built.epsilon, tol=tol)


def _synthesize(built: BuiltProblem, tol: Tolerances) -> SynthesizeResponse:
    design = _design(built, tol)
    if built.method is GainMethod.SINGLE_SYSTEM:
        interval = None
        # design_gain_single only returns when the budget holds
        bound = float(built.x0 @ design.P @ built.x0)
        admissible = True
    else:
        lam2, lam_max = built.design_spectral
        ivl = c_interval(built.method, lam2, lam_max)
        interval = IntervalModel(lower=ivl.lower, upper=ivl.upper,
                                 closed_lower=ivl.closed_lower)
        admissible, bound = admissibility(design.P, built.x0, built.gamma, tol)
    return SynthesizeResponse(
        method=built.method.value,
        interval=interval,
        gain=gain_to_model(design),
        admissible=admissible,
        bound_value=bound,
        gamma=built.gamma,
    )


def _analyze(built: BuiltProblem, design: GainDesign,
             tol: Tolerances) -> AnalyzeResponse:
    assert built.spec is not None
    certificate = evaluate_cost(built.dynamics, built.weights, built.spec,
                                design.K, built.x0, built.gamma,
                                p=design.P, tol=tol)
    return AnalyzeResponse(
        per_mode=[
            ModeCostModel(mode=m.mode, eigenvalue=m.eigenvalue, cost=m.cost,
                          stability_margin=m.stability_margin)
            for m in certificate.per_mode
        ],
        total_cost=certificate.total_cost,
        bound_value=certificate.bound_value,
        gamma=certificate.gamma,
        margin=certificate.margin,
        certified=certificate.certified,
    )


def _simulate(built: BuiltProblem, k: np.ndarray,
              tol: Tolerances) -> tuple[SimulationSummary, str]:
    assert built.spec is not None
    traj = simulate(built.dynamics, built.spec.L, k, built.x0,
                    built.horizon, built.dt, tol)
    errors = consensus_error(traj)
    summary = SimulationSummary(
        dt=traj.dt,
        horizon=float(traj.times[-1]),
        n_steps=traj.times.shape[0] - 1,
        quadrature_cost=quadrature_cost(traj, built.weights, built.spec.L, k),
        cost_tail_estimate=cost_tail_estimate(traj, built.weights, built.spec.L, k),
        terminal_consensus_error=float(errors[-1]),
        initial_consensus_error=float(errors[0]),
    )
    return summary, trajectory_csv(traj)


app = create_app()
