"""Request/response schemas for the synthesis service.

The ``ProblemModel`` schema is also the on-disk configuration format the CLI
reads (YAML or JSON with exactly these keys). Unknown keys are rejected
everywhere and all numbers must be finite.
"""

from __future__ import annotations

import math
from typing import Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, field_validator

MethodTag = Literal["thm3", "thm4", "thm5-upper", "thm5-lower", "single"]

Matrix = list[list[float]]


def _check_matrix(m: Matrix, name: str) -> Matrix:
    if not m or not m[0]:
        raise ValueError(f"{name} must be a non-empty matrix")
    width = len(m[0])
    for row in m:
        if len(row) != width:
            raise ValueError(f"{name} rows have inconsistent lengths")
        for v in row:
            if not math.isfinite(v):
                raise ValueError(f"{name} contains a non-finite entry")
    return m


class StrictModel(BaseModel):
    model_config = ConfigDict(extra="forbid")


class DynamicsModel(StrictModel):
    A: Matrix
    B: Matrix

    @field_validator("A", "B")
    @classmethod
    def _finite(cls, v, info):
        return _check_matrix(v, info.field_name)


class WeightsModel(StrictModel):
    Q: Matrix
    R: Matrix

    @field_validator("Q", "R")
    @classmethod
    def _finite(cls, v, info):
        return _check_matrix(v, info.field_name)


class GraphModel(StrictModel):
    node_count: int = Field(ge=2)
    edges: list[tuple[int, int]]


class SimulationModel(StrictModel):
    dt: float = Field(default=1e-3, gt=0, allow_inf_nan=False)
    horizon: float = Field(default=30.0, gt=0, allow_inf_nan=False)


class ProblemModel(StrictModel):
    """A complete synthesis/analysis/simulation problem."""

    dynamics: DynamicsModel
    weights: WeightsModel
    graph: Optional[GraphModel] = None
    gamma: float = Field(gt=0, allow_inf_nan=False,
                         description="cost budget (gamma must be positive)")
    method: MethodTag = "thm3"
    c: Optional[float] = Field(default=None, gt=0, allow_inf_nan=False)
    epsilon: float = Field(default=1e-3, gt=0, allow_inf_nan=False)
    l2: Optional[float] = Field(default=None, gt=0, allow_inf_nan=False,
                                description="lower bound on lambda_2")
    LN: Optional[float] = Field(default=None, gt=0, allow_inf_nan=False,
                                description="upper bound on lambda_N")
    x0: Union[list[list[float]], list[float]]
    simulation: SimulationModel = SimulationModel()

    @field_validator("x0")
    @classmethod
    def _finite_state(cls, v):
        rows = v if (v and isinstance(v[0], list)) else [v]
        for row in rows:
            for value in row:
                if not math.isfinite(value):
                    raise ValueError("x0 contains a non-finite entry")
        return v


class GainModel(StrictModel):
    """Serialized gain design; the file format written by synthesize --out."""

    method: MethodTag
    c: float = Field(allow_inf_nan=False)
    epsilon: float = Field(gt=0, allow_inf_nan=False)
    P: Matrix
    K: Matrix
    spectral_inputs: Optional[tuple[float, float]] = None

    @field_validator("P", "K")
    @classmethod
    def _finite(cls, v, info):
        return _check_matrix(v, info.field_name)


class AnalyzeRequest(StrictModel):
    problem: ProblemModel
    gain: Optional[GainModel] = None


class SimulateRequest(StrictModel):
    problem: ProblemModel
    gain: Optional[GainModel] = None
    uncontrolled: bool = False


class DemoRequest(StrictModel):
    dt: Optional[float] = Field(default=None, gt=0, allow_inf_nan=False)
    horizon: Optional[float] = Field(default=None, gt=0, allow_inf_nan=False)


class IntervalModel(StrictModel):
    lower: float
    upper: float
    closed_lower: bool


class SynthesizeResponse(StrictModel):
    method: MethodTag
    interval: Optional[IntervalModel]
    gain: GainModel
    admissible: bool
    bound_value: float
    gamma: float


class ModeCostModel(StrictModel):
    mode: int
    eigenvalue: float
    cost: float
    stability_margin: float


class AnalyzeResponse(StrictModel):
    per_mode: list[ModeCostModel]
    total_cost: float
    bound_value: Optional[float]
    gamma: float
    margin: float
    certified: bool


class SimulationSummary(StrictModel):
    dt: float
    horizon: float
    n_steps: int
    quadrature_cost: float
    cost_tail_estimate: Optional[float]
    terminal_consensus_error: float
    initial_consensus_error: float


class SimulateResponse(StrictModel):
    summary: SimulationSummary
    csv: str


class DemoResponse(StrictModel):
    lambda2: float
    lambda_max: float
    synthesis: SynthesizeResponse
    certificate: AnalyzeResponse
    controlled: SimulationSummary
    uncontrolled: SimulationSummary
    controlled_csv: str
    uncontrolled_csv: str


class HealthResponse(StrictModel):
    status: str
    version: str
    tolerances: dict[str, float]
