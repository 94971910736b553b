"""Conversion from wire/config schemas to domain objects.

Every invariant of the underlying types is re-validated here; failures carry
the name of the configuration section that caused them.
"""

from __future__ import annotations

from contextlib import contextmanager
from dataclasses import dataclass

import numpy as np

from ..errors import ConfigInvalid, ControlError, DimensionMismatch
from ..graph import LaplacianSpectrum, UndirectedGraph, spectrum
from ..synthesis import AgentDynamics, CostWeights, GainDesign, GainMethod
from ..tolerances import Tolerances
from .models import GainModel, ProblemModel


@contextmanager
def _section(name: str):
    try:
        yield
    except ControlError as err:
        if err.field is None:
            err.field = name
        raise


@dataclass
class BuiltProblem:
    dynamics: AgentDynamics
    weights: CostWeights
    graph: UndirectedGraph | None
    spec: LaplacianSpectrum | None
    x0: np.ndarray
    gamma: float
    method: GainMethod
    c: float | None
    epsilon: float
    bounds: tuple[float, float] | None
    dt: float
    horizon: float

    @property
    def design_spectral(self) -> tuple[float, float]:
        """(lambda_2, lambda_N) pair the design should use for this method."""
        if self.method in (GainMethod.BOUNDS_UPPER, GainMethod.BOUNDS_LOWER):
            assert self.bounds is not None
            return self.bounds
        assert self.spec is not None
        return (self.spec.lambda2, self.spec.lambda_max)


def build_problem(pm: ProblemModel, tol: Tolerances) -> BuiltProblem:
    method = GainMethod(pm.method)

    with _section("dynamics"):
        dynamics = AgentDynamics(A=pm.dynamics.A, B=pm.dynamics.B)
    with _section("weights"):
        weights = CostWeights(Q=pm.weights.Q, R=pm.weights.R)
        if weights.Q.shape[0] != dynamics.state_dim:
            raise DimensionMismatch(
                f"Q must be {dynamics.state_dim}x{dynamics.state_dim}, "
                f"got {weights.Q.shape}"
            )
        if weights.R.shape[0] != dynamics.input_dim:
            raise DimensionMismatch(
                f"R must be {dynamics.input_dim}x{dynamics.input_dim}, "
                f"got {weights.R.shape}"
            )

    graph = None
    spec = None
    if method.distributed:
        if pm.graph is None:
            raise ConfigInvalid("a graph is required for distributed methods",
                                field="graph")
        with _section("graph"):
            graph = UndirectedGraph(pm.graph.node_count, list(pm.graph.edges))
            spec = spectrum(graph, tol)
    elif pm.graph is not None:
        with _section("graph"):
            graph = UndirectedGraph(pm.graph.node_count, list(pm.graph.edges))

    bounds = None
    if method in (GainMethod.BOUNDS_UPPER, GainMethod.BOUNDS_LOWER):
        if pm.l2 is None or pm.LN is None:
            raise ConfigInvalid(
                f"method {method.value} needs the spectral bounds l2 and LN",
                field="l2" if pm.l2 is None else "LN",
            )
        bounds = (pm.l2, pm.LN)

    with _section("x0"):
        n = dynamics.state_dim
        expected = graph.node_count if (method.distributed and graph) else 1
        if not pm.x0:
            raise DimensionMismatch("x0 must not be empty")
        if isinstance(pm.x0[0], list):
            arr = np.asarray(pm.x0, dtype=float)
            if arr.ndim != 2 or arr.shape != (expected, n):
                raise DimensionMismatch(
                    f"x0 must provide {expected} agent states of length {n}, "
                    f"got shape {arr.shape}"
                )
            x0 = arr.reshape(-1)
        else:
            x0 = np.asarray(pm.x0, dtype=float)
            if x0.shape != (expected * n,):
                raise DimensionMismatch(
                    f"flat x0 must have length {expected * n}, got {x0.shape[0]}"
                )

    return BuiltProblem(
        dynamics=dynamics, weights=weights, graph=graph, spec=spec, x0=x0,
        gamma=pm.gamma, method=method, c=pm.c, epsilon=pm.epsilon,
        bounds=bounds, dt=pm.simulation.dt, horizon=pm.simulation.horizon,
    )


def gain_from_model(built: BuiltProblem, gm: GainModel) -> GainDesign:
    """Re-hydrate a stored gain design, re-checking shapes against the problem."""
    method = GainMethod(gm.method)
    p = np.asarray(gm.P, dtype=float)
    k = np.asarray(gm.K, dtype=float)
    n, m = built.dynamics.state_dim, built.dynamics.input_dim
    with _section("gain"):
        if p.shape != (n, n):
            raise DimensionMismatch(f"gain P must be {n}x{n}, got {p.shape}")
        if k.shape != (m, n):
            raise DimensionMismatch(f"gain K must be {m}x{n}, got {k.shape}")
    spectral = tuple(gm.spectral_inputs) if gm.spectral_inputs else None
    return GainDesign(method=method, c=gm.c, epsilon=gm.epsilon, P=p, K=k,
                      spectral_inputs=spectral)


def gain_to_model(design: GainDesign) -> GainModel:
    return GainModel(
        method=design.method.value,
        c=design.c,
        epsilon=design.epsilon,
        P=design.P.tolist(),
        K=design.K.tolist(),
        spectral_inputs=design.spectral_inputs,
    )
