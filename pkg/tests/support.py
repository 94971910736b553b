"""Shared test helpers: independent oracles and random problem generators.

The oracles here deliberately avoid the code paths they check. The Lyapunov
oracle works through the Kronecker-vectorized linear system, the flow oracle
through the matrix exponential, and the cost oracle through dense quadrature
of the exact flow.
"""

from __future__ import annotations

import numpy as np
from scipy.linalg import expm

from suboptlqr import AgentDynamics, CostWeights, UndirectedGraph


def lyapunov_oracle(a_cl: np.ndarray, q: np.ndarray) -> np.ndarray:
    """Solve a_cl^T Y + Y a_cl + q = 0 by dense linear solve of the
    column-vectorized system (I kron a_cl^T + a_cl^T kron I) vec(Y) = -vec(q)."""
    n = a_cl.shape[0]
    eye = np.eye(n)
    coefficient = np.kron(eye, a_cl.T) + np.kron(a_cl.T, eye)
    vec_y = np.linalg.solve(coefficient, -q.reshape(-1, order="F"))
    return vec_y.reshape(n, n, order="F")


def quadrature_oracle(a_cl: np.ndarray, q: np.ndarray, x0: np.ndarray,
                      horizon: float = 50.0, n_points: int = 20001) -> float:
    """Trapezoid quadrature of x(t)^T q x(t) along the exact expm flow."""
    ts = np.linspace(0.0, horizon, n_points)
    step_flow = expm(a_cl * (ts[1] - ts[0]))
    x = x0.astype(float).copy()
    values = np.empty(n_points)
    for idx in range(n_points):
        values[idx] = x @ q @ x
        x = step_flow @ x
    return float(np.trapezoid(values, ts))


def exact_flow(a_cl: np.ndarray, x0: np.ndarray, ts: np.ndarray) -> np.ndarray:
    """States of xdot = a_cl x at the given times via the matrix exponential."""
    return np.stack([expm(a_cl * t) @ x0 for t in ts])


def random_psd(rng: np.random.Generator, n: int, scale: float = 1.0) -> np.ndarray:
    m = rng.standard_normal((n, n))
    return scale * (m @ m.T) / n


def random_pd(rng: np.random.Generator, n: int, scale: float = 1.0) -> np.ndarray:
    return random_psd(rng, n, scale) + 0.1 * scale * np.eye(n)


def random_hurwitz(rng: np.random.Generator, n: int) -> np.ndarray:
    m = rng.standard_normal((n, n))
    shift = float(np.max(np.linalg.eigvals(m).real))
    return m - (shift + 0.2 + rng.uniform(0.0, 1.0)) * np.eye(n)


def random_stabilizable(rng: np.random.Generator, n: int, m: int) -> tuple[np.ndarray, np.ndarray]:
    """Random (A, B) pair, redrawn until the rank test accepts it."""
    from suboptlqr import is_stabilizable

    while True:
        a = rng.standard_normal((n, n))
        b = rng.standard_normal((n, m))
        if is_stabilizable(a, b):
            return a, b


def random_mild_system(rng: np.random.Generator, n: int, m: int,
                       max_growth: float = 0.2) -> tuple[np.ndarray, np.ndarray]:
    """Random stabilizable pair whose drift has spectral abscissa <= max_growth.

    Keeps the consensus trajectory from exploding in double precision, which
    would drown the pairwise differences in cancellation noise during long
    closed-loop simulations.
    """
    from suboptlqr import is_stabilizable

    while True:
        a = rng.standard_normal((n, n))
        abscissa = float(np.max(np.linalg.eigvals(a).real))
        a -= (abscissa - rng.uniform(-0.5, max_growth)) * np.eye(n)
        b = rng.standard_normal((n, m))
        if is_stabilizable(a, b):
            return a, b


def random_connected_graph(rng: np.random.Generator, n_nodes: int) -> UndirectedGraph:
    """Random spanning tree plus a few extra edges."""
    edges: set[tuple[int, int]] = set()
    order = list(rng.permutation(np.arange(1, n_nodes + 1)))
    for idx in range(1, n_nodes):
        a = int(order[idx])
        b = int(order[rng.integers(0, idx)])
        edges.add((min(a, b), max(a, b)))
    possible = [(i, j) for i in range(1, n_nodes + 1) for j in range(i + 1, n_nodes + 1)]
    n_extra = int(rng.integers(0, max(1, len(possible) // 3)))
    for _ in range(n_extra):
        i, j = possible[rng.integers(0, len(possible))]
        edges.add((i, j))
    return UndirectedGraph(n_nodes, sorted(edges))


def oscillator_dynamics() -> AgentDynamics:
    return AgentDynamics(A=[[0.0, 1.0], [-1.0, 0.0]], B=[[0.0], [1.0]])


def oscillator_weights() -> CostWeights:
    return CostWeights(Q=[[2.0, 0.0], [0.0, 1.0]], R=[[1.0]])


OSCILLATOR_X0 = np.array([
    [-0.08, 0.11],
    [0.12, -0.08],
    [-0.09, -0.14],
    [-0.12, 0.04],
    [0.07, -0.16],
    [-0.21, 0.12],
    [0.15, -0.22],
    [-0.17, -0.14],
]).reshape(-1)
