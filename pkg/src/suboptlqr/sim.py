"""Closed-loop network simulation and quadrature cost cross-checks.

Fixed-step classical Runge-Kutta keeps runs deterministic and reproducible;
the problems this package targets are small and non-stiff at the recommended
step sizes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import trapezoid

from .errors import DimensionMismatch, NonFinite, StepTooLarge
from .matops import as_matrix, as_vector
from .synthesis import AgentDynamics, CostWeights
from .tolerances import DEFAULT_TOLERANCES, Tolerances

# dt must stay below this fraction of 1/||A_cl|| for the fixed step to be
# stability-safe
_STEP_SAFETY = 0.1

_FINITE_CHECK_STRIDE = 100


@dataclass
class Trajectory:
    """Uniformly sampled stacked network state x(t), one row per time point."""

    times: np.ndarray
    states: np.ndarray
    dt: float
    n_agents: int
    state_dim: int


def closed_loop_matrix(dyn: AgentDynamics, lap: np.ndarray, k: np.ndarray) -> np.ndarray:
    """Network matrix I_N kron A + L kron B K."""
    n_agents = lap.shape[0]
    return np.kron(np.eye(n_agents), dyn.A) + np.kron(lap, dyn.B @ k)


def simulate(dyn: AgentDynamics, lap, k, x0, horizon: float, dt: float,
             tol: Tolerances = DEFAULT_TOLERANCES) -> Trajectory:
    """Integrate ``xdot = (I kron A + L kron B K) x`` with fixed-step RK4.

    Global error is O(dt^4) against the exact flow. Raises StepTooLarge when
    dt exceeds the stability-safe bound 0.1/||A_cl|| or horizon < dt, and
    NonFinite when the state overflows (diverging closed loop).
    """
    lap = as_matrix(lap, "L")
    if lap.shape[0] != lap.shape[1]:
        raise DimensionMismatch(f"L must be square, got shape {lap.shape}")
    k = as_matrix(k, "K")
    if k.shape != (dyn.input_dim, dyn.state_dim):
        raise DimensionMismatch(
            f"K must be {dyn.input_dim}x{dyn.state_dim}, got {k.shape}"
        )
    n_agents = lap.shape[0]
    n = dyn.state_dim
    x0 = as_vector(x0, "x0")
    if x0.shape[0] != n * n_agents:
        raise DimensionMismatch(
            f"stacked state must have length {n * n_agents}, got {x0.shape[0]}"
        )
    if dt <= 0.0:
        raise StepTooLarge(f"dt must be positive, got {dt}")
    if horizon < dt:
        raise StepTooLarge(f"horizon {horizon} is shorter than one step dt={dt}")

    a_cl = closed_loop_matrix(dyn, lap, k)
    a_norm = float(np.linalg.norm(a_cl, 2))
    if a_norm > 0.0 and dt > _STEP_SAFETY / a_norm:
        raise StepTooLarge(
            f"dt={dt} exceeds the stability-safe bound "
            f"{_STEP_SAFETY / a_norm:.3e} for ||A_cl||={a_norm:.3e}"
        )

    n_steps = int(math.floor(horizon / dt + 1e-9))
    states = np.empty((n_steps + 1, x0.shape[0]))
    states[0] = x0
    x = x0.copy()
    sixth = dt / 6.0
    for step in range(1, n_steps + 1):
        k1 = a_cl @ x
        k2 = a_cl @ (x + 0.5 * dt * k1)
        k3 = a_cl @ (x + 0.5 * dt * k2)
        k4 = a_cl @ (x + dt * k3)
        x = x + sixth * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        states[step] = x
        if step % _FINITE_CHECK_STRIDE == 0 and not np.all(np.isfinite(x)):
            raise NonFinite(
                f"state overflowed at t={step * dt:.6g}; the closed loop diverges",
                category="numerical",
            )
    if not np.all(np.isfinite(x)):
        raise NonFinite(
            "state overflowed before the end of the horizon; the closed loop diverges",
            category="numerical",
        )
    times = dt * np.arange(n_steps + 1)
    return Trajectory(times=times, states=states, dt=dt,
                      n_agents=n_agents, state_dim=n)


def consensus_error(traj: Trajectory) -> np.ndarray:
    """Per time point, the largest pairwise distance between agent states."""
    n_pts = traj.states.shape[0]
    err = np.zeros(n_pts)
    blocks = traj.states.reshape(n_pts, traj.n_agents, traj.state_dim)
    for i in range(traj.n_agents):
        for j in range(i + 1, traj.n_agents):
            dist = np.linalg.norm(blocks[:, i, :] - blocks[:, j, :], axis=1)
            np.maximum(err, dist, out=err)
    return err


def _cost_integrand(traj: Trajectory, weights: CostWeights, lap: np.ndarray,
                    k: np.ndarray) -> np.ndarray:
    w = np.kron(lap, weights.Q) + np.kron(lap @ lap, k.T @ weights.R @ k)
    return np.einsum("ti,ij,tj->t", traj.states, w, traj.states)


def quadrature_cost(traj: Trajectory, weights: CostWeights, lap, k) -> float:
    """Composite trapezoidal approximation of the running network cost
    integral over the trajectory horizon."""
    lap = as_matrix(lap, "L")
    k = as_matrix(k, "K")
    value = float(trapezoid(_cost_integrand(traj, weights, lap, k), dx=traj.dt))
    return max(value, 0.0)


def cost_tail_estimate(traj: Trajectory, weights: CostWeights, lap, k) -> float | None:
    """Estimate of the cost beyond the horizon from the integrand's decay.

    Fits an exponential to the tail of the integrand and integrates it to
    infinity. Returns None when the integrand is not decaying (e.g. an
    uncontrolled run), 0.0 when it has already vanished.
    """
    lap = as_matrix(lap, "L")
    k = as_matrix(k, "K")
    g = _cost_integrand(traj, weights, lap, k)
    terminal = float(g[-1])
    if terminal <= 0.0:
        return 0.0
    half = g.shape[0] // 2
    if half < 5 or float(np.mean(g[half:])) >= 0.25 * float(np.mean(g[:half])):
        # no clear decay across the horizon (e.g. an undamped run)
        return None
    window = max(10, g.shape[0] // 10)
    tail = g[-window:]
    if np.any(tail <= 0.0):
        return None
    t = traj.times[-window:]
    slope = np.polyfit(t, np.log(tail), 1)[0]
    if slope >= 0.0:
        return None
    return terminal / float(-slope)
