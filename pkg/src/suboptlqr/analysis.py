"""Exact cost evaluation and budget certificates for diffusive network control.

Diagonalizing the Laplacian splits the closed loop into decoupled agent-sized
modes A + lambda_i B K. Each stable mode contributes
``J_i = xbar_i0^T Y_i xbar_i0`` with Y_i solving the mode's Lyapunov
equation, and the network cost is the sum over the non-consensus modes. The
consensus mode (lambda_1 = 0) never contributes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import CostInfinite, DimensionMismatch, NumericalError
from .graph import LaplacianSpectrum
from .matops import as_matrix, as_vector, is_hurwitz, solve_lyapunov, stability_margin
from .synthesis import AgentDynamics, CostWeights, admissibility
from .tolerances import DEFAULT_TOLERANCES, Tolerances

# epsilon schedule for the certificate witness search
_WITNESS_EPS_START = 1e-3
_WITNESS_EPS_FLOOR = 1e-12


def modal_transform(spec: LaplacianSpectrum, x0) -> np.ndarray:
    """Rotate a stacked network state into Laplacian modal coordinates.

    Returns an (N, n) array whose i-th row is the state of mode i+1; row 0 is
    sqrt(N) times the agent average. The transform is orthogonal, so
    ``spec.U @ result`` recovers the per-agent states.
    """
    x0 = as_vector(x0, "x0")
    n_agents = spec.node_count
    if x0.shape[0] % n_agents != 0:
        raise DimensionMismatch(
            f"stacked state length {x0.shape[0]} is not a multiple of N={n_agents}"
        )
    agents = x0.reshape(n_agents, -1)
    return spec.U.T @ agents


def autonomous_performance(a_cl, q, x0,
                           tol: Tolerances = DEFAULT_TOLERANCES) -> float:
    """Infinite-horizon value of the quadratic form along ``xdot = a_cl x``.

    Equals ``x0^T Y x0`` with Y the Lyapunov solution; raises NotHurwitz when
    the flow is not asymptotically stable (the integral diverges).
    """
    y = solve_lyapunov(a_cl, q, tol)
    x0 = as_vector(x0, "x0")
    if x0.shape[0] != y.shape[0]:
        raise DimensionMismatch(f"x0 must have length {y.shape[0]}, got {x0.shape[0]}")
    return float(x0 @ y @ x0)


class CertifyResult(NamedTuple):
    certified: bool
    cost: float
    witness: np.ndarray | None


def certify_gamma(a_cl, q, x0, gamma: float,
                  tol: Tolerances = DEFAULT_TOLERANCES) -> CertifyResult:
    """Decide whether the autonomous performance stays below gamma.

    Never raises on an unstable ``a_cl``; the verdict is simply negative with
    infinite cost. When certified, also returns a strict-inequality witness
    P_eps >= Y built from the epsilon-shifted Lyapunov equation, with epsilon
    halved from 1e-3 until ``x0^T P_eps x0 < gamma`` (the shrinking witness
    always exists; in the degenerate case gamma - cost < 1e-12 scale the
    witness is omitted).
    """
    a_cl = as_matrix(a_cl, "a_cl")
    if not is_hurwitz(a_cl, tol):
        return CertifyResult(certified=False, cost=math.inf, witness=None)
    cost = autonomous_performance(a_cl, q, x0, tol)
    certified = cost < gamma
    if not certified:
        return CertifyResult(certified=False, cost=cost, witness=None)

    q = as_matrix(q, "q")
    x0 = as_vector(x0, "x0")
    eye = np.eye(a_cl.shape[0])
    eps = _WITNESS_EPS_START
    while eps >= _WITNESS_EPS_FLOOR:
        p_eps = solve_lyapunov(a_cl, q + eps * eye, tol)
        strict = a_cl.T @ p_eps + p_eps @ a_cl + q
        if float(np.linalg.eigvalsh(0.5 * (strict + strict.T))[-1]) < 0.0 \
                and float(x0 @ p_eps @ x0) < gamma:
            return CertifyResult(certified=True, cost=cost, witness=p_eps)
        eps *= 0.5
    return CertifyResult(certified=True, cost=cost, witness=None)


def mode_matrix(dyn: AgentDynamics, lam: float, k: np.ndarray) -> np.ndarray:
    """Closed-loop matrix A + lambda B K of one Laplacian mode."""
    return dyn.A + lam * (dyn.B @ k)


def consensus_check(dyn: AgentDynamics, k, spec: LaplacianSpectrum,
                    tol: Tolerances = DEFAULT_TOLERANCES) -> bool:
    """True iff every non-consensus mode A + lambda_i B K is Hurwitz, which
    is equivalent to the controlled network reaching consensus."""
    k = _check_gain(dyn, k)
    return all(
        is_hurwitz(mode_matrix(dyn, float(lam), k), tol)
        for lam in spec.lambdas[1:]
    )


@dataclass
class ModeCost:
    """Per-mode certificate entry (modes are indexed 2..N)."""

    mode: int
    eigenvalue: float
    cost: float
    stability_margin: float


@dataclass
class CostCertificate:
    """Exact network cost against a budget, with its per-mode breakdown.

    ``bound_value`` is the quadratic certificate bound (present when the
    design matrix P was supplied) and always dominates ``total_cost``.
    """

    total_cost: float
    per_mode: list[ModeCost]
    bound_value: float | None
    gamma: float

    @property
    def margin(self) -> float:
        return self.gamma - self.total_cost

    @property
    def certified(self) -> bool:
        return self.margin > 0.0


def _check_gain(dyn: AgentDynamics, k) -> np.ndarray:
    k = as_matrix(k, "K")
    if k.shape != (dyn.input_dim, dyn.state_dim):
        raise DimensionMismatch(
            f"K must be {dyn.input_dim}x{dyn.state_dim}, got {k.shape}"
        )
    return k


def evaluate_cost(dyn: AgentDynamics, weights: CostWeights,
                  spec: LaplacianSpectrum, k, x0, gamma: float,
                  p: np.ndarray | None = None,
                  tol: Tolerances = DEFAULT_TOLERANCES) -> CostCertificate:
    """Exact closed-loop network cost via the per-mode Lyapunov solves.

    Raises CostInfinite (carrying the offending mode index) when any mode is
    unstable. When the design matrix ``p`` is supplied the certificate bound
    is evaluated as well and the chain ``total_cost <= bound`` is enforced.
    """
    k = _check_gain(dyn, k)
    x0 = as_vector(x0, "x0")
    n, n_agents = dyn.state_dim, spec.node_count
    if x0.shape[0] != n * n_agents:
        raise DimensionMismatch(
            f"stacked state must have length {n * n_agents}, got {x0.shape[0]}"
        )

    xbar = modal_transform(spec, x0)
    per_mode: list[ModeCost] = []
    total = 0.0
    for i in range(1, n_agents):
        lam = float(spec.lambdas[i])
        a_i = mode_matrix(dyn, lam, k)
        margin = stability_margin(a_i)
        if not margin > tol.hurwitz_margin:
            raise CostInfinite(
                f"mode {i + 1} (eigenvalue {lam:.6g}) is not asymptotically "
                f"stable; the network cost diverges",
                mode=i + 1, eigenvalue=lam,
            )
        q_i = lam * weights.Q + lam * lam * (k.T @ weights.R @ k)
        cost_i = autonomous_performance(a_i, q_i, xbar[i], tol)
        per_mode.append(ModeCost(mode=i + 1, eigenvalue=lam, cost=cost_i,
                                 stability_margin=margin))
        total += cost_i

    bound = None
    if p is not None:
        _, bound = admissibility(p, x0, gamma, tol)
        if total > bound + 1e-9 * max(1.0, abs(bound)):
            raise NumericalError(
                f"exact cost {total!r} exceeds its certificate bound {bound!r}"
            )
    return CostCertificate(total_cost=total, per_mode=per_mode,
                           bound_value=bound, gamma=gamma)
