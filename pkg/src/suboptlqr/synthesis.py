"""Gain synthesis for diffusively coupled networks of identical linear agents.

The different methods share one mechanism: pick a coupling scalar c from an
interval determined by the extreme Laplacian eigenvalues (or user-supplied
bounds on them), solve one agent-sized Riccati equation whose weights are
scaled by those eigenvalues and shifted by a small epsilon, and set the local
gain to K = -c R^-1 B^T P. The epsilon shift turns the strict Riccati
inequality the guarantee rests on into an equation a standard CARE solver
can handle; the inequality is re-verified numerically before a design is
returned.

The quadratic form x0^T (Pi kron P) x0, with Pi the disagreement projector,
bounds the achievable network cost from above; ``admissibility`` compares it
against the budget gamma.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import (
    BudgetInfeasible,
    COutOfRange,
    DimensionMismatch,
    InequalityNotStrict,
    InputError,
    InvalidSpectralData,
    NotPositiveDefinite,
    NotPositiveSemidefinite,
    NotStabilizable,
    NumericalError,
)
from .graph import disagreement_projector
from .matops import as_matrix, as_vector, is_stabilizable, psd_check, solve_care
from .tolerances import DEFAULT_TOLERANCES, Tolerances

# relative offset used to realize a representable interior point of an open
# interval endpoint
OPEN_INTERVAL_OFFSET = 1e-6

# slack for floating-point membership tests at a closed interval endpoint
# (2/(l2+lN) recomputed from rounded eigenvalues may differ in the last ulps)
_ENDPOINT_SLACK = 1e-9


class GainMethod(enum.Enum):
    """Available gain-design methods.

    The tag strings double as the wire/CLI method names. ``single`` designs
    for one agent in isolation; the remaining four design the shared local
    gain of a diffusive network controller and differ in which part of the
    coupling range they use and whether the exact extreme Laplacian
    eigenvalues or only bounds on them are available.
    """

    SINGLE_SYSTEM = "single"
    EXACT_SPECTRUM_UPPER = "thm3"
    EXACT_SPECTRUM_LOWER = "thm4"
    BOUNDS_UPPER = "thm5-upper"
    BOUNDS_LOWER = "thm5-lower"

    @property
    def distributed(self) -> bool:
        return self is not GainMethod.SINGLE_SYSTEM

    @property
    def upper_range(self) -> bool:
        """True for methods using [2/(l2+lN), 2/lN), false for (0, 2/(l2+lN))."""
        return self in (GainMethod.EXACT_SPECTRUM_UPPER, GainMethod.BOUNDS_UPPER)


@dataclass
class AgentDynamics:
    """State map A (n x n) and input map B (n x m) of one agent; (A, B) must
    be stabilizable."""

    A: np.ndarray
    B: np.ndarray

    def __post_init__(self):
        self.A = as_matrix(self.A, "A")
        self.B = as_matrix(self.B, "B")
        if self.A.shape[0] != self.A.shape[1]:
            raise DimensionMismatch(f"A must be square, got shape {self.A.shape}")
        if self.B.shape[0] != self.A.shape[0]:
            raise DimensionMismatch(
                f"B must have {self.A.shape[0]} rows, got {self.B.shape[0]}"
            )
        if not is_stabilizable(self.A, self.B):
            raise NotStabilizable("(A, B) fails the stabilizability rank test")

    @property
    def state_dim(self) -> int:
        return self.A.shape[0]

    @property
    def input_dim(self) -> int:
        return self.B.shape[1]


@dataclass
class CostWeights:
    """State-difference weight Q (symmetric PSD) and input weight R
    (symmetric PD)."""

    Q: np.ndarray
    R: np.ndarray

    def __post_init__(self):
        self.Q = as_matrix(self.Q, "Q")
        self.R = as_matrix(self.R, "R")
        ok, q_min = psd_check(self.Q)
        if not ok:
            raise NotPositiveSemidefinite(
                f"Q must be positive semi-definite (min eigenvalue {q_min:.3e})"
            )
        if np.linalg.norm(self.R - self.R.T, 2) > 1e-10 * max(np.linalg.norm(self.R, 2), 1.0):
            raise NotPositiveDefinite("R must be symmetric")
        r_eigs = np.linalg.eigvalsh(0.5 * (self.R + self.R.T))
        if r_eigs[0] <= 1e-10 * max(abs(r_eigs[-1]), 1.0):
            raise NotPositiveDefinite("R must be positive definite")


class CInterval(NamedTuple):
    """Admissible coupling-scalar interval; the lower endpoint may be closed."""

    lower: float
    upper: float
    closed_lower: bool

    def contains(self, c: float) -> bool:
        if self.closed_lower:
            # tolerate last-ulp differences when c was computed from rounded
            # eigenvalues
            above = c >= self.lower - _ENDPOINT_SLACK * max(self.lower, 1.0)
        else:
            above = c > self.lower
        return above and c < self.upper


@dataclass
class GainDesign:
    """A synthesized local gain with its certificate ingredients.

    ``K = -c R^-1 B^T P`` by construction. ``spectral_inputs`` records the
    (lambda_2, lambda_N) pair (or the (l2, LN) bounds) the design used; it is
    None for the single-system method.
    """

    method: GainMethod
    c: float
    epsilon: float
    P: np.ndarray
    K: np.ndarray
    spectral_inputs: tuple[float, float] | None


def c_interval(method: GainMethod, lam2: float, lam_max: float) -> CInterval:
    """Admissible coupling range for a distributed method.

    Upper-range methods use [2/(lam2+lam_max), 2/lam_max); lower-range
    methods use (0, 2/(lam2+lam_max)). For the bounds-based methods the
    arguments are the lower bound on lambda_2 and upper bound on lambda_N.
    """
    if not method.distributed:
        raise ValueError("the single-system method has no coupling interval")
    if not (0.0 < lam2 <= lam_max):
        raise InvalidSpectralData(
            f"spectral inputs must satisfy 0 < {lam2} <= {lam_max}"
        )
    split = 2.0 / (lam2 + lam_max)
    if method.upper_range:
        return CInterval(lower=split, upper=2.0 / lam_max, closed_lower=True)
    return CInterval(lower=0.0, upper=split, closed_lower=False)


def default_coupling(method: GainMethod, lam2: float, lam_max: float) -> float:
    """Coupling scalar yielding the smallest P: the left endpoint for
    upper-range methods, just inside the open right endpoint otherwise."""
    interval = c_interval(method, lam2, lam_max)
    if interval.closed_lower:
        return interval.lower
    return (1.0 - OPEN_INTERVAL_OFFSET) * interval.upper


def _scaled_weights(method: GainMethod, c: float, lam2: float, lam_max: float,
                    weights: CostWeights, epsilon: float) -> tuple[np.ndarray, np.ndarray, float, float]:
    """Riccati weights R/(2 c mu - c^2 mu^2) and nu Q + eps I for the method.

    mu is lam_max for upper-range methods and lam2 for lower-range methods;
    nu is always lam_max.
    """
    mu = lam_max if method.upper_range else lam2
    nu = lam_max
    coef = 2.0 * c * mu - c * c * mu * mu
    if coef <= 0.0:
        raise COutOfRange(
            f"coupling c={c} makes the Riccati scaling 2*c*mu - c^2*mu^2 non-positive"
        )
    n = weights.Q.shape[0]
    r_scaled = weights.R / coef
    q_scaled = nu * weights.Q + epsilon * np.eye(n)
    return r_scaled, q_scaled, mu, nu


def _verify_strict_inequality(dyn: AgentDynamics, weights: CostWeights,
                              p: np.ndarray, c: float, mu: float, nu: float,
                              tol: Tolerances) -> None:
    """Check A^T P + P A + (c^2 mu^2 - 2 c mu) P B R^-1 B^T P + nu Q < 0.

    By construction the left side equals -epsilon I up to the Riccati
    residual; a failure means epsilon is below the numerical noise floor.
    """
    a, b = dyn.A, dyn.B
    lin = a.T @ p + p @ a
    quad = (c * c * mu * mu - 2.0 * c * mu) * (p @ b @ np.linalg.solve(weights.R, b.T @ p))
    const = nu * weights.Q
    m = lin + quad + const
    scale = max(1.0, sum(np.linalg.norm(t, 2) for t in (lin, quad, const)))
    max_eig = float(np.linalg.eigvalsh(0.5 * (m + m.T))[-1])
    if max_eig > -tol.strict_tol * scale:
        raise InequalityNotStrict(
            f"design inequality margin {max_eig:.3e} is not strictly negative "
            f"at scale {scale:.3e}; increase epsilon"
        )


def design_gain(dyn: AgentDynamics, weights: CostWeights, method: GainMethod,
                spectral: tuple[float, float], c: float | None = None,
                epsilon: float = 1e-3,
                tol: Tolerances = DEFAULT_TOLERANCES) -> GainDesign:
    """Design the shared local gain of a distributed diffusive controller.

    ``spectral`` is (lambda_2, lambda_N) for the exact-spectrum methods or
    (l2, LN) for the bounds-based ones. When ``c`` is omitted the endpoint
    choice minimizing P is used. Raises COutOfRange for a c outside the
    method's interval and InequalityNotStrict when epsilon is too small for
    the tolerance profile.
    """
    if not method.distributed:
        raise ValueError("use design_gain_single for the single-system method")
    if epsilon <= 0.0:
        raise InputError(f"epsilon must be positive, got {epsilon}")
    lam2, lam_max = float(spectral[0]), float(spectral[1])
    interval = c_interval(method, lam2, lam_max)
    if c is None:
        c = default_coupling(method, lam2, lam_max)
    c = float(c)
    if not interval.contains(c):
        bracket = "[" if interval.closed_lower else "("
        raise COutOfRange(
            f"c={c} outside {bracket}{interval.lower}, {interval.upper}) "
            f"for method {method.value}"
        )

    r_scaled, q_scaled, mu, nu = _scaled_weights(method, c, lam2, lam_max, weights, epsilon)
    p = solve_care(dyn.A, dyn.B, r_scaled, q_scaled, tol)
    k = -c * np.linalg.solve(weights.R, dyn.B.T @ p)
    _verify_strict_inequality(dyn, weights, p, c, mu, nu, tol)
    return GainDesign(method=method, c=c, epsilon=epsilon, P=p, K=k,
                      spectral_inputs=(lam2, lam_max))


def design_gain_single(dyn: AgentDynamics, weights: CostWeights, x0,
                       gamma: float, epsilon: float = 1e-3,
                       tol: Tolerances = DEFAULT_TOLERANCES) -> GainDesign:
    """Suboptimal state feedback for a single agent under a cost budget.

    Solves the Riccati equation with weights (Q + eps I, R), sets
    K = -R^-1 B^T P, and accepts the design only when the guaranteed cost
    x0^T P x0 stays below gamma (BudgetInfeasible otherwise; retrying with a
    smaller epsilon shrinks the bound).
    """
    if gamma <= 0.0:
        raise InputError(f"budget gamma must be positive, got {gamma}")
    if epsilon <= 0.0:
        raise InputError(f"epsilon must be positive, got {epsilon}")
    x0 = as_vector(x0, "x0")
    n = dyn.state_dim
    if x0.shape[0] != n:
        raise DimensionMismatch(f"x0 must have length {n}, got {x0.shape[0]}")
    q_shift = weights.Q + epsilon * np.eye(n)
    p = solve_care(dyn.A, dyn.B, weights.R, q_shift, tol)
    k = -np.linalg.solve(weights.R, dyn.B.T @ p)
    bound = float(x0 @ p @ x0)
    if bound >= gamma:
        raise BudgetInfeasible(
            f"guaranteed cost {bound:.6g} does not fit under gamma={gamma:.6g}",
            bound_value=bound,
        )
    return GainDesign(method=GainMethod.SINGLE_SYSTEM, c=1.0, epsilon=epsilon,
                      P=p, K=k, spectral_inputs=None)


def admissibility(p, x0, gamma: float,
                  tol: Tolerances = DEFAULT_TOLERANCES) -> tuple[bool, float]:
    """Evaluate the certificate bound x0^T (Pi kron P) x0 against gamma.

    ``x0`` is the stacked network state (length n*N). The bound is also
    computed in its pairwise form (1/N) sum_{i<j} (xi - xj)^T P (xi - xj)
    and the two values are cross-checked. Returns (bound < gamma, bound).
    """
    if gamma <= 0.0:
        raise InputError(f"budget gamma must be positive, got {gamma}")
    p = as_matrix(p, "P")
    if p.shape[0] != p.shape[1]:
        raise DimensionMismatch(f"P must be square, got shape {p.shape}")
    x0 = as_vector(x0, "x0")
    n = p.shape[0]
    if x0.shape[0] % n != 0:
        raise DimensionMismatch(
            f"stacked state length {x0.shape[0]} is not a multiple of n={n}"
        )
    n_agents = x0.shape[0] // n
    agents = x0.reshape(n_agents, n)

    projector = disagreement_projector(n_agents)
    bound = float(x0 @ np.kron(projector, p) @ x0)

    pairwise = 0.0
    for i in range(n_agents):
        for j in range(i + 1, n_agents):
            d = agents[i] - agents[j]
            pairwise += float(d @ p @ d)
    pairwise /= n_agents

    if abs(bound - pairwise) > 1e-10 * max(1.0, abs(bound)):
        raise NumericalError(
            f"projector and pairwise bound forms disagree: {bound!r} vs {pairwise!r}"
        )
    return (bound < gamma, bound)
