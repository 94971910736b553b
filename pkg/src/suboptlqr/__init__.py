"""Suboptimal distributed LQR consensus control.

Synthesize diffusive controllers ``u = (L kron K) x`` for networks of
identical linear agents, certify that the global quadratic cost stays below
a budget, and verify consensus by modal analysis and closed-loop simulation.
"""

from .analysis import (
    CertifyResult,
    CostCertificate,
    ModeCost,
    autonomous_performance,
    certify_gamma,
    consensus_check,
    evaluate_cost,
    modal_transform,
    mode_matrix,
)
from .graph import LaplacianSpectrum, UndirectedGraph, disagreement_projector, laplacian, spectrum
from .matops import (
    SymmetricEigen,
    is_hurwitz,
    is_stabilizable,
    psd_check,
    solve_care,
    solve_lyapunov,
    stability_margin,
    symmetric_eigen,
)
from .sim import Trajectory, closed_loop_matrix, consensus_error, cost_tail_estimate, quadrature_cost, simulate
from .synthesis import (
    AgentDynamics,
    CInterval,
    CostWeights,
    GainDesign,
    GainMethod,
    admissibility,
    c_interval,
    default_coupling,
    design_gain,
    design_gain_single,
)
from .tolerances import DEFAULT_TOLERANCES, Tolerances

__version__ = "0.1.0"

__all__ = [
    "AgentDynamics",
    "CInterval",
    "CertifyResult",
    "CostCertificate",
    "CostWeights",
    "DEFAULT_TOLERANCES",
    "GainDesign",
    "GainMethod",
    "LaplacianSpectrum",
    "ModeCost",
    "SymmetricEigen",
    "Tolerances",
    "Trajectory",
    "UndirectedGraph",
    "admissibility",
    "autonomous_performance",
    "c_interval",
    "certify_gamma",
    "closed_loop_matrix",
    "consensus_check",
    "consensus_error",
    "cost_tail_estimate",
    "default_coupling",
    "design_gain",
    "design_gain_single",
    "disagreement_projector",
    "evaluate_cost",
    "is_hurwitz",
    "is_stabilizable",
    "laplacian",
    "modal_transform",
    "mode_matrix",
    "psd_check",
    "quadrature_cost",
    "simulate",
    "solve_care",
    "solve_lyapunov",
    "spectrum",
    "stability_margin",
    "symmetric_eigen",
]
