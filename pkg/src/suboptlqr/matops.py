"""Dense real-matrix kernels.

Symmetric eigendecomposition, the continuous Lyapunov equation, the
continuous algebraic Riccati equation (CARE), and the Hurwitz / positive
semi-definiteness tests everything else is built on. The heavy lifting is
delegated to LAPACK through numpy/scipy (Bartels-Stewart for Lyapunov,
Hamiltonian deflating-subspace extraction for the CARE); this module owns
input validation, residual verification, and error classification.

All functions are pure and safe to call concurrently.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np
import scipy.linalg

from .errors import (
    DimensionMismatch,
    IllConditioned,
    NonFinite,
    NonSymmetric,
    NotHurwitz,
    NotPositiveDefinite,
    NotPositiveSemidefinite,
    NotStabilizable,
)
from .tolerances import DEFAULT_TOLERANCES, Tolerances


class SymmetricEigen(NamedTuple):
    """Eigendecomposition S = V diag(w) V^T with w ascending and V orthogonal."""

    eigenvalues: np.ndarray
    vectors: np.ndarray


def as_matrix(value, name: str = "matrix") -> np.ndarray:
    """Coerce an array-like to a finite 2-d float array (scalars become 1x1)."""
    m = np.atleast_2d(np.asarray(value, dtype=float))
    if m.ndim != 2:
        raise DimensionMismatch(f"{name} must be 2-dimensional, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise NonFinite(f"{name} contains non-finite entries")
    return m


def as_vector(value, name: str = "vector") -> np.ndarray:
    """Coerce an array-like to a finite 1-d float array."""
    v = np.asarray(value, dtype=float).reshape(-1)
    if not np.all(np.isfinite(v)):
        raise NonFinite(f"{name} contains non-finite entries")
    return v


def _require_square(m: np.ndarray, name: str) -> None:
    if m.shape[0] != m.shape[1]:
        raise DimensionMismatch(f"{name} must be square, got shape {m.shape}")


def _norm2(m: np.ndarray) -> float:
    return float(np.linalg.norm(m, 2)) if m.size else 0.0


def _check_symmetric(m: np.ndarray, name: str, tol: Tolerances) -> np.ndarray:
    _require_square(m, name)
    if _norm2(m - m.T) > tol.sym_tol * _norm2(m):
        raise NonSymmetric(f"{name} is not symmetric within tolerance")
    return 0.5 * (m + m.T)


def symmetric_eigen(s, tol: Tolerances = DEFAULT_TOLERANCES) -> SymmetricEigen:
    """Eigendecomposition of a symmetric matrix, eigenvalues in ascending order.

    Raises NonSymmetric if the relative symmetry defect exceeds ``sym_tol``
    and NonFinite on NaN/inf entries. The returned vectors are orthogonal and
    reconstruct the (symmetrized) input to ``eig_tol`` relative accuracy.
    """
    s = as_matrix(s, "S")
    s = _check_symmetric(s, "S", tol)
    w, v = np.linalg.eigh(s)
    return SymmetricEigen(eigenvalues=w, vectors=v)


def is_hurwitz(m, tol: Tolerances = DEFAULT_TOLERANCES) -> bool:
    """True iff every eigenvalue of ``m`` has real part < -hurwitz_margin."""
    m = as_matrix(m, "M")
    _require_square(m, "M")
    return stability_margin(m) > tol.hurwitz_margin


def stability_margin(m) -> float:
    """Distance of the spectrum from the imaginary axis: -max Re(eig).

    Positive for asymptotically stable matrices, negative for unstable ones.
    """
    m = as_matrix(m, "M")
    _require_square(m, "M")
    return float(-np.max(np.linalg.eigvals(m).real))


def psd_check(m, tol: Tolerances = DEFAULT_TOLERANCES) -> tuple[bool, float]:
    """Test positive semi-definiteness of a symmetric matrix.

    Returns ``(ok, min_eigenvalue)`` where ``ok`` allows a small negative
    slack of ``psd_tol * ||M||`` to absorb round-off.
    """
    m = as_matrix(m, "M")
    m = _check_symmetric(m, "M", tol)
    w = np.linalg.eigvalsh(m)
    min_eig = float(w[0]) if w.size else 0.0
    scale = float(np.max(np.abs(w))) if w.size else 0.0
    return (min_eig >= -tol.psd_tol * scale, min_eig)


def solve_lyapunov(a_cl, q, tol: Tolerances = DEFAULT_TOLERANCES) -> np.ndarray:
    """Solve ``a_cl^T Y + Y a_cl + q = 0`` for the PSD matrix Y.

    ``a_cl`` must be Hurwitz (checked, NotHurwitz otherwise) and ``q``
    symmetric PSD. The residual is verified against
    ``lyap_tol * (||a_cl|| ||Y|| + ||q||)``.
    """
    a_cl = as_matrix(a_cl, "a_cl")
    q = as_matrix(q, "q")
    _require_square(a_cl, "a_cl")
    if a_cl.shape != q.shape:
        raise DimensionMismatch(
            f"a_cl and q must have equal shapes, got {a_cl.shape} and {q.shape}"
        )
    q = _check_symmetric(q, "q", tol)
    if not is_hurwitz(a_cl, tol):
        raise NotHurwitz("a_cl has an eigenvalue with real part >= -hurwitz_margin")

    # scipy solves a x + x a^H = q; transpose to our convention.
    y = scipy.linalg.solve_continuous_lyapunov(a_cl.T, -q)
    y = 0.5 * (y + y.T)

    residual = _norm2(a_cl.T @ y + y @ a_cl + q)
    bound = tol.lyap_tol * (_norm2(a_cl) * _norm2(y) + _norm2(q))
    if residual > max(bound, tol.lyap_tol):
        raise IllConditioned(
            f"Lyapunov residual {residual:.3e} exceeds bound {bound:.3e}"
        )
    ok, min_eig = psd_check(y, tol)
    if not ok:
        raise IllConditioned(
            f"Lyapunov solution is not PSD (min eigenvalue {min_eig:.3e})"
        )
    return y


def is_stabilizable(a, b, tol: Tolerances = DEFAULT_TOLERANCES) -> bool:
    """Eigenvalue rank test: for every eigenvalue with Re >= 0, the matrix
    ``[A - lambda I, B]`` must have full row rank."""
    a = as_matrix(a, "A")
    b = as_matrix(b, "B")
    _require_square(a, "A")
    if b.shape[0] != a.shape[0]:
        raise DimensionMismatch(
            f"A and B row counts differ: {a.shape[0]} vs {b.shape[0]}"
        )
    n = a.shape[0]
    rank_tol = tol.pbh_tol * _norm2(a)
    eye = np.eye(n)
    for lam in np.linalg.eigvals(a):
        if lam.real < 0:
            continue
        pencil = np.hstack([a - lam * eye, b]).astype(complex)
        rank = np.linalg.matrix_rank(pencil, tol=rank_tol if rank_tol > 0 else None)
        if rank < n:
            return False
    return True


def solve_care(a, b, r, q, tol: Tolerances = DEFAULT_TOLERANCES) -> np.ndarray:
    """Stabilizing solution of ``A^T P + P A - P B R^-1 B^T P + Q = 0``.

    Parameters
    ----------
    a, b : system pair, n x n and n x m; must be stabilizable.
    r : m x m symmetric positive definite input weight.
    q : n x n symmetric positive semi-definite state weight.

    The returned P is symmetric PSD, ``A - B R^-1 B^T P`` is Hurwitz, and the
    residual satisfies ``||residual|| <= care_tol * max(1, ||P||^2)``.
    """
    a = as_matrix(a, "A")
    b = as_matrix(b, "B")
    r = as_matrix(r, "R")
    q = as_matrix(q, "Q")
    _require_square(a, "A")
    n = a.shape[0]
    if b.shape[0] != n:
        raise DimensionMismatch(f"B must have {n} rows, got {b.shape[0]}")
    m = b.shape[1]
    if r.shape != (m, m):
        raise DimensionMismatch(f"R must be {m}x{m}, got {r.shape}")
    if q.shape != (n, n):
        raise DimensionMismatch(f"Q must be {n}x{n}, got {q.shape}")
    r = _check_symmetric(r, "R", tol)
    q = _check_symmetric(q, "Q", tol)

    r_eigs = np.linalg.eigvalsh(r)
    if r_eigs[0] <= tol.psd_tol * max(abs(r_eigs[-1]), 1.0):
        raise NotPositiveDefinite("R must be positive definite")
    ok, q_min = psd_check(q, tol)
    if not ok:
        raise NotPositiveSemidefinite(
            f"Q must be positive semi-definite (min eigenvalue {q_min:.3e})"
        )
    if not is_stabilizable(a, b, tol):
        raise NotStabilizable("(A, B) fails the stabilizability rank test")

    try:
        p = scipy.linalg.solve_continuous_are(a, b, q, r)
    except (np.linalg.LinAlgError, scipy.linalg.LinAlgError) as exc:
        raise IllConditioned(f"Riccati subspace extraction failed: {exc}") from exc
    p = 0.5 * (p + p.T)

    gain_term = np.linalg.solve(r, b.T @ p)
    residual = _norm2(a.T @ p + p @ a - p @ b @ gain_term + q)
    p_norm = _norm2(p)
    if residual > tol.care_tol * max(1.0, p_norm * p_norm):
        raise IllConditioned(
            f"Riccati residual {residual:.3e} exceeds tolerance for ||P||={p_norm:.3e}"
        )
    if not is_hurwitz(a - b @ gain_term, tol):
        raise NotStabilizable("Riccati solution is not stabilizing")
    ok, p_min = psd_check(p, tol)
    if not ok:
        raise IllConditioned(
            f"Riccati solution is not PSD (min eigenvalue {p_min:.3e})"
        )
    return p
