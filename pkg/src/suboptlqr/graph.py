"""Undirected graphs, Laplacians, and their spectral decompositions."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidGraph, NotConnected
from .matops import symmetric_eigen
from .tolerances import DEFAULT_TOLERANCES, Tolerances


@dataclass
class UndirectedGraph:
    """Simple undirected graph on nodes 1..node_count (no loops, no multi-edges).

    Edges are unordered pairs of 1-based node indices, as they appear in
    problem configuration files.
    """

    node_count: int
    edges: list[tuple[int, int]] = field(default_factory=list)

    def __post_init__(self):
        if int(self.node_count) != self.node_count or self.node_count < 2:
            raise InvalidGraph(f"node_count must be an integer >= 2, got {self.node_count}")
        self.node_count = int(self.node_count)
        normalized: list[tuple[int, int]] = []
        seen: set[tuple[int, int]] = set()
        for edge in self.edges:
            try:
                i, j = edge[0], edge[1]
            except (TypeError, IndexError):
                raise InvalidGraph(f"edge {edge!r} is not a pair of node indices") from None
            if int(i) != i or int(j) != j:
                raise InvalidGraph(f"edge {edge!r} has non-integer node indices")
            i, j = int(i), int(j)
            if i == j:
                raise InvalidGraph(f"self-loop at node {i}")
            if not (1 <= i <= self.node_count and 1 <= j <= self.node_count):
                raise InvalidGraph(
                    f"edge ({i}, {j}) references a node outside 1..{self.node_count}"
                )
            key = (min(i, j), max(i, j))
            if key in seen:
                raise InvalidGraph(f"duplicate edge ({key[0]}, {key[1]})")
            seen.add(key)
            normalized.append(key)
        self.edges = normalized

    @classmethod
    def path(cls, n: int) -> "UndirectedGraph":
        """Line graph 1-2-...-n."""
        return cls(n, [(i, i + 1) for i in range(1, n)])

    @classmethod
    def complete(cls, n: int) -> "UndirectedGraph":
        return cls(n, [(i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1)])


def laplacian(g: UndirectedGraph) -> np.ndarray:
    """Laplacian L = degree - adjacency; symmetric with zero row sums."""
    n = g.node_count
    lap = np.zeros((n, n))
    for i, j in g.edges:
        lap[i - 1, i - 1] += 1.0
        lap[j - 1, j - 1] += 1.0
        lap[i - 1, j - 1] -= 1.0
        lap[j - 1, i - 1] -= 1.0
    return lap


@dataclass
class LaplacianSpectrum:
    """Laplacian together with its ordered eigenvalues and diagonalizer.

    ``lambdas`` is ascending with lambdas[0] ~ 0; ``U`` is orthogonal with
    ``U^T L U = diag(lambdas)`` and first column fixed to +1/sqrt(N).
    """

    L: np.ndarray
    lambdas: np.ndarray
    U: np.ndarray

    @property
    def node_count(self) -> int:
        return self.L.shape[0]

    @property
    def lambda2(self) -> float:
        return float(self.lambdas[1])

    @property
    def lambda_max(self) -> float:
        return float(self.lambdas[-1])


def spectrum(g: UndirectedGraph, tol: Tolerances = DEFAULT_TOLERANCES) -> LaplacianSpectrum:
    """Spectral decomposition of the graph Laplacian.

    Raises NotConnected when the second-smallest eigenvalue is zero within
    ``conn_tol * lambda_N`` (zero is a simple eigenvalue only for connected
    graphs).
    """
    lap = laplacian(g)
    eig = symmetric_eigen(lap, tol)
    lambdas, u = eig.eigenvalues, eig.vectors
    lam_max = float(lambdas[-1])
    if float(lambdas[1]) <= tol.conn_tol * lam_max:
        raise NotConnected(
            f"graph is not connected (algebraic connectivity {lambdas[1]:.3e})"
        )
    # deterministic fixture convention: consensus direction has positive sign
    if u[:, 0].sum() < 0:
        u = u.copy()
        u[:, 0] = -u[:, 0]
    return LaplacianSpectrum(L=lap, lambdas=lambdas, U=u)


def disagreement_projector(n: int) -> np.ndarray:
    """Projector I - (1/n) 11^T onto the orthogonal complement of consensus."""
    if n < 1:
        raise InvalidGraph(f"projector needs n >= 1, got {n}")
    return np.eye(n) - np.full((n, n), 1.0 / n)
