"""Rate matrix of the eigenvalue flow and its weighted digraph.

For rank-one projectors ``pi_j = u_j u_j^dag`` the off-diagonal rates are

    w[j, k] = sum_alpha Tr(pi_j L_alpha pi_k L_alpha^dag)
            = sum_alpha |<u_j| L_alpha |u_k>|^2,

the rate at which population moves from level ``k`` to level ``j``.  The
diagonal makes every column sum to zero.  The Hamiltonian does not enter.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .exceptions import DimensionMismatch
from .model import LindbladSystem
from .validation import as_real_matrix, check_unitary

EDGE_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class ProjectorFamily:
    """Orthonormal basis whose columns define rank-one projectors."""

    basis: np.ndarray

    def __post_init__(self):
        u = check_unitary(self.basis)
        u.setflags(write=False)
        object.__setattr__(self, "basis", u)

    @classmethod
    def identity(cls, n: int) -> "ProjectorFamily":
        return cls(np.eye(n, dtype=np.complex128))

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    def projector(self, j: int) -> np.ndarray:
        u = self.basis[:, j]
        return np.outer(u, u.conj())

    def is_identity(self) -> bool:
        return bool(np.array_equal(self.basis, np.eye(self.dim)))

    def to_basis(self, op: np.ndarray) -> np.ndarray:
        """Matrix elements ``<u_j| op |u_k>``."""
        return self.basis.conj().T @ op @ self.basis

    def from_populations(self, p) -> np.ndarray:
        """``sum_j p_j pi_j``."""
        p = np.asarray(p, dtype=np.float64)
        return (self.basis * p) @ self.basis.conj().T


def build_omega(sys: LindbladSystem, proj: ProjectorFamily | None = None) -> np.ndarray:
    """Return the real rate matrix ``Omega`` for ``sys`` under ``proj``."""
    n = sys.dim
    if proj is None:
        proj = ProjectorFamily.identity(n)
    if proj.dim != n:
        raise DimensionMismatch(f"projector family has dimension {proj.dim}, system has {n}")
    w = np.zeros((n, n))
    for op in sys.lindblad_ops:
        if op.shape != (n, n):
            raise DimensionMismatch(f"Lindblad operator has shape {op.shape}, expected {(n, n)}")
        m = op if proj.is_identity() else proj.to_basis(op)
        w += np.abs(m) ** 2
    np.fill_diagonal(w, 0.0)
    omega = w - np.diag(w.sum(axis=0))
    return omega


def check_rate_matrix(omega, tol: float = 1e-10) -> np.ndarray:
    """Validate a rate matrix: non-negative off-diagonal, zero column sums."""
    om = as_real_matrix(omega, "rate matrix")
    off = om - np.diag(np.diag(om))
    if np.any(off < 0):
        raise ValueError("rate matrix has a negative off-diagonal entry")
    scale = max(1.0, float(np.max(np.abs(om)))) if om.size else 1.0
    if om.size and np.max(np.abs(om.sum(axis=0))) > tol * scale:
        raise ValueError("rate matrix columns do not sum to zero")
    return om


@dataclass(frozen=True, eq=False)
class RateGraph:
    """Weighted digraph with an edge ``k -> j`` for every rate ``w[j, k] > edge_tol``.

    ``weights[j, k]`` holds the weight of edge ``k -> j`` (zero when absent),
    mirroring the layout of the rate matrix.
    """

    n: int
    edges: tuple[tuple[int, int, float], ...]

    @cached_property
    def weights(self) -> np.ndarray:
        w = np.zeros((self.n, self.n))
        for s, t, x in self.edges:
            w[t, s] = x
        return w

    @cached_property
    def _out(self) -> tuple[tuple[tuple[int, float], ...], ...]:
        out: list[list[tuple[int, float]]] = [[] for _ in range(self.n)]
        for s, t, x in self.edges:
            out[s].append((t, x))
        return tuple(tuple(o) for o in out)

    def out_edges(self, v: int) -> tuple[tuple[int, float], ...]:
        """Outgoing ``(target, weight)`` pairs of ``v`` in ascending target order."""
        return self._out[v]

    def successors(self, v: int) -> list[int]:
        return [t for t, _ in self._out[v]]

    @cached_property
    def integral(self) -> bool:
        """True when every weight is an exact integer (enables exact arithmetic)."""
        return all(float(x).is_integer() for _, _, x in self.edges)

    def weight(self, source: int, target: int):
        """Edge weight as ``int`` on integral graphs, ``float`` otherwise."""
        x = self.weights[target, source]
        return int(x) if self.integral else float(x)

    def laplacian(self) -> np.ndarray:
        """Rate matrix rebuilt from the edges (diagonal = minus out-weight)."""
        w = self.weights
        return w - np.diag(w.sum(axis=0))

    def subgraph(self, keep_edge) -> "RateGraph":
        return RateGraph(self.n, tuple(e for e in self.edges if keep_edge(e)))


def build_rate_graph(omega, edge_tol: float = EDGE_TOL) -> RateGraph:
    """One edge per off-diagonal entry above ``edge_tol``, sorted by (source, target)."""
    om = as_real_matrix(omega, "rate matrix")
    n = om.shape[0]
    edges = [
        (k, j, float(om[j, k]))
        for k in range(n)
        for j in range(n)
        if j != k and om[j, k] > edge_tol
    ]
    return RateGraph(n, tuple(edges))
