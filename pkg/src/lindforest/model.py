"""Lindblad systems and generalized permutation matrices (GPMs).

A GPM has at most one non-zero entry in every row and column, and factors as
``L = A @ D`` with ``A`` a permutation matrix and ``D`` diagonal.  When some
columns are empty the factorization is not unique; :func:`gpm_decompose`
picks the canonical permutation for which every cycle carries at most one
zero diagonal entry.

Indices are 0-based throughout the library.  The permutation is stored as an
array ``sigma`` with ``sigma[j]`` equal to the row holding column ``j``'s
entry, so population on level ``j`` is moved to level ``sigma[j]``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .exceptions import NotGPM
from .validation import HERMITIAN_TOL, hermiticity_defect

GPM_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class LindbladSystem:
    """Hamiltonian plus Lindblad operators of a Markovian open system.

    The constructor only coerces arrays to ``complex128``; call
    :func:`validate_system` (or :meth:`check`) to verify the invariants.
    """

    hamiltonian: np.ndarray
    lindblad_ops: tuple
    labels: tuple | None = None

    def __post_init__(self):
        h = np.array(self.hamiltonian, dtype=np.complex128)
        h.setflags(write=False)
        ops = []
        for op in self.lindblad_ops:
            a = np.array(op, dtype=np.complex128)
            a.setflags(write=False)
            ops.append(a)
        object.__setattr__(self, "hamiltonian", h)
        object.__setattr__(self, "lindblad_ops", tuple(ops))
        if self.labels is not None:
            object.__setattr__(self, "labels", tuple(str(s) for s in self.labels))

    @classmethod
    def from_diagonal(cls, energies: Sequence[float], lindblad_ops, labels=None) -> "LindbladSystem":
        return cls(np.diag(np.asarray(energies, dtype=np.complex128)), tuple(lindblad_ops), labels)

    @property
    def dim(self) -> int:
        return int(self.hamiltonian.shape[0]) if self.hamiltonian.ndim == 2 else 0

    def check(self) -> "LindbladSystem":
        """Raise :class:`InvalidSystem` listing every violation, else return self."""
        from .exceptions import DimensionMismatch, InvalidSystem

        report = validate_system(self)
        if report:
            exc = DimensionMismatch if all("dimension" in r for r in report) else InvalidSystem
            raise exc("; ".join(report))
        return self

    def __eq__(self, other):
        if not isinstance(other, LindbladSystem):
            return NotImplemented
        return (
            self.labels == other.labels
            and np.array_equal(self.hamiltonian, other.hamiltonian)
            and len(self.lindblad_ops) == len(other.lindblad_ops)
            and all(np.array_equal(a, b) for a, b in zip(self.lindblad_ops, other.lindblad_ops))
        )

    __hash__ = None


def validate_system(sys: LindbladSystem) -> list[str]:
    """Return a list of human-readable invariant violations (empty if valid)."""
    report: list[str] = []
    h = sys.hamiltonian
    if h.ndim != 2 or h.shape[0] != h.shape[1] or h.shape[0] == 0:
        report.append(f"hamiltonian: dimension mismatch, expected a non-empty square matrix, got shape {h.shape}")
        return report
    n = h.shape[0]
    if not np.all(np.isfinite(h)):
        report.append("hamiltonian: entries not finite")
    else:
        defect = hermiticity_defect(h)
        if defect > HERMITIAN_TOL:
            report.append(f"hamiltonian not Hermitian (max |H_jk - conj(H_kj)| = {defect:.3e})")
    if len(sys.lindblad_ops) == 0:
        report.append("lindblad_ops: list is empty")
    for i, op in enumerate(sys.lindblad_ops):
        if op.shape != (n, n):
            report.append(f"lindblad_ops[{i}]: dimension mismatch, expected {n}x{n}, got {op.shape}")
        elif not np.all(np.isfinite(op)):
            report.append(f"lindblad_ops[{i}]: entries not finite")
    if sys.labels is not None and len(sys.labels) != n:
        report.append(f"labels: dimension mismatch, expected {n} labels, got {len(sys.labels)}")
    return report


def is_gpm(L, tol: float = GPM_TOL) -> bool:
    """True iff every row and column has at most one entry of modulus > tol."""
    nz = np.abs(np.asarray(L)) > tol
    return bool(np.all(nz.sum(axis=0) <= 1) and np.all(nz.sum(axis=1) <= 1))


@dataclass(frozen=True)
class GPMDecomposition:
    """Canonical ``L = A @ D`` factorization of a generalized permutation matrix."""

    permutation: tuple[int, ...]
    diag: np.ndarray = field(repr=False)
    cycles: tuple[tuple[int, ...], ...]
    rank_deficiency: int

    @property
    def dim(self) -> int:
        return len(self.permutation)

    @property
    def cycle_lengths(self) -> tuple[int, ...]:
        return tuple(len(c) for c in self.cycles)

    def permutation_matrix(self) -> np.ndarray:
        n = self.dim
        a = np.zeros((n, n))
        a[list(self.permutation), range(n)] = 1.0
        return a

    def reconstruct(self) -> np.ndarray:
        return self.permutation_matrix() @ np.diag(self.diag)


def _cycles_of(sigma: Sequence[int]) -> tuple[tuple[int, ...], ...]:
    seen = [False] * len(sigma)
    out = []
    for start in range(len(sigma)):
        if seen[start]:
            continue
        cyc = []
        j = start
        while not seen[j]:
            seen[j] = True
            cyc.append(j)
            j = sigma[j]
        out.append(tuple(cyc))
    return tuple(out)


def gpm_decompose(L, tol: float = GPM_TOL) -> GPMDecomposition:
    """Factor a GPM as ``A @ D`` with at most one zero of ``D`` per cycle of ``A``.

    Non-empty column ``j`` fixes ``sigma[j]`` to its row.  The remaining
    columns end chains ``k_l -> ... -> k_1`` of the auxiliary digraph
    (edge ``k -> j`` iff ``L[j, k] != 0``, ``j != k``); each chain is closed
    into a cycle by sending its empty column ``k_1`` back to the chain start
    ``k_l``, whose row is empty.  Isolated empty columns become fixed points.
    """
    L = np.asarray(L, dtype=np.complex128)
    if L.ndim != 2 or L.shape[0] != L.shape[1]:
        raise NotGPM(f"expected a square matrix, got shape {L.shape}")
    if not is_gpm(L, tol):
        raise NotGPM("matrix has a row or column with more than one non-zero entry")
    n = L.shape[0]
    nz = np.abs(L) > tol
    sigma = [-1] * n
    pred = [-1] * n
    diag = np.zeros(n, dtype=np.complex128)
    for j in range(n):
        rows = np.flatnonzero(nz[:, j])
        if rows.size:
            r = int(rows[0])
            sigma[j] = r
            diag[j] = L[r, j]
            if r != j:
                pred[r] = j
    empty = [j for j in range(n) if sigma[j] < 0]
    for k1 in empty:
        start = k1
        while pred[start] >= 0:
            start = pred[start]
        sigma[k1] = start
    return GPMDecomposition(tuple(sigma), diag, _cycles_of(sigma), len(empty))


def permutation_from_cycles(cycles: Sequence[Sequence[int]], n: int, direction: str) -> tuple[int, ...]:
    """Build a permutation array from cycle notation.

    ``direction="forward"`` reads ``(k1 k2 ... kl)`` as ``k1 -> k2 -> ... -> k1``;
    ``direction="backward"`` reads it as ``k2 -> k1``, ``k3 -> k2``, ...,
    ``k1 -> kl``.  Cycle entries use the same index base as the caller
    (0-based); there is no default because published cycle notation is
    ambiguous about which way population moves.
    """
    if direction not in ("forward", "backward"):
        raise ValueError("direction must be 'forward' or 'backward'")
    sigma = list(range(n))
    seen: set[int] = set()
    for cyc in cycles:
        cyc = [int(c) for c in cyc]
        if any(c in seen or not 0 <= c < n for c in cyc):
            raise ValueError(f"invalid or overlapping cycle {cyc}")
        seen.update(cyc)
        m = len(cyc)
        for i, c in enumerate(cyc):
            nxt = cyc[(i + 1) % m]
            if direction == "forward":
                sigma[c] = nxt
            else:
                sigma[nxt] = c
    return tuple(sigma)


def gpm_from_permutation(sigma: Sequence[int], diag) -> np.ndarray:
    """Return ``A @ diag(D)`` with ``A[sigma[j], j] = 1``."""
    n = len(sigma)
    d = np.asarray(diag, dtype=np.complex128)
    L = np.zeros((n, n), dtype=np.complex128)
    L[list(sigma), range(n)] = d
    return L
