"""Input validation helpers.

Every public entry point funnels user data through these functions so that
shape, finiteness and physical constraints are checked in one place.
"""
from __future__ import annotations

import numpy as np

from .exceptions import DimensionMismatch, InvalidSystem

HERMITIAN_TOL = 1e-10
TRACE_TOL = 1e-10
EIGEN_TOL = 1e-10
SIMPLEX_ENTRY_TOL = 1e-12
SIMPLEX_SUM_TOL = 1e-10


def as_complex_matrix(a, name: str = "matrix", dim: int | None = None) -> np.ndarray:
    """Return ``a`` as a finite square complex128 array, raising on bad input."""
    m = np.asarray(a, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] == 0:
        raise DimensionMismatch(f"{name}: expected a non-empty square matrix, got shape {m.shape}")
    if dim is not None and m.shape[0] != dim:
        raise DimensionMismatch(f"{name}: dimension mismatch, expected {dim}x{dim}, got {m.shape}")
    if not np.all(np.isfinite(m)):
        raise InvalidSystem(f"{name}: entries must be finite")
    return m


def as_real_matrix(a, name: str = "matrix") -> np.ndarray:
    m = np.asarray(a, dtype=np.float64)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionMismatch(f"{name}: expected a square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise InvalidSystem(f"{name}: entries must be finite")
    return m


def hermiticity_defect(m: np.ndarray) -> float:
    """max |M_jk - conj(M_kj)|."""
    if m.size == 0:
        return 0.0
    return float(np.max(np.abs(m - m.conj().T)))


def is_hermitian(m: np.ndarray, tol: float = HERMITIAN_TOL) -> bool:
    return hermiticity_defect(m) <= tol


def is_diagonal(m: np.ndarray, tol: float = 1e-12) -> bool:
    off = m - np.diag(np.diag(m))
    return bool(np.all(np.abs(off) <= tol))


def check_density_matrix(rho, dim: int | None = None, tol: float = HERMITIAN_TOL) -> np.ndarray:
    """Validate a density matrix: Hermitian, unit trace, positive semi-definite.

    ``tol`` applies to all three checks; integrators pass a looser value to
    absorb drift.
    """
    m = as_complex_matrix(rho, "density matrix", dim)
    herm = hermiticity_defect(m)
    if herm > tol:
        raise InvalidSystem(f"density matrix not Hermitian (defect {herm:.3e})")
    tr = np.trace(m)
    if abs(tr - 1.0) > max(tol, TRACE_TOL):
        raise InvalidSystem(f"density matrix trace is {tr.real:.12g}, expected 1")
    lo = float(np.min(np.linalg.eigvalsh((m + m.conj().T) / 2)))
    if lo < -max(tol, EIGEN_TOL):
        raise InvalidSystem(f"density matrix has negative eigenvalue {lo:.3e}")
    return m


def check_simplex_vector(lam, dim: int | None = None) -> np.ndarray:
    """Validate an eigenvalue vector on the probability simplex."""
    v = np.asarray(lam, dtype=np.float64)
    if v.ndim != 1 or v.size == 0:
        raise DimensionMismatch(f"simplex vector must be 1-d and non-empty, got shape {v.shape}")
    if dim is not None and v.size != dim:
        raise DimensionMismatch(f"simplex vector has length {v.size}, expected {dim}")
    if not np.all(np.isfinite(v)):
        raise InvalidSystem("simplex vector entries must be finite")
    if np.any(v < -SIMPLEX_ENTRY_TOL) or np.any(v > 1 + SIMPLEX_ENTRY_TOL):
        raise InvalidSystem("simplex vector entries must lie in [0, 1]")
    s = float(v.sum())
    if abs(s - 1.0) > SIMPLEX_SUM_TOL:
        raise InvalidSystem(f"simplex vector sums to {s:.12g}, expected 1")
    return v


def check_unitary(u, dim: int | None = None, tol: float = 1e-10) -> np.ndarray:
    m = as_complex_matrix(u, "basis", dim)
    defect = float(np.max(np.abs(m.conj().T @ m - np.eye(m.shape[0]))))
    if defect > tol:
        raise InvalidSystem(f"basis is not unitary (max |U^dag U - I| = {defect:.3e})")
    return m


def check_threads(threads) -> int:
    t = int(threads)
    if t < 1:
        raise ValueError("threads must be >= 1")
    return t
