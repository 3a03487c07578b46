"""Numerical ground truth independent of the graph formulas.

Fixed-step classical Runge-Kutta integration of the master equation and of
the eigenvalue flow, SVD-based kernels and elimination-based determinants.
Nothing here looks at trees or forests, so agreement with the combinatorial
results is a genuine cross-check.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

import numpy as np

from .exceptions import NonPhysicalState, StabilityGuard
from .laplacian import build_omega
from .model import LindbladSystem
from .validation import as_complex_matrix, as_real_matrix, check_density_matrix

STABILITY_LIMIT = 0.1
NEGATIVE_EIGEN_LIMIT = -1e-6
CONVERGENCE_RESIDUAL = 1e-10


def liouvillian(sys: LindbladSystem) -> np.ndarray:
    """Superoperator acting on row-major ``vec(rho)``.

    Uses ``vec(A X B) = (A kron B^T) vec(X)``.
    """
    n = sys.dim
    eye = np.eye(n)
    h = sys.hamiltonian
    sup = -1j * (np.kron(h, eye) - np.kron(eye, h.T))
    for op in sys.lindblad_ops:
        ldl = op.conj().T @ op
        sup += np.kron(op, op.conj()) - 0.5 * (np.kron(ldl, eye) + np.kron(eye, ldl.T))
    return sup


def rk4_step_matrix(generator: np.ndarray, h: float) -> np.ndarray:
    """One classical RK4 step for ``y' = G y`` written as a matrix.

    For a linear right-hand side the four stages collapse to
    ``I + hG + (hG)^2/2 + (hG)^3/6 + (hG)^4/24``.
    """
    a = h * generator
    eye = np.eye(a.shape[0], dtype=a.dtype)
    a2 = a @ a
    return eye + a + a2 / 2 + a2 @ a / 6 + a2 @ a2 / 24


def _step_count(t_end: float, dt: float) -> tuple[int, float]:
    if dt <= 0 or t_end < 0:
        raise ValueError("need dt > 0 and t_end >= 0")
    steps = int(np.ceil(t_end / dt - 1e-9)) if t_end > 0 else 0
    h = t_end / steps if steps else dt
    return steps, h


def _guard(omega: np.ndarray, dt: float) -> None:
    rate = float(np.max(np.abs(np.diag(omega)))) if omega.size else 0.0
    if dt * rate >= STABILITY_LIMIT:
        raise StabilityGuard(
            f"dt * max|Omega_kk| = {dt * rate:.4g} >= {STABILITY_LIMIT}; reduce dt below {STABILITY_LIMIT / rate:.3g}"
        )


def _record_indices(steps: int, record_every: int) -> list[int]:
    idx = list(range(0, steps + 1, max(1, int(record_every))))
    if idx[-1] != steps:
        idx.append(steps)
    return idx


@dataclass(frozen=True)
class Trajectory:
    """Recorded master-equation solution.

    ``residual`` is the Frobenius norm of ``d rho / dt`` at the final state.
    """

    times: np.ndarray
    states: np.ndarray
    residual: float

    @property
    def final(self) -> np.ndarray:
        return self.states[-1]

    @property
    def converged(self) -> bool:
        return self.residual < CONVERGENCE_RESIDUAL


def integrate_master_equation(
    sys: LindbladSystem,
    rho0,
    t_end: float,
    dt: float,
    record_every: int = 1,
) -> Trajectory:
    """Integrate the Lindblad master equation with fixed-step RK4.

    Raises :class:`StabilityGuard` when ``dt * max|Omega_kk| >= 0.1`` and
    :class:`NonPhysicalState` if a recorded state has an eigenvalue below
    ``-1e-6``.
    """
    n = sys.dim
    rho = check_density_matrix(rho0, n)
    _guard(build_omega(sys), dt)
    steps, h = _step_count(t_end, dt)
    gen = liouvillian(sys)
    prop = rk4_step_matrix(gen, h)
    keep = set(_record_indices(steps, record_every))
    y = rho.reshape(-1).copy()
    times, states = [], []
    for i in range(steps + 1):
        if i in keep:
            times.append(i * h)
            states.append(y.reshape(n, n).copy())
        if i < steps:
            y = prop @ y
    st = np.array(states)
    herm = (st + st.conj().transpose(0, 2, 1)) / 2
    lows = np.linalg.eigvalsh(herm).min(axis=1)
    bad = np.flatnonzero(lows < NEGATIVE_EIGEN_LIMIT)
    if bad.size:
        i = int(bad[0])
        raise NonPhysicalState(f"eigenvalue {lows[i]:.3e} at t = {times[i]:.6g}")
    residual = float(np.linalg.norm(gen @ y))
    return Trajectory(np.array(times), st, residual)


@dataclass(frozen=True)
class LambdaTrajectory:
    times: np.ndarray
    states: np.ndarray

    @property
    def final(self) -> np.ndarray:
        return self.states[-1]


def integrate_lambda(omega, lambda0, t_end: float, dt: float, record_every: int = 1) -> LambdaTrajectory:
    """RK4 on ``d Lambda / dt = Omega Lambda``."""
    om = as_real_matrix(omega, "rate matrix")
    lam = np.asarray(lambda0, dtype=np.float64)
    if lam.shape != (om.shape[0],):
        raise ValueError(f"lambda0 has shape {lam.shape}, expected ({om.shape[0]},)")
    _guard(om, dt)
    steps, h = _step_count(t_end, dt)
    prop = rk4_step_matrix(om, h)
    keep = set(_record_indices(steps, record_every))
    times, states = [], []
    y = lam.copy()
    for i in range(steps + 1):
        if i in keep:
            times.append(i * h)
            states.append(y.copy())
        if i < steps:
            y = prop @ y
    return LambdaTrajectory(np.array(times), np.array(states))


def numerical_kernel(matrix, tol: float | None = None) -> tuple[int, np.ndarray]:
    """Rank and orthonormal kernel basis (as columns) from an SVD.

    Singular values at or below ``tol`` count as zero; the default is
    ``n * eps * sigma_max``.
    """
    a = np.asarray(matrix)
    if a.ndim != 2 or not np.all(np.isfinite(a)):
        raise ValueError("expected a finite 2-d matrix")
    if a.size == 0:
        return 0, np.zeros((a.shape[1], a.shape[1]))
    _, s, vh = np.linalg.svd(a)
    if tol is None:
        tol = max(a.shape) * np.finfo(float).eps * (s[0] if s.size else 0.0)
    rank = int(np.sum(s > tol))
    return rank, vh[rank:].conj().T


def kernel_dimension(matrix, tol: float | None = None) -> int:
    rank, _ = numerical_kernel(matrix, tol)
    return np.asarray(matrix).shape[1] - rank


def _submatrix(omega: np.ndarray, removed: Iterable[int]) -> np.ndarray:
    rm = set(int(i) for i in removed)
    keep = [i for i in range(omega.shape[0]) if i not in rm]
    return omega[np.ix_(keep, keep)]


def det_partial_pivot(a: np.ndarray) -> float:
    """Determinant by Gaussian elimination with partial pivoting."""
    m = np.array(a, dtype=np.float64)
    n = m.shape[0]
    det = 1.0
    for c in range(n):
        p = c + int(np.argmax(np.abs(m[c:, c])))
        if m[p, c] == 0.0:
            return 0.0
        if p != c:
            m[[c, p]] = m[[p, c]]
            det = -det
        det *= m[c, c]
        m[c + 1:, c:] -= np.outer(m[c + 1:, c] / m[c, c], m[c, c:])
    return float(det)


def det_bareiss(a) -> int:
    """Exact determinant of an integer matrix by fraction-free elimination."""
    m = [[int(x) for x in row] for row in a]
    n = len(m)
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if m[i][k] != 0), None)
            if swap is None:
                return 0
            m[k], m[swap] = m[swap], m[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


def minor_determinant(omega, removed: Iterable[int], exact: bool = False):
    """``det`` of ``omega`` with the rows and columns in ``removed`` deleted.

    With ``exact=True`` and integral entries the result is an exact ``int``.
    """
    om = as_real_matrix(omega, "rate matrix")
    rm = set(int(i) for i in removed)
    n = om.shape[0]
    if not rm or len(rm) >= n + 1 or not rm <= set(range(n)):
        raise ValueError("removed must be a non-empty subset of the vertices")
    sub = _submatrix(om, rm)
    if exact:
        if not np.all(np.equal(np.mod(sub, 1), 0)):
            raise ValueError("exact determinant requires integral entries")
        return det_bareiss(sub.astype(object))
    if sub.size == 0:
        return 1.0
    return det_partial_pivot(sub)


def trace_distance(a, b) -> float:
    d = as_complex_matrix(a) - as_complex_matrix(b)
    d = (d + d.conj().T) / 2
    return 0.5 * float(np.sum(np.abs(np.linalg.eigvalsh(d))))


def trajectory_csv_header(n: int) -> list[str]:
    cols = ["t"]
    for j in range(n):
        for k in range(n):
            cols += [f"re_rho_{j + 1}_{k + 1}", f"im_rho_{j + 1}_{k + 1}"]
    return cols


def write_trajectory_csv(traj: Trajectory, path) -> None:
    """Columns: ``t`` then real/imaginary parts of ``rho`` in row-major order."""
    n = traj.states.shape[1]
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(trajectory_csv_header(n))
        for t, rho in zip(traj.times, traj.states):
            row = [repr(float(t))]
            for z in rho.reshape(-1):
                row += [repr(float(z.real)), repr(float(z.imag))]
            w.writerow(row)


def as_fraction(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)
