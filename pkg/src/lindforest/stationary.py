"""Stationary orbits, conserved quantities and asymptotic states.

Per basin the stationary eigenvalue vector is proportional to the rooted
in-tree sums of the basin.  The conserved quantities are built from forests
of the pruned graph, in which every basin vertex is a root and the decay
vertices each pick one outgoing edge.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .exceptions import LindForestError, MethodDisagreement, NotInLeftKernel, RankMismatch
from .graph import BasinDecomposition, enumerate_basin_forests, tree_sum
from .laplacian import ProjectorFamily, RateGraph
from .oracle import det_bareiss, det_partial_pivot, numerical_kernel
from .validation import check_simplex_vector, check_threads

METHOD_RTOL = 1e-9
KERNEL_RTOL = 1e-9


@dataclass(frozen=True, eq=False)
class StationaryOrbit:
    """Stationary eigenvalue vector of one basin.

    ``numerators[j]`` is the in-tree sum rooted at ``j`` (zero off the
    basin) and ``denominator`` their total.  With integral weights both are
    exact ``int`` and :attr:`exact` gives the entries as fractions.
    """

    eta: int
    vertices: tuple[int, ...]
    numerators: tuple
    denominator: int | float

    @property
    def lambda_inf(self) -> np.ndarray:
        return np.array([float(Fraction(x) / Fraction(self.denominator)) if isinstance(x, int) else x / self.denominator
                         for x in self.numerators])

    @property
    def exact(self) -> tuple[Fraction, ...] | None:
        if isinstance(self.denominator, int):
            return tuple(Fraction(x, self.denominator) for x in self.numerators)
        return None


@dataclass(frozen=True, eq=False)
class ConstraintVector:
    """Left kernel vector ``kappa`` of the rate matrix attached to basin ``eta``."""

    eta: int
    kappa: tuple
    variant: str
    common: int | float

    def as_array(self) -> np.ndarray:
        return np.array([float(x) for x in self.kappa])


def kernel_rank(omega, basins: BasinDecomposition) -> tuple[int, int]:
    """``(n - n_B, n_B)``, confirmed against an SVD of ``omega``."""
    om = np.asarray(omega, dtype=np.float64)
    n = om.shape[0]
    expected = n - basins.n_basins
    if n == basins.n and np.all(om == 0):
        numeric = 0
    else:
        numeric, _ = numerical_kernel(om)
    if numeric != expected:
        raise RankMismatch(f"numerical rank {numeric} differs from n - n_B = {expected}")
    return expected, basins.n_basins


def _block(g: RateGraph, vertices: Sequence[int], drop: int) -> np.ndarray:
    keep = [v for v in vertices if v != drop]
    lap = g.laplacian()
    return lap[np.ix_(keep, keep)]


def _det_tree_sum(g: RateGraph, vertices: Sequence[int], root: int):
    sub = _block(g, vertices, root)
    if sub.size == 0:
        return 1 if g.integral else 1.0
    if g.integral:
        return abs(det_bareiss(np.rint(sub).astype(np.int64).tolist()))
    return abs(det_partial_pivot(sub))


def _close(a, b, rtol: float) -> bool:
    return abs(float(a) - float(b)) <= rtol * max(abs(float(a)), abs(float(b)), 1e-300)


def _map(fn, items, threads: int):
    items = list(items)
    if threads <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as ex:
        return list(ex.map(fn, items))


def stationary_orbits(
    g: RateGraph,
    basins: BasinDecomposition,
    method: str = "enumerate",
    threads: int = 1,
) -> list[StationaryOrbit]:
    """Stationary eigenvalue vector of every basin.

    ``method`` is ``"enumerate"`` (in-tree enumeration), ``"determinant"``
    (absolute principal minors of the basin block) or ``"both"``, which
    computes both and raises :class:`MethodDisagreement` if any tree sum
    differs by more than relative 1e-9.
    """
    if method not in ("enumerate", "determinant", "both"):
        raise ValueError("method must be 'enumerate', 'determinant' or 'both'")
    threads = check_threads(threads)
    jobs = [(eta, b, r) for eta, b in enumerate(basins.basins) for r in b]

    def run(job):
        _, b, r = job
        enum = tree_sum(g, b, r) if method in ("enumerate", "both") else None
        det = _det_tree_sum(g, b, r) if method in ("determinant", "both") else None
        if enum is not None and det is not None and not _close(enum, det, METHOD_RTOL):
            raise MethodDisagreement(f"root {r + 1}: enumeration {enum} vs determinant {det}")
        return enum if enum is not None else det

    sums = _map(run, jobs, threads)
    per_root = {r: s for (_, _, r), s in zip(jobs, sums)}
    zero = 0 if g.integral else 0.0
    out = []
    for eta, b in enumerate(basins.basins):
        nums = [per_root.get(v, zero) if v in b else zero for v in range(g.n)]
        den = sum((per_root[v] for v in b), start=zero)
        if den == 0:
            raise LindForestError(f"basin {eta + 1} has no spanning in-tree")
        out.append(StationaryOrbit(eta, tuple(b), tuple(nums), den))
    return out


def _check_left_kernel(kappa: np.ndarray, omega: np.ndarray, eta: int) -> None:
    res = kappa @ omega
    bound = KERNEL_RTOL * np.linalg.norm(kappa) * max(np.linalg.norm(omega), 1e-300)
    if np.linalg.norm(res) > bound:
        raise NotInLeftKernel(f"basin {eta + 1}: |kappa^T Omega| = {np.linalg.norm(res):.3e} exceeds {bound:.3e}")


def constraint_vectors(g: RateGraph, basins: BasinDecomposition, variant: str = "pruned") -> list[ConstraintVector]:
    """Conserved-quantity vectors, one per basin.

    Entries on ``N_eta`` carry the total forest weight, entries on other
    basins are zero and a decay vertex ``l`` gets the weight of the forests
    in which ``l`` drains into ``N_eta``.  ``variant="pruned"`` uses forests
    of the graph with basin-internal edges removed; ``variant="full"`` spans
    every basin by an in-tree as well.
    """
    if variant not in ("pruned", "full"):
        raise ValueError("variant must be 'pruned' or 'full'")
    forests = enumerate_basin_forests(g, basins, mode=variant)
    zero = 0 if g.integral else 0.0
    total = sum((f.weight for f in forests), start=zero)
    omega = g.laplacian()
    out = []
    for eta, b in enumerate(basins.basins):
        kap = [zero] * g.n
        for v in b:
            kap[v] = total
        for l in basins.non_basin:
            kap[l] = sum((f.weight for f in forests if f.classification[l] == eta), start=zero)
        cv = ConstraintVector(eta, tuple(kap), variant, total)
        _check_left_kernel(cv.as_array(), omega, eta)
        out.append(cv)
    return out


def asymptotic_state(
    g: RateGraph,
    basins: BasinDecomposition,
    lambda0,
    proj: ProjectorFamily | None = None,
    orbits: Sequence[StationaryOrbit] | None = None,
    constraints: Sequence[ConstraintVector] | None = None,
):
    """Return ``(c, rho_inf)`` for initial eigenvalues ``lambda0``.

    ``c[eta]`` is the weight the final state puts on basin ``eta``.  If
    ``lambda0`` holds :class:`~fractions.Fraction` entries and the graph is
    integral, ``c`` is returned as exact fractions.
    """
    exact = g.integral and any(isinstance(x, Fraction) for x in lambda0) and all(isinstance(x, (Fraction, int)) for x in lambda0)
    if exact:
        lam = [Fraction(x) for x in lambda0]
        if len(lam) != g.n or sum(lam) != 1 or any(x < 0 for x in lam):
            raise ValueError("exact lambda0 must be a probability vector of length n")
    else:
        lam = list(check_simplex_vector(lambda0, g.n))
    if orbits is None:
        orbits = stationary_orbits(g, basins)
    if constraints is None:
        constraints = constraint_vectors(g, basins, "pruned")
    c = []
    for eta, b in enumerate(basins.basins):
        kv = constraints[eta]
        if exact:
            val = sum((lam[j] for j in b), start=Fraction(0))
            val += sum((Fraction(kv.kappa[l]) * lam[l] for l in basins.non_basin), start=Fraction(0)) / Fraction(kv.common)
        else:
            val = sum(lam[j] for j in b) + sum(float(kv.kappa[l]) * lam[l] for l in basins.non_basin) / float(kv.common)
        c.append(val)
    if proj is None:
        proj = ProjectorFamily.identity(g.n)
    pops = np.zeros(g.n)
    for eta, orb in enumerate(orbits):
        pops += float(c[eta]) * orb.lambda_inf
    return c, proj.from_populations(pops)
