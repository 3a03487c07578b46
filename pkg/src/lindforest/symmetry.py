"""Hidden enclosures of GPM systems.

A uniform equivalence relation on the levels induces a coherence graph on
ordered pairs of equivalent levels.  Each Lindblad operator maps the pair
``(j, k)`` to ``(sigma(j), sigma(k))`` and multiplies the coherence by the
unit phase ``D_j conj(D_k) / |D_j D_k|``.  A component is resonant when those
phases come from a potential ``f`` on its nodes, and resonance is equivalent
to a non-trivial kernel of the restricted coherence dynamics ``A~``.
"""
from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field
from math import factorial
from typing import Iterator, Sequence

import numpy as np

from .exceptions import NonUniformRelation, NotGPM, SearchSpaceExceeded
from .graph import BasinDecomposition, decompose_basins, strongly_connected_components
from .laplacian import build_omega, build_rate_graph
from .model import GPM_TOL, GPMDecomposition, LindbladSystem, gpm_decompose
from .oracle import numerical_kernel
from .validation import is_diagonal

SYMMETRY_TOL = 1e-10
PHASE_TOL = 1e-9
MAX_CANDIDATES = 10**6


@dataclass(frozen=True)
class EquivalenceRelation:
    """Partition of a subset ``domain`` of the levels into classes.

    Classes are stored sorted and ordered by smallest element.  With
    ``uniform=True`` (the default) all classes must have the same size.
    """

    classes: tuple[tuple[int, ...], ...]
    uniform: bool = True

    def __post_init__(self):
        cls = tuple(sorted((tuple(sorted(int(v) for v in c)) for c in self.classes), key=lambda c: c[0] if c else -1))
        if any(len(c) == 0 for c in cls):
            raise ValueError("equivalence classes must be non-empty")
        flat = [v for c in cls for v in c]
        if len(flat) != len(set(flat)):
            raise ValueError("equivalence classes overlap")
        if any(v < 0 for v in flat):
            raise ValueError("vertex indices must be non-negative")
        object.__setattr__(self, "classes", cls)
        if self.uniform and len({len(c) for c in cls}) > 1:
            raise NonUniformRelation(f"class sizes differ: {sorted({len(c) for c in cls})}")

    @classmethod
    def from_one_based(cls, classes, uniform: bool = True) -> "EquivalenceRelation":
        return cls(tuple(tuple(int(v) - 1 for v in c) for c in classes), uniform)

    @property
    def domain(self) -> tuple[int, ...]:
        return tuple(sorted(v for c in self.classes for v in c))

    @property
    def mu(self) -> int:
        return len(self.classes)

    @property
    def nu(self) -> int:
        return len(self.classes[0]) if self.classes else 0

    @property
    def class_of(self) -> dict[int, int]:
        return {v: i for i, c in enumerate(self.classes) for v in c}

    def related(self, j: int, k: int) -> bool:
        m = self.class_of
        return j in m and k in m and m[j] == m[k]

    def one_based(self) -> list[list[int]]:
        return [[v + 1 for v in c] for c in self.classes]


def _decompositions(sys: LindbladSystem, tol: float = GPM_TOL) -> list[GPMDecomposition]:
    if not is_diagonal(sys.hamiltonian, SYMMETRY_TOL):
        raise NotGPM("hamiltonian is not diagonal")
    out = []
    for i, op in enumerate(sys.lindblad_ops):
        try:
            out.append(gpm_decompose(op, tol))
        except NotGPM as exc:
            raise NotGPM(f"lindblad_ops[{i}]: {exc}") from None
    return out


@dataclass(frozen=True)
class SymmetryReport:
    hamiltonian_ok: bool
    dissipation_ok: bool
    violations: tuple[str, ...] = ()

    @property
    def ok(self) -> bool:
        return self.hamiltonian_ok and self.dissipation_ok


def verify_symmetry(
    sys: LindbladSystem,
    rel: EquivalenceRelation,
    basins: BasinDecomposition | None = None,
    tol: float = SYMMETRY_TOL,
) -> SymmetryReport:
    """Check the Hamiltonian and dissipation symmetry conditions for ``rel``.

    Dissipation symmetry asks for equal ``|D_{alpha,j}|`` on every class and
    for ``sigma_alpha`` to map related levels to related levels whenever
    both images lie in a basin.
    """
    if not rel.uniform:
        raise NonUniformRelation("relation is not uniform")
    decs = _decompositions(sys)
    if basins is None:
        basins = decompose_basins(build_rate_graph(build_omega(sys)))
    if max(rel.domain, default=-1) >= sys.dim:
        raise ValueError("relation refers to a level outside the system")
    h = np.real(np.diag(sys.hamiltonian))
    in_b = basins.basin_vertices
    cls = rel.class_of
    bad: list[str] = []
    ham_ok = True
    for c in rel.classes:
        for j, k in itertools.combinations(c, 2):
            if abs(h[j] - h[k]) > tol:
                ham_ok = False
                bad.append(f"H_{j + 1} = {h[j]:.12g} differs from H_{k + 1} = {h[k]:.12g}")
    dis_ok = True
    for a, dec in enumerate(decs):
        mags = np.abs(dec.diag)
        for c in rel.classes:
            for j, k in itertools.combinations(c, 2):
                if abs(mags[j] - mags[k]) > tol:
                    dis_ok = False
                    bad.append(f"|D_{a + 1},{j + 1}| = {mags[j]:.12g} differs from |D_{a + 1},{k + 1}| = {mags[k]:.12g}")
                sj, sk = dec.permutation[j], dec.permutation[k]
                if sj in in_b and sk in in_b and not (sj in cls and sk in cls and cls[sj] == cls[sk]):
                    dis_ok = False
                    bad.append(f"sigma_{a + 1} maps related {j + 1}, {k + 1} to unrelated {sj + 1}, {sk + 1}")
    return SymmetryReport(ham_ok, dis_ok, tuple(bad))


@dataclass(frozen=True)
class CoherenceEdge:
    source: tuple[int, int]
    target: tuple[int, int]
    alpha: int
    weight: complex


@dataclass(frozen=True, eq=False)
class CoherenceGraph:
    """Induced coherence graph of a relation.

    ``components`` are the weakly connected components, each a sorted tuple
    of nodes, ordered by smallest node.
    """

    nodes: tuple[tuple[int, int], ...]
    edges: tuple[CoherenceEdge, ...]
    components: tuple[tuple[tuple[int, int], ...], ...]
    relation: EquivalenceRelation
    decompositions: tuple[GPMDecomposition, ...] = field(repr=False)

    @property
    def index(self) -> dict[tuple[int, int], int]:
        return {v: i for i, v in enumerate(self.nodes)}

    def component_edges(self, comp: int) -> list[CoherenceEdge]:
        members = set(self.components[comp])
        return [e for e in self.edges if e.source in members]

    def strongly_connected(self, comp: int) -> bool:
        members = list(self.components[comp])
        idx = {v: i for i, v in enumerate(members)}
        succ: list[list[int]] = [[] for _ in members]
        for e in self.component_edges(comp):
            succ[idx[e.source]].append(idx[e.target])
        return len(strongly_connected_components(len(members), lambda v: succ[v])) == 1


def build_coherence_graph(sys: LindbladSystem, rel: EquivalenceRelation, tol: float = GPM_TOL) -> CoherenceGraph:
    decs = _decompositions(sys, tol)
    nodes = tuple(sorted((j, k) for c in rel.classes for j in c for k in c if j != k))
    node_set = set(nodes)
    edges = []
    for a, dec in enumerate(decs):
        d = dec.diag
        for j, k in nodes:
            if abs(d[j]) <= tol or abs(d[k]) <= tol:
                continue
            tgt = (dec.permutation[j], dec.permutation[k])
            if tgt not in node_set:
                continue
            w = d[j] * np.conj(d[k]) / (abs(d[j]) * abs(d[k]))
            edges.append(CoherenceEdge((j, k), tgt, a, complex(w)))
    # weak components by union-find
    parent = {v: v for v in nodes}

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    for e in edges:
        ra, rb = find(e.source), find(e.target)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)
    groups: dict = {}
    for v in nodes:
        groups.setdefault(find(v), []).append(v)
    comps = tuple(sorted((tuple(sorted(g)) for g in groups.values()), key=lambda c: c[0]))
    return CoherenceGraph(nodes, tuple(edges), comps, rel, tuple(decs))


@dataclass(frozen=True)
class ResonanceCertificate:
    """Outcome of the resonance check on one component.

    ``f_values`` maps each node to ``f(base, node)``.  For a non-resonant
    component ``witness`` is the first edge whose weight contradicts ``f``
    (a self-loop with weight other than 1 is reported as such).
    """

    component: tuple[tuple[int, int], ...]
    f_values: dict
    resonant: bool
    witness: CoherenceEdge | None = None

    @property
    def base(self) -> tuple[int, int]:
        return self.component[0]

    @property
    def verdict(self) -> str:
        return "resonant" if self.resonant else "non-resonant"


def _phase_gap(a: complex, b: complex) -> float:
    return abs(np.angle(a * np.conj(b)))


def check_resonance(cg: CoherenceGraph, component: int, tol: float = PHASE_TOL) -> ResonanceCertificate:
    """Build ``f`` from the smallest node along a traversal, then verify every edge."""
    comp = cg.components[component]
    edges = cg.component_edges(component)
    adj: dict = {v: [] for v in comp}
    for e in edges:
        adj[e.source].append((e.target, e.weight))
        adj[e.target].append((e.source, 1.0 / e.weight))
    base = comp[0]
    f = {base: 1.0 + 0j}
    queue = deque([base])
    while queue:
        v = queue.popleft()
        for u, w in adj[v]:
            if u not in f:
                f[u] = f[v] * w
                f[u] /= abs(f[u])
                queue.append(u)
    for e in sorted(edges, key=lambda e: (e.source != e.target, e.source, e.target, e.alpha)):
        if _phase_gap(f[e.source] * e.weight, f[e.target]) > tol:
            return ResonanceCertificate(comp, f, False, e)
    return ResonanceCertificate(comp, f, True, None)


def coherence_matrix(cg: CoherenceGraph) -> np.ndarray:
    """Generator ``A~`` of the coherences on the coherence-graph nodes.

    Column ``(j2, k2)`` gains ``|D_{alpha,j2}|^2 w`` in row
    ``(sigma(j2), sigma(k2))``; the diagonal is ``-sum_alpha |D_{alpha,j}|^2``.
    """
    idx = cg.index
    m = len(cg.nodes)
    a = np.zeros((m, m), dtype=np.complex128)
    for e in cg.edges:
        d = cg.decompositions[e.alpha].diag
        a[idx[e.target], idx[e.source]] += abs(d[e.source[0]]) ** 2 * e.weight
    for (j, _), i in idx.items():
        a[i, i] -= sum(abs(dec.diag[j]) ** 2 for dec in cg.decompositions)
    return a


def coherence_kernel_dim(sys: LindbladSystem, rel: EquivalenceRelation, component: int | None = None) -> int:
    """Numerical kernel dimension of ``A~``, optionally restricted to one component."""
    cg = build_coherence_graph(sys, rel)
    a = coherence_matrix(cg)
    if component is not None:
        keep = [cg.index[v] for v in cg.components[component]]
        a = a[np.ix_(keep, keep)]
    if a.size == 0:
        return 0
    rank, _ = numerical_kernel(a)
    return a.shape[0] - rank


@dataclass(frozen=True)
class EnclosureCandidate:
    relation: EquivalenceRelation
    symmetry: SymmetryReport
    certificates: tuple[ResonanceCertificate, ...]

    @property
    def resonant(self) -> bool:
        return any(c.resonant for c in self.certificates)

    @property
    def verdict(self) -> str:
        return "resonant" if self.resonant else "non-resonant"


def _signatures(n: int, h: np.ndarray, decs: Sequence[GPMDecomposition]) -> list[int]:
    """Stable refinement of ``(H_j, |D_{alpha,j}| profile)`` by the signatures of ``sigma_alpha(j)``."""
    base = [(round(float(h[j]), 9),) + tuple(round(float(abs(d.diag[j])), 9) for d in decs) for j in range(n)]
    labels = _relabel(base)
    while True:
        refined = [
            (labels[j],) + tuple(labels[d.permutation[j]] if abs(d.diag[j]) > GPM_TOL else -1 for d in decs)
            for j in range(n)
        ]
        new = _relabel(refined)
        if len(set(new)) == len(set(labels)):
            return new
        labels = new


def _relabel(keys) -> list[int]:
    table: dict = {}
    return [table.setdefault(k, len(table)) for k in keys]


def _block_partitions(items: Sequence[int], size: int) -> Iterator[list[tuple[int, ...]]]:
    """All partitions of ``items`` into blocks of ``size``."""
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for combo in itertools.combinations(rest, size - 1):
        block = (first,) + combo
        remaining = [v for v in rest if v not in combo]
        for tail in _block_partitions(remaining, size):
            yield [block] + tail


def _count_block_partitions(s: int, nu: int) -> int:
    k = s // nu
    return factorial(s) // (factorial(nu) ** k * factorial(k))


def _domains(basins: BasinDecomposition) -> list[tuple[int, ...]]:
    out = [tuple(b) for b in basins.basins]
    for a, b in itertools.combinations(basins.basins, 2):
        out.append(tuple(sorted(a + b)))
    return out


def _refine_candidates(domain: Sequence[int], sig: Sequence[int]) -> tuple[int, list[Iterator]]:
    groups: dict[int, list[int]] = {}
    for v in domain:
        groups.setdefault(sig[v], []).append(v)
    sizes = [len(g) for g in groups.values()]
    total = 0
    gens = []
    for nu in range(2, len(domain) + 1):
        if len(domain) % nu or any(s % nu for s in sizes):
            continue
        count = 1
        for s in sizes:
            count *= _count_block_partitions(s, nu)
        total += count
        gens.append(itertools.product(*(_block_partitions(sorted(g), nu) for g in groups.values())))
    return total, gens


def _brute_candidates(domain: Sequence[int]) -> tuple[int, list[Iterator]]:
    total = 0
    gens = []
    for nu in range(2, len(domain) + 1):
        if len(domain) % nu:
            continue
        total += _count_block_partitions(len(domain), nu)
        gens.append(([p] for p in _block_partitions(list(domain), nu)))
    return total, gens


def _class_preserving(classes, decs, in_b) -> bool:
    cls = {v: i for i, c in enumerate(classes) for v in c}
    for dec in decs:
        for c in classes:
            imgs = [dec.permutation[j] for j in c]
            inside = [x for x in imgs if x in in_b]
            if len(inside) < 2:
                continue
            if any(x not in cls for x in inside) or len({cls[x] for x in inside}) != 1:
                return False
    return True


def detect_hidden_enclosures(
    sys: LindbladSystem,
    basins: BasinDecomposition | None = None,
    max_n: int = 12,
    strategy: str = "refine",
) -> list[EnclosureCandidate]:
    """Search uniform relations on single basins and basin pairs.

    Every candidate satisfying both symmetry conditions is returned with a
    resonance certificate per coherence-graph component; a candidate with a
    resonant component signals a hidden enclosure.  ``strategy="brute"``
    skips the signature pruning and serves as a reference.
    """
    if strategy not in ("refine", "brute"):
        raise ValueError("strategy must be 'refine' or 'brute'")
    decs = _decompositions(sys)
    n = sys.dim
    if n > max_n:
        raise SearchSpaceExceeded(f"system dimension {n} exceeds max_n = {max_n}")
    if basins is None:
        basins = decompose_basins(build_rate_graph(build_omega(sys)))
    h = np.real(np.diag(sys.hamiltonian))
    sig = _signatures(n, h, decs)
    in_b = basins.basin_vertices
    found: dict[tuple, EnclosureCandidate] = {}
    for domain in _domains(basins):
        total, gens = _refine_candidates(domain, sig) if strategy == "refine" else _brute_candidates(domain)
        if total > MAX_CANDIDATES:
            raise SearchSpaceExceeded(f"{total} candidate relations on {[v + 1 for v in domain]} exceed {MAX_CANDIDATES}")
        for gen in gens:
            for parts in gen:
                classes = [blk for part in parts for blk in part]
                if not _class_preserving(classes, decs, in_b):
                    continue
                rel = EquivalenceRelation(tuple(classes))
                if rel.classes in found:
                    continue
                rep = verify_symmetry(sys, rel, basins)
                if not rep.ok:
                    continue
                cg = build_coherence_graph(sys, rel)
                certs = tuple(check_resonance(cg, i) for i in range(len(cg.components)))
                found[rel.classes] = EnclosureCandidate(rel, rep, certs)
    return [found[k] for k in sorted(found)]


def check_oscillations(
    sys: LindbladSystem,
    rel_a: EquivalenceRelation | None,
    rel_b: EquivalenceRelation | None,
    block_a: Sequence[int],
    block_b: Sequence[int],
    basins: BasinDecomposition | None = None,
    tol: float = SYMMETRY_TOL,
) -> float | None:
    """Frequency ``Delta`` of stable oscillations between two blocks, or ``None``.

    Searches bijections between the classes of ``rel_a`` and ``rel_b``
    (singletons when a relation is ``None``).  A pairing qualifies when the
    merged relation satisfies dissipation symmetry, every coherence-graph
    component containing cross pairs is resonant, and ``H_k - H_j`` takes one
    value ``Delta`` over all paired ``j`` in ``a``, ``k`` in ``b``.
    """
    block_a = tuple(sorted(block_a))
    block_b = tuple(sorted(block_b))
    if set(block_a) & set(block_b):
        raise ValueError("blocks must be disjoint")
    rel_a = rel_a or EquivalenceRelation(tuple((v,) for v in block_a))
    rel_b = rel_b or EquivalenceRelation(tuple((v,) for v in block_b))
    if set(rel_a.domain) != set(block_a) or set(rel_b.domain) != set(block_b):
        raise ValueError("relations must cover their blocks")
    if rel_a.mu != rel_b.mu or rel_a.nu != rel_b.nu:
        return None
    _decompositions(sys)
    if basins is None:
        basins = decompose_basins(build_rate_graph(build_omega(sys)))
    h = np.real(np.diag(sys.hamiltonian))
    for pairing in itertools.permutations(range(rel_b.mu)):
        merged = EquivalenceRelation(tuple(rel_a.classes[i] + rel_b.classes[p] for i, p in enumerate(pairing)))
        rep = verify_symmetry(sys, merged, basins, tol)
        if not rep.dissipation_ok:
            continue
        if any(abs(h[j] - h[k]) > tol for c in rel_a.classes + rel_b.classes for j in c for k in c):
            continue
        deltas = [h[k] - h[j] for c in merged.classes for j in c if j in block_a for k in c if k in block_b]
        if max(deltas) - min(deltas) > tol:
            continue
        cg = build_coherence_graph(sys, merged)
        cross = [
            i for i, comp in enumerate(cg.components)
            if any((j in block_a) != (k in block_a) for j, k in comp)
        ]
        if all(check_resonance(cg, i).resonant for i in cross):
            return float(np.mean(deltas))
    return None
