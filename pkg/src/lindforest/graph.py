"""Digraph algorithms on rate graphs.

Strongly connected components, basins (sink components of the
condensation), exhaustive enumeration of spanning in-trees and of forests
rooted in the basins, and Graphviz export.

Enumeration assigns every non-root vertex one outgoing edge, visiting
vertices in ascending order and targets in ascending order, and abandons a
partial assignment as soon as it closes a cycle.  Weights are products of
edge weights, kept as Python ``int`` when the graph is integral so that
large tree sums stay exact.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import prod
from typing import Iterable, Iterator, Sequence

from .laplacian import RateGraph


@dataclass(frozen=True)
class BasinDecomposition:
    """SCC partition of a rate graph and its sink components ("basins").

    ``components`` lists every SCC as a sorted tuple, ordered by smallest
    vertex; ``scc_id[v]`` indexes into it.  ``condensation`` holds the edges
    between components as ``(source_component, target_component)`` pairs.
    """

    n: int
    scc_id: tuple[int, ...]
    components: tuple[tuple[int, ...], ...]
    basins: tuple[tuple[int, ...], ...]
    non_basin: tuple[int, ...]
    condensation: tuple[tuple[int, int], ...]

    @property
    def n_basins(self) -> int:
        return len(self.basins)

    @property
    def basin_vertices(self) -> frozenset[int]:
        return frozenset(v for b in self.basins for v in b)

    def basin_of(self, v: int) -> int | None:
        """Index of the basin containing ``v`` or ``None`` for decay vertices."""
        for eta, b in enumerate(self.basins):
            if v in b:
                return eta
        return None


def strongly_connected_components(n: int, successors) -> list[list[int]]:
    """Tarjan's algorithm, iterative.  ``successors(v)`` yields neighbours."""
    index = [-1] * n
    low = [0] * n
    on_stack = [False] * n
    stack: list[int] = []
    out: list[list[int]] = []
    counter = 0
    for root in range(n):
        if index[root] >= 0:
            continue
        work = [(root, iter(successors(root)))]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack[root] = True
        while work:
            v, it = work[-1]
            advanced = False
            for w in it:
                if index[w] < 0:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack[w] = True
                    work.append((w, iter(successors(w))))
                    advanced = True
                    break
                if on_stack[w]:
                    low[v] = min(low[v], index[w])
            if advanced:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[v])
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp.append(w)
                    if w == v:
                        break
                out.append(comp)
    return out


def decompose_basins(g: RateGraph) -> BasinDecomposition:
    comps = sorted((tuple(sorted(c)) for c in strongly_connected_components(g.n, g.successors)), key=lambda c: c[0])
    scc_id = [0] * g.n
    for i, c in enumerate(comps):
        for v in c:
            scc_id[v] = i
    cond = sorted({(scc_id[s], scc_id[t]) for s, t, _ in g.edges if scc_id[s] != scc_id[t]})
    has_out = {a for a, _ in cond}
    basins = tuple(c for i, c in enumerate(comps) if i not in has_out)
    in_basin = {v for b in basins for v in b}
    non_basin = tuple(v for v in range(g.n) if v not in in_basin)
    return BasinDecomposition(g.n, tuple(scc_id), tuple(comps), basins, non_basin, tuple(cond))


@dataclass(frozen=True)
class InTree:
    """Spanning in-tree: every non-root vertex maps to the target of its outgoing edge."""

    root: int
    parent: dict
    weight: int | float

    @property
    def vertices(self) -> frozenset[int]:
        return frozenset(self.parent) | {self.root}

    @property
    def edges(self) -> tuple[tuple[int, int], ...]:
        return tuple(sorted(self.parent.items()))


@dataclass(frozen=True)
class RootedForest:
    """Forest whose trees are rooted in a designated root set.

    ``classification`` maps every vertex to the index of the basin its
    tree is rooted in.
    """

    trees: tuple[InTree, ...]
    parent: dict
    classification: dict
    weight: int | float

    @property
    def edges(self) -> tuple[tuple[int, int], ...]:
        return tuple(sorted(self.parent.items()))

    @property
    def roots(self) -> tuple[int, ...]:
        return tuple(t.root for t in self.trees)


def _one(g: RateGraph):
    return 1 if g.integral else 1.0


def _assignments(g: RateGraph, movers: Sequence[int], allowed) -> Iterator[tuple[dict, int | float]]:
    """Yield ``(parent, weight)`` for every acyclic choice of one out-edge per mover.

    ``allowed(v, t)`` filters candidate edges ``v -> t``.
    """
    options = []
    for v in movers:
        opts = [(t, g.weight(v, t)) for t, _ in g.out_edges(v) if allowed(v, t)]
        if not opts:
            return
        options.append(opts)
    parent: dict[int, int] = {}
    m = len(movers)

    def closes_cycle(v: int, t: int) -> bool:
        x = t
        while x in parent:
            if x == v:
                return True
            x = parent[x]
        return x == v

    def rec(i: int, w):
        if i == m:
            yield dict(parent), w
            return
        v = movers[i]
        for t, x in options[i]:
            if closes_cycle(v, t):
                continue
            parent[v] = t
            yield from rec(i + 1, w * x)
            del parent[v]

    yield from rec(0, _one(g))


def enumerate_in_trees(g: RateGraph, vertices: Iterable[int], root: int) -> list[InTree]:
    """All spanning in-trees of the subgraph induced by ``vertices``, rooted at ``root``."""
    vs = sorted(set(vertices))
    if root not in vs:
        raise ValueError(f"root {root} not in vertex set")
    vset = set(vs)
    movers = [v for v in vs if v != root]
    return [
        InTree(root, parent, w)
        for parent, w in _assignments(g, movers, lambda v, t: t in vset)
    ]


def tree_sum(g: RateGraph, vertices: Iterable[int], root: int):
    """Sum of ``W(tau)`` over spanning in-trees rooted at ``root``."""
    return sum((t.weight for t in enumerate_in_trees(g, vertices, root)), start=_one(g) * 0)


def enumerate_rooted_forests(g: RateGraph, roots: Iterable[int]) -> list[dict]:
    """Parent maps of all spanning forests of ``g`` whose root set is exactly ``roots``."""
    rs = set(roots)
    movers = [v for v in range(g.n) if v not in rs]
    return [p for p, _ in _assignments(g, movers, lambda v, t: True)]


def forest_sum(g: RateGraph, roots: Iterable[int]):
    """Sum of ``W(tau)`` over spanning forests rooted exactly at ``roots``."""
    rs = set(roots)
    movers = [v for v in range(g.n) if v not in rs]
    return sum((w for _, w in _assignments(g, movers, lambda v, t: True)), start=_one(g) * 0)


def _final_root(parent: dict, v: int) -> int:
    while v in parent:
        v = parent[v]
    return v


def _group_trees(parent: dict, roots: Sequence[int], g: RateGraph) -> tuple[InTree, ...]:
    members: dict[int, dict] = {r: {} for r in roots}
    for v, t in parent.items():
        members[_final_root(parent, v)][v] = t
    return tuple(
        InTree(r, sub, prod((g.weight(v, t) for v, t in sub.items()), start=_one(g)))
        for r, sub in members.items()
    )


def enumerate_basin_forests(g: RateGraph, basins: BasinDecomposition, mode: str = "pruned") -> list[RootedForest]:
    """Forests in which every decay vertex has one outgoing edge and every tree ends in a basin.

    ``mode="pruned"``: basin-internal edges are deleted and every basin
    vertex is a root.  ``mode="full"``: each basin is additionally spanned
    by an in-tree towards one chosen root per basin, so the forests have
    exactly ``n_B`` trees.
    """
    if mode not in ("pruned", "full"):
        raise ValueError("mode must be 'pruned' or 'full'")
    eta_of = {v: eta for eta, b in enumerate(basins.basins) for v in b}
    movers = list(basins.non_basin)
    pruned = [(p, w) for p, w in _assignments(g, movers, lambda v, t: True)]

    if mode == "pruned":
        roots = sorted(eta_of)
        out = []
        for parent, w in pruned:
            cls = {v: eta_of[_final_root(parent, v)] for v in range(g.n)}
            out.append(RootedForest(_group_trees(parent, roots, g), parent, cls, w))
        return out

    per_basin = []
    for b in basins.basins:
        choices = []
        for r in b:
            choices.extend(enumerate_in_trees(g, b, r))
        per_basin.append(choices)
    out = []

    def rec(i: int, picked: list[InTree]):
        if i == len(per_basin):
            inner = {}
            w_in = _one(g)
            for t in picked:
                inner.update(t.parent)
                w_in = w_in * t.weight
            roots = [t.root for t in picked]
            for parent, w in pruned:
                full = dict(parent)
                full.update(inner)
                cls = {v: eta_of[_final_root(full, v)] for v in range(g.n)}
                out.append(RootedForest(_group_trees(full, roots, g), full, cls, w_in * w))
            return
        for t in per_basin[i]:
            picked.append(t)
            rec(i + 1, picked)
            picked.pop()

    rec(0, [])
    return out


def format_weight(x) -> str:
    if isinstance(x, int) or float(x).is_integer():
        return str(int(x))
    return f"{float(x):.12g}"


def _dot_id(v: int, labels) -> str:
    name = str(v + 1)
    if labels is not None:
        esc = str(labels[v]).replace("\\", "\\\\").replace('"', '\\"')
        return f'{name} [label="{esc}"]'
    return name


def export_dot(g: RateGraph, basins: BasinDecomposition | None = None, labels: Sequence[str] | None = None) -> str:
    """Graphviz digraph with 1-based node ids, weight labels and one cluster per basin."""
    lines = ["digraph {"]
    clustered: set[int] = set()
    if basins is not None:
        for eta, b in enumerate(basins.basins):
            lines.append(f"  subgraph cluster_basin_{eta + 1} {{")
            lines.append(f'    label="basin {eta + 1}";')
            for v in b:
                lines.append(f"    {_dot_id(v, labels)};")
            lines.append("  }")
            clustered.update(b)
    for v in range(g.n):
        if v not in clustered:
            lines.append(f"  {_dot_id(v, labels)};")
    for s, t, x in g.edges:
        lines.append(f'  {s + 1} -> {t + 1} [label="{format_weight(x)}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
