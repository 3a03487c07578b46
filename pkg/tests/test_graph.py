import itertools
import time
from math import prod

import numpy as np
import pydot
import pytest
from hypothesis import given, settings, strategies as st

from lindforest.graph import (
    decompose_basins,
    enumerate_basin_forests,
    enumerate_in_trees,
    enumerate_rooted_forests,
    export_dot,
    forest_sum,
    strongly_connected_components,
    tree_sum,
)
from lindforest.laplacian import RateGraph

from conftest import random_int_graph


def complete_graph(n, w=1.0):
    return RateGraph(n, tuple((s, t, w) for s in range(n) for t in range(n) if s != t))


def brute_in_trees(g, vertices, root):
    """Every choice of one in-set out-edge per non-root vertex, kept if all paths reach the root."""
    vs = sorted(vertices)
    movers = [v for v in vs if v != root]
    opts = [[t for t, _ in g.out_edges(v) if t in vs] for v in movers]
    out = []
    for choice in itertools.product(*opts):
        parent = dict(zip(movers, choice))
        ok = True
        for v in movers:
            seen = set()
            x = v
            while x != root:
                if x in seen:
                    ok = False
                    break
                seen.add(x)
                x = parent[x]
            if not ok:
                break
        if ok:
            out.append(parent)
    return out


def test_basins_examples(cycle4, decay8):
    _, _, b = cycle4
    assert b.basins == ((0, 1, 2, 3),) and b.non_basin == ()
    _, _, b = decay8
    assert b.basins == ((0, 1), (2, 3)) and b.non_basin == (4, 5, 6, 7)
    assert b.basin_of(2) == 1 and b.basin_of(5) is None


def test_edgeless_graph_has_singleton_basins():
    b = decompose_basins(RateGraph(4, ()))
    assert b.basins == ((0,), (1,), (2,), (3,))
    assert b.condensation == ()


def test_condensation_of_decay_graph(decay8):
    _, _, b = decay8
    cyc = b.scc_id[4]
    assert {b.scc_id[v] for v in (4, 5, 6, 7)} == {cyc}
    assert set(b.condensation) == {(cyc, b.scc_id[0]), (cyc, b.scc_id[2])}


def test_scc_matches_reachability():
    rng = np.random.default_rng(5)
    for _ in range(50):
        n = int(rng.integers(1, 9))
        g = random_int_graph(rng, n, density=0.3)
        reach = np.eye(n, dtype=bool) | (g.weights.T > 0)
        for k in range(n):
            reach |= reach[:, [k]] & reach[[k], :]
        comps = strongly_connected_components(n, g.successors)
        for c in comps:
            for a, bb in itertools.combinations(c, 2):
                assert reach[a, bb] and reach[bb, a]
        assert sorted(v for c in comps for v in c) == list(range(n))
        assert len(comps) == len({frozenset(np.flatnonzero(reach[v] & reach[:, v])) for v in range(n)})


def test_sink_property_random():
    rng = np.random.default_rng(6)
    for _ in range(100):
        n = int(rng.integers(1, 9))
        g = random_int_graph(rng, n, density=0.25)
        b = decompose_basins(g)
        assert b.n_basins >= 1
        for eta, basin in enumerate(b.basins):
            for s, t, _ in g.edges:
                if s in basin:
                    assert t in basin
        flat = [v for bb in b.basins for v in bb]
        assert len(flat) == len(set(flat))


def test_four_level_trees(cycle4):
    _, g, _ = cycle4
    trees = enumerate_in_trees(g, range(4), 0)
    assert sorted(t.weight for t in trees) == sorted([36, 16, 100, 225, 10000, 22500])
    counts = [len(enumerate_in_trees(g, range(4), r)) for r in range(4)]
    assert counts == [6, 3, 3, 3] and sum(counts) == 15
    assert [tree_sum(g, range(4), r) for r in range(4)] == [32877, 7904, 68068, 131508]


def test_root_two_trees_are_products_of_their_edges(cycle4):
    _, g, _ = cycle4
    for t in enumerate_in_trees(g, range(4), 1):
        assert t.weight == prod(g.weight(v, p) for v, p in t.parent.items())
    # the tree 4 -> 2, 1 -> 4, 3 -> 2 uses weights 4, 52, 4
    t = next(t for t in enumerate_in_trees(g, range(4), 1) if t.parent == {0: 3, 2: 1, 3: 1})
    assert t.weight == 4 * 52 * 4 == 832


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_cayley(n):
    g = complete_graph(n)
    counts = [len(enumerate_in_trees(g, range(n), r)) for r in range(n)]
    assert counts == [n ** (n - 2)] * n
    assert sum(counts) == n ** (n - 1)


def test_k7_enumeration_is_fast():
    g = complete_graph(7)
    t0 = time.perf_counter()
    assert len(enumerate_in_trees(g, range(7), 0)) == 7 ** 5
    assert time.perf_counter() - t0 < 5


def test_single_vertex_tree():
    g = RateGraph(1, ())
    (t,) = enumerate_in_trees(g, [0], 0)
    assert t.weight == 1 and t.parent == {}


def test_root_must_be_in_vertices():
    with pytest.raises(ValueError):
        enumerate_in_trees(complete_graph(3), [0, 1], 2)


def test_backtracking_matches_brute_force():
    rng = np.random.default_rng(7)
    for _ in range(100):
        n = int(rng.integers(1, 7))
        g = random_int_graph(rng, n, density=0.5)
        vs = sorted(rng.choice(n, size=int(rng.integers(1, n + 1)), replace=False).tolist())
        root = vs[int(rng.integers(0, len(vs)))]
        got = [t.parent for t in enumerate_in_trees(g, vs, root)]
        assert got == brute_in_trees(g, vs, root)


PAPER_FOREST_PRODUCTS = """
w15w56w67w48 w15w26w37w48 w15w26w37w78 w15w26w67w48 w15w56w37w48 w85w26w37w48
w15w26w67w78 w15w56w37w78 w85w26w37w78 w85w26w67w48 w85w56w37w48 w15w56w67w78
w85w26w67w78 w85w56w37w78 w85w56w67w48
""".split()


def _edges_of(word):
    pairs = word.split("w")[1:]
    return frozenset((int(p[1]) - 1, int(p[0]) - 1) for p in pairs)


def test_two_basin_forests(decay8):
    _, g, b = decay8
    forests = enumerate_basin_forests(g, b, "pruned")
    assert len(forests) == 15
    got = {frozenset(f.parent.items()) for f in forests}
    assert got == {_edges_of(w) for w in PAPER_FOREST_PRODUCTS}
    example = next(f for f in forests if f.parent == {4: 0, 5: 4, 6: 5, 7: 3})
    assert example.weight == 29_811_600
    assert example.classification == {0: 0, 1: 0, 2: 1, 3: 1, 4: 0, 5: 0, 6: 0, 7: 1}


def test_forest_invariants(decay8):
    _, g, b = decay8
    roots = set(v for bb in b.basins for v in bb)
    for mode in ("pruned", "full"):
        for f in enumerate_basin_forests(g, b, mode):
            for v in range(g.n):
                seen = set()
                x = v
                while x in f.parent:
                    assert x not in seen
                    seen.add(x)
                    x = f.parent[x]
                assert x in roots
            assert set(f.roots) <= roots
            assert sum(len(t.parent) for t in f.trees) == len(f.parent)
            assert f.weight == prod((t.weight for t in f.trees), start=1)


def test_full_mode_spans_basins(decay8):
    _, g, b = decay8
    full = enumerate_basin_forests(g, b, "full")
    assert len(full) == 2 * 2 * 15
    for f in full:
        assert len(f.trees) == 2
        assert all(v in f.parent for v in (4, 5, 6, 7))


def test_no_decay_vertices_gives_one_empty_forest(cycle4):
    _, g, b = cycle4
    (f,) = enumerate_basin_forests(g, b, "pruned")
    assert f.parent == {} and f.weight == 1


def test_forest_counting_identity_on_complete_decay_graphs():
    # decay vertices point at every other vertex; basins are internally complete
    for n_basin_sizes, n_decay in [((1, 2), 2), ((2, 3), 2), ((1, 1, 2), 3), ((3,), 3), ((1, 2), 4)]:
        sizes = list(n_basin_sizes)
        n = sum(sizes) + n_decay
        basins, start = [], 0
        for s in sizes:
            basins.append(list(range(start, start + s)))
            start += s
        decay = list(range(start, n))
        edges = []
        for bb in basins:
            edges += [(s, t, 1.0) for s in bb for t in bb if s != t]
        edges += [(s, t, 1.0) for s in decay for t in range(n) if s != t]
        g = RateGraph(n, tuple(sorted(edges)))
        b = decompose_basins(g)
        forests = enumerate_basin_forests(g, b, "pruned")
        n_b = sum(sizes)
        for eta, bb in enumerate(b.basins):
            for l in decay:
                n_eta = sum(1 for f in forests if f.classification[l] == eta)
                assert n_eta * n_b == len(bb) * len(forests)


def test_forest_sum_matches_enumeration():
    rng = np.random.default_rng(8)
    for _ in range(30):
        n = int(rng.integers(2, 6))
        g = random_int_graph(rng, n)
        roots = {0, n - 1}
        ps = enumerate_rooted_forests(g, roots)
        assert forest_sum(g, roots) == sum(prod(g.weight(v, t) for v, t in p.items()) for p in ps)


def test_dot_export_four_level(cycle4):
    _, g, b = cycle4
    text = export_dot(g)
    (graph,) = pydot.graph_from_dot_data(text)
    assert len(graph.get_nodes()) == 4
    edges = graph.get_edges()
    assert len(edges) == 7
    labels = {(e.get_source(), e.get_destination()): e.get_label().strip('"') for e in edges}
    assert labels[("3", "1")] == "25"


def test_dot_export_clusters(decay8):
    _, g, b = decay8
    (graph,) = pydot.graph_from_dot_data(export_dot(g, b))
    clusters = graph.get_subgraphs()
    assert len(clusters) == 2
    assert [len(c.get_nodes()) for c in clusters] == [2, 2]


def test_dot_export_empty_graph():
    text = export_dot(RateGraph(3, ()))
    assert text.startswith("digraph {")
    (graph,) = pydot.graph_from_dot_data(text)
    assert len(graph.get_nodes()) == 3 and graph.get_edges() == []


def test_dot_labels_are_escaped():
    text = export_dot(RateGraph(2, ((0, 1, 2.5),)), labels=['a"b', "c"])
    (graph,) = pydot.graph_from_dot_data(text)
    assert len(graph.get_edges()) == 1
    assert 'label="2.5"' in text


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 6), st.integers(0, 2**32 - 1))
def test_in_tree_invariants(n, seed):
    rng = np.random.default_rng(seed)
    g = random_int_graph(rng, n, density=0.6)
    root = int(rng.integers(0, n))
    for t in enumerate_in_trees(g, range(n), root):
        assert set(t.parent) == set(range(n)) - {root}
        for v in t.parent:
            x, steps = v, 0
            while x != root:
                x = t.parent[x]
                steps += 1
                assert steps <= n
        assert t.weight == prod((g.weight(v, p) for v, p in t.parent.items()), start=1)
