from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from lindforest.exceptions import MethodDisagreement, NotInLeftKernel, RankMismatch
from lindforest.graph import decompose_basins, forest_sum
from lindforest.laplacian import RateGraph, build_omega, build_rate_graph
from lindforest.oracle import integrate_lambda, minor_determinant
from lindforest import stationary
from lindforest.stationary import (
    asymptotic_state,
    constraint_vectors,
    kernel_rank,
    stationary_orbits,
)
from lindforest.systems import four_level_cycle, nine_level_transformed, two_basin_decay

from conftest import analyse, random_int_graph, strongly_connected_int_graph


def test_kernel_rank_examples(cycle4, decay8):
    om, _, b = cycle4
    assert kernel_rank(om, b) == (3, 1)
    om, _, b = decay8
    assert kernel_rank(om, b) == (6, 2)
    z = np.zeros((3, 3))
    assert kernel_rank(z, decompose_basins(build_rate_graph(z))) == (0, 3)


def test_kernel_rank_mismatch_detected(cycle4):
    om, _, _ = cycle4
    fake = decompose_basins(RateGraph(4, ()))
    with pytest.raises(RankMismatch):
        kernel_rank(om, fake)


def test_four_level_orbit_exact(cycle4):
    _, g, b = cycle4
    for method in ("enumerate", "determinant", "both"):
        (orb,) = stationary_orbits(g, b, method)
        assert orb.numerators == (32877, 7904, 68068, 131508)
        assert orb.denominator == 240357
        assert orb.exact == tuple(Fraction(x, 240357) for x in (32877, 7904, 68068, 131508))


def test_balance_at_level_two(cycle4):
    # level 2 loses 1 + 100 = 101 per unit and gains 4 from 3 and 4 from 4
    _, g, b = cycle4
    (orb,) = stationary_orbits(g, b)
    n = orb.numerators
    assert 101 * n[1] == 4 * n[2] + 4 * n[3]


def test_two_basin_orbits(decay8):
    _, g, b = decay8
    o1, o2 = stationary_orbits(g, b, "both")
    assert o1.exact[:2] == (Fraction(9, 13), Fraction(4, 13))
    assert o2.exact[2:4] == (Fraction(16, 41), Fraction(25, 41))
    assert all(x == 0 for x in o1.numerators[2:]) and all(x == 0 for x in o2.numerators[:2] + o2.numerators[4:])


def test_singleton_basin_is_unit_vector():
    g = RateGraph(3, ((0, 1, 2.0), (2, 1, 3.0)))
    b = decompose_basins(g)
    orbs = stationary_orbits(g, b, "both")
    assert [tuple(o.lambda_inf) for o in orbs] == [(0.0, 1.0, 0.0)]


def test_threads_do_not_change_results(decay8):
    _, g, b = decay8
    a = stationary_orbits(g, b, "both", threads=1)
    c = stationary_orbits(g, b, "both", threads=4)
    assert [o.numerators for o in a] == [o.numerators for o in c]


def test_method_disagreement_raised(cycle4, monkeypatch):
    _, g, b = cycle4
    monkeypatch.setattr(stationary, "_det_tree_sum", lambda g, vs, r: 1)
    with pytest.raises(MethodDisagreement):
        stationary_orbits(g, b, "both")


def test_float_path_matches_integer_path(cycle4):
    _, g, b = cycle4
    gf = RateGraph(g.n, tuple((s, t, w * 1.5) for s, t, w in g.edges))
    assert not gf.integral
    (exact,) = stationary_orbits(g, b)
    for method in ("enumerate", "determinant"):
        (approx,) = stationary_orbits(gf, b, method)
        np.testing.assert_allclose(approx.lambda_inf, exact.lambda_inf, rtol=1e-12)


def test_two_basin_constraints(decay8):
    _, g, b = decay8
    k1, k2 = constraint_vectors(g, b, "pruned")
    z = 1268739497
    assert k1.kappa == (z, z, 0, 0, 736749236, 1146754469, 291144917, 79971136)
    assert k2.kappa == (0, 0, z, z, 531990261, 121985028, 977594580, 1188768361)
    assert k1.common == z == forest_sum(g.subgraph(lambda e: e[0] >= 4), range(4))
    for l in range(4, 8):
        assert k1.kappa[l] + k2.kappa[l] == z


def test_full_constraints_scale_pruned(decay8):
    _, g, b = decay8
    pruned = constraint_vectors(g, b, "pruned")
    full = constraint_vectors(g, b, "full")
    trees = 13 * 41  # in-tree totals of the two basins
    for p, f in zip(pruned, full):
        assert f.kappa == tuple(trees * x for x in p.kappa)


def test_single_basin_constraint_is_constant(cycle4):
    _, g, b = cycle4
    (k,) = constraint_vectors(g, b)
    assert k.kappa == (1, 1, 1, 1)


def test_left_kernel_check_raises(decay8, monkeypatch):
    _, g, b = decay8
    monkeypatch.setattr(stationary, "KERNEL_RTOL", -1.0)
    with pytest.raises(NotInLeftKernel):
        constraint_vectors(g, b)


def test_asymptotic_state_from_level_five(decay8):
    _, g, b = decay8
    lam0 = [Fraction(0)] * 8
    lam0[4] = Fraction(1)
    c, rho = asymptotic_state(g, b, lam0)
    assert c == [Fraction(736749236, 1268739497), Fraction(531990261, 1268739497)]
    assert sum(c) == 1
    expected = np.zeros(8)
    expected[:2] = float(c[0]) * np.array([9, 4]) / 13
    expected[2:4] = float(c[1]) * np.array([16, 25]) / 41
    np.testing.assert_allclose(np.diag(rho).real, expected, atol=1e-15)


def test_asymptotic_state_supported_on_basin(decay8):
    _, g, b = decay8
    c, _ = asymptotic_state(g, b, [0.5, 0.5, 0, 0, 0, 0, 0, 0])
    assert c == pytest.approx([1.0, 0.0])


def test_single_basin_absorbs_everything(cycle4):
    _, g, b = cycle4
    c, rho = asymptotic_state(g, b, [0.1, 0.2, 0.3, 0.4])
    assert c == pytest.approx([1.0])
    np.testing.assert_allclose(np.diag(rho).real, np.array([32877, 7904, 68068, 131508]) / 240357)


def test_asymptotic_state_validates_lambda(decay8):
    _, g, b = decay8
    with pytest.raises(ValueError):
        asymptotic_state(g, b, [1.0, 1.0, 0, 0, 0, 0, 0, 0])


def test_orbits_in_right_kernel_random():
    rng = np.random.default_rng(10)
    for _ in range(100):
        n = int(rng.integers(1, 7))
        g = strongly_connected_int_graph(rng, n)
        b = decompose_basins(g)
        (orb,) = stationary_orbits(g, b)
        assert np.max(np.abs(g.laplacian() @ orb.lambda_inf)) <= 1e-9


def test_constraints_in_left_kernel_random():
    rng = np.random.default_rng(11)
    for _ in range(100):
        n = int(rng.integers(1, 7))
        g = random_int_graph(rng, n, density=0.35)
        b = decompose_basins(g)
        om = g.laplacian()
        for k in constraint_vectors(g, b):
            v = k.as_array()
            assert np.max(np.abs(v @ om)) <= 1e-9 * np.linalg.norm(v) * max(np.linalg.norm(om), 1)


def test_enumerate_and_determinant_agree_random():
    rng = np.random.default_rng(12)
    for _ in range(200):
        n = int(rng.integers(1, 7))
        g = strongly_connected_int_graph(rng, n)
        gf = RateGraph(n, tuple((s, t, w * rng.uniform(0.5, 2)) for s, t, w in g.edges))
        b = decompose_basins(g)
        stationary_orbits(g, b, "both")
        stationary_orbits(gf, b, "both")


def test_matrix_tree_theorem_random():
    rng = np.random.default_rng(13)
    for _ in range(100):
        n = int(rng.integers(2, 7))
        g = random_int_graph(rng, n)
        k = int(rng.integers(1, n))
        removed = sorted(rng.choice(n, size=k, replace=False).tolist())
        fs = forest_sum(g, removed)
        det = minor_determinant(g.laplacian(), removed)
        assert det == pytest.approx((-1) ** (n - k) * fs, rel=1e-9, abs=1e-9)
        assert minor_determinant(g.laplacian(), removed, exact=True) == (-1) ** (n - k) * fs


def test_conservation_under_flow(decay8):
    om, g, b = decay8
    ks = constraint_vectors(g, b)
    rng = np.random.default_rng(14)
    lam0 = rng.dirichlet(np.ones(8))
    traj = integrate_lambda(om, lam0, 5.0, 4e-4, record_every=100)
    for k in ks:
        v = k.as_array()
        drift = np.abs(traj.states @ v - v @ lam0)
        assert drift.max() <= 1e-8 * np.linalg.norm(v)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(0.1, 50))
def test_scaling_invariance(seed, s):
    rng = np.random.default_rng(seed)
    g = strongly_connected_int_graph(rng, int(rng.integers(1, 6)))
    b = decompose_basins(g)
    gs = RateGraph(g.n, tuple((a, t, w * s) for a, t, w in g.edges))
    (o1,) = stationary_orbits(g, b)
    (o2,) = stationary_orbits(gs, b)
    np.testing.assert_allclose(o1.lambda_inf, o2.lambda_inf, rtol=1e-9)


def test_transformed_nine_level_orbits():
    _, g, b = analyse(nine_level_transformed())
    orbs = stationary_orbits(g, b, "both")
    assert len(orbs) == 3
    for o in orbs:
        assert sorted(o.exact[v] for v in b.basins[o.eta]) == [Fraction(4, 49), Fraction(9, 49), Fraction(36, 49)]
