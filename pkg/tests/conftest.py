import numpy as np
import pytest

from lindforest.graph import decompose_basins
from lindforest.laplacian import RateGraph, build_omega, build_rate_graph
from lindforest.model import LindbladSystem, gpm_from_permutation
from lindforest.systems import four_level_cycle, nine_level, nine_level_transformed, two_basin_decay

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)


def analyse(sys):
    om = build_omega(sys)
    g = build_rate_graph(om)
    return om, g, decompose_basins(g)


@pytest.fixture
def cycle4():
    return analyse(four_level_cycle())


@pytest.fixture
def decay8():
    return analyse(two_basin_decay())


@pytest.fixture
def nine():
    return nine_level()


@pytest.fixture
def nine_t():
    return nine_level_transformed()


def random_int_graph(rng, n, density=0.5, hi=9):
    edges = [
        (s, t, float(rng.integers(1, hi + 1)))
        for s in range(n)
        for t in range(n)
        if s != t and rng.random() < density
    ]
    return RateGraph(n, tuple(edges))


def strongly_connected_int_graph(rng, n, density=0.5, hi=9):
    """Random integer graph with a Hamiltonian cycle added, hence strongly connected."""
    g = random_int_graph(rng, n, density, hi)
    have = {(s, t) for s, t, _ in g.edges}
    extra = [(v, (v + 1) % n, float(rng.integers(1, hi + 1))) for v in range(n) if n > 1 and (v, (v + 1) % n) not in have]
    return RateGraph(n, tuple(sorted(g.edges + tuple(extra))))


def random_gpm_system(rng, n, n_ops=None, zero_prob=0.2, integer=True):
    n_ops = n_ops or int(rng.integers(1, 4))
    ops = []
    for _ in range(n_ops):
        sigma = rng.permutation(n)
        if integer:
            mags = rng.integers(1, 6, size=n).astype(float)
        else:
            mags = rng.uniform(0.5, 3.0, size=n)
        mags[rng.random(n) < zero_prob] = 0.0
        d = mags * np.exp(1j * rng.uniform(0, 2 * np.pi, size=n))
        ops.append(gpm_from_permutation(sigma, d))
    return LindbladSystem.from_diagonal(rng.normal(size=n), ops)


def random_system(rng, n, n_ops=2):
    h = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    h = (h + h.conj().T) / 2
    ops = [rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n)) for _ in range(n_ops)]
    return LindbladSystem(h, tuple(ops))
