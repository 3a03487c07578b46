"""Reference systems used in tests, docs and the CLI examples.

Indices here are 0-based; docstrings quote levels 1-based.
"""
from __future__ import annotations

import numpy as np

from .model import LindbladSystem, gpm_from_permutation


def _op(n: int, entries: dict) -> np.ndarray:
    """``sum c |j><k|`` from ``{(j, k): c}`` with 1-based ``j, k``."""
    m = np.zeros((n, n), dtype=np.complex128)
    for (j, k), c in entries.items():
        m[j - 1, k - 1] += c
    return m


def four_level_cycle() -> LindbladSystem:
    """Strongly connected four-level system with two cyclic jump operators.

    ``L1 = |1><2| + 2|2><3| + 3|3><4| + 4|4><1|`` and
    ``L2 = 5|1><3| + 10|3><2| + 2|2><4| + 6|4><1|``; ``H = 0``.
    """
    l1 = _op(4, {(1, 2): 1, (2, 3): 2, (3, 4): 3, (4, 1): 4})
    l2 = _op(4, {(1, 3): 5, (3, 2): 10, (2, 4): 2, (4, 1): 6})
    return LindbladSystem(np.zeros((4, 4)), (l1, l2))


def two_basin_decay() -> LindbladSystem:
    """Eight levels: basins {1,2} and {3,4} fed by the decay cycle 5..8.

    ``L3`` couples 1<->2, 3<->4 and runs 5 -> 8 -> 7 -> 6 -> 5;
    ``L4`` drains 5 -> 1, 6 -> 2, 7 -> 3, 8 -> 4.
    """
    l3 = _op(8, {(2, 1): 2, (1, 2): 3, (3, 4): 4, (4, 3): 5,
                 (5, 6): 6, (6, 7): 7, (7, 8): 8, (8, 5): 9})
    l4 = _op(8, {(1, 5): 10, (2, 6): 11, (3, 7): 12, (4, 8): 13})
    return LindbladSystem(np.zeros((8, 8)), (l3, l4))


NINE_LEVEL_ENERGIES = (1.0, 0.0, -1.0, 1.0, 0.0, -1.0, 1.0, 0.0, -1.0)

# sigma[j] = level that population on j is moved to (0-based).
SIGMA5 = (6, 7, 8, 0, 1, 2, 3, 4, 5)
SIGMA6 = (2, 0, 1, 5, 3, 4, 8, 6, 7)
MOD5 = (4, 5, 6)
MOD6 = (1, 2, 3)


def nine_level(theta5=None, theta6=None, energies=NINE_LEVEL_ENERGIES) -> LindbladSystem:
    """Nine-level GPM system with three basins of three levels each.

    ``|D5_j|`` is 4, 5, 6 and ``|D6_j|`` is 1, 2, 3 depending on
    ``j mod 3``; the phases ``theta5``/``theta6`` default to zero.
    """
    t5 = np.zeros(9) if theta5 is None else np.asarray(theta5, dtype=float)
    t6 = np.zeros(9) if theta6 is None else np.asarray(theta6, dtype=float)
    d5 = np.array([MOD5[j % 3] for j in range(9)]) * np.exp(1j * t5)
    d6 = np.array([MOD6[j % 3] for j in range(9)]) * np.exp(1j * t6)
    l5 = gpm_from_permutation(SIGMA5, d5)
    l6 = gpm_from_permutation(SIGMA6, d6)
    return LindbladSystem.from_diagonal(energies, (l5, l6))


NINE_LEVEL_RELATION = ((0, 3, 6), (1, 4, 7), (2, 5, 8))


def nine_level_transformed(theta5=None, theta6=None) -> LindbladSystem:
    """The nine-level system written in its symmetry-adapted basis ``|j, k>``.

    Basis state ``|j, k>`` (``j = 1..3``, ``k = 0..2``) has index
    ``3 (j - 1) + k``.
    """
    t5 = np.zeros(9) if theta5 is None else np.asarray(theta5, dtype=float)
    t6 = np.zeros(9) if theta6 is None else np.asarray(theta6, dtype=float)

    def idx(j, k):
        return 3 * (j - 1) + k

    l5 = np.zeros((9, 9), dtype=np.complex128)
    for j in (1, 2, 3):
        amp = MOD5[j - 1] * np.exp(1j * (t5[j - 1] + t5[j + 2] + t5[j + 5]))
        for k in range(3):
            l5[idx(j, k), idx(j, k)] = np.exp(2j * np.pi * k / 3) * amp
    l6 = np.zeros((9, 9), dtype=np.complex128)
    for a, b, amp in ((1, 2, 2 * np.exp(1j * t6[1])), (2, 3, 3 * np.exp(1j * t6[2])), (3, 1, np.exp(1j * t6[0]))):
        for k in range(3):
            l6[idx(a, k), idx(b, (k + 1) % 3)] = amp
    energies = [NINE_LEVEL_ENERGIES[j - 1] for j in (1, 2, 3) for _ in range(3)]
    labels = [f"|{j},{k}>" for j in (1, 2, 3) for k in range(3)]
    return LindbladSystem.from_diagonal(energies, (l5, l6), labels)


def gauge_phases(phi, c5: float = 0.0, c6: float = 0.0) -> tuple[np.ndarray, np.ndarray]:
    """Phases ``theta_{alpha,j} = phi[sigma_alpha(j)] - phi[j] + c_alpha``.

    Such phases are a diagonal unitary change of basis away from the
    zero-phase system up to a global phase per operator, so resonance is
    preserved.
    """
    phi = np.asarray(phi, dtype=float)
    t5 = np.array([phi[SIGMA5[j]] - phi[j] for j in range(9)]) + c5
    t6 = np.array([phi[SIGMA6[j]] - phi[j] for j in range(9)]) + c6
    return t5, t6


def discrete_shift(theta6, k: int) -> np.ndarray:
    """Add ``2 pi k / 3`` to ``theta6`` on levels 4..6 and subtract it on 7..9."""
    t = np.array(theta6, dtype=float)
    t[3:6] += 2 * np.pi * k / 3
    t[6:9] -= 2 * np.pi * k / 3
    return t
