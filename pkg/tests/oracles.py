"""Independent brute-force reference computations used by the tests.

Nothing here imports the package: matrices are assembled entry by entry and
suprema are taken over dense uniform phase grids, which gives lower bounds
that converge to the true value.
"""
import cmath
import itertools
import math

import numpy as np


def clock_shift(m, n):
    x = np.zeros((n, n), dtype=complex)
    y = np.zeros((n, n), dtype=complex)
    for j in range(n):
        x[j, j] = cmath.exp(2j * math.pi * m * (j + 1) / n)
        y[j, (j + 1) % n] = 1.0
    return x, y


def h_grid_sup(m, n, d, points, box=None):
    """max over a uniform phase grid of lambda_max(sum e^{i phi_k} u_k + h.c.)."""
    x, y = clock_shift(m, n)
    gens = [x, y] if d == 2 else [x, x @ y, y]
    if box is None:
        box = [2 * math.pi] * d
    axes = [np.arange(p) * b / p for p, b in zip(points, box)]
    best = -np.inf
    grid = np.array(list(itertools.product(*axes)))
    for chunk in np.array_split(grid, max(1, len(grid) // 20000)):
        e = np.exp(1j * chunk)
        g = np.einsum("mk,kij->mij", e, np.stack(gens))
        h = g + np.conj(np.swapaxes(g, 1, 2))
        best = max(best, float(np.linalg.eigvalsh(h)[:, -1].max()))
    return best


def h_pi_closed_form():
    """theta = pi: h = [[2a, 2b], [2b*, -2a]]-type family, sup over phases = 2 sqrt(2)."""
    return 2 * math.sqrt(2)
