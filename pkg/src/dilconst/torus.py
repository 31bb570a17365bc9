"""Certified maximization of lambda_max over a box of phases.

The objective is

    f(phi) = lambda_max( C + sum_k exp(i phi_k) A_k + h.c. )

for fixed square matrices A_k and a Hermitian offset C.  Two upper bounds
are available on a box with centre c and half-widths r:

* Lipschitz:  f(c) + 2 sum_k ||A_k|| r_k, since |exp(i delta) - 1| <= |delta|.
* Vertex:     max over the 2^k vertices v of the box of
              lambda_max(H(c) + sum_k v_k B_k) + sum_k ||A_k|| r_k^2,
              with B_k = i exp(i c_k) A_k + h.c.  This holds because
              lambda_max is convex on Hermitian matrices (so the linearised
              problem peaks at a vertex) and the second-order remainder of
              exp(i delta) is bounded by delta^2 / 2.

Boxes are refined level by level.  The refinement rule (split every box
whose bound exceeds the best value seen) does not depend on the requested
resolution, so a finer run evaluates a superset of the points of a coarser
one and its lower bound can only go up.
"""
from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
import scipy.optimize

MAX_CELLS = 2_000_000
_PRUNE_RTOL = 1e-13
_CHUNK_ENTRIES = 4_000_000


class ResourceCapError(RuntimeError):
    """Raised when a search would need more cells than allowed."""


@dataclass
class TorusMax:
    lower: float
    upper: float
    argmax: np.ndarray
    levels: int
    evaluations: int
    final_cells: int
    grid_step: float
    lipschitz: np.ndarray = field(repr=False)

    @property
    def width(self) -> float:
        return self.upper - self.lower


def _hermitian_batch(coeffs, constant, phases):
    e = np.exp(1j * phases)
    g = np.einsum("mk,kij->mij", e, coeffs)
    h = g + np.conj(np.swapaxes(g, 1, 2))
    if constant is not None:
        h = h + constant
    return h


def _chunked(fn, n_items, per_item, workers):
    size = max(1, _CHUNK_ENTRIES // max(per_item, 1))
    bounds = [(i, min(i + size, n_items)) for i in range(0, n_items, size)]
    if workers > 1 and len(bounds) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda b: fn(*b), bounds))
    else:
        parts = [fn(*b) for b in bounds]
    return np.concatenate(parts) if parts else np.empty(0)


def evaluate(coeffs, phases, constant=None, workers: int = 1) -> np.ndarray:
    """lambda_max of the Hermitian matrix at each row of ``phases``."""
    coeffs = np.asarray(coeffs, dtype=complex)
    phases = np.atleast_2d(np.asarray(phases, dtype=float))
    n = coeffs.shape[1]

    def run(a, b):
        return np.linalg.eigvalsh(_hermitian_batch(coeffs, constant, phases[a:b]))[:, -1]

    return _chunked(run, phases.shape[0], n * n, workers)


def _bounds(coeffs, constant, centres, fvals, r, norms, workers):
    k = coeffs.shape[0]
    n = coeffs.shape[1]
    lip = fvals + 2.0 * float(np.dot(norms, r))
    signs = np.array(list(itertools.product((-1.0, 1.0), repeat=k)))
    rem = float(np.dot(norms, r * r))

    def run(a, b):
        c = centres[a:b]
        e = np.exp(1j * c)
        h = _hermitian_batch(coeffs, constant, c)
        best = np.full(b - a, -np.inf)
        for s in signs:
            g = np.einsum("mk,kij->mij", 1j * e * (s * r), coeffs)
            hv = h + g + np.conj(np.swapaxes(g, 1, 2))
            best = np.maximum(best, np.linalg.eigvalsh(hv)[:, -1])
        return best

    vert = _chunked(run, centres.shape[0], n * n * (len(signs) + 1), workers) + rem
    return np.minimum(lip, vert)


def _children(centres, r):
    k = centres.shape[1]
    offsets = np.array(list(itertools.product((-0.5, 0.5), repeat=k))) * r
    return (centres[:, None, :] + offsets[None, :, :]).reshape(-1, k)


def _initial_cells(lo, hi):
    widths = hi - lo
    wmin = float(widths.min())
    counts = np.maximum(1, np.ceil(widths / wmin - 1e-12)).astype(int)
    r = widths / (2 * counts)
    axes = [lo[i] + r[i] * (2 * np.arange(counts[i]) + 1) for i in range(len(lo))]
    grid = np.array(list(itertools.product(*axes)), dtype=float)
    return grid, r


def _lexmin_argmax(points, values):
    top = values.max()
    idx = np.flatnonzero(values == top)
    if len(idx) > 1:
        order = np.lexsort(points[idx].T[::-1])
        return float(top), points[idx[order[0]]]
    return float(top), points[idx[0]]


def maximize(
    coeffs,
    lo,
    hi,
    grid_step: float,
    constant=None,
    workers: int = 1,
    max_cells: int = MAX_CELLS,
    atol: float = 0.0,
) -> TorusMax:
    """Certified sup of lambda_max over the box [lo, hi].

    Boxes are split until their side is at most ``grid_step``, they are
    pruned, or (with ``atol > 0``) the bracket is already narrower than
    ``atol``.  Returns a two-sided bracket ``lower <= sup <= upper``.
    """
    if not grid_step > 0:
        raise ValueError(f"grid_step must be positive, got {grid_step}")
    coeffs = np.asarray(coeffs, dtype=complex)
    if coeffs.ndim == 2:
        coeffs = coeffs[None]
    if constant is not None:
        constant = np.asarray(constant, dtype=complex)
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    norms = np.array([np.linalg.norm(a, 2) for a in coeffs])
    active = norms > 0
    if not active.all():
        # phases of zero coefficients do not enter the objective
        if not active.any():
            val = float(np.linalg.eigvalsh(constant)[-1]) if constant is not None else 0.0
            return TorusMax(val, val, lo.copy(), 0, 0, 0, float(grid_step), 2 * norms)
        sub = maximize(coeffs[active], lo[active], hi[active], grid_step, constant, workers, max_cells, atol)
        arg = lo.copy()
        arg[active] = sub.argmax
        sub.argmax = arg
        sub.lipschitz = 2 * norms
        return sub

    centres, r = _initial_cells(lo, hi)
    best, best_pt = -math.inf, None
    evaluations = 0
    levels = 0
    while True:
        levels += 1
        f = evaluate(coeffs, centres, constant, workers)
        evaluations += len(f)
        top, pt = _lexmin_argmax(centres, f)
        if top > best or (top == best and tuple(pt) < tuple(best_pt)):
            best, best_pt = top, pt
        ub = _bounds(coeffs, constant, centres, f, r, norms, workers)
        alive = ub > best + _PRUNE_RTOL * max(1.0, abs(best))
        if not alive.any():
            upper = best
            final = 0
            break
        if 2 * r.max() <= grid_step * (1 + 1e-12) or float(ub[alive].max()) - best <= atol:
            upper = float(ub[alive].max())
            final = int(alive.sum())
            break
        n_next = int(alive.sum()) * 2 ** len(r)
        if n_next > max_cells:
            raise ResourceCapError(
                f"torus search needs {n_next} cells at level {levels + 1} (cap {max_cells}); "
                "use a coarser grid"
            )
        centres = _children(centres[alive], r)
        r = r / 2
    return TorusMax(
        lower=float(best),
        upper=float(max(upper, best)),
        argmax=np.asarray(best_pt, dtype=float),
        levels=levels,
        evaluations=evaluations,
        final_cells=final,
        grid_step=float(grid_step),
        lipschitz=2 * norms,
    )


def grid_max(coeffs, lo, hi, points_per_axis: int, constant=None, workers: int = 1):
    """Best value over a uniform grid of cell centres; a rigorous lower bound only."""
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    step = (hi - lo) / points_per_axis
    axes = [lo[i] + step[i] * (np.arange(points_per_axis) + 0.5) for i in range(len(lo))]
    pts = np.array(list(itertools.product(*axes)), dtype=float)
    f = evaluate(coeffs, pts, constant, workers)
    return _lexmin_argmax(pts, f)


def local_max(coeffs, lo, hi, grid_step: float, constant=None, workers: int = 1, budget: int | None = None) -> TorusMax:
    """Uncertified sup estimate: a coarse grid followed by a quasi-Newton polish.

    Only ``lower`` is rigorous (it is an attained value); ``upper`` is set
    equal to it.  Use when a lower bound is all that is needed.
    """
    coeffs = np.asarray(coeffs, dtype=complex)
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    k, n = len(lo), coeffs.shape[1]
    if budget is None:
        budget = int(min(20000, max(64, 4e7 / n**2)))
    per_axis = int(max(2, min(math.ceil(float((hi - lo).max()) / grid_step), budget ** (1.0 / k))))
    top, pt = grid_max(coeffs, lo, hi, per_axis, constant, workers)
    evals = per_axis**k

    def neg(x):
        h = _hermitian_batch(coeffs, constant, np.asarray(x)[None])[0]
        w, v = np.linalg.eigh(h)
        xi = v[:, -1]
        amp = np.exp(1j * np.asarray(x)) * np.einsum("i,kij,j->k", xi.conj(), coeffs, xi)
        return -float(w[-1]), 2.0 * np.imag(amp)

    res = scipy.optimize.minimize(neg, pt, jac=True, method="L-BFGS-B", bounds=list(zip(lo, hi)))
    evals += int(res.nfev)
    if -res.fun > top:
        top, pt = -float(res.fun), np.asarray(res.x, dtype=float)
    norms = np.array([np.linalg.norm(a, 2) for a in coeffs])
    return TorusMax(top, top, np.asarray(pt, dtype=float), 1, evals, 0, float(grid_step), 2 * norms)
