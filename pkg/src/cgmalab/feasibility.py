"""Fourier–Motzkin elimination for small systems of linear inequalities.

The question answered is how deep the open polyhedron ``{x : A x > b}``
is: the largest ``s`` such that ``A x - b >= s * |A_i|`` row-wise has a
solution.  A positive margin means the open set is non-empty (and contains
a ball of that radius); a non-negative margin means the closure is
non-empty.  No LP solver is involved; every step is an explicit
combination of rows, so the result is exact up to floating-point rounding
of those combinations.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Feasibility:
    margin: float            # +inf when unbounded
    witness: np.ndarray | None  # interior point when margin > 0


def _eliminate(rows: np.ndarray, j: int) -> np.ndarray:
    """Eliminate column ``j`` from ``rows @ [x, s, -1] >= 0``."""
    col = rows[:, j]
    pos = rows[col > 0]
    neg = rows[col < 0]
    zero = rows[col == 0]
    if len(pos) and len(neg):
        pos_n = pos / pos[:, j:j + 1]
        neg_n = neg / (-neg[:, j:j + 1])
        combos = (pos_n[:, None, :] + neg_n[None, :, :]).reshape(-1, rows.shape[1])
        combos[:, j] = 0.0
        out = np.vstack([zero, combos]) if len(zero) else combos
    else:
        out = zero
    if len(out):
        scale = np.max(np.abs(out), axis=1, keepdims=True)
        scale[scale == 0] = 1.0
        out = np.unique(np.round(out / scale, 15), axis=0)
    return out


def _interval(rows: np.ndarray, j: int, assigned: np.ndarray) -> tuple[float, float]:
    lo, hi = -np.inf, np.inf
    for r in rows:
        c = r[j]
        rest = r @ assigned - c * assigned[j]
        if c > 0:
            lo = max(lo, -rest / c)
        elif c < 0:
            hi = min(hi, -rest / c)
    return lo, hi


def chebyshev_margin(A, b) -> Feasibility:
    """Depth of ``{x : A x > b}`` and an interior witness point."""
    A = np.atleast_2d(np.asarray(A, dtype=float))
    b = np.asarray(b, dtype=float).reshape(-1)
    n = A.shape[1]
    norms = np.linalg.norm(A, axis=1)
    if np.any(norms == 0):
        if np.any(b[norms == 0] >= 0):
            return Feasibility(-np.inf, None)
        A, b, norms = A[norms > 0], b[norms > 0], norms[norms > 0]
    if len(A) == 0:
        return Feasibility(np.inf, np.zeros(n))
    # columns: x_0..x_{n-1}, s, constant;  row @ [x, s, 1] >= 0
    rows = np.hstack([A / norms[:, None], -np.ones((len(A), 1)), -(b / norms)[:, None]])
    stages = [rows]
    for j in range(n):
        rows = _eliminate(rows, j)
        stages.append(rows)
    margin = np.inf
    for r in rows:
        c, d = r[n], -r[n + 1]
        if c < 0:
            margin = min(margin, d / c)
        elif c == 0 and d > 0:
            return Feasibility(-np.inf, None)
    if margin <= 0:
        return Feasibility(float(margin), None)
    s = 1.0 if np.isinf(margin) else 0.5 * margin
    assigned = np.zeros(n + 2)
    assigned[n] = s
    assigned[n + 1] = 1.0
    for j in range(n - 1, -1, -1):
        lo, hi = _interval(stages[j], j, assigned)
        if np.isinf(lo) and np.isinf(hi):
            v = 0.0
        elif np.isinf(lo):
            v = hi - 1.0
        elif np.isinf(hi):
            v = lo + 1.0
        else:
            v = 0.5 * (lo + hi)
        assigned[j] = v
    return Feasibility(float(margin), assigned[:n].copy())
