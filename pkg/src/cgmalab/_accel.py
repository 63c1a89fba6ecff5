"""Numeric kernels with an optional numba path.

Set ``CGMALAB_DISABLE_NUMBA=1`` before import to force the pure-numpy
implementations.  Both paths are kept importable under explicit names
(``*_numba`` / ``*_numpy``) so tests and the benchmark can compare them.
"""

from __future__ import annotations

import os

import numpy as np

_DISABLED = os.environ.get("CGMALAB_DISABLE_NUMBA", "").strip().lower() in {"1", "true", "yes"}

try:
    if _DISABLED:
        raise ImportError("numba disabled by CGMALAB_DISABLE_NUMBA")
    import numba

    njit = numba.njit(cache=True, nogil=True)
    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - depends on environment
    numba = None
    HAVE_NUMBA = False

    def njit(func):
        return func


# metric (+,-,-,-)

def _contains_points_numpy(points, ell_plus, ell_minus, apex, closed):
    d = points - apex[None, :]
    gp = ell_plus * np.array([1.0, -1.0, -1.0, -1.0])
    gm = ell_minus * np.array([1.0, -1.0, -1.0, -1.0])
    a = d @ gp
    b = -(d @ gm)
    if closed:
        return (a >= 0.0) & (b >= 0.0)
    return (a > 0.0) & (b > 0.0)


def _contains_points_loop(points, ell_plus, ell_minus, apex, closed):
    n = points.shape[0]
    out = np.empty(n, dtype=np.bool_)
    for i in range(n):
        a = 0.0
        b = 0.0
        for mu in range(4):
            sign = 1.0 if mu == 0 else -1.0
            dx = points[i, mu] - apex[mu]
            a += sign * dx * ell_plus[mu]
            b -= sign * dx * ell_minus[mu]
        if closed:
            out[i] = a >= 0.0 and b >= 0.0
        else:
            out[i] = a > 0.0 and b > 0.0
    return out


def _unwrap_doubling_numpy(phases):
    """Unwrap eigenphases sampled at steps s, s/2, ..., s/2**L.

    ``phases`` has shape (L+1, n); row 0 is the coarsest step.  Returns the
    unwrapped phase at the coarsest step and the largest per-level
    correction mismatch (distance to the nearest lattice point).
    """
    levels = phases.shape[0]
    current = phases[levels - 1].copy()
    worst = 0.0
    for j in range(levels - 2, -1, -1):
        predicted = 2.0 * current
        k = np.round((phases[j] - predicted) / (2.0 * np.pi))
        candidate = phases[j] - 2.0 * np.pi * k
        mismatch = np.abs(candidate - predicted)
        if mismatch.size:
            worst = max(worst, float(mismatch.max()))
        current = candidate
    return current, worst


def _unwrap_doubling_loop(phases):
    levels = phases.shape[0]
    n = phases.shape[1]
    current = np.empty(n)
    for i in range(n):
        current[i] = phases[levels - 1, i]
    worst = 0.0
    two_pi = 2.0 * np.pi
    for j in range(levels - 2, -1, -1):
        for i in range(n):
            predicted = 2.0 * current[i]
            k = np.round((phases[j, i] - predicted) / two_pi)
            candidate = phases[j, i] - two_pi * k
            mismatch = abs(candidate - predicted)
            if mismatch > worst:
                worst = mismatch
            current[i] = candidate
    return current, worst



contains_points_numpy = _contains_points_numpy
unwrap_doubling_numpy = _unwrap_doubling_numpy

if HAVE_NUMBA:
    contains_points_numba = njit(_contains_points_loop)
    unwrap_doubling_numba = njit(_unwrap_doubling_loop)
    contains_points = contains_points_numba
    unwrap_doubling = unwrap_doubling_numba
else:  # pragma: no cover - depends on environment
    contains_points_numba = None
    unwrap_doubling_numba = None
    contains_points = contains_points_numpy
    unwrap_doubling = unwrap_doubling_numpy


def backend() -> str:
    return "numba" if HAVE_NUMBA else "numpy"
