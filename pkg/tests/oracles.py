"""Independent reference computations used by the tests.

None of these call into the package's own solvers: they rebuild the
quantity from its definition with different numerics.
"""

from __future__ import annotations

import numpy as np

G = np.diag([1.0, -1.0, -1.0, -1.0])


def realify_s(basis: np.ndarray, omega: np.ndarray) -> np.ndarray:
    """Real 2d x 2d matrix of ``S: a Omega -> a* Omega`` built column by column.

    The domain is spanned over the reals by ``a Omega`` and ``(i a) Omega``
    for every basis element ``a``; ``S`` sends them to ``a* Omega`` and
    ``-i a* Omega``.  Solving the resulting real linear system gives S
    without ever forming a complex inverse.
    """
    cols_in, cols_out = [], []
    for a in basis:
        for c in (1.0, 1j):
            x = (c * a) @ omega
            y = (c * a).conj().T @ omega
            cols_in.append(np.concatenate([x.real, x.imag]))
            cols_out.append(np.concatenate([y.real, y.imag]))
    Xin = np.array(cols_in).T
    Yout = np.array(cols_out).T
    # least squares: S Xin = Yout with Xin of full row rank 2d
    S, *_ = np.linalg.lstsq(Xin.T, Yout.T, rcond=None)
    return S.T


def brute_force_delta_spectrum(basis: np.ndarray, omega: np.ndarray) -> np.ndarray:
    """Eigenvalues of ``S^* S`` from the realified S; each complex eigenvalue appears twice."""
    S = realify_s(basis, omega)
    w = np.sort(np.linalg.eigvalsh(S.T @ S))
    return w[::2]


def schmidt_delta_spectrum(weights) -> np.ndarray:
    """Closed form: ``Delta = rho (x) rho^-1`` for a Schmidt vector with the given weights."""
    w = np.asarray(weights, dtype=float)
    return np.sort(np.outer(w, 1.0 / w).ravel())


def in_wedge(points: np.ndarray, lp, lm, apex) -> np.ndarray:
    d = points - np.asarray(apex)[None, :]
    return (d @ (G @ lp) > 0) & (-(d @ (G @ lm)) > 0)


def monte_carlo_meet(W1, W2, rng: np.random.Generator, n: int = 10_000, radius: float = 20.0) -> bool:
    """Whether random points (box plus points near the two apices) hit both wedges."""
    pts = rng.uniform(-radius, radius, size=(n, 4))
    near = np.concatenate([W1.xi[None, :] + rng.normal(scale=3.0, size=(n // 4, 4)),
                           W2.xi[None, :] + rng.normal(scale=3.0, size=(n // 4, 4))])
    pts = np.concatenate([pts, near])
    a = in_wedge(pts, W1.ell_plus, W1.ell_minus, W1.xi)
    b = in_wedge(pts, W2.ell_plus, W2.ell_minus, W2.xi)
    return bool(np.any(a & b))


def reflection_1p1(apex2) -> np.ndarray:
    """``x -> 2 apex - x`` on the (x0, x1) plane, identity on x2, x3 (affine 5x5)."""
    M = np.eye(5)
    M[0, 0] = M[1, 1] = -1.0
    M[0, 4] = 2.0 * apex2[0]
    M[1, 4] = 2.0 * apex2[1]
    return M


def momentum_grid(m: float, K: int, h: float) -> np.ndarray:
    th = np.arange(-K, K + 1) * h
    return np.column_stack([m * np.cosh(th), m * np.sinh(th)])
