"""Minkowski four-vectors and the Poincaré group as concrete matrices.

Signature is (+,-,-,-).  A Poincaré element acts as ``x -> Lambda @ x + a``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np
from scipy.spatial.transform import Rotation

METRIC = np.diag([1.0, -1.0, -1.0, -1.0])
TOL_GEO = 1e-10


class GeometryError(ValueError):
    """Invalid geometric input (non-finite vector, non-Lorentz matrix, ...)."""


def four_vector(x: Sequence[float] | np.ndarray) -> np.ndarray:
    """Validate and return a length-4 float array.

    Two-component input ``(x0, x1)`` is padded with zeros, which is how the
    1+1 model embeds its vectors.
    """
    v = np.asarray(x, dtype=float).reshape(-1)
    if v.shape == (2,):
        v = np.array([v[0], v[1], 0.0, 0.0])
    if v.shape != (4,):
        raise GeometryError(f"expected 4 components, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise GeometryError(f"non-finite four-vector {v!r}")
    return v


def minkowski_inner(x, y) -> float:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    return float(x[0] * y[0] - x[1] * y[1] - x[2] * y[2] - x[3] * y[3])


def metric_residual(L: np.ndarray) -> float:
    return float(np.max(np.abs(L.T @ METRIC @ L - METRIC)))


class LorentzClass(NamedTuple):
    proper: bool
    orthochronous: bool


@dataclass(frozen=True, eq=False)
class PoincareElement:
    """``x -> Lambda x + a``."""

    Lambda: np.ndarray
    a: np.ndarray

    def __post_init__(self):
        L = np.array(self.Lambda, dtype=float)
        if L.shape != (4, 4) or not np.all(np.isfinite(L)):
            raise GeometryError("Lambda must be a finite 4x4 matrix")
        L.setflags(write=False)
        a = four_vector(self.a).copy()
        a.setflags(write=False)
        object.__setattr__(self, "Lambda", L)
        object.__setattr__(self, "a", a)

    def __matmul__(self, other: "PoincareElement") -> "PoincareElement":
        return compose(self, other)

    def __call__(self, x) -> np.ndarray:
        return apply(self, x)

    def is_valid(self, tol: float = TOL_GEO) -> bool:
        return metric_residual(self.Lambda) <= tol and abs(abs(np.linalg.det(self.Lambda)) - 1.0) <= tol

    def is_translation(self, tol: float = TOL_GEO) -> bool:
        return float(np.max(np.abs(self.Lambda - np.eye(4)))) <= tol

    def to_json(self) -> dict:
        return {"Lambda": [float(v) for v in self.Lambda.reshape(-1)], "a": [float(v) for v in self.a]}

    @classmethod
    def from_json(cls, obj: dict) -> "PoincareElement":
        L = np.asarray(obj["Lambda"], dtype=float)
        if L.size != 16:
            raise GeometryError("Lambda must have 16 entries")
        return cls(L.reshape(4, 4), obj.get("a", [0.0, 0.0, 0.0, 0.0]))

    def __repr__(self) -> str:
        return f"PoincareElement(Lambda={self.Lambda.tolist()}, a={self.a.tolist()})"


IDENTITY = PoincareElement(np.eye(4), np.zeros(4))


def lorentz(L) -> PoincareElement:
    return PoincareElement(L, np.zeros(4))


def translation(a) -> PoincareElement:
    return PoincareElement(np.eye(4), a)


def compose(l1: PoincareElement, l2: PoincareElement) -> PoincareElement:
    """``l1 ∘ l2``: apply ``l2`` first."""
    return PoincareElement(l1.Lambda @ l2.Lambda, l1.Lambda @ l2.a + l1.a)


def compose_all(elements: Sequence[PoincareElement]) -> PoincareElement:
    out = IDENTITY
    for el in elements:
        out = compose(out, el)
    return out


def invert(l: PoincareElement) -> PoincareElement:
    # Lambda^{-1} = g Lambda^T g for a Lorentz matrix
    Linv = METRIC @ l.Lambda.T @ METRIC
    return PoincareElement(Linv, -Linv @ l.a)


def apply(l: PoincareElement, x) -> np.ndarray:
    return l.Lambda @ four_vector(x) + l.a


def classify(l: PoincareElement, tol: float = TOL_GEO) -> LorentzClass:
    res = metric_residual(l.Lambda)
    if res > tol:
        raise GeometryError(f"not a Lorentz matrix: metric residual {res:.3e} > {tol:.1e}")
    return LorentzClass(proper=bool(np.linalg.det(l.Lambda) > 0), orthochronous=bool(l.Lambda[0, 0] > 0))


def distance(l1: PoincareElement, l2: PoincareElement) -> float:
    """Max-entry distance between two elements (Lambda and translation)."""
    return float(max(np.max(np.abs(l1.Lambda - l2.Lambda)), np.max(np.abs(l1.a - l2.a))))


def boost(rapidity: float, axis) -> np.ndarray:
    """Pure boost along the spatial unit direction ``axis``."""
    n = np.asarray(axis, dtype=float)
    n = n / np.linalg.norm(n)
    ch, sh = np.cosh(rapidity), np.sinh(rapidity)
    L = np.eye(4)
    L[0, 0] = ch
    L[0, 1:] = sh * n
    L[1:, 0] = sh * n
    L[1:, 1:] += (ch - 1.0) * np.outer(n, n)
    return L


def rotation(rotvec) -> np.ndarray:
    L = np.eye(4)
    L[1:, 1:] = Rotation.from_rotvec(np.asarray(rotvec, dtype=float)).as_matrix()
    return L


def random_lorentz(rng: np.random.Generator, max_rapidity: float = 3.0, proper_only: bool = False) -> np.ndarray:
    """rotation · boost · rotation, optionally times a discrete reflection."""
    r1 = Rotation.random(random_state=rng).as_matrix()
    r2 = Rotation.random(random_state=rng).as_matrix()
    chi = rng.uniform(-max_rapidity, max_rapidity)
    R1 = np.eye(4)
    R1[1:, 1:] = r1
    R2 = np.eye(4)
    R2[1:, 1:] = r2
    L = R1 @ boost(chi, [0.0, 0.0, 1.0]) @ R2
    choices = [np.eye(4), np.diag([-1.0, -1.0, -1.0, -1.0])]
    if not proper_only:
        choices += [np.diag([1.0, -1.0, 1.0, 1.0]), np.diag([-1.0, 1.0, 1.0, 1.0])]
    return L @ choices[rng.integers(len(choices))]


def random_poincare(rng: np.random.Generator, max_rapidity: float = 3.0, scale: float = 5.0,
                    proper_only: bool = False) -> PoincareElement:
    return PoincareElement(random_lorentz(rng, max_rapidity, proper_only), rng.uniform(-scale, scale, size=4))
