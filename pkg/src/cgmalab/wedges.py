"""Wedge regions of Minkowski space and their Poincaré calculus.

A wedge is stored as two future-directed null rays and an apex::

    W = { x : (x - xi).ell_plus > 0  and  -(x - xi).ell_minus > 0 }

With ``ell_plus = (1,-1,0,0)`` and ``ell_minus = (1,1,0,0)`` this is the
right wedge ``{x1 > |x0|}``.  Rays are scaled to unit time component and
the apex is reduced to its component in the timelike plane spanned by the
rays (the edge directions act trivially), which makes equality decidable.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from scipy.linalg import null_space
from scipy.spatial.transform import Rotation

from . import _accel
from .feasibility import chebyshev_margin
from .geometry import (
    METRIC,
    TOL_GEO,
    GeometryError,
    PoincareElement,
    boost,
    compose,
    compose_all,
    distance,
    four_vector,
    minkowski_inner,
    translation,
)

_G = np.array([1.0, -1.0, -1.0, -1.0])


def light_ray(v, tol: float = TOL_GEO) -> np.ndarray:
    """Canonical future null ray (time component 1)."""
    v = four_vector(v)
    spatial = np.linalg.norm(v[1:])
    if v[0] <= 0 or spatial == 0:
        raise GeometryError(f"not a future-directed null vector: {v.tolist()}")
    if abs(v[0] - spatial) > tol * max(1.0, v[0]):
        raise GeometryError(f"not a null vector: {v.tolist()}")
    return np.concatenate([[1.0], v[1:] / spatial])


def _plane_projector(lp: np.ndarray, lm: np.ndarray) -> np.ndarray:
    """Minkowski-orthogonal projector onto span(lp, lm)."""
    return (np.outer(lp, _G * lm) + np.outer(lm, _G * lp)) / minkowski_inner(lp, lm)


@dataclass(frozen=True, eq=False)
class Wedge:
    ell_plus: np.ndarray
    ell_minus: np.ndarray
    xi: np.ndarray = field(default_factory=lambda: np.zeros(4))

    def __post_init__(self):
        lp = light_ray(self.ell_plus)
        lm = light_ray(self.ell_minus)
        if np.linalg.norm(lp[1:] - lm[1:]) <= 1e-8:
            raise GeometryError("parallel rays do not bound a wedge")
        xi = _plane_projector(lp, lm) @ four_vector(self.xi)
        for arr in (lp, lm, xi):
            arr.setflags(write=False)
        object.__setattr__(self, "ell_plus", lp)
        object.__setattr__(self, "ell_minus", lm)
        object.__setattr__(self, "xi", xi)

    def __add__(self, shift) -> "Wedge":
        return Wedge(self.ell_plus, self.ell_minus, self.xi + four_vector(shift))

    def __sub__(self, shift) -> "Wedge":
        return self + (-four_vector(shift))

    def __eq__(self, other) -> bool:
        if not isinstance(other, Wedge):
            return NotImplemented
        return wedge_equal(self, other)

    __hash__ = None

    @property
    def projector(self) -> np.ndarray:
        return _plane_projector(self.ell_plus, self.ell_minus)

    def to_json(self) -> dict:
        return {
            "ell_plus": [float(v) for v in self.ell_plus],
            "ell_minus": [float(v) for v in self.ell_minus],
            "xi": [float(v) for v in self.xi],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "Wedge":
        return cls(obj["ell_plus"], obj["ell_minus"], obj.get("xi", [0.0, 0.0, 0.0, 0.0]))

    def __repr__(self) -> str:
        fmt = lambda a: "(" + ", ".join(f"{v:.6g}" for v in a) + ")"
        return f"Wedge(l+={fmt(self.ell_plus)}, l-={fmt(self.ell_minus)}, xi={fmt(self.xi)})"


def make_wedge(lp, lm, xi=(0.0, 0.0, 0.0, 0.0)) -> Wedge:
    return Wedge(np.asarray(lp, dtype=float), np.asarray(lm, dtype=float), np.asarray(xi, dtype=float))


def standard_wedge(direction, apex=(0.0, 0.0, 0.0, 0.0)) -> Wedge:
    """``{x : x.n > |x0|}`` shifted by ``apex``, for a spatial direction n."""
    n = np.asarray(direction, dtype=float)
    n = n / np.linalg.norm(n)
    return make_wedge(np.concatenate([[1.0], -n]), np.concatenate([[1.0], n]), apex)


def axis_wedge(i: int, apex=(0.0, 0.0, 0.0, 0.0)) -> Wedge:
    """The coordinate wedge ``W_i = {x_i > |x_0|}``, i = 1, 2, 3."""
    n = np.zeros(3)
    n[i - 1] = 1.0
    return standard_wedge(n, apex)


W1 = axis_wedge(1)


def wedge_equal(W1_: Wedge, W2_: Wedge, tol: float = TOL_GEO) -> bool:
    if np.max(np.abs(W1_.ell_plus - W2_.ell_plus)) > tol or np.max(np.abs(W1_.ell_minus - W2_.ell_minus)) > tol:
        return False
    scale = max(1.0, float(np.max(np.abs(W1_.xi))), float(np.max(np.abs(W2_.xi))))
    return float(np.max(np.abs(W1_.xi - W2_.xi))) <= tol * scale


def wedge_distance(W1_: Wedge, W2_: Wedge) -> float:
    return float(max(np.max(np.abs(W1_.ell_plus - W2_.ell_plus)),
                     np.max(np.abs(W1_.ell_minus - W2_.ell_minus)),
                     np.max(np.abs(W1_.xi - W2_.xi))))


def contains(W: Wedge, x) -> bool:
    d = four_vector(x) - W.xi
    return minkowski_inner(d, W.ell_plus) > 0 and -minkowski_inner(d, W.ell_minus) > 0


def contains_many(W: Wedge, points: np.ndarray, closed: bool = False) -> np.ndarray:
    pts = np.ascontiguousarray(points, dtype=float).reshape(-1, 4)
    return _accel.contains_points(pts, W.ell_plus, W.ell_minus, W.xi, closed)


def complement(W: Wedge) -> Wedge:
    return Wedge(W.ell_minus, W.ell_plus, W.xi)


def transform(lam: PoincareElement, W: Wedge) -> Wedge:
    Lp = lam.Lambda @ W.ell_plus
    Lm = lam.Lambda @ W.ell_minus
    apex = lam.Lambda @ W.xi + lam.a
    if Lp[0] > 0:
        return Wedge(Lp, Lm, apex)
    # time-reversing: both rays turn past-directed and the inequalities swap roles
    return Wedge(-Lm, -Lp, apex)


def dilate(W: Wedge, scale: float) -> Wedge:
    if scale <= 0:
        raise GeometryError("dilation scale must be positive")
    return Wedge(W.ell_plus, W.ell_minus, scale * W.xi)


def included(W1_: Wedge, W2_: Wedge, tol: float = TOL_GEO) -> bool:
    """Point-set inclusion ``W1 ⊂ W2``."""
    if np.max(np.abs(W1_.ell_plus - W2_.ell_plus)) > tol or np.max(np.abs(W1_.ell_minus - W2_.ell_minus)) > tol:
        return False
    d = W1_.xi - W2_.xi
    return minkowski_inner(d, W2_.ell_plus) >= -tol and -minkowski_inner(d, W2_.ell_minus) >= -tol


def _halfspaces(W: Wedge) -> tuple[np.ndarray, np.ndarray]:
    gp, gm = _G * W.ell_plus, _G * W.ell_minus
    A = np.vstack([gp, -gm])
    b = np.array([gp @ W.xi, -gm @ W.xi])
    return A, b


def intersection_margin(W1_: Wedge, W2_: Wedge):
    A1, b1 = _halfspaces(W1_)
    A2, b2 = _halfspaces(W2_)
    return chebyshev_margin(np.vstack([A1, A2]), np.concatenate([b1, b2]))


def disjoint(W1_: Wedge, W2_: Wedge, tol: float = TOL_GEO) -> bool:
    """Open wedges have empty intersection (depth of overlap at most ``tol``)."""
    return intersection_margin(W1_, W2_).margin <= tol


def closures_intersect(W1_: Wedge, W2_: Wedge, tol: float = TOL_GEO) -> bool:
    return intersection_margin(W1_, W2_).margin >= -tol


def intersection_witness(W1_: Wedge, W2_: Wedge) -> np.ndarray | None:
    return intersection_margin(W1_, W2_).witness


def edge_basis(W: Wedge) -> np.ndarray:
    """Two spacelike vectors spanning the edge, Minkowski-orthonormal (rows)."""
    N = null_space(np.vstack([_G * W.ell_plus, _G * W.ell_minus]))
    e1 = N[:, 0] / np.sqrt(-minkowski_inner(N[:, 0], N[:, 0]))
    v = N[:, 1] + minkowski_inner(N[:, 1], e1) * e1
    e2 = v / np.sqrt(-minkowski_inner(v, v))
    return np.vstack([e1, e2])


def edge(W: Wedge) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    e = edge_basis(W)
    return W.xi.copy(), e[0], e[1]


def edge_reflection(W: Wedge) -> PoincareElement:
    """Involution fixing the edge pointwise and exchanging W with W'."""
    L = np.eye(4) - 2.0 * W.projector
    return PoincareElement(L, W.xi - L @ W.xi)


def reflection_translation(W: Wedge, xi, tol: float = 1e-12) -> np.ndarray:
    """Translation ``xi - Ad(lambda_W) xi`` induced by ``lambda_{W+xi} lambda_W``."""
    xi = four_vector(xi)
    L = edge_reflection(W).Lambda
    v = xi - L @ xi
    prod = compose(edge_reflection(W + xi), edge_reflection(W))
    scale = max(1.0, float(np.max(np.abs(W.xi))), float(np.max(np.abs(xi))))
    if distance(prod, translation(v)) > tol * scale * 10:
        raise RuntimeError(f"geometry bug: reflection product is not the translation {v.tolist()}")
    return v


def frame(W: Wedge) -> PoincareElement:
    """Proper orthochronous element mapping the right wedge W_1 onto W."""
    lp, lm = W.ell_plus, W.ell_minus
    nrm = np.sqrt(2.0 * minkowski_inner(lp, lm))
    e = edge_basis(W)
    L = np.column_stack([(lp + lm) / nrm, (lm - lp) / nrm, e[0], e[1]])
    if np.linalg.det(L) < 0:
        L[:, 3] *= -1.0
    return PoincareElement(L, W.xi)


# ---------------------------------------------------------------------------
# reflection words


def word_element(word: Sequence[Wedge]) -> PoincareElement:
    """``lambda_{W_1} ... lambda_{W_n}`` (rightmost applied first)."""
    return compose_all([edge_reflection(W) for W in word])


def _orthogonal_unit(n: np.ndarray) -> np.ndarray:
    trial = np.eye(3)[int(np.argmin(np.abs(n)))]
    f = trial - (trial @ n) * n
    return f / np.linalg.norm(f)


def _translation_word(b: np.ndarray) -> list[Wedge]:
    if not np.any(b):
        return []
    spatial = b[1:]
    n = spatial / np.linalg.norm(spatial) if np.any(spatial) else np.array([1.0, 0.0, 0.0])
    W = standard_wedge(n)
    return [W + b / 2.0, W]


def _boost_word(v: np.ndarray) -> tuple[list[Wedge], np.ndarray]:
    """Word for the pure boost taking e0 to v, and that boost's matrix."""
    s = np.linalg.norm(v[1:])
    if s == 0:
        return [], np.eye(4)
    n = v[1:] / s
    chi = np.arcsinh(s)
    Wf = standard_wedge(_orthogonal_unit(n))
    half = PoincareElement(boost(chi / 2.0, n), np.zeros(4))
    return [transform(half, Wf), Wf], boost(chi, n)


def _rotation_word(R3: np.ndarray) -> list[Wedge]:
    rotvec = Rotation.from_matrix(R3).as_rotvec()
    phi = np.linalg.norm(rotvec)
    if phi < 1e-15:
        return []
    axis = rotvec / phi
    n2 = _orthogonal_unit(axis)
    n1 = Rotation.from_rotvec(axis * phi / 2.0).apply(n2)
    return [standard_wedge(n1), standard_wedge(n2)]


def decompose_poincare(lam: PoincareElement, tol: float = TOL_GEO) -> list[Wedge]:
    """Wedges whose edge reflections compose to ``lam`` (at most 7 of them)."""
    from .geometry import classify

    cls = classify(lam, tol=max(tol, 1e-9))
    if not cls.proper:
        raise GeometryError("improper element (det = -1) is not in the proper Poincaré group")
    word: list[Wedge] = []
    if not cls.orthochronous:
        word.append(W1)
        lam = compose(edge_reflection(W1), lam)
    word += _translation_word(lam.a)
    boost_part, B = _boost_word(lam.Lambda[:, 0])
    word += boost_part
    R = np.linalg.solve(B, lam.Lambda)
    # project the spatial block back onto SO(3) to absorb rounding
    u, _, vt = np.linalg.svd(R[1:, 1:])
    word += _rotation_word(u @ vt)
    return word


# ---------------------------------------------------------------------------
# wedge maps


@dataclass(frozen=True)
class WedgeMapSample:
    pairs: tuple[tuple[Wedge, Wedge], ...]

    def __post_init__(self):
        pairs = tuple((a, b) for a, b in self.pairs)
        for i in range(len(pairs)):
            for j in range(i):
                if wedge_equal(pairs[i][0], pairs[j][0]):
                    raise GeometryError(f"duplicate source wedge at positions {j} and {i}")
        object.__setattr__(self, "pairs", pairs)

    @classmethod
    def from_map(cls, wedges: Iterable[Wedge], fn) -> "WedgeMapSample":
        return cls(tuple((W, fn(W)) for W in wedges))

    @property
    def sources(self) -> list[Wedge]:
        return [p[0] for p in self.pairs]

    @property
    def images(self) -> list[Wedge]:
        return [p[1] for p in self.pairs]


class InconsistentWedgeMap(GeometryError):
    """No Poincaré element (with dilation) reproduces the sampled wedge map."""


def _ray_system(src: list[np.ndarray], dst: list[np.ndarray]):
    k = len(src)
    M = np.zeros((4 * k, 16 + k))
    for i, (l, lp) in enumerate(zip(src, dst)):
        for mu in range(4):
            M[4 * i + mu, 4 * mu:4 * mu + 4] = l
            M[4 * i + mu, 16 + i] = -lp[mu]
    _, sv, vt = np.linalg.svd(M)
    v = vt[-1]
    return v[:16].reshape(4, 4), v[16:], sv[-1] / sv[0]


def identify_wedge_map(sample: WedgeMapSample, tol: float = TOL_GEO) -> tuple[PoincareElement, float]:
    """Recover ``(lambda, scale)`` with ``image = scale * lambda(source)``."""
    if len(sample.pairs) < 5:
        raise GeometryError("need at least 5 wedges to identify a wedge map")
    best = None
    for swapped in (False, True):
        src, dst = [], []
        for W, V in sample.pairs:
            src += [W.ell_plus, W.ell_minus]
            dst += [V.ell_minus, V.ell_plus] if swapped else [V.ell_plus, V.ell_minus]
        L, c, rel = _ray_system(src, dst)
        if best is None or rel < best[0]:
            best = (rel, swapped, L, c)
    rel, swapped, L, c = best
    want = -1.0 if swapped else 1.0
    if np.sum(c) * want < 0:
        L, c = -L, -c
    if np.any(c * want <= 0):
        raise InconsistentWedgeMap("ray correspondences are not consistently oriented")
    det = np.linalg.det(L)
    if abs(det) < 1e-300:
        raise InconsistentWedgeMap("degenerate ray correspondence")
    L = L / abs(det) ** 0.25
    mres = float(np.max(np.abs(L.T @ METRIC @ L - METRIC)))
    if mres > 1e-6:
        raise InconsistentWedgeMap(f"ray map is not a Lorentz transformation (metric residual {mres:.2e})")
    rows, rhs = [], []
    for W, V in sample.pairs:
        for ray in (V.ell_plus, V.ell_minus):
            g = _G * ray
            rows.append(np.concatenate([[g @ (L @ W.xi)], g]))
            rhs.append(g @ V.xi)
    A, y = np.array(rows), np.array(rhs)
    if np.linalg.matrix_rank(A, tol=1e-9 * np.max(np.abs(A))) < 5:
        raise GeometryError("sample apexes do not determine translation and scale")
    colscale = np.linalg.norm(A, axis=0)
    colscale[colscale == 0] = 1.0
    sol = np.linalg.lstsq(A / colscale, y, rcond=None)[0] / colscale
    # one step of iterative refinement
    sol += np.linalg.lstsq(A / colscale, y - A @ sol, rcond=None)[0] / colscale
    scale, b = float(sol[0]), sol[1:]
    if scale <= 0:
        raise InconsistentWedgeMap(f"non-positive dilation scale {scale:.3g}")
    if abs(scale - 1.0) <= tol:
        scale = 1.0
    lam = PoincareElement(L, b / scale)
    worst = 0.0
    for W, V in sample.pairs:
        pred = dilate(transform(lam, W), scale)
        worst = max(worst, wedge_distance(pred, V) / max(1.0, float(np.max(np.abs(V.xi)))))
    if worst > 1e-7:
        raise InconsistentWedgeMap(f"sample not reproduced by any Poincaré map (residual {worst:.2e})")
    return lam, scale


@dataclass
class AutomorphismReport:
    violations: list[tuple[int, int, str]]
    pairs_checked: int

    @property
    def ok(self) -> bool:
        return not self.violations


def check_automorphism_properties(sample: WedgeMapSample, tol: float = TOL_GEO) -> AutomorphismReport:
    """Pairs violating inclusion (A) or disjointness (B) preservation."""
    src, img = sample.sources, sample.images
    out: list[tuple[int, int, str]] = []
    n = len(src)
    checked = 0
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            checked += 1
            if included(src[i], src[j], tol) != included(img[i], img[j], tol):
                out.append((i, j, "A"))
            if j > i and disjoint(src[i], src[j], tol) != disjoint(img[i], img[j], tol):
                out.append((i, j, "B"))
    return AutomorphismReport(out, checked)


def random_wedge(rng: np.random.Generator, max_rapidity: float = 2.0, scale: float = 3.0) -> Wedge:
    from .geometry import random_poincare

    return transform(random_poincare(rng, max_rapidity, scale), W1)
