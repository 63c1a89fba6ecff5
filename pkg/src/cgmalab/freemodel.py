"""One-particle 1+1 model on a rapidity grid with Bisognano–Wichmann data.

Basis vectors ``e_k`` sit at rapidities ``theta_k = k h`` (``|k| <= K``) on the
mass shell ``p(theta) = (m cosh theta, m sinh theta)``.  Translations act
diagonally, boosts by integer grid shifts, and the modular conjugation of
the right wedge ``W_1 = {x1 > |x0|}`` is complex conjugation in this basis.
Every wedge of the model has the rays of ``W_1`` or of its complement, so a
wedge is fixed by its side and a 2-vector apex.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Literal

import numpy as np

from .geometry import TOL_GEO, four_vector
from .tomita import TOL_OP, AntilinearOperator
from .wedges import W1, Wedge, complement

Side = Literal["R", "L"]


class CommensurabilityError(ValueError):
    """Rapidity is not an integer multiple of the grid spacing."""

    def __init__(self, value: float, h: float, suggestions: tuple[float, float]):
        self.value = value
        self.suggestions = suggestions
        super().__init__(
            f"rapidity {value:.6g} is not a multiple of the grid spacing {h:.6g}; "
            f"nearest commensurate values are {suggestions[0]:.6g} and {suggestions[1]:.6g}"
        )


@dataclass(frozen=True)
class RapidityGrid:
    K: int
    h: float
    m: float

    def __post_init__(self):
        if not (isinstance(self.K, (int, np.integer)) and self.K >= 1):
            raise ValueError(f"grid half-size K must be an integer >= 1, got {self.K!r}")
        if not (np.isfinite(self.h) and self.h > 0):
            raise ValueError(f"grid spacing h must be positive, got {self.h!r}")
        if not (np.isfinite(self.m) and self.m > 0):
            raise ValueError(f"mass m must be positive, got {self.m!r}")

    @property
    def dim(self) -> int:
        return 2 * self.K + 1

    @cached_property
    def theta(self) -> np.ndarray:
        return np.arange(-self.K, self.K + 1) * self.h

    @cached_property
    def momenta(self) -> np.ndarray:
        """(dim, 2) array of (p0, p1)."""
        return np.column_stack([self.m * np.cosh(self.theta), self.m * np.sinh(self.theta)])

    @property
    def momentum_bound(self) -> float:
        return float(self.m * np.cosh(self.K * self.h))

    def steps(self, chi: float, tol: float = TOL_OP) -> int:
        """Integer number of grid steps in ``chi``; raises if not commensurate."""
        q = chi / self.h
        n = round(q)
        if abs(q - n) > tol * max(1.0, abs(q)):
            lo = np.floor(q) * self.h
            raise CommensurabilityError(chi, self.h, (float(lo), float(lo + self.h)))
        return int(n)

    def interior(self, margin: int) -> np.ndarray:
        """Boolean mask of indices with ``|k| <= K - margin``."""
        k = np.arange(-self.K, self.K + 1)
        return np.abs(k) <= self.K - abs(margin)


def momentum(grid: RapidityGrid, k: int) -> np.ndarray:
    if not (-grid.K <= k <= grid.K):
        raise IndexError(f"grid index {k} outside [-{grid.K}, {grid.K}]")
    th = k * grid.h
    return four_vector([grid.m * np.cosh(th), grid.m * np.sinh(th), 0.0, 0.0])


_TWO_PI_LD = np.longdouble("6.28318530717958647692528676655900577")


def translation_phases(grid: RapidityGrid, xi) -> np.ndarray:
    """``p(theta_k) . xi`` reduced to ``(-pi, pi]`` for every grid point.

    Near the grid edge ``|p . xi|`` reaches 1e4 and a float64 phase carries
    an absolute error of a few 1e-12, so the products and the reduction are
    done in extended precision before rounding.
    """
    xi = four_vector(xi)
    if xi[2] != 0 or xi[3] != 0:
        raise ValueError("model translations live in the (x0, x1) plane")
    th = np.arange(-grid.K, grid.K + 1).astype(np.longdouble) * np.longdouble(grid.h)
    m = np.longdouble(grid.m)
    ph = m * (np.cosh(th) * np.longdouble(xi[0]) - np.sinh(th) * np.longdouble(xi[1]))
    ph = ph - _TWO_PI_LD * np.round(ph / _TWO_PI_LD)
    return ph.astype(float)


def translation_rep(grid: RapidityGrid, xi) -> np.ndarray:
    return np.diag(np.exp(1j * translation_phases(grid, xi)))


@dataclass(frozen=True, eq=False)
class GridShift:
    """Boost as an index shift ``e_k -> e_{k+steps}``, truncated at the edge."""

    matrix: np.ndarray
    steps: int
    dropped: tuple[int, ...]  # grid indices k whose image leaves the grid

    @property
    def exact_on(self) -> int:
        """Vectors supported on ``|k| <= K - exact_on`` stay inside the grid."""
        return abs(self.steps)


def boost_rep(grid: RapidityGrid, chi: float, tol: float = TOL_OP) -> GridShift:
    n = grid.steps(chi, tol)
    d = grid.dim
    B = np.zeros((d, d))
    src = np.arange(d)
    dst = src + n
    keep = (dst >= 0) & (dst < d)
    B[dst[keep], src[keep]] = 1.0
    dropped = tuple(int(i) - grid.K for i in src[~keep])
    return GridShift(B, n, dropped)


@dataclass(frozen=True)
class ModelWedgeTag:
    side: Side
    xi: tuple[float, float] = (0.0, 0.0)

    def __post_init__(self):
        if self.side not in ("R", "L"):
            raise ValueError(f"side must be 'R' or 'L', got {self.side!r}")
        x = tuple(float(v) for v in np.asarray(self.xi, dtype=float).reshape(-1)[:2])
        if len(x) != 2 or not all(np.isfinite(x)):
            raise ValueError("apex must be a finite 2-vector")
        object.__setattr__(self, "xi", x)

    @property
    def wedge(self) -> Wedge:
        base = W1 if self.side == "R" else complement(W1)
        return base + [self.xi[0], self.xi[1], 0.0, 0.0]

    @property
    def label(self) -> str:
        return f"{self.side}({self.xi[0]:.12g},{self.xi[1]:.12g})"

    @classmethod
    def from_wedge(cls, W: Wedge, tol: float = TOL_GEO) -> "ModelWedgeTag | None":
        for side, base in (("R", W1), ("L", complement(W1))):
            if np.max(np.abs(W.ell_plus - base.ell_plus)) <= tol and np.max(np.abs(W.ell_minus - base.ell_minus)) <= tol:
                return cls(side, (float(W.xi[0]), float(W.xi[1])))
        return None


def Right(x0: float = 0.0, x1: float = 0.0) -> ModelWedgeTag:
    return ModelWedgeTag("R", (x0, x1))


def Left(x0: float = 0.0, x1: float = 0.0) -> ModelWedgeTag:
    return ModelWedgeTag("L", (x0, x1))


def wedge_conjugation(grid: RapidityGrid, tag: ModelWedgeTag, time_reflected: bool = False) -> AntilinearOperator:
    """``U(xi) J_0 U(xi)^{-1}``; Left and Right tags with equal apex coincide."""
    sign = -1.0 if time_reflected else 1.0
    xi = sign * np.array([tag.xi[0], tag.xi[1], 0.0, 0.0])
    u = np.exp(1j * translation_phases(grid, xi))
    u_inv = np.exp(1j * translation_phases(grid, -xi))
    # U(xi) J0 U(-xi) = U(xi) conj(U(-xi)) J0
    return AntilinearOperator(np.diag(u * np.conj(u_inv)))


def modular_flow_model(grid: RapidityGrid, tag: ModelWedgeTag, t: float, time_reflected: bool = False,
                       tol: float = TOL_OP) -> np.ndarray:
    """``Delta_W^{it}``: the boost by ``-2 pi t`` about the apex (``+2 pi t`` for Left)."""
    sign = -1.0 if time_reflected else 1.0
    chi = -2.0 * np.pi * t if tag.side == "R" else 2.0 * np.pi * t
    B = boost_rep(grid, chi, tol).matrix
    xi = sign * np.array([tag.xi[0], tag.xi[1], 0.0, 0.0])
    u = np.exp(1j * translation_phases(grid, xi))
    u_inv = np.exp(1j * translation_phases(grid, -xi))
    return (u[:, None] * B) * u_inv[None, :]


@dataclass(frozen=True, eq=False)
class ModelFixture:
    """The model wired together: conjugations, flows and the analytic U."""

    grid: RapidityGrid
    time_reflected: bool = False
    _cache: dict = field(default_factory=dict, repr=False)

    @property
    def dim(self) -> int:
        return self.grid.dim

    @property
    def flow_probe(self) -> float:
        """Smallest positive commensurate flow parameter (one grid step)."""
        return self.grid.h / (2.0 * np.pi)

    def conj(self, tag: ModelWedgeTag) -> AntilinearOperator:
        key = ("J", tag.side, tag.xi)
        if key not in self._cache:
            if len(self._cache) > 256:
                self._cache.clear()
            self._cache[key] = wedge_conjugation(self.grid, tag, self.time_reflected)
        return self._cache[key]

    def flow(self, tag: ModelWedgeTag, t: float) -> np.ndarray:
        return modular_flow_model(self.grid, tag, t, self.time_reflected)

    def U(self, xi) -> np.ndarray:
        """Analytic translation representation."""
        return translation_rep(self.grid, xi)

    @property
    def momentum_bound(self) -> float:
        return self.grid.momentum_bound

    # continuum access for the harness ------------------------------------

    def conj_at(self, W: Wedge) -> AntilinearOperator | None:
        tag = ModelWedgeTag.from_wedge(W)
        return None if tag is None else self.conj(tag)

    def flow_at(self, W: Wedge, t: float) -> np.ndarray | None:
        tag = ModelWedgeTag.from_wedge(W)
        return None if tag is None else self.flow(tag, t)

    def identify_flow(self, F: np.ndarray, t: float, tol: float = 1e-6) -> Wedge | None:
        """Recover the wedge whose modular unitary at ``t`` is ``F``, if any."""
        try:
            n = self.grid.steps(2.0 * np.pi * t)
        except CommensurabilityError:
            return None
        if n == 0:
            return None
        d, K = self.dim, self.grid.K
        F = np.asarray(F)
        for side, shift in (("R", -n), ("L", n)):
            src = np.arange(d)
            dst = src + shift
            keep = (dst >= 0) & (dst < d)
            vals = F[dst[keep], src[keep]]
            if vals.size == 0 or np.max(np.abs(np.abs(vals) - 1.0)) > tol:
                continue
            sgn = -1.0 if self.time_reflected else 1.0
            dp = self.grid.momenta[dst[keep]] - self.grid.momenta[src[keep]]
            # phase = dp . zeta (Minkowski), unwrapped outward from the grid centre
            A = np.column_stack([dp[:, 0], -dp[:, 1]]) * sgn
            phi = np.angle(vals)
            k = np.abs(src[keep] - K)
            zeta = np.zeros(2)
            radius = 1
            while True:
                sel = k <= radius
                pred = A[sel] @ zeta
                unwrapped = phi[sel] + 2 * np.pi * np.round((pred - phi[sel]) / (2 * np.pi))
                zeta = np.linalg.lstsq(A[sel], unwrapped, rcond=None)[0]
                if radius >= K:
                    break
                radius = min(2 * radius, K)
            tag = ModelWedgeTag(side, (float(zeta[0]), float(zeta[1])))
            if np.max(np.abs(self.flow(tag, t) - F)) <= tol:
                return tag.wedge
        return None

    def net(self, tags: Iterable[ModelWedgeTag] | None = None, name: str = "model"):
        """A :class:`~cgmalab.cgma.NetFixture` over the given sample of wedges."""
        from .cgma import NetFixture

        tags = model_sample() if tags is None else list(tags)
        by_id = {t.label: t for t in tags}
        return NetFixture(
            family={k: t.wedge for k, t in by_id.items()},
            conj={k: self.conj(t) for k, t in by_id.items()},
            dim=self.dim,
            flow=lambda i, t: self.flow(by_id[i], t),
            flow_probe=self.flow_probe,
            continuum=self,
            name=name,
        )


def model_sample(xi=(0.3, 0.2)) -> list[ModelWedgeTag]:
    """Right and left wedges at the origin and at ``xi``."""
    return [Right(), Right(*xi), Left(), Left(*xi)]


def build_model(m: float, K: int, h: float, time_reflected: bool = False) -> ModelFixture:
    return ModelFixture(RapidityGrid(int(K) if float(K).is_integer() else K, float(h), float(m)), time_reflected)
