"""Verification harness for geometric modular action on net fixtures.

A :class:`NetFixture` pairs sample wedges with operator data: a modular
conjugation per wedge, and optionally modular unitaries, algebras and a
state vector.  Wedges are told apart by a *proxy*: the algebra when one is
given, otherwise the modular unitary at a probe time, otherwise the
conjugation itself.  The conjugation alone cannot separate a wedge from its
causal complement, since both share ``J``.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field, replace
from typing import Any, Callable, Iterable, Mapping, Sequence

import numpy as np

from . import _accel
from .geometry import (
    TOL_GEO,
    GeometryError,
    PoincareElement,
    boost,
    compose,
    compose_all,
    distance,
    invert,
    lorentz,
    translation,
)
from .tomita import (
    TOL_OP,
    AntilinearOperator,
    FiniteVNAlgebra,
    _orthonormal_rows,
    algebra_distance,
    compute_modular,
    intersection,
    is_cyclic_separating,
    matmul,
    modular_flow,
    op_norm,
    span_residual,
)
from .wedges import (
    W1,
    Wedge,
    WedgeMapSample,
    axis_wedge,
    complement,
    decompose_poincare,
    disjoint,
    edge_reflection,
    frame,
    included,
    reflection_translation,
    transform,
    wedge_equal,
    word_element,
)

MATCH_TOL = 1e-6


class HarnessError(ValueError):
    """Precondition of a harness operation is violated."""


class AmbiguousMatch(HarnessError):
    def __init__(self, ids: Sequence[str]):
        self.ids = tuple(ids)
        super().__init__(f"ambiguous match between {', '.join(self.ids)}")


class MissingWedgeError(HarnessError):
    def __init__(self, W: Wedge):
        self.wedge = W
        super().__init__(f"no conjugation available for {W!r}")


# ---------------------------------------------------------------------------
# fixtures


@dataclass(frozen=True, eq=False)
class NetFixture:
    family: Mapping[str, Wedge]
    conj: Mapping[str, AntilinearOperator]
    dim: int
    flow: Callable[[str, float], np.ndarray] | None = None
    flow_probe: float | None = None
    algebras: Mapping[str, FiniteVNAlgebra] | None = None
    omega: np.ndarray | None = None
    continuum: Any = None  # optional conj_at / flow_at / identify_flow / U
    name: str = "fixture"

    def __post_init__(self):
        fam = {str(k): (v.wedge if hasattr(v, "wedge") else v) for k, v in dict(self.family).items()}
        for k, W in fam.items():
            if not isinstance(W, Wedge):
                raise HarnessError(f"family member {k!r} is not a wedge")
            if k not in self.conj:
                raise HarnessError(f"family member {k!r} has no conjugation")
            if self.conj[k].dim != self.dim:
                raise HarnessError(f"conjugation of {k!r} has dimension {self.conj[k].dim}, expected {self.dim}")
        if self.algebras is not None and set(self.algebras) != set(fam):
            raise HarnessError("algebras must be given for every family member")
        object.__setattr__(self, "family", fam)
        if self.flow is not None and self.flow_probe is None:
            object.__setattr__(self, "flow_probe", 1.0)

    @property
    def ids(self) -> list[str]:
        return list(self.family)

    def flow_at(self, i: str, t: float) -> np.ndarray:
        if self.flow is None:
            raise HarnessError("fixture provides no modular unitaries")
        return np.asarray(self.flow(i, t))

    def lookup(self, W: Wedge, tol: float = TOL_GEO) -> str | None:
        for k, V in self.family.items():
            if wedge_equal(V, W, tol):
                return k
        return None

    def conj_of(self, W: Wedge) -> AntilinearOperator:
        k = self.lookup(W)
        if k is not None:
            return self.conj[k]
        if self.continuum is not None:
            J = self.continuum.conj_at(W)
            if J is not None:
                return J
        raise MissingWedgeError(W)


def fixture_from_algebras(family: Mapping[str, Wedge], algebras: Mapping[str, FiniteVNAlgebra], omega,
                          name: str = "finite") -> NetFixture:
    """Wire conjugations and modular unitaries from the Tomita data of each algebra."""
    data = {k: compute_modular(A, omega) for k, A in algebras.items()}
    dim = next(iter(algebras.values())).dim
    return NetFixture(
        family=family,
        conj={k: D.J for k, D in data.items()},
        dim=dim,
        flow=lambda i, t: modular_flow(data[i], t),
        flow_probe=1.0,
        algebras=dict(algebras),
        omega=np.asarray(omega, dtype=complex) / np.linalg.norm(omega),
        name=name,
    )


def fixture_residuals(fx: NetFixture) -> dict[str, float]:
    """Involution residual per member and, with algebras, distance to the computed modular data."""
    out = {f"involution[{k}]": J.involution_residual() for k, J in fx.conj.items()}
    if fx.algebras is not None and fx.omega is not None:
        for k, A in fx.algebras.items():
            D = compute_modular(A, fx.omega)
            out[f"modular_conj[{k}]"] = op_norm(D.J.M - fx.conj[k].M)
    return out


# ---------------------------------------------------------------------------
# operator helpers


def _inverse(X):
    if isinstance(X, AntilinearOperator):
        return X.inverse
    return np.linalg.inv(X)


def _is_anti(X) -> bool:
    return isinstance(X, AntilinearOperator)


def _mat(X) -> np.ndarray:
    return X.M if _is_anti(X) else np.asarray(X)


def _distance(a, b, tol: float = MATCH_TOL) -> float:
    """Spectral-norm distance, short-circuited by cheap bounds around ``tol``.

    The returned value is exact when it is near ``tol``; far from it the max
    entry (a lower bound) or Frobenius norm (an upper bound) is returned.
    """
    if isinstance(a, FiniteVNAlgebra) or isinstance(b, FiniteVNAlgebra):
        if not (isinstance(a, FiniteVNAlgebra) and isinstance(b, FiniteVNAlgebra)):
            return float("inf")
        return algebra_distance(a, b)
    if _is_anti(a) != _is_anti(b):
        return float("inf")
    A, B = _mat(a), _mat(b)
    if A.shape != B.shape:
        return float("inf")
    D = A - B
    m = float(np.max(np.abs(D))) if D.size else 0.0
    if m > tol:
        return m
    f = float(np.linalg.norm(D))
    if f <= tol:
        return f
    return op_norm(D)


def word_operator(fx: NetFixture, word: Sequence[Wedge]):
    """``J_{W_1} ... J_{W_n}``; unitary for even words, antiunitary for odd ones."""
    X = np.eye(fx.dim, dtype=complex)
    for W in word:
        X = X @ fx.conj_of(W)
    return X


def _proxy_kind(fx: NetFixture) -> str:
    if fx.algebras is not None:
        return "algebra"
    if fx.flow is not None:
        return "flow"
    return "conj"


def _proxy(fx: NetFixture, i: str):
    kind = _proxy_kind(fx)
    if kind == "algebra":
        return fx.algebras[i]
    if kind == "flow":
        return fx.flow_at(i, fx.flow_probe)
    return fx.conj[i]


def _image(fx: NetFixture, X, Xinv, i: str):
    """Proxy of member ``i`` transported by ``Ad X``.

    Antiunitaries reverse the modular parameter, so the unitary at ``-t0``
    is transported to obtain the image's unitary at ``+t0``.
    """
    kind = _proxy_kind(fx)
    if kind == "algebra":
        A = fx.algebras[i]
        imgs = np.array([_mat(X @ a @ Xinv) for a in A.basis])
        rows = _orthonormal_rows(imgs.reshape(len(imgs), -1), 1e-10)
        return FiniteVNAlgebra(A.dim, rows.reshape(-1, A.dim, A.dim))
    if kind == "flow":
        t = -fx.flow_probe if _is_anti(X) else fx.flow_probe
        return X @ fx.flow_at(i, t) @ Xinv
    return X @ fx.conj[i] @ Xinv


def _matches(fx: NetFixture, proxy, proxies: Mapping[str, Any], tol: float) -> list[tuple[str, float]]:
    out = []
    for k, p in proxies.items():
        d = _distance(proxy, p, tol)
        if d <= tol:
            out.append((k, d))
    return out


# ---------------------------------------------------------------------------
# reports


@dataclass
class ConditionResult:
    status: str  # "pass" | "fail" | "skipped"
    residual: float = 0.0
    witness: Any = None
    detail: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"status": self.status, "residual": _json_float(self.residual),
                "witness": _jsonable(self.witness), "detail": _jsonable(self.detail)}


@dataclass
class CgmaReport:
    conditions: dict[str, ConditionResult]

    @property
    def ok(self) -> bool:
        return all(c.status != "fail" for c in self.conditions.values())

    def failed(self) -> list[str]:
        return sorted(k for k, c in self.conditions.items() if c.status == "fail")

    def __getitem__(self, key: str) -> ConditionResult:
        return self.conditions[key]

    def to_json(self) -> list[dict]:
        return [{"check": k, **self.conditions[k].to_json()} for k in sorted(self.conditions)]


def _json_float(x):
    if x is None:
        return None
    x = float(x)
    if np.isnan(x):
        return "nan"
    if np.isinf(x):
        return "inf" if x > 0 else "-inf"
    return x


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        return _json_float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, Wedge):
        return obj.to_json()
    return obj


# ---------------------------------------------------------------------------
# induced maps and CGMA conditions


@dataclass
class InducedMap:
    conjugator: str
    images: dict[str, str | Wedge]  # member id -> sample id or continuum wedge
    ambiguous: dict[str, list[str]]
    unmatched: list[str]
    residual: float

    @property
    def total(self) -> bool:
        return not self.unmatched

    def sample(self, fx: NetFixture) -> WedgeMapSample:
        pairs = []
        for k, v in self.images.items():
            pairs.append((fx.family[k], fx.family[v] if isinstance(v, str) else v))
        return WedgeMapSample(tuple(pairs))


def _induced(fx: NetFixture, j: str, proxies: Mapping[str, Any], tol: float) -> InducedMap:
    X = fx.conj[j]
    Xinv = _inverse(X)
    images: dict[str, str | Wedge] = {}
    ambiguous: dict[str, list[str]] = {}
    unmatched: list[str] = []
    worst = 0.0
    for i in fx.ids:
        img = _image(fx, X, Xinv, i)
        hits = _matches(fx, img, proxies, tol)
        if hits:
            hits.sort(key=lambda kv: (kv[1], kv[0]))
            images[i] = hits[0][0]
            worst = max(worst, hits[0][1])
            if len(hits) > 1:
                ambiguous[i] = sorted(k for k, _ in hits)
            continue
        W = None
        if fx.continuum is not None and _proxy_kind(fx) == "flow":
            W = fx.continuum.identify_flow(img, fx.flow_probe, tol)
        if W is not None:
            images[i] = W
        else:
            unmatched.append(i)
    return InducedMap(j, images, ambiguous, unmatched, worst)


def induced_wedge_map(fx: NetFixture, j: str, tol: float = MATCH_TOL) -> InducedMap:
    """Where ``Ad J_j`` sends every member's data; raises on ambiguous matches."""
    if len(fx.family) < 2:
        raise HarnessError("need at least two family members")
    if j not in fx.family:
        raise KeyError(j)
    proxies = {k: _proxy(fx, k) for k in fx.ids}
    m = _induced(fx, j, proxies, tol)
    if m.ambiguous:
        k, ids = next(iter(m.ambiguous.items()))
        raise AmbiguousMatch(ids)
    return m


def _check_a(fx: NetFixture, proxies, tol: float, tol_geo: float) -> ConditionResult:
    ids = fx.ids
    worst_sep = float("inf")
    for x in range(len(ids)):
        for y in range(x + 1, len(ids)):
            a, b = ids[x], ids[y]
            same_wedge = wedge_equal(fx.family[a], fx.family[b], tol_geo)
            d = _distance(proxies[a], proxies[b], tol)
            if same_wedge and d > tol:
                return ConditionResult("fail", d, [a, b], {"reason": "one wedge carries two different data"})
            if not same_wedge:
                if d <= tol:
                    return ConditionResult("fail", d, [a, b], {"reason": "distinct wedges share the same data"})
                worst_sep = min(worst_sep, d)
    detail = {"min_separation": worst_sep, "proxy": _proxy_kind(fx)}
    if fx.algebras is None:
        detail["order"] = "not evaluated: inclusion of data needs algebras"
        return ConditionResult("pass", 0.0, None, detail)
    worst = 0.0
    for a in ids:
        for b in ids:
            if a == b:
                continue
            geo = included(fx.family[a], fx.family[b], tol_geo)
            r = span_residual(fx.algebras[a].basis, fx.algebras[b])
            alg = r <= 1e-8
            if geo != alg:
                return ConditionResult("fail", r, [a, b], {"reason": "inclusion of wedges and of algebras disagree",
                                                           "wedge_included": geo, "algebra_included": alg})
            if alg:
                worst = max(worst, r)
    detail["order"] = "evaluated"
    return ConditionResult("pass", worst, None, detail)


def _check_b(fx: NetFixture) -> ConditionResult:
    if fx.algebras is None or fx.omega is None:
        return ConditionResult("skipped", 0.0, None, {"reason": "no algebras at one-particle level"})
    ids = fx.ids
    pairs = 0
    for x in range(len(ids)):
        for y in range(x, len(ids)):
            a, b = ids[x], ids[y]
            meets = not disjoint(fx.family[a], fx.family[b])
            C = intersection(fx.algebras[a], fx.algebras[b])
            cyc, sep = is_cyclic_separating(C, fx.omega)
            pairs += 1
            if meets != (cyc and sep):
                return ConditionResult("fail", 1.0, [a, b], {"wedges_meet": meets, "cyclic": cyc, "separating": sep})
    return ConditionResult("pass", 0.0, None, {"pairs": pairs})


def _check_c(fx: NetFixture, maps: Mapping[str, InducedMap], tol_op: float) -> ConditionResult:
    worst = 0.0
    for j in fx.ids:
        r = fx.conj[j].involution_residual()
        worst = max(worst, r)
        if r > tol_op:
            return ConditionResult("fail", r, j, {"reason": "conjugation is not an antiunitary involution"})
    continuum = 0
    for j, m in maps.items():
        if m.unmatched:
            return ConditionResult("fail", float("inf"), [j, m.unmatched[0]],
                                   {"reason": "image of member matches no wedge"})
        worst = max(worst, m.residual)
        continuum += sum(1 for v in m.images.values() if not isinstance(v, str))
    return ConditionResult("pass", worst, None, {"images_outside_sample": continuum})


def _frame_maps(Wa: Wedge, Wb: Wedge) -> list[PoincareElement]:
    direct = compose(frame(Wb), invert(frame(Wa)))
    via = compose_all([frame(Wb), invert(frame(complement(Wa))), edge_reflection(Wa)])
    return [direct, via]


def _certify(fx: NetFixture, a: str, b: str, proxies, tol: float, tol_geo: float) -> list[Wedge] | None:
    Wa, Wb = fx.family[a], fx.family[b]
    for lam in _frame_maps(Wa, Wb):
        if not wedge_equal(transform(lam, Wa), Wb, 1e-8):
            continue
        try:
            word = decompose_poincare(lam, tol_geo)
            X = word_operator(fx, word)
        except (MissingWedgeError, GeometryError):
            continue
        if _distance(_image(fx, X, _inverse(X), a), proxies[b], tol) <= tol:
            return word
    return None


def _check_d(fx: NetFixture, maps: Mapping[str, InducedMap], proxies, tol: float, tol_geo: float) -> ConditionResult:
    ids = fx.ids
    adj: dict[str, set[str]] = {i: set() for i in ids}
    for m in maps.values():
        for src, dst in m.images.items():
            targets = m.ambiguous.get(src, [dst] if isinstance(dst, str) else [])
            for t in targets:
                adj[src].add(t)
                adj[t].add(src)
    for x in range(len(ids)):
        for y in range(x + 1, len(ids)):
            if _distance(proxies[ids[x]], proxies[ids[y]], tol) <= tol:
                adj[ids[x]].add(ids[y])
                adj[ids[y]].add(ids[x])
    classes: list[list[str]] = []
    seen: set[str] = set()
    for i in ids:
        if i in seen:
            continue
        comp, queue = [], deque([i])
        seen.add(i)
        while queue:
            u = queue.popleft()
            comp.append(u)
            for v in sorted(adj[u]):
                if v not in seen:
                    seen.add(v)
                    queue.append(v)
        classes.append(comp)
    certificates = {}
    root = classes[0]
    for comp in classes[1:]:
        word = None
        for a in root:
            for b in comp:
                word = _certify(fx, a, b, proxies, tol, tol_geo)
                if word is not None:
                    certificates[f"{a}->{b}"] = len(word)
                    break
            if word is not None:
                break
        if word is None:
            return ConditionResult("fail", 1.0, [root[0], comp[0]],
                                   {"reason": "no element of the conjugation group links these members",
                                    "classes": classes})
    detail = {"classes": classes, "certificates": certificates,
              "note": "orbit coverage of the finite sample only"}
    return ConditionResult("pass", 0.0, None, detail)


def check_cgma(fx: NetFixture, tol_op: float = TOL_OP, tol_geo: float = TOL_GEO,
               match_tol: float = MATCH_TOL) -> CgmaReport:
    proxies = {k: _proxy(fx, k) for k in fx.ids}
    maps = {j: _induced(fx, j, proxies, match_tol) for j in fx.ids}
    return CgmaReport({
        "a": _check_a(fx, proxies, match_tol, tol_geo),
        "b": _check_b(fx),
        "c": _check_c(fx, maps, tol_op),
        "d": _check_d(fx, maps, proxies, match_tol, tol_geo),
    })


# ---------------------------------------------------------------------------
# relation (*) and the projective lift


@dataclass
class StarResult:
    residual: float
    checked: int
    skipped: int


def _as_wedge(fx: NetFixture, item) -> Wedge:
    if isinstance(item, str):
        return fx.family[item]
    if hasattr(item, "wedge"):
        return item.wedge
    return item


def check_star_relation(fx: NetFixture, lam: PoincareElement, word: Sequence, tol_geo: float = TOL_GEO) -> StarResult:
    """max ``|J(lam) J_W J(lam)^-1 - J_{lam W}|`` over members whose image is in the sample."""
    wedges = [_as_wedge(fx, w) for w in word]
    induced = word_element(wedges)
    scale = max(1.0, float(np.max(np.abs(lam.a))))
    if distance(induced, lam) > tol_geo * 10 * scale:
        raise HarnessError(f"word induces a different element (distance {distance(induced, lam):.3e})")
    X = word_operator(fx, wedges)
    Xinv = _inverse(X)
    worst, checked, skipped = 0.0, 0, 0
    for k, W in fx.family.items():
        target = fx.lookup(transform(lam, W))
        if target is None:
            skipped += 1
            continue
        worst = max(worst, op_norm(_mat(X @ fx.conj[k] @ Xinv) - fx.conj[target].M))
        checked += 1
    return StarResult(worst, checked, skipped)


@dataclass
class Lift:
    element: PoincareElement
    word: list[Wedge]
    operator: Any  # ndarray or AntilinearOperator


def lift_representation(lam: PoincareElement, fx: NetFixture, tol_geo: float = TOL_GEO) -> Lift:
    word = decompose_poincare(lam, tol_geo)
    return Lift(lam, word, word_operator(fx, word))


def centrality_defect(fx: NetFixture, lam1: PoincareElement, lam2: PoincareElement,
                      tol_geo: float = TOL_GEO) -> tuple[Any, float]:
    """Cocycle ``J(l1) J(l2) J(l1 l2)^-1`` and its largest commutator with a family conjugation."""
    J1 = lift_representation(lam1, fx, tol_geo).operator
    J2 = lift_representation(lam2, fx, tol_geo).operator
    J12 = lift_representation(compose(lam1, lam2), fx, tol_geo).operator
    Z = J1 @ J2 @ _inverse(J12)
    worst = 0.0
    for J in fx.conj.values():
        worst = max(worst, op_norm(_mat(Z @ J) - _mat(J @ Z)))
    return Z, worst


# ---------------------------------------------------------------------------
# translations from conjugation products


@dataclass
class AxisUnitary:
    wedge: Wedge
    xi: np.ndarray
    ts: tuple[float, ...]
    V: dict[float, np.ndarray]
    induced: dict[float, np.ndarray]
    residuals: dict[str, float]

    def ok(self, tol: float = TOL_OP) -> bool:
        return all(v <= tol for v in self.residuals.values())


def _V(fx: NetFixture, W: Wedge, xi: np.ndarray, t: float) -> np.ndarray:
    return fx.conj_of(W + t * xi / 2.0) @ fx.conj_of(W)


def build_axis_unitary(fx: NetFixture, W, xi, ts: Sequence[float] = (0.25, 0.5, 1.0)) -> AxisUnitary:
    """``V(t) = J_{W + t xi/2} J_W`` with its group-law and involution identities."""
    W = _as_wedge(fx, W)
    xi = np.asarray(xi, dtype=float)
    if xi.shape == (2,):
        xi = np.array([xi[0], xi[1], 0.0, 0.0])
    ts = tuple(float(t) for t in ts)
    J0 = fx.conj_of(W)
    V = {t: _V(fx, W, xi, t) for t in ts}
    eye = np.eye(fx.dim)
    res = {"unitary": max(op_norm(v.conj().T @ v - eye) for v in V.values())}
    hom = 0.0
    for s in ts:
        for t in ts:
            try:
                Vst = V.get(s + t)
                if Vst is None:
                    Vst = _V(fx, W, xi, s + t)
            except MissingWedgeError:
                continue
            hom = max(hom, op_norm(matmul(V[s], V[t]) - Vst))
        hom = max(hom, op_norm(matmul(V[s], _V(fx, W, xi, -s)) - eye))
    res["homomorphism"] = hom
    res["V J = J V^-1"] = max(op_norm(_mat(v @ J0) - _mat(J0 @ v.conj().T)) for v in V.values())
    res["V(t)^2 = V(2t)"] = max(op_norm(matmul(V[t], V[t]) - _V(fx, W, xi, 2 * t)) for t in ts)
    induced = {t: reflection_translation(W, t * xi / 2.0) for t in ts}
    U = getattr(fx.continuum, "U", None)
    if U is not None:
        res["V = U(induced)"] = max(op_norm(V[t] - U(induced[t])) for t in ts)
    return AxisUnitary(W, xi, ts, V, induced, res)


@dataclass
class AxisCheck:
    level: str
    residual: float
    pairs: list[tuple[str, str]]


def _orientations(fx: NetFixture) -> list[Wedge]:
    out: list[Wedge] = []
    for W in fx.family.values():
        base = W - W.xi
        if not any(wedge_equal(base, o) for o in out):
            out.append(base)
    return out


def check_axis_consistency(fx: NetFixture | None, xi0: float) -> AxisCheck:
    """Time translations built from different wedge orientations agree.

    With a fixture this compares operators (in the 1+1 model the orientations
    are the right wedge and its complement).  Without one it compares the
    induced Poincaré elements of the three coordinate wedges in 3+1.
    """
    a = np.array([xi0, 0.0, 0.0, 0.0])
    if fx is None:
        els = {f"W{i}": word_element([axis_wedge(i) + a / 2.0, axis_wedge(i)]) for i in (1, 2, 3)}
        target = translation(a)
        worst = max(distance(e, target) for e in els.values())
        names = sorted(els)
        pairs = [(p, q) for x, p in enumerate(names) for q in names[x + 1:]]
        for p, q in pairs:
            worst = max(worst, distance(els[p], els[q]))
        return AxisCheck("geometric 3+1 (induced Poincaré elements)", worst, pairs)
    orients = _orientations(fx)
    if len(orients) < 2:
        raise HarnessError("need at least two wedge orientations")
    ops = [fx.conj_of(W + a / 2.0) @ fx.conj_of(W) for W in orients]
    worst, pairs = 0.0, []
    for x in range(len(ops)):
        for y in range(x + 1, len(ops)):
            worst = max(worst, op_norm(ops[x] - ops[y]))
            pairs.append((repr(orients[x]), repr(orients[y])))
    return AxisCheck("operator (orientations present in the fixture)", worst, pairs)


def check_commutation(fx: NetFixture | None, xi) -> float:
    """Largest commutator between axis translations built from reflection words."""
    xi = np.asarray(xi, dtype=float)
    if xi.shape == (2,):
        xi = np.array([xi[0], xi[1], 0.0, 0.0])
    axes = [i for i in range(4) if xi[i] != 0.0]
    if fx is None:
        els = []
        for i in axes:
            a = np.zeros(4)
            a[i] = xi[i]
            W = axis_wedge(i if i > 0 else 1)
            els.append(word_element([W + a / 2.0, W]))
        worst = 0.0
        for x in range(len(els)):
            for y in range(x + 1, len(els)):
                worst = max(worst, distance(compose(els[x], els[y]), compose(els[y], els[x])))
        return worst
    ops = []
    for i in axes:
        a = np.zeros(4)
        a[i] = xi[i]
        ops.append(fx.conj_of(W1 + a / 2.0) @ fx.conj_of(W1))
    worst = 0.0
    for x in range(len(ops)):
        for y in range(x + 1, len(ops)):
            worst = max(worst, op_norm(matmul(ops[x], ops[y]) - matmul(ops[y], ops[x])))
    return worst


@dataclass
class TranslationSystem:
    fixture: NetFixture
    axes: tuple[int, ...]
    residuals: dict[str, float]
    momentum_bound: float | None = None

    def axis_unitary(self, i: int, s: float) -> np.ndarray:
        a = np.zeros(4)
        a[i] = s
        return _V(self.fixture, W1, a, 1.0)

    def unitary(self, xi) -> np.ndarray:
        xi = np.asarray(xi, dtype=float)
        out = np.eye(self.fixture.dim, dtype=complex)
        for k, i in enumerate(self.axes):
            if xi[k] != 0.0:
                out = matmul(out, self.axis_unitary(i, float(xi[k])))
        return out

    def induced(self, xi) -> PoincareElement:
        a = np.zeros(4)
        for k, i in enumerate(self.axes):
            a[i] = xi[k]
        return word_element([W1 + a / 2.0, W1])


def assemble_translations(fx: NetFixture, samples: Iterable | None = None, tol: float = TOL_OP,
                          seed: int = 0) -> TranslationSystem:
    """``U(xi) = U_0(xi_0) U_1(xi_1)`` from conjugation products, with its checks."""
    axis = check_axis_consistency(fx, 1.0)
    if axis.residual > tol:
        raise HarnessError(f"axis unitaries disagree by {axis.residual:.3e}")
    T = TranslationSystem(fx, (0, 1), {"axis_consistency": axis.residual},
                          getattr(fx.continuum, "momentum_bound", None))
    if samples is None:
        samples = np.random.default_rng(seed).uniform(-1.0, 1.0, size=(10, 2))
    samples = [np.asarray(s, dtype=float) for s in samples]
    eye = np.eye(fx.dim)
    group, cov, analytic = 0.0, 0.0, 0.0
    U = getattr(fx.continuum, "U", None)
    for x, s in enumerate(samples):
        Us = T.unitary(s)
        other = samples[(x + 1) % len(samples)]
        group = max(group, op_norm(matmul(Us, T.unitary(other)) - T.unitary(s + other)))
        group = max(group, op_norm(matmul(Us, T.unitary(-s)) - eye))
        if U is not None:
            analytic = max(analytic, op_norm(Us - U(s)))
        shift = np.array([s[0], s[1], 0.0, 0.0])
        for k, W in fx.family.items():
            try:
                target = fx.conj_of(W + shift)
            except MissingWedgeError:
                continue
            cov = max(cov, op_norm(_mat(Us @ fx.conj[k] @ Us.conj().T) - target.M))
    T.residuals.update({"group_law": group, "covariance": cov})
    if U is not None:
        T.residuals["analytic"] = analytic
    return T


# ---------------------------------------------------------------------------
# spectrum


class PhaseAmbiguityError(HarnessError):
    def __init__(self, message: str, suggested_levels: int):
        self.suggested_levels = suggested_levels
        super().__init__(f"{message}; use at least {suggested_levels} refinement levels")


@dataclass
class SpectrumReport:
    points: np.ndarray  # (n, 4)
    cone: str  # "Forward" | "Backward" | "Neither"
    max_violation: float  # max(|p| - p0): <= 0 means inside the forward cone
    trivial: bool
    levels: int
    notes: list[str] = field(default_factory=list)

    @property
    def violations(self) -> int:
        """Points outside the forward cone by more than 1e-12."""
        return int(np.sum(np.linalg.norm(self.points[:, 1:], axis=1) - self.points[:, 0] > 1e-12))

    def rapidities(self) -> np.ndarray:
        p0, p1 = self.points[:, 0], self.points[:, 1]
        with np.errstate(divide="ignore", invalid="ignore"):
            return 0.5 * np.log((p0 + p1) / (p0 - p1))

    def csv_rows(self) -> list[tuple[float, float, float]]:
        rows = list(zip(self.rapidities().tolist(), self.points[:, 0].tolist(), self.points[:, 1].tolist()))
        return sorted(rows)


def _joint_basis(mats: Sequence[np.ndarray], tol: float) -> np.ndarray:
    from scipy.linalg import schur

    d = mats[0].shape[0]
    if all(np.max(np.abs(m - np.diag(np.diag(m)))) <= tol for m in mats):
        return np.eye(d)
    coeffs = [1.0, 0.6180339887498949 + 0.3141592653589793j, 0.4142135623730951 - 0.2718281828459045j,
              0.7320508075688772 + 0.5772156649015329j]
    A = sum(c * m for c, m in zip(coeffs, mats))
    _, Q = schur(A, output="complex")
    for m in mats:
        D = Q.conj().T @ m @ Q
        off = np.max(np.abs(D - np.diag(np.diag(D))))
        if off > 1e3 * tol:
            raise HarnessError(f"axis unitaries are not simultaneously diagonalizable (off-diagonal {off:.3e})")
    return Q


def spectrum_report(T: TranslationSystem, step: float = 1.0, levels: int | None = None,
                    tol: float = TOL_OP) -> SpectrumReport:
    """Joint translation spectrum by phase unwrapping over ``step / 2**j``."""
    bound = T.momentum_bound
    if levels is None:
        if bound is None:
            raise HarnessError("levels must be given when no momentum bound is known")
        levels = max(0, int(np.ceil(np.log2(max(bound * step / (np.pi / 2), 1.0)))))
    if bound is not None and bound * step / 2 ** levels >= np.pi:
        need = int(np.ceil(np.log2(bound * step / (np.pi / 2))))
        raise PhaseAmbiguityError(f"|p| up to {bound:.4g} at step {step:g} wraps the finest phase", need)
    steps = [step / 2 ** j for j in range(levels + 1)]
    base = [T.axis_unitary(i, step) for i in T.axes]
    Q = _joint_basis(base, 1e-12)
    unwrapped = []
    worst = 0.0
    for k, i in enumerate(T.axes):
        phases = np.empty((levels + 1, T.fixture.dim))
        for j, s in enumerate(steps):
            m = base[k] if j == 0 else T.axis_unitary(i, s)
            phases[j] = np.angle(np.sum(Q.conj() * (m @ Q), axis=0))
        ph, mismatch = _accel.unwrap_doubling(phases)
        worst = max(worst, float(mismatch))
        unwrapped.append(np.asarray(ph))
    if worst > 0.5:
        raise PhaseAmbiguityError(f"unwrapping mismatch {worst:.3f} rad", levels + 1)
    pts = np.zeros((T.fixture.dim, 4))
    # U(xi) = exp(i p.xi) with p.xi = p0 xi0 - p_vec.xi_vec
    for k, i in enumerate(T.axes):
        pts[:, i] = (unwrapped[k] if i == 0 else -unwrapped[k]) / step
    spatial = np.linalg.norm(pts[:, 1:], axis=1)
    forward = bool(np.all(pts[:, 0] >= spatial - tol))
    backward = bool(np.all(-pts[:, 0] >= spatial - tol))
    trivial = bool(np.all(np.abs(pts) <= tol))
    notes = []
    if trivial:
        cone = "Forward"
        notes.append("trivial representation: contradicts injectivity of the wedge map")
    elif forward:
        cone = "Forward"
    elif backward:
        cone = "Backward"
    else:
        cone = "Neither"
    return SpectrumReport(pts, cone, float(np.max(spatial - pts[:, 0])), trivial, levels, notes)


# ---------------------------------------------------------------------------
# modular stability


def modular_boost(W: Wedge, t: float) -> PoincareElement:
    """Geometric action of the modular group of W: boost by ``-2 pi t`` about its edge."""
    sigma = frame(W)
    return compose_all([sigma, lorentz(boost(-2.0 * np.pi * t, [1.0, 0.0, 0.0])), invert(sigma)])


@dataclass
class StabilityReport:
    operator_residual: float
    operator_checked: int
    operator_skipped: int
    certificates: list[dict]
    geometric_residual: float

    def ok(self, tol_op: float = 1e-12, tol_geo: float = 1e-9) -> bool:
        return self.operator_residual <= tol_op and self.geometric_residual <= tol_geo


def check_modular_stability(fx: NetFixture, ts: Sequence[float], chis: Sequence[float] = (0.5, 1.0),
                            tol_geo: float = TOL_GEO) -> StabilityReport:
    """Modular covariance of the data and reflection-word certificates for boosts."""
    if fx.flow is None:
        raise HarnessError("fixture provides no modular unitaries")
    worst, checked, skipped = 0.0, 0, 0
    for k, W in fx.family.items():
        for t in ts:
            F = fx.flow_at(k, t)
            # restrict to the range of F: a truncated grid shift is only a partial isometry
            keep = np.abs(np.einsum("ij,ij->i", F, F.conj()) - 1.0) <= 1e-12
            lam = modular_boost(W, t)
            for v, V in fx.family.items():
                try:
                    target = fx.conj_of(transform(lam, V))
                except MissingWedgeError:
                    skipped += 1
                    continue
                img = _mat(F @ fx.conj[v] @ F.conj().T)
                worst = max(worst, op_norm((img - target.M)[np.ix_(keep, keep)]))
                checked += 1
    certs = []
    geo = 0.0
    for i in (1, 2, 3):
        axis = np.zeros(3)
        axis[i - 1] = 1.0
        for chi in chis:
            lam = lorentz(boost(chi, axis))
            word = decompose_poincare(lam, tol_geo)
            r = distance(word_element(word), lam)
            geo = max(geo, r)
            certs.append({"axis": i, "rapidity": float(chi), "word_length": len(word), "residual": r})
    return StabilityReport(worst, checked, skipped, certs, geo)


# ---------------------------------------------------------------------------
# fixtures for the harness itself

SABOTAGES = ("duplicate-conjugation", "non-involutive", "wrong-wedge")


def _remap(fx: NetFixture, source: Mapping[str, str], name: str) -> NetFixture:
    """Fixture whose member ``k`` carries the data of ``source.get(k, k)``."""
    src = {k: source.get(k, k) for k in fx.ids}
    flow = fx.flow
    return replace(
        fx,
        conj={k: fx.conj[src[k]] for k in fx.ids},
        flow=None if flow is None else (lambda i, t: flow(src[i], t)),
        algebras=None if fx.algebras is None else {k: fx.algebras[src[k]] for k in fx.ids},
        name=name,
    )


def sabotage(fx: NetFixture, kind: str, target: str, other: str | None = None, delta: float = 1e-3) -> NetFixture:
    """Break one condition on purpose.

    ``duplicate-conjugation``: ``target`` gets all data of ``other``.
    ``non-involutive``: the conjugation of ``target`` is scaled by ``1 + delta``.
    ``wrong-wedge``: ``target`` and ``other`` exchange their data.
    """
    name = f"{fx.name}+{kind}"
    if kind == "duplicate-conjugation":
        return _remap(fx, {target: other}, name)
    if kind == "non-involutive":
        conj = dict(fx.conj)
        conj[target] = AntilinearOperator((1.0 + delta) * fx.conj[target].M)
        return replace(fx, conj=conj, name=name)
    if kind == "wrong-wedge":
        return _remap(fx, {target: other, other: target}, name)
    raise HarnessError(f"unknown sabotage {kind!r}; choose from {', '.join(SABOTAGES)}")


def two_factor_fixture(weights: Sequence[float] = (2.0 / 3.0, 1.0 / 3.0)) -> NetFixture:
    """``M_n (x) 1`` on the right wedge and ``1 (x) M_n`` on its complement, Schmidt state."""
    from .tomita import left_factor, right_factor, schmidt_vector

    n = len(weights)
    family = {"W": W1, "W'": complement(W1)}
    algebras = {"W": left_factor(n), "W'": right_factor(n)}
    return fixture_from_algebras(family, algebras, schmidt_vector(weights), name="two-factor")
