"""JSON formats for algebras, vectors, Poincaré elements and net fixtures.

Complex numbers are written as ``[re, im]`` pairs; plain numbers are read as
real.  Matrices are lists of rows.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any

import numpy as np

from . import cgma, freemodel
from .geometry import PoincareElement
from .tomita import AntilinearOperator, FiniteVNAlgebra, algebra_closure
from .wedges import Wedge


class InputError(ValueError):
    """Malformed input file."""


def load_json(path) -> Any:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})") from exc


def dump_json(obj, path=None) -> str:
    text = json.dumps(obj, sort_keys=True, indent=2, allow_nan=False) + "\n"
    if path is not None:
        Path(path).write_text(text, encoding="utf-8")
    return text


def _complex(x) -> complex:
    if isinstance(x, (int, float)):
        return complex(x)
    if isinstance(x, (list, tuple)) and len(x) == 2 and all(isinstance(v, (int, float)) for v in x):
        return complex(x[0], x[1])
    raise InputError(f"expected a number or [re, im], got {x!r}")


def parse_vector(obj) -> np.ndarray:
    if isinstance(obj, dict):
        obj = obj.get("vector")
    if not isinstance(obj, list) or not obj:
        raise InputError("vector must be a non-empty list")
    v = np.array([_complex(x) for x in obj])
    if not np.all(np.isfinite(v)):
        raise InputError("vector has non-finite entries")
    return v


def parse_matrix(obj) -> np.ndarray:
    if not isinstance(obj, list) or not obj or not all(isinstance(r, list) for r in obj):
        raise InputError("matrix must be a list of rows")
    n = len(obj[0])
    if any(len(r) != n for r in obj):
        raise InputError("matrix rows have different lengths")
    M = np.array([[_complex(x) for x in r] for r in obj])
    if not np.all(np.isfinite(M)):
        raise InputError("matrix has non-finite entries")
    return M


def encode_complex(a) -> list:
    a = np.asarray(a)
    if a.ndim == 0:
        return [float(a.real), float(a.imag)]
    return [encode_complex(x) for x in a]


def parse_algebra(obj) -> FiniteVNAlgebra:
    """``{"generators": [...]}`` (closed under products) or ``{"basis": [...]}``."""
    if not isinstance(obj, dict):
        raise InputError("algebra must be an object with 'generators' or 'basis'")
    if "basis" in obj:
        mats = [parse_matrix(m) for m in obj["basis"]]
        d = mats[0].shape[0]
        return algebra_closure(mats) if obj.get("close", True) else FiniteVNAlgebra(d, np.array(mats))
    if "generators" in obj:
        mats = [parse_matrix(m) for m in obj["generators"]]
        if any(m.shape != mats[0].shape or m.shape[0] != m.shape[1] for m in mats):
            raise InputError("generators must be square matrices of equal size")
        return algebra_closure(mats)
    raise InputError("algebra needs 'generators' or 'basis'")


def algebra_to_json(A: FiniteVNAlgebra) -> dict:
    return {"basis": [encode_complex(b) for b in A.basis]}


def parse_poincare(obj) -> PoincareElement:
    try:
        return PoincareElement.from_json(obj)
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"bad Poincaré element: {exc}") from exc


def _parse_member(obj) -> tuple[str, Wedge]:
    if not isinstance(obj, dict) or "id" not in obj:
        raise InputError("family entries need an 'id'")
    try:
        if "wedge" in obj:
            return str(obj["id"]), Wedge.from_json(obj["wedge"])
        if "side" in obj:
            return str(obj["id"]), freemodel.ModelWedgeTag(obj["side"], tuple(obj.get("xi", (0.0, 0.0)))).wedge
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"bad family member {obj.get('id')!r}: {exc}") from exc
    raise InputError(f"family member {obj['id']!r} needs 'wedge' or 'side'")


class _TabulatedFlow:
    """Modular unitaries known at listed parameters; negative ones by adjoint."""

    def __init__(self, table: dict[str, list[tuple[float, np.ndarray]]]):
        self.table = table

    def __call__(self, i: str, t: float) -> np.ndarray:
        for s, F in self.table[i]:
            if abs(s - t) <= 1e-12:
                return F
            if abs(s + t) <= 1e-12:
                return F.conj().T
        raise cgma.HarnessError(f"no modular unitary tabulated for {i!r} at t={t:g}")


def parse_fixture(obj, name: str = "file") -> cgma.NetFixture:
    if isinstance(obj, str) and obj.startswith("builtin:"):
        return builtin_fixture(obj.split(":", 1)[1])
    if not isinstance(obj, dict) or "family" not in obj:
        raise InputError("fixture needs a 'family' list")
    family = dict(_parse_member(m) for m in obj["family"])
    algebras = None
    if "algebras" in obj:
        algebras = {str(k): parse_algebra(v) for k, v in obj["algebras"].items()}
    omega = parse_vector(obj["omega"]) if "omega" in obj else None
    if "conjugations" not in obj:
        if algebras is None or omega is None:
            raise InputError("fixture needs 'conjugations', or 'algebras' with 'omega'")
        return cgma.fixture_from_algebras(family, algebras, omega, name=obj.get("name", name))
    conj = {str(k): AntilinearOperator(parse_matrix(v)) for k, v in obj["conjugations"].items()}
    flow, probe = None, None
    if "flows" in obj:
        table = {str(k): [(float(e["t"]), parse_matrix(e["matrix"])) for e in v] for k, v in obj["flows"].items()}
        if set(table) != set(family):
            raise InputError("flows must be given for every family member")
        probe = min(abs(t) for rows in table.values() for t, _ in rows if t != 0)
        flow = _TabulatedFlow(table)
    dims = {J.dim for J in conj.values()}
    if len(dims) != 1:
        raise InputError("conjugations have different dimensions")
    dim = dims.pop()
    continuum = None
    if "model" in obj:
        # the free model the data came from, used to identify images outside the sample
        spec = obj["model"]
        try:
            continuum = freemodel.build_model(spec["m"], spec["K"], spec["h"], bool(spec.get("time_reflected")))
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"bad model block: {exc}") from exc
        if continuum.dim != dim:
            raise InputError(f"model has dimension {continuum.dim}, conjugations have {dim}")
    try:
        return cgma.NetFixture(family=family, conj=conj, dim=dim, flow=flow, flow_probe=probe,
                               algebras=algebras, omega=omega, continuum=continuum, name=obj.get("name", name))
    except cgma.HarnessError as exc:
        raise InputError(str(exc)) from exc


def fixture_to_json(fx: cgma.NetFixture) -> dict:
    out: dict[str, Any] = {
        "name": fx.name,
        "family": [{"id": k, "wedge": W.to_json()} for k, W in fx.family.items()],
        "conjugations": {k: encode_complex(fx.conj[k].M) for k in fx.ids},
    }
    if fx.flow is not None:
        out["flows"] = {k: [{"t": fx.flow_probe, "matrix": encode_complex(fx.flow_at(k, fx.flow_probe))}]
                        for k in fx.ids}
    if isinstance(fx.continuum, freemodel.ModelFixture):
        g = fx.continuum.grid
        out["model"] = {"m": g.m, "K": g.K, "h": g.h, "time_reflected": fx.continuum.time_reflected}
    if fx.algebras is not None:
        out["algebras"] = {k: algebra_to_json(A) for k, A in fx.algebras.items()}
    if fx.omega is not None:
        out["omega"] = encode_complex(fx.omega)
    return out


def builtin_fixture(name: str) -> cgma.NetFixture:
    """``two-factor``, ``model`` or ``model+<sabotage>`` (small grid)."""
    if name == "two-factor":
        return cgma.two_factor_fixture()
    base, _, sab = name.partition("+")
    if base == "model":
        fx = freemodel.build_model(1.0, 40, 0.05).net()
        if not sab:
            return fx
        partner = {"duplicate-conjugation": fx.ids[0], "wrong-wedge": fx.ids[3]}
        if sab not in cgma.SABOTAGES:
            raise InputError(f"unknown sabotage {sab!r}")
        return cgma.sabotage(fx, sab, fx.ids[1], partner.get(sab))
    raise InputError(f"unknown builtin fixture {name!r}")
