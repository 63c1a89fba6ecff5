"""Command-line front end.

Exit codes: 0 when every check passes, 1 when a verification fails, 2 for
input or configuration errors.  Reports are JSON with sorted keys and no
timing data, so identical configurations give byte-identical files.
"""

from __future__ import annotations

import argparse
import csv
import io as _io
import sys
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np

from . import __version__, cgma, freemodel, io, suites, wedges
from .geometry import TOL_GEO, GeometryError
from .tomita import TOL_OP, ModularError

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


@dataclass
class RunConfig:
    seed: int = 0
    tol_geo: float = TOL_GEO
    tol_op: float = TOL_OP
    suites: list[str] = field(default_factory=list)
    out: str | None = None
    samples: int = 200
    mass: float = 1.0
    grid: int = 200
    spacing: float = 0.05
    sabotage: str | None = None

    @classmethod
    def from_json(cls, obj) -> "RunConfig":
        if not isinstance(obj, dict):
            raise io.InputError("config must be a JSON object")
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(obj) - known)
        if unknown:
            raise io.InputError(f"unknown config keys: {', '.join(unknown)}")
        cfg = cls(**obj)
        cfg.validate()
        return cfg

    def validate(self) -> None:
        if not isinstance(self.seed, int) or isinstance(self.seed, bool):
            raise io.InputError("seed must be an integer")
        for name in ("tol_geo", "tol_op"):
            v = getattr(self, name)
            if not isinstance(v, (int, float)) or not np.isfinite(v) or v < 0:
                raise io.InputError(f"{name} must be a non-negative number")
        if not isinstance(self.samples, int) or self.samples < 1:
            raise io.InputError("samples must be a positive integer")
        if not isinstance(self.grid, int) or self.grid < 1:
            raise io.InputError("grid half-size K must be an integer >= 1")
        if not (self.spacing > 0 and self.mass > 0):
            raise io.InputError("mass and spacing must be positive")
        if self.sabotage is not None and self.sabotage not in cgma.SABOTAGES:
            raise io.InputError(f"unknown sabotage {self.sabotage!r}; choose from {', '.join(cgma.SABOTAGES)}")


def _report(command: str, cfg: RunConfig, checks: list[suites.Check], **extra) -> dict:
    cfg_json = asdict(cfg)
    cfg_json.pop("out")
    return {
        "command": command,
        "version": __version__,
        "config": cfg_json,
        "ok": suites.all_passed(checks),
        "checks": [c.to_json() for c in checks],
        **cgma._jsonable(extra),
    }


def _emit(args, cfg: RunConfig, filename: str, report: dict) -> int:
    text = io.dump_json(report)
    if cfg.out:
        out = Path(cfg.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / filename).write_text(text, encoding="utf-8")
    if args.json:
        sys.stdout.write(text)
    else:
        for c in report.get("checks", []):
            print(f"{c['status'].upper():7s} {c['check']}  residual={c['residual']}")
        print("OK" if report["ok"] else "FAILED")
    return EXIT_OK if report["ok"] else EXIT_FAIL


def spectrum_csv(spec: cgma.SpectrumReport) -> str:
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["theta", "p0", "p1"])
    for row in spec.csv_rows():
        w.writerow([repr(float(v)) for v in row])
    return buf.getvalue()


# ---------------------------------------------------------------------------
# commands


def cmd_geometry_verify(args, cfg: RunConfig) -> int:
    checks = suites.geometry_suite(cfg.samples, cfg.seed, cfg.tol_geo)
    return _emit(args, cfg, "geometry_report.json", _report("geometry verify", cfg, checks))


def cmd_decompose(args, cfg: RunConfig) -> int:
    lam = io.parse_poincare(io.load_json(args.poincare))
    try:
        word = wedges.decompose_poincare(lam, cfg.tol_geo)
    except GeometryError as exc:
        raise io.InputError(str(exc)) from exc
    from .geometry import distance

    r = distance(wedges.word_element(word), lam)
    checks = [suites._check("round_trip", r, 10 * cfg.tol_geo)]
    return _emit(args, cfg, "decompose_report.json",
                 _report("decompose", cfg, checks, word=[W.to_json() for W in word], length=len(word)))


def cmd_tomita_compute(args, cfg: RunConfig) -> int:
    A = io.parse_algebra(io.load_json(args.algebra))
    omega = io.parse_vector(io.load_json(args.vector))
    if omega.shape[0] != A.dim:
        raise io.InputError(f"vector has length {omega.shape[0]}, algebra acts on dimension {A.dim}")
    try:
        checks, summary = suites.tomita_summary(A, omega, cfg.tol_op)
    except ModularError as exc:
        report = _report("tomita compute", cfg, [suites.Check("modular_data", False, float("inf"), str(exc))],
                         diagnostic=str(exc))
        report["ok"] = False
        code = _emit(args, cfg, "tomita_report.json", report)
        print(f"error: {exc}", file=sys.stderr)
        return code
    return _emit(args, cfg, "tomita_report.json", _report("tomita compute", cfg, checks, modular=summary))


def cmd_model_verify(args, cfg: RunConfig) -> int:
    checks, spec = suites.model_suite(cfg.mass, cfg.grid, cfg.spacing, cfg.seed, cfg.tol_op, cfg.tol_geo,
                                      cfg.sabotage)
    report = _report("model verify", cfg, checks, spectrum={"cone": spec.cone, "points": len(spec.points),
                                                              "max_violation": spec.max_violation})
    if cfg.out:
        Path(cfg.out).mkdir(parents=True, exist_ok=True)
        (Path(cfg.out) / "spectrum.csv").write_text(spectrum_csv(spec), encoding="utf-8")
    return _emit(args, cfg, "model_report.json", report)


def cmd_cgma_check(args, cfg: RunConfig) -> int:
    src = args.fixture
    obj = src if src.startswith("builtin:") else io.load_json(src)
    fx = io.parse_fixture(obj, name=Path(src).stem)
    checks = suites.cgma_checks(fx, cfg.tol_op, cfg.tol_geo)
    return _emit(args, cfg, "cgma_report.json", _report("cgma check", cfg, checks, fixture=fx.name))


# ---------------------------------------------------------------------------
# parsing


def _global_options(defaults: bool) -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    d = (lambda v: v) if defaults else (lambda v: argparse.SUPPRESS)
    p.add_argument("--tol-geo", type=float, default=d(None), help="geometric tolerance (default 1e-10)")
    p.add_argument("--tol-op", type=float, default=d(None), help="operator tolerance (default 1e-9)")
    p.add_argument("--out", default=d(None), help="directory for report files")
    p.add_argument("--json", action="store_true", default=d(False), help="print the JSON report")
    p.add_argument("--config", default=d(None), help="RunConfig JSON file; flags override it")
    return p


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="cgmalab", description=__doc__.splitlines()[0], parents=[_global_options(True)])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    opts = [_global_options(False)]

    g = sub.add_parser("geometry", parents=opts, help="geometry property suites")
    gs = g.add_subparsers(dest="action", required=True, parser_class=_Parser)
    gv = gs.add_parser("verify", parents=opts)
    gv.add_argument("--samples", type=int, default=argparse.SUPPRESS)
    gv.add_argument("--seed", type=int, default=argparse.SUPPRESS)
    gv.set_defaults(func=cmd_geometry_verify)

    d = sub.add_parser("decompose", parents=opts, help="reflection word for a Poincaré element")
    d.add_argument("--poincare", required=True, metavar="FILE")
    d.set_defaults(func=cmd_decompose)

    t = sub.add_parser("tomita", parents=opts, help="modular data of a finite-dimensional algebra")
    ts = t.add_subparsers(dest="action", required=True, parser_class=_Parser)
    tc = ts.add_parser("compute", parents=opts)
    tc.add_argument("--algebra", required=True, metavar="FILE")
    tc.add_argument("--vector", required=True, metavar="FILE")
    tc.set_defaults(func=cmd_tomita_compute)

    m = sub.add_parser("model", parents=opts, help="1+1 free-particle model suites")
    ms = m.add_subparsers(dest="action", required=True, parser_class=_Parser)
    mv = ms.add_parser("verify", parents=opts)
    mv.add_argument("--mass", type=float, default=argparse.SUPPRESS)
    mv.add_argument("--grid", type=int, default=argparse.SUPPRESS, metavar="K")
    mv.add_argument("--spacing", type=float, default=argparse.SUPPRESS, metavar="H")
    mv.add_argument("--sabotage", choices=cgma.SABOTAGES, default=argparse.SUPPRESS)
    mv.add_argument("--seed", type=int, default=argparse.SUPPRESS)
    mv.set_defaults(func=cmd_model_verify)

    c = sub.add_parser("cgma", parents=opts, help="CGMA conditions on a fixture file")
    cs = c.add_subparsers(dest="action", required=True, parser_class=_Parser)
    cc = cs.add_parser("check", parents=opts)
    cc.add_argument("--fixture", required=True, metavar="FILE",
                    help="fixture JSON, or builtin:two-factor / builtin:model[+SABOTAGE]")
    cc.set_defaults(func=cmd_cgma_check)
    return parser


def _config(args) -> RunConfig:
    base: dict = {}
    if args.config:
        base = io.load_json(args.config)
        if not isinstance(base, dict):
            raise io.InputError("config must be a JSON object")
    cfg = RunConfig.from_json(base)
    overrides = {"tol_geo": args.tol_geo, "tol_op": args.tol_op, "out": args.out,
                 "samples": getattr(args, "samples", None), "seed": getattr(args, "seed", None),
                 "mass": getattr(args, "mass", None), "grid": getattr(args, "grid", None),
                 "spacing": getattr(args, "spacing", None), "sabotage": getattr(args, "sabotage", None)}
    for k, v in overrides.items():
        if v is not None:
            setattr(cfg, k, v)
    cfg.suites = [args.command]
    cfg.validate()
    return cfg


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _config(args)
        return args.func(args, cfg)
    except (io.InputError, freemodel.CommensurabilityError, cgma.HarnessError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (TypeError, ValueError) as exc:
        print(f"error: invalid input: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
