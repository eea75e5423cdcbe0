"""
Command-line front end.

Verbs: ``catalog``, ``validate``, ``curvature``, ``scan``, ``mesh``.
Exit codes: 0 success, 1 a mathematical check failed, 2 usage or parse error.
"""
from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import wdf
from ._util import fmt_point, pi_multiple, to_jsonable
from .cxratio import ClusterAmbiguityError, RootFindingError
from .nonorientable import check_involution, flux_vanishing_check, quotient_report
from .quadcurv import QuadratureConfig, integrate_curvature
from .singscan import scan_singular_points
from .surface_mesh import (
    DegenerateMetricError,
    DomainSpec,
    Loop,
    MeshPathError,
    export_obj,
    integrate_surface,
    loop_defect,
)
from .weierstrass import (
    WeierstrassData,
    catalog,
    check_periods,
    check_regularity,
    classify_end,
    total_curvature,
)

log = logging.getLogger("stationary")

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
DEFAULT_TOL = 1e-9


class UsageError(Exception):
    """Bad arguments or unreadable input (exit code 2)."""


@dataclass
class ValidationSummary:
    """Outcome of the validation pipeline; ``passed`` is the conjunction."""

    name: str
    regularity: object = None
    periods: object = None
    involution: object = None
    flux: object = None
    quotient: object = None
    ends: list = field(default_factory=list)
    curvature: object = None
    quadrature: object = None
    scan: object = None
    failures: list = field(default_factory=list)
    notes: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures

    def lines(self) -> list[str]:
        out = [f"validation of {self.name or 'data'}"]
        for part in (self.regularity, self.periods, self.involution, self.flux, self.quotient):
            if part is not None:
                out.extend(part.lines())
        if self.ends:
            out.append("ends:")
            out.extend("  " + e.line() for e in self.ends)
        if self.curvature is not None:
            out.extend(self.curvature.lines())
        if self.quadrature is not None:
            out.extend(self.quadrature.lines())
        if self.scan is not None:
            out.extend(self.scan.lines())
        out.extend(f"note: {n}" for n in self.notes)
        if self.failures:
            out.append("verdict: FAIL")
            out.extend(f"  failing condition: {f}" for f in self.failures)
        else:
            out.append("verdict: pass")
        return out


# --------------------------------------------------------------------------


def _load(path: str) -> WeierstrassData:
    try:
        if path == "-":
            return wdf.loads(sys.stdin.read())
        return wdf.load(path)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc}") from exc
    except wdf.WdfError as exc:
        raise UsageError(f"{path}: {exc}") from exc


def _emit(args, lines: list[str], payload=None):
    if args.json:
        print(json.dumps(to_jsonable(payload), indent=2, default=str))
    elif not args.quiet:
        print("\n".join(lines))


def _quotient_pi(data, cover_pi: float) -> float | None:
    if data.involution_antipodal and check_involution(data).passed:
        return cover_pi / 2
    return None


def validate(data: WeierstrassData, tol: float = DEFAULT_TOL, scan: bool = True, grid: int = 512):
    """Run every check in order and collect the failures by name."""
    s = ValidationSummary(data.name)
    rational = data.is_rational

    s.regularity = check_regularity(data)
    if not s.regularity.passed:
        s.failures.append("regularity (local conditions at branch points)")

    if rational:
        s.periods = check_periods(data, tol)
        for e in s.periods.ends:
            where = fmt_point(e.point)
            if e.horizontal > tol:
                s.failures.append(f"horizontal period condition at {where}")
            if abs(e.vertical_h) > tol:
                s.failures.append(f"vertical period condition at {where}: Re∮dh = {e.vertical_h:.12g}")
            if abs(e.vertical_phipsih) > tol:
                s.failures.append(
                    f"vertical period condition at {where}: Re∮φψdh = {e.vertical_phipsih:.12g}"
                )
    else:
        defect = loop_defect(data, Loop(0j, 1.0, 4096))
        s.notes.append(f"non-rational data: loop defect on |z| = 1 is {np.abs(defect).max():.2e}")
        if np.abs(defect).max() > max(tol, 1e-8):
            s.failures.append("period condition (numerical loop defect on |z| = 1)")

    if data.involution_antipodal:
        try:
            s.involution = check_involution(data)
        except ValueError as exc:
            s.failures.append(f"antipodal symmetry: {exc}")
        else:
            if not s.involution.passed:
                s.failures.append("antipodal symmetry")
            elif rational:
                s.flux = flux_vanishing_check(data, tol)
                if not s.flux.passed:
                    s.failures.append("flux at ends")
                s.quotient = quotient_report(data)

    if rational:
        s.ends = [classify_end(data, p) for p in data.punctures]
        for e in s.ends:
            if e.kind == "bad_singular":
                s.failures.append(f"bad singular end at {fmt_point(e.point)}")
            elif not e.complete:
                s.failures.append(f"incomplete end at {fmt_point(e.point)}")
        if not any(f.startswith(("bad", "incomplete")) for f in s.failures):
            s.curvature = total_curvature(data)
            if not s.curvature.agreement:
                s.failures.append("curvature formulas disagree")
    else:
        s.notes.append("index formulas need rational data; curvature by quadrature")
        try:
            s.quadrature = integrate_curvature(data)
        except (ValueError, NotImplementedError) as exc:
            s.failures.append(f"curvature quadrature: {exc}")
        else:
            if not s.quadrature.converged:
                s.failures.append("curvature quadrature did not converge")

    if scan:
        s.scan = scan_singular_points(data, grid=grid)
        for p in s.scan.points:
            s.failures.append(f"singular point found at z = {fmt_point(p.z)} (phi = conj psi)")
        for m in s.scan.suspicious:
            s.notes.append(f"suspicious near-singular minimum at {fmt_point(m.z)}")
    else:
        s.notes.append("singular-point scan skipped")
    return s


# --------------------------------------------------------------------------
# verbs


def cmd_catalog(args) -> int:
    params: dict = {}
    name = args.name
    if name == "meeks":
        if args.lam is not None:
            params["lam"] = complex(*args.lam)
        if args.m is not None:
            params["m"] = args.m
    elif name in ("epsilon", "epsilon_family"):
        if args.eps is not None:
            params["eps"] = args.eps
    elif name == "essential":
        if args.p is not None:
            params["p"] = args.p
    unused = [
        flag
        for flag, val, ok in (
            ("--lambda", args.lam, name == "meeks"),
            ("--m", args.m, name == "meeks"),
            ("--eps", args.eps, name in ("epsilon", "epsilon_family")),
            ("--p", args.p, name == "essential"),
        )
        if val is not None and not ok
    ]
    if unused:
        raise UsageError(f"{', '.join(unused)} not valid for catalog entry {name}")
    try:
        data = catalog(name, **params)
    except (KeyError, ValueError) as exc:
        raise UsageError(str(exc)) from exc
    text = wdf.dumps(data, include_xz=args.with_xz)
    if args.output and args.output != "-":
        try:
            Path(args.output).write_text(text, encoding="utf-8")
        except OSError as exc:
            raise UsageError(f"cannot write {args.output}: {exc}") from exc
        if not args.quiet:
            print(f"wrote {args.output}", file=sys.stderr)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_validate(args) -> int:
    data = _load(args.input)
    summary = validate(data, args.tol, scan=not args.skip_scan, grid=args.grid)
    _emit(args, summary.lines(), {"passed": summary.passed, **to_jsonable(summary)})
    return EXIT_OK if summary.passed else EXIT_FAIL


def cmd_curvature(args) -> int:
    data = _load(args.input)
    lines, payload, status = [], {}, EXIT_OK
    if args.method in ("index", "both"):
        if not data.is_rational:
            raise UsageError("index formulas need rational data; use --method quad")
        try:
            rep = total_curvature(data)
        except ValueError as exc:
            lines.append(f"index formulas: {exc}")
            payload["index_error"] = str(exc)
            status = EXIT_FAIL
        else:
            lines.extend(rep.lines())
            payload["index"] = rep
            if not rep.agreement:
                status = EXIT_FAIL
    if args.method in ("quad", "both"):
        cfg = QuadratureConfig(target_rel_error=args.target)
        try:
            q = integrate_curvature(data, cfg)
        except (ValueError, NotImplementedError) as exc:
            lines.append(f"quadrature: {exc}")
            payload["quad_error"] = str(exc)
            status = EXIT_FAIL
        else:
            lines.extend(q.lines())
            payload["quad"] = q
            if not q.converged:
                status = EXIT_FAIL
            if "index" in payload:
                ref = payload["index"].cover_value * math.pi
                diff = abs(q.minus_K - ref)
                agree = diff <= max(3 * q.error_estimate, 1e-6 * ref)
                lines.append(
                    f"agreement index vs quadrature: {'yes' if agree else 'NO'} "
                    f"(|difference| = {diff / math.pi:.3g}π)"
                )
                payload["agreement"] = agree
                if not agree:
                    status = EXIT_FAIL
    quotient = None
    if "index" in payload and payload["index"].quotient_value is not None:
        quotient = payload["index"].quotient_value
    elif "quad" in payload and payload["quad"].quotient_minus_K is not None:
        quotient = payload["quad"].quotient_minus_K / math.pi
    if quotient is not None:
        lines.append(f"total curvature of the quotient: {pi_multiple(quotient, tol=1e-6)}")
        payload["quotient_pi"] = quotient
    _emit(args, lines, payload)
    return status


def cmd_scan(args) -> int:
    data = _load(args.input)
    rep = scan_singular_points(data, grid=args.grid)
    text = rep.to_csv()
    if args.output and args.output != "-":
        try:
            Path(args.output).write_text(text, encoding="utf-8")
        except OSError as exc:
            raise UsageError(f"cannot write {args.output}: {exc}") from exc
        _emit(args, rep.lines(), rep)
    elif args.json:
        _emit(args, [], rep)
    else:
        sys.stdout.write(text)
        if not args.quiet:
            print("\n".join(rep.lines()), file=sys.stderr)
    return EXIT_OK


def cmd_mesh(args) -> int:
    data = _load(args.input)
    try:
        domain = DomainSpec(args.chart, args.r_min, args.r_max, args.n_r, args.n_theta)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    singular = ()
    if not args.force:
        summary = validate(data, args.tol, scan=True, grid=args.grid)
        if not summary.passed:
            msg = "; ".join(summary.failures)
            print(f"refusing to mesh (use --force to override): {msg}", file=sys.stderr)
            return EXIT_FAIL
        singular = summary.scan.points
    try:
        mesh = integrate_surface(
            data, domain, singular_points=singular, check_metric=not args.force
        )
        obj, csv_path = export_obj(mesh, args.output, args.project)
    except (MeshPathError, DegenerateMetricError) as exc:
        print(f"mesh failed: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except OSError as exc:
        raise UsageError(f"cannot write mesh: {exc}") from exc
    _emit(
        args,
        [f"wrote {obj} ({len(mesh)} vertices) and {csv_path}"],
        {"obj": str(obj), "csv": str(csv_path), "vertices": len(mesh)},
    )
    return EXIT_OK


# --------------------------------------------------------------------------


def _common(parser: argparse.ArgumentParser, suppress: bool):
    d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    parser.add_argument("--tol", type=float, default=d(DEFAULT_TOL), help="numerical tolerance")
    parser.add_argument("--quiet", action="store_true", default=d(False), help="suppress reports")
    parser.add_argument("--json", action="store_true", default=d(False), help="JSON output")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="stationary",
        description="Weierstrass data tools for stationary surfaces in R^4_1.",
    )
    _common(p, suppress=False)
    common = argparse.ArgumentParser(add_help=False)
    _common(common, suppress=True)
    sub = p.add_subparsers(dest="verb", required=True)

    c = sub.add_parser("catalog", parents=[common], help="write a catalog entry as WDF")
    c.add_argument(
        "name",
        choices=["meeks", "epsilon", "epsilon_family", "essential", "section4",
                 "section4_candidate", "rejected_m2"],
    )
    c.add_argument("--lambda", dest="lam", nargs=2, type=float, metavar=("RE", "IM"))
    c.add_argument("--m", type=int)
    c.add_argument("--eps", type=float)
    c.add_argument("--p", type=int)
    c.add_argument("--with-xz", action="store_true", help="include the x_z partial fractions")
    c.add_argument("-o", "--output", help="output path (default stdout)")
    c.set_defaults(func=cmd_catalog)

    v = sub.add_parser("validate", parents=[common], help="run the validation pipeline")
    v.add_argument("input")
    v.add_argument("--skip-scan", action="store_true")
    v.add_argument("--grid", type=int, default=512)
    v.set_defaults(func=cmd_validate)

    k = sub.add_parser("curvature", parents=[common], help="total curvature")
    k.add_argument("input")
    k.add_argument("--method", choices=["index", "quad", "both"], default="both")
    k.add_argument("--target", type=float, default=1e-3, help="relative quadrature target")
    k.set_defaults(func=cmd_curvature)

    s = sub.add_parser("scan", parents=[common], help="search for singular points")
    s.add_argument("input")
    s.add_argument("--grid", type=int, default=512)
    s.add_argument("-o", "--output", help="CSV path (default stdout)")
    s.set_defaults(func=cmd_scan)

    m = sub.add_parser("mesh", parents=[common], help="integrate and export a mesh")
    m.add_argument("input")
    m.add_argument("output", help="OBJ path; the CSV goes next to it")
    m.add_argument("--chart", choices=["annulus", "disk"], default="annulus")
    m.add_argument("--r-min", type=float, default=0.5)
    m.add_argument("--r-max", type=float, default=2.0)
    m.add_argument("--n-r", type=int, default=64)
    m.add_argument("--n-theta", type=int, default=128)
    m.add_argument("--project", choices=["drop_x4", "stereographic_x4"], default="drop_x4")
    m.add_argument("--grid", type=int, default=512, help="scan grid used by the pre-check")
    m.add_argument("--force", action="store_true", help="mesh even if validation fails")
    m.set_defaults(func=cmd_mesh)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on bad arguments and 0 after --help
        return int(exc.code or 0)
    logging.basicConfig(level=logging.ERROR if args.quiet else logging.WARNING)
    try:
        with np.errstate(all="ignore"):
            return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ClusterAmbiguityError, RootFindingError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
