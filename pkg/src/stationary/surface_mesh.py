"""
Numerical immersion ``x(z) = 2 Re int x_z dz``, loop diagnostics and export.

The mesh lives on a polar grid in the ``z`` chart.  Each node is reached
from the base point by an arc on the base point's circle followed by a
radial segment, both integrated with composite Gauss-Legendre rules.  The
base point is sent to the origin.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ._util import fmt_point
from .cxratio import INF
from .weierstrass import WeierstrassData, evaluate, xz_components

__all__ = [
    "MeshPoint",
    "DomainSpec",
    "Mesh",
    "Loop",
    "MeshPathError",
    "DegenerateMetricError",
    "integrate_surface",
    "integrate_path",
    "loop_defect",
    "conformal_factor",
    "involution_gap",
    "export_obj",
]

ESSENTIAL_MARGIN = 0.05


class MeshPathError(ValueError):
    """An integration path would cross a puncture or singular point."""


class DegenerateMetricError(ValueError):
    """The induced metric is not positive at a node."""


@dataclass
class MeshPoint:
    z: complex
    x: np.ndarray
    conformal_factor: float


@dataclass(frozen=True)
class DomainSpec:
    """Polar grid in the ``z`` chart.

    ``chart`` is ``"annulus"`` (geometric radii, ``r_min > 0``) or
    ``"disk"`` (linear radii, ``r_min >= 0``).  Angles are
    ``2 pi j / n_theta``.  ``base_point`` defaults to the point of radius
    ``sqrt(r_min r_max)`` (annulus) or ``r_max / 2`` (disk) on the positive
    real axis.
    """

    chart: str = "annulus"
    r_min: float = 0.5
    r_max: float = 2.0
    n_r: int = 32
    n_theta: int = 64
    base_point: complex | None = None

    def __post_init__(self):
        if self.chart not in ("annulus", "disk"):
            raise ValueError(f"unknown chart {self.chart!r}")
        if self.n_r < 2 or self.n_theta < 3:
            raise ValueError("need n_r >= 2 and n_theta >= 3")
        lo = 0.0 if self.chart == "disk" else np.nextafter(0.0, 1.0)
        if not (lo <= self.r_min < self.r_max) or not math.isfinite(self.r_max):
            raise ValueError("need 0 <= r_min < r_max (r_min > 0 for an annulus)")

    @property
    def base(self) -> complex:
        if self.base_point is not None:
            return complex(self.base_point)
        if self.chart == "annulus":
            return complex(math.sqrt(self.r_min * self.r_max))
        return complex(self.r_max / 2)

    def radii(self) -> np.ndarray:
        if self.chart == "annulus":
            return np.geomspace(self.r_min, self.r_max, self.n_r)
        return np.linspace(self.r_min, self.r_max, self.n_r)

    def angles(self) -> np.ndarray:
        return 2 * np.pi * np.arange(self.n_theta) / self.n_theta


class Mesh(list):
    """List of :class:`MeshPoint` in row-major order (radius, then angle)."""

    def __init__(self, points=(), n_r: int = 0, n_theta: int = 0, domain=None):
        super().__init__(points)
        self.n_r = n_r
        self.n_theta = n_theta
        self.domain = domain

    def coords(self) -> np.ndarray:
        return np.array([p.x for p in self]).reshape(-1, 4)

    def params(self) -> np.ndarray:
        return np.array([p.z for p in self], dtype=complex)

    def diameter(self) -> float:
        x = self.coords()
        if x.size == 0:
            return 0.0
        return float(np.linalg.norm(x.max(axis=0) - x.min(axis=0)))


def _integrand(data: WeierstrassData):
    if data.is_rational:
        comps = xz_components(data)
        return lambda z: np.stack([c(z) for c in comps])
    return data.xz


def _null_parts(data: WeierstrassData):
    """``z -> (x1, x2, x3 + x4, x4 - x3)``, i.e. ``(.., .., 2h, 2 phi psi h)``."""
    if data.is_rational:
        f, g, h = data.phi, data.psi, data.h
        maps = [(f + g) * h, (f - g) * h * (-1j), h * 2, f * g * h * 2]
        return lambda z: [m(z) for m in maps]

    def parts(z):
        f, g, h = (evaluate(m, z) for m in (data.phi, data.psi, data.h))
        return [(f + g) * h, -1j * (f - g) * h, 2 * h, 2 * f * g * h]

    return parts


def conformal_factor(data: WeierstrassData, z):
    """``e^{2 omega} = 2 <x_z, conj x_z>`` at ``z`` (array-valued for arrays).

    The Lorentz product is taken in the null coordinates ``u = x3 + x4``,
    ``w = x4 - x3``, where ``|x3|^2 - |x4|^2 = -Re(u conj w)``.  Near an end
    ``x3`` and ``x4`` are huge and nearly equal, and squaring them separately
    would lose every digit.
    """
    x1, x2, u, w = _null_parts(data)(np.asarray(z, dtype=complex))
    out = 2 * (np.abs(x1) ** 2 + np.abs(x2) ** 2 - np.real(u * np.conj(w)))
    return float(out) if np.ndim(out) == 0 else out


_GL_CACHE: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def _gl(n: int):
    if n not in _GL_CACHE:
        _GL_CACHE[n] = np.polynomial.legendre.leggauss(n)
    return _GL_CACHE[n]


def _segments(f, a: np.ndarray, b: np.ndarray, param, n: int) -> np.ndarray:
    """``int_a^b f(gamma(t)) gamma'(t) dt`` per segment; ``param`` gives (gamma, gamma')."""
    x, w = _gl(n)
    mid, half = (a + b) / 2, (b - a) / 2
    t = mid[:, None] + half[:, None] * x[None, :]
    z, dz = param(t)
    vals = f(z.ravel()).reshape((4,) + t.shape)
    return ((vals * dz[None] * (w[None, None, :] * half[None, :, None])).sum(axis=2)).T


def integrate_path(data: WeierstrassData, points, gauss_nodes: int = 16, pieces: int = 8):
    """``2 Re int x_z dz`` along the polyline through ``points``."""
    f = _integrand(data)
    pts = np.asarray(points, dtype=complex)
    total = np.zeros(4, dtype=complex)
    for p, q in zip(pts[:-1], pts[1:]):
        s = np.linspace(0.0, 1.0, pieces + 1)
        seg = _segments(
            f, s[:-1], s[1:], lambda t, p=p, q=q: (p + (q - p) * t, np.full(t.shape, q - p)), gauss_nodes
        )
        total += seg.sum(axis=0)
    return 2 * total.real


def _check_domain(data, domain: DomainSpec, singular_points):
    base = domain.base
    rb = abs(base)
    lo, hi = min(domain.r_min, rb), max(domain.r_max, rb)
    if not data.is_rational:
        if lo < ESSENTIAL_MARGIN or hi > 1 / ESSENTIAL_MARGIN:
            raise MeshPathError(
                "non-rational data is only meshed on annuli within "
                f"[{ESSENTIAL_MARGIN}, {1 / ESSENTIAL_MARGIN}]"
            )
    for p in data.punctures:
        if p is INF:
            continue
        if lo - 1e-12 <= abs(p) <= hi + 1e-12:
            raise MeshPathError(f"integration region meets the puncture {fmt_point(p)}")
    for s in singular_points:
        s = s.z if hasattr(s, "z") else s
        if s is not INF and lo <= abs(s) <= hi:
            raise MeshPathError(f"integration region contains the singular point {fmt_point(s)}")


def integrate_surface(
    data: WeierstrassData,
    domain: DomainSpec,
    gauss_nodes: int = 8,
    singular_points=(),
    check_metric: bool = True,
) -> Mesh:
    """Immersion values on a polar grid.

    Parameters
    ----------
    gauss_nodes : int
        Nodes per Gauss-Legendre panel; one panel per grid step.
    singular_points : iterable
        Known singular points (complex or objects with ``.z``).  Any inside
        the swept annulus raises :class:`MeshPathError`.
    check_metric : bool
        Raise :class:`DegenerateMetricError` when ``e^{2 omega} <= 0`` at a node.

    Notes
    -----
    Periods are assumed to vanish (see ``check_periods``); otherwise the
    result depends on the fixed path family.
    """
    _check_domain(data, domain, singular_points)
    f = _integrand(data)
    base = domain.base
    rb, tb = abs(base), math.atan2(base.imag, base.real)
    radii, angles = domain.radii(), domain.angles()

    # arc on |z| = rb from the base angle to each grid angle, counterclockwise
    rel = np.mod(angles - tb, 2 * np.pi)
    order = np.argsort(rel)
    steps = np.concatenate([[0.0], rel[order]])
    arc = np.zeros((angles.size, 4), dtype=complex)
    if rb > 0:
        def circ(t):
            z = rb * np.exp(1j * (tb + t))
            return z, 1j * z

        seg = _segments(f, steps[:-1], steps[1:], circ, gauss_nodes)
        arc[order] = np.cumsum(seg, axis=0)

    # spokes from radius rb to each grid radius
    rs = np.unique(np.concatenate([radii, [rb]]))
    ib = int(np.searchsorted(rs, rb))
    x = np.zeros((radii.size, angles.size, 4))
    for j, th in enumerate(angles):
        e = np.exp(1j * th)

        def ray(t, e=e):
            return t * e, np.full(t.shape, e)

        seg = _segments(f, rs[:-1], rs[1:], ray, gauss_nodes)
        cum = np.zeros((rs.size, 4), dtype=complex)
        cum[1:] = np.cumsum(seg, axis=0)
        cum = cum - cum[ib]
        at = cum[np.searchsorted(rs, radii)]
        x[:, j, :] = 2 * (arc[j][None, :] + at).real

    zz = radii[:, None] * np.exp(1j * angles)[None, :]
    e2w = conformal_factor(data, zz)
    if check_metric:
        bad = np.argwhere(~(e2w > 0))
        if bad.size:
            i, j = bad[0]
            raise DegenerateMetricError(
                f"conformal factor {e2w[i, j]:.3e} <= 0 at z = {fmt_point(zz[i, j])}"
            )
    pts = [
        MeshPoint(complex(zz[i, j]), x[i, j], float(e2w[i, j]))
        for i in range(radii.size)
        for j in range(angles.size)
    ]
    return Mesh(pts, radii.size, angles.size, domain)


@dataclass(frozen=True)
class Loop:
    """Counterclockwise circle ``|z - center| = radius`` sampled at ``n`` points."""

    center: complex = 0j
    radius: float = 1.0
    n: int = 1024


def loop_defect(data: WeierstrassData, loop: Loop = Loop()) -> np.ndarray:
    """``2 Re`` of the loop integral of ``x_z dz`` by the periodic trapezoid rule."""
    t = 2 * np.pi * np.arange(loop.n) / loop.n
    u = loop.radius * np.exp(1j * t)
    z = complex(loop.center) + u
    vals = _integrand(data)(z)
    integral = (vals * (1j * u)[None, :]).sum(axis=1) * (2 * np.pi / loop.n)
    return 2 * integral.real


def involution_gap(mesh: Mesh) -> float:
    """Max ``|x(z) - x(-1/conj z)|`` over node pairs exchanged by the antipode.

    Only meaningful for annuli with ``r_min r_max = 1`` and even ``n_theta``.
    """
    z = mesh.params()
    x = mesh.coords()
    tol = 1e-9
    gap = 0.0
    for k, zk in enumerate(z):
        iz = -1 / np.conj(zk)
        d = np.abs(z - iz)
        m = int(np.argmin(d))
        if d[m] <= tol * max(1.0, abs(iz)):
            gap = max(gap, float(np.abs(x[k] - x[m]).max()))
    return gap


def _project(x: np.ndarray, projection: str):
    if projection == "drop_x4":
        return x[:, :3], None
    if projection == "stereographic_x4":
        top = float(np.abs(x[:, 3]).max()) if x.size else 0.0
        s = 0.5 / top if top > 0 else 0.0
        return x[:, :3] / (1 + s * x[:, 3])[:, None], s
    raise ValueError(f"unknown projection {projection!r}")


def _faces(n_r: int, n_t: int):
    for i in range(n_r - 1):
        for j in range(n_t):
            a = i * n_t + j
            b = i * n_t + (j + 1) % n_t
            c = (i + 1) * n_t + (j + 1) % n_t
            d = (i + 1) * n_t + j
            yield a, b, c
            yield a, c, d


def export_obj(mesh: Mesh, path, projection: str = "drop_x4"):
    """Write a triangulated OBJ and a companion CSV.

    Returns
    -------
    (Path, Path)
        The OBJ path and the CSV path (same stem, ``.csv`` suffix).
    """
    if len(mesh) == 0:
        raise ValueError("empty mesh: nothing to export")
    x = mesh.coords()
    xyz, s = _project(x, projection)
    obj = Path(path)
    csv_path = obj.with_suffix(".csv")
    lines = ["# stationary surface mesh", f"# projection {projection}"]
    if s is not None:
        lines.append(f"# stereographic s={s:.12g}")
    lines.append(f"# grid {mesh.n_r} x {mesh.n_theta}")
    lines.extend("v %.12g %.12g %.12g" % tuple(v) for v in xyz)
    lines.extend(f"f {a + 1} {b + 1} {c + 1}" for a, b, c in _faces(mesh.n_r, mesh.n_theta))
    with open(obj, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")
    with open(csv_path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["z_re", "z_im", "x1", "x2", "x3", "x4", "e2w"])
        for p in mesh:
            w.writerow(
                [repr(p.z.real), repr(p.z.imag)]
                + [repr(float(v)) for v in p.x]
                + [repr(p.conformal_factor)]
            )
    return obj, csv_path
