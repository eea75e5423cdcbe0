"""
Global search for singular points ``phi(z) = conj(psi(z))``.

The scan samples the chordal distance between ``phi`` and ``conj(psi)`` on
two log-polar charts covering the sphere, refines every grid-local minimum
by damped Newton iteration on the real 2x2 system and classifies what it
finds.  Acceptance is numerical: "no singular point at this resolution".

The module also carries the reduced equations used for the two
antipodally symmetric families: the explicit obstruction for the
one-end family and the root of the two-end candidate.
"""
from __future__ import annotations

import io
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.optimize import bisect, minimize

from . import cxratio as cx
from ._util import fmt_point, same_point
from .cxratio import INF, Poly, RationalMap
from .quadcurv import GaussMapCallable, _invert
from .weierstrass import WeierstrassData, evaluate

__all__ = [
    "SingularPoint",
    "SuspiciousMinimum",
    "ScanReport",
    "ObstructionReport",
    "CandidateRoot",
    "VieteSystem",
    "CandidateVerificationError",
    "scan_singular_points",
    "epsilon_family_obstruction",
    "analytic_bound",
    "analytic_bound_threshold",
    "candidate_singular_root",
    "viete_verify",
]

#: residual |phi - conj psi| (relative) accepted as a singular point
ACCEPT_TOL = 1e-9
#: grid minima below this chordal value that fail to converge are reported
SUSPICIOUS_TOL = 1e-3
EXCLUSION_RADIUS = 1e-4
#: grid minima with a larger chordal value are not Newton seeds
SEED_TOL = 0.25


class CandidateVerificationError(RuntimeError):
    """The reduced equations produced a point that is not singular."""


@dataclass
class SingularPoint:
    z: object
    value_t: object
    m: int
    n: int
    kind: str
    residual: float


@dataclass
class SuspiciousMinimum:
    z: complex
    chordal_value: float
    reason: str


@dataclass
class ScanReport:
    """Result of :func:`scan_singular_points`; iterates over the points."""

    points: list
    suspicious: list
    grid: int
    charts: int = 2
    seeds: int = 0
    exclusion_radius: float = EXCLUSION_RADIUS
    min_chordal: float = math.inf

    def __iter__(self):
        return iter(self.points)

    def __len__(self):
        return len(self.points)

    def __getitem__(self, i):
        return self.points[i]

    @property
    def regular(self) -> bool:
        return not self.points and not self.suspicious

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("z_re,z_im,residual,m,n,kind\n")
        for p in self.points:
            if p.z is INF:
                buf.write(f"inf,inf,{p.residual:.6e},{p.m},{p.n},{p.kind}\n")
            else:
                buf.write(
                    f"{p.z.real:.15g},{p.z.imag:.15g},{p.residual:.6e},{p.m},{p.n},{p.kind}\n"
                )
        return buf.getvalue()

    def lines(self) -> list[str]:
        out = [
            f"singular scan ({self.charts} charts, {self.grid}x{self.grid} each, "
            f"{self.seeds} Newton seeds): "
            + ("none found" if not self.points else f"{len(self.points)} singular point(s)")
        ]
        for p in self.points:
            out.append(
                f"  z = {fmt_point(p.z)}  m={p.m} n={p.n} {p.kind}  residual {p.residual:.1e}"
            )
        for s in self.suspicious:
            out.append(f"  suspicious minimum near {fmt_point(s.z)}: {s.reason}")
        out.append(f"  smallest grid chordal distance {self.min_chordal:.3e}")
        return out


class _Pair:
    """phi and psi in one chart, with stable values and derivatives.

    Callables that provide log forms are compared through
    ``rho = phi / conj(psi) = exp(log phi - conj(log psi))``, which stays
    finite where both maps under- or overflow.
    """

    def __init__(self, phi, psi):
        self.phi, self.psi = phi, psi
        self.rational = isinstance(phi, RationalMap) and isinstance(psi, RationalMap)
        self.logs = (
            not self.rational
            and getattr(phi, "log_evaluate", None) is not None
            and getattr(psi, "log_evaluate", None) is not None
        )
        if self.rational:
            self.dphi = cx.derivative(phi)
            self.dpsi = cx.derivative(psi)
            self.iphi, self.ipsi = phi.reciprocal(), psi.reciprocal()
            self.diphi, self.dipsi = cx.derivative(self.iphi), cx.derivative(self.ipsi)

    def _log_ratio(self, z):
        return self.phi.log_evaluate(z) - np.conj(self.psi.log_evaluate(z))

    def chordal(self, z):
        with np.errstate(all="ignore"):
            if self.rational:
                a, b = self.phi.num(z), self.phi.den(z)
                c, d = self.psi.num(z), self.psi.den(z)
                top = np.abs(a * np.conj(d) - np.conj(c) * b)
                bot = np.sqrt((np.abs(a) ** 2 + np.abs(b) ** 2) * (np.abs(c) ** 2 + np.abs(d) ** 2))
                return top / bot
            if self.logs:
                t = self._log_ratio(z)
                q = np.exp(np.where(t.real > 0, -t, t))
                return np.abs(1 - q) / (1 + np.abs(q))
            f = evaluate(self.phi, z)
            g = np.conj(evaluate(self.psi, z))
            out = cx.chordal(f, g)
            return np.where(np.isfinite(out), out, 1.0)

    def system(self, z):
        """``G`` and its partial derivatives in x and y, on a bounded branch."""
        with np.errstate(all="ignore"):
            if self.logs:
                t = self._log_ratio(z)
                tx = self.phi.log_derivative(z) - np.conj(self.psi.log_derivative(z))
                ty = 1j * self.phi.log_derivative(z) + 1j * np.conj(self.psi.log_derivative(z))
                if t.real > 0:
                    t, tx, ty = -t, -tx, -ty
                q = np.exp(t)
                return q - 1, q * tx, q * ty
            if self.rational:
                if abs(self.phi(z)) <= 1:
                    u, v, du, dv = self.phi(z), self.psi(z), self.dphi(z), self.dpsi(z)
                else:
                    u, v, du, dv = self.iphi(z), self.ipsi(z), self.diphi(z), self.dipsi(z)
            else:
                u, v = self.phi.evaluate(z), self.psi.evaluate(z)
                du, dv = self.phi.derivative(z), self.psi.derivative(z)
                if abs(u) > 1:
                    u, v, du, dv = 1 / u, 1 / v, -du / u**2, -dv / v**2
            G = u - np.conj(v)
            Gx = du - np.conj(dv)
            Gy = 1j * du + 1j * np.conj(dv)
            return G, Gx, Gy


def _newton(pair: _Pair, z0: complex, maxiter: int = 100):
    z = complex(z0)
    G, Gx, Gy = pair.system(z)
    for _ in range(maxiter):
        J = np.array([[Gx.real, Gy.real], [Gx.imag, Gy.imag]])
        try:
            step = np.linalg.solve(J, [-G.real, -G.imag])
        except np.linalg.LinAlgError:
            step = np.linalg.lstsq(J, [-G.real, -G.imag], rcond=None)[0]
        dz = complex(step[0], step[1])
        lam = 1.0
        while lam > 1e-6:
            zn = z + lam * dz
            Gn, Gxn, Gyn = pair.system(zn)
            if np.isfinite(Gn) and abs(Gn) < abs(G):
                break
            lam *= 0.5
        else:
            return z, abs(G)
        z, G, Gx, Gy = zn, Gn, Gxn, Gyn
        if abs(G) < 1e-15 or abs(lam * dz) < 1e-15 * max(1.0, abs(z)):
            break
    return z, abs(G)


def _grid_minima(values: np.ndarray, limit: int, below: float = SEED_TOL):
    """Indices of grid-local minima (periodic in the second axis).

    Plateaus (no neighbour strictly larger) and minima above ``below`` are
    not seeds.
    """
    v = values
    pad = np.pad(v, ((1, 1), (0, 0)), constant_values=np.inf)
    is_min = v < below
    strict = np.zeros_like(v, dtype=bool)
    for di in (-1, 0, 1):
        for dj in (-1, 0, 1):
            if di == 0 and dj == 0:
                continue
            shifted = np.roll(pad, dj, axis=1)[1 + di : 1 + di + v.shape[0]]
            is_min &= v <= shifted
            strict |= v < shifted
    is_min &= strict
    idx = np.argwhere(is_min)
    order = np.argsort(v[is_min])
    return idx[order[:limit]]


def _local_multiplicity(f, z) -> int:
    if isinstance(f, RationalMap):
        return cx.multiplicity_at(f, z)[1]
    # callable: only distinguishes simple from higher order
    d = f.derivative(z)
    scale = max(1.0, abs(f.evaluate(z))) / max(1.0, abs(z))
    return 1 if abs(d) > 1e-6 * scale else 2


def scan_singular_points(
    data: WeierstrassData,
    grid: int = 512,
    exclusion_radius: float = EXCLUSION_RADIUS,
    max_seeds: int = 400,
) -> ScanReport:
    """Find all points with ``phi(z) = conj(psi(z))`` away from the punctures.

    Parameters
    ----------
    data : WeierstrassData
    grid : int
        Samples per axis in each of the two log-polar charts
        (``|z| <= 1`` and ``|1/z| <= 1``), radii from ``exclusion_radius``.
    exclusion_radius : float
        Points this close to a puncture (in the chart coordinate) are ends,
        not singular points.

    Returns
    -------
    ScanReport
        Singular points sorted by ``|z|`` then ``arg z``; minima where Newton
        failed are listed as suspicious, never dropped.
    """
    charts = [
        (_Pair(data.phi, data.psi), lambda w: w),
        (_Pair(_invert(data.phi), _invert(data.psi)), lambda w: 1 / w if w != 0 else INF),
    ]
    r = np.geomspace(exclusion_radius, 1.0, grid)
    theta = 2 * np.pi * np.arange(grid) / grid
    W = r[:, None] * np.exp(1j * theta)[None, :]
    found: list[tuple[complex, float]] = []
    suspicious: list[SuspiciousMinimum] = []
    seeds = 0
    min_chord = math.inf
    for pair, to_z in charts:
        vals = pair.chordal(W)
        vals = np.where(np.isfinite(vals), vals, 1.0)
        min_chord = min(min_chord, float(vals.min()))
        for i, j in _grid_minima(vals, max_seeds):
            seeds += 1
            w0 = W[i, j]
            w, res = _newton(pair, w0)
            z = to_z(w)
            if z is INF or not np.isfinite(w):
                continue
            if _near_puncture(data, z, w, exclusion_radius):
                continue
            if res <= ACCEPT_TOL and abs(w) <= 1.0 + 1e-9:
                found.append((z, res))
            elif res <= ACCEPT_TOL:
                # converged outside this chart; the other chart reports it
                found.append((z, res))
            elif vals[i, j] < SUSPICIOUS_TOL:
                suspicious.append(
                    SuspiciousMinimum(
                        complex(z), float(vals[i, j]), f"Newton stalled at residual {res:.2e}"
                    )
                )
    points = _dedupe(found)
    if data.involution_antipodal and points:
        points = _complete_pairs(data, points, charts[0][0])
    out = [_classify(data, z, res) for z, res in points]
    out.sort(key=lambda p: (abs(p.z), np.angle(p.z)))
    suspicious = [s for s in suspicious if not any(abs(s.z - p.z) < 1e-6 for p in out)]
    return ScanReport(out, suspicious, grid, 2, seeds, exclusion_radius, min_chord)


def _near_puncture(data, z, w, radius) -> bool:
    for p in data.punctures:
        if p is INF:
            if z == 0 or abs(1 / z) < radius:
                return True
        elif abs(z - p) < radius * max(1.0, abs(p)):
            return True
    return False


def _dedupe(found):
    out = []
    for z, res in sorted(found, key=lambda t: t[1]):
        if not any(same_point(z, q, 1e-7) for q, _ in out):
            out.append((z, res))
    return out


def _complete_pairs(data, points, pair):
    out = list(points)
    for z, _ in points:
        q = -1 / np.conj(z)
        if any(same_point(q, x, 1e-7) for x, _ in out):
            continue
        chart = pair if abs(q) <= 1 else _Pair(_invert(data.phi), _invert(data.psi))
        w0 = q if abs(q) <= 1 else 1 / q
        w, res = _newton(chart, w0)
        zq = w if abs(q) <= 1 else 1 / w
        if res <= ACCEPT_TOL:
            out.append((zq, res))
    return out


def _classify(data, z, res) -> SingularPoint:
    m = _local_multiplicity(data.phi, z)
    n = _local_multiplicity(data.psi, z)
    t = evaluate(data.phi, np.array([z]))[0]
    rel = float(_Pair(data.phi, data.psi).chordal(np.array([z]))[0])
    return SingularPoint(complex(z), complex(t), m, n, "bad" if m == n else "good", rel)


# --------------------------------------------------------------------------
# one-end family: reduced obstruction
# --------------------------------------------------------------------------


def _E(r, theta, eps):
    a0 = math.sqrt(2 * eps + eps**2)
    w = r - 1 / r + np.exp(1j * theta)
    e1 = np.exp(1j * theta)
    return e1**2 * (np.abs(w) ** 2 + 1) + eps * e1 * w - a0 * np.conj(e1) * (w - 2 * np.cos(theta))


def analytic_bound(eps: float) -> float:
    """``min over |w| >= 0`` of ``(|w|^2 + 1) - c (|w| + 2)``, ``c = eps + sqrt(2 eps + eps^2)``."""
    c = eps + math.sqrt(2 * eps + eps**2)
    return 1 - 2 * c - c**2 / 4


def analytic_bound_threshold() -> float:
    """Largest ``eps`` with a positive analytic bound (supremum, not attained)."""
    c = math.sqrt(20) - 4
    return c**2 / (2 * (1 + c))


@dataclass
class ObstructionReport:
    eps: float
    min_modulus: float
    argmin_r: float
    argmin_theta: float
    analytic_bound: float
    bound_positive: bool

    def lines(self) -> list[str]:
        return [
            f"eps = {self.eps:g}: min |E| = {self.min_modulus:.6g} at r = {self.argmin_r:.6g}, "
            f"theta = {self.argmin_theta:.6g}",
            f"  analytic lower bound {self.analytic_bound:.6g} "
            f"({'positive' if self.bound_positive else 'not positive'})",
        ]


def epsilon_family_obstruction(
    eps: float, n_r: int = 1201, n_theta: int = 720, refine: bool = True
) -> ObstructionReport:
    """Minimum of the reduced singular-point equation of the one-end family.

    ``E(r, theta; eps)`` vanishes exactly when ``r e^{i theta}`` is a
    non-trivial singular point.  The minimum of ``|E|`` over
    ``r in [1e-3, 1e3]`` (log-spaced) and ``theta in [0, 2 pi)`` is refined
    by Nelder-Mead from the best grid node.
    """
    if eps < 0:
        raise ValueError("eps must be non-negative")
    r = np.geomspace(1e-3, 1e3, n_r)
    th = 2 * np.pi * np.arange(n_theta) / n_theta
    vals = np.abs(_E(r[:, None], th[None, :], eps))
    i, j = np.unravel_index(np.argmin(vals), vals.shape)
    best = (float(vals[i, j]), float(r[i]), float(th[j]))
    if refine:
        fun = lambda x: float(np.abs(_E(math.exp(x[0]), x[1], eps)))  # noqa: E731
        sol = minimize(
            fun,
            [math.log(r[i]), th[j]],
            method="Nelder-Mead",
            options={"xatol": 1e-12, "fatol": 1e-15, "maxiter": 4000},
        )
        lr = float(np.clip(sol.x[0], math.log(1e-3), math.log(1e3)))
        v = fun([lr, sol.x[1]])
        if v < best[0]:
            best = (v, math.exp(lr), float(sol.x[1] % (2 * np.pi)))
    bound = analytic_bound(eps)
    return ObstructionReport(eps, best[0], best[1], best[2], bound, bound > 0)


# --------------------------------------------------------------------------
# two-end candidate: reduced equations and Viète identities
# --------------------------------------------------------------------------

_S3 = math.sqrt(3)


def viete_verify(coeffs, roots) -> np.ndarray:
    """Deviation of the four elementary symmetric functions from the quartic.

    Parameters
    ----------
    coeffs : Poly or sequence
        Monic quartic, ascending coefficients ``c0, c1, c2, c3, 1``.
    roots : sequence of 4 complex
        Claimed roots (e.g. ``z0, -1/conj(z0), z1, z2``).

    Returns
    -------
    ndarray
        ``|e1 + c3|, |e2 - c2|, |e3 + c1|, |e4 - c0|``.
    """
    c = np.asarray(coeffs.coeffs if isinstance(coeffs, Poly) else coeffs, dtype=complex)
    if c.size != 5 or abs(c[4] - 1) > 1e-12:
        raise ValueError("viete_verify needs a monic quartic")
    z = np.asarray(roots, dtype=complex)
    if z.size != 4:
        raise ValueError("need exactly four roots")
    e = np.poly(z)  # descending: 1, -e1, e2, -e3, e4
    return np.abs(e[1:] - c[3::-1])


@dataclass
class VieteSystem:
    """Quartic ``phi(z) = t``-type equation of a symmetric family.

    ``quartic(t)`` gives ascending monic coefficients; the claimed root set
    always contains an antipodal pair ``z0, -1/conj(z0)``; ``reduced(r, th)``
    evaluates the real equations left after eliminating the other two roots.
    """

    name: str
    quartic: Callable
    reduced: Callable
    symmetry: str = "z0, -1/conj(z0)"

    @classmethod
    def epsilon_family(cls, eps: float) -> "VieteSystem":
        a0 = math.sqrt(2 * eps + eps**2)
        return cls(
            f"epsilon_family(eps={eps:g})",
            lambda t: np.array([a0, 1 / t, -1 / t, 1 + eps, 1], dtype=complex),
            lambda r, th: _E(r, th, eps),
        )

    @classmethod
    def section4(cls) -> "VieteSystem":
        def reduced(r, th):
            re = r**2 - 1 + 1 / r**2 - _S3 * np.sin(4 * th) - 3 * np.cos(2 * th) - _S3 * np.sin(2 * th)
            im = _S3 * np.sin(2 * th) - np.cos(4 * th) - np.cos(2 * th)
            return re, im

        return cls(
            "section4_candidate",
            lambda t: np.array([-_S3 * 1j, -_S3 * 1j * t, -(3 + _S3 * 1j), 0, 1], dtype=complex),
            reduced,
        )


@dataclass
class CandidateRoot:
    lam0: float
    theta0: float
    r0: float
    z0: complex
    t: complex
    residual: float  # |phi(z0) - conj(psi(z0))|
    branch_residual: float
    quartic_residuals: tuple  # |quartic(z0)|, |quartic(-1/conj z0)|
    minus_branch: list  # (lambda, feasible) on the other sign branch

    def lines(self) -> list[str]:
        return [
            f"lambda0 = {self.lam0:.15g} (branch residual {self.branch_residual:.1e})",
            f"theta0 = {self.theta0:.15g}, r0 = {self.r0:.15g}",
            f"z0 = {fmt_point(self.z0)}, partner {fmt_point(-1 / np.conj(self.z0))}",
            f"|phi(z0) - conj psi(z0)| = {self.residual:.2e}",
            "other sign branch: "
            + ", ".join(f"lambda={lam:g} ({'feasible' if ok else 'no r solution'})"
                        for lam, ok in self.minus_branch),
        ]


def _branch(lam, sign):
    return sign * _S3 * math.sqrt(max(0.0, 1 - lam * lam)) - (2 * lam * lam + lam - 1)


def _minus_branch_roots(samples: int = 4001) -> list:
    lams = np.linspace(-1, 1, samples)
    vals = np.array([_branch(x, -1) for x in lams])
    roots = []
    for k in range(samples - 1):
        a, b = vals[k], vals[k + 1]
        if a == 0:
            roots.append(float(lams[k]))
        elif a * b < 0:
            roots.append(float(bisect(lambda x: _branch(x, -1), lams[k], lams[k + 1], xtol=1e-14)))
    if vals[-1] == 0:
        roots.append(1.0)
    out = []
    for lam in roots:
        rhs = 2 * lam * (2 * lam * lam + 2 * lam + 1)
        out.append((lam, rhs >= 2))
    return out


def candidate_singular_root(data: WeierstrassData | None = None, tol: float = 1e-8) -> CandidateRoot:
    """Explicit singular point of the two-end candidate.

    Solves the branch equation for ``lambda = cos 2 theta`` by bisection on
    ``(1/2, 1)``, recovers ``theta`` with ``sin 2 theta > 0``, takes the root
    ``r > 1`` of ``r^2 + r^-2 = 2 lambda (2 lambda^2 + 2 lambda + 1)`` and
    checks the point against the Gauss maps.

    Raises
    ------
    CandidateVerificationError
        If ``|phi(z0) - conj(psi(z0))| >= tol``.
    """
    if data is None:
        from .weierstrass import section4_candidate

        data = section4_candidate()
    lam0 = bisect(lambda x: _branch(x, +1), 0.5, 1.0, xtol=1e-15, rtol=4 * np.finfo(float).eps)
    theta0 = 0.5 * math.acos(lam0)
    R = 2 * lam0 * (2 * lam0**2 + 2 * lam0 + 1)
    r0 = math.sqrt((R + math.sqrt(R * R - 4)) / 2)
    z0 = r0 * complex(math.cos(theta0), math.sin(theta0))
    phi0 = data.phi(z0)
    residual = abs(phi0 - np.conj(data.psi(z0)))
    if not residual < tol:
        raise CandidateVerificationError(
            f"candidate point {z0:.12g} is not singular: residual {residual:.3e}"
        )
    # quartic z^4 - (3 + sqrt3 i) z^2 - sqrt3 i t z - sqrt3 i vanishes at z0
    t = (z0**4 - (3 + _S3 * 1j) * z0**2 - _S3 * 1j) / (_S3 * 1j * z0)
    q = Poly(VieteSystem.section4().quartic(t))
    partner = -1 / np.conj(z0)
    return CandidateRoot(
        float(lam0),
        theta0,
        r0,
        complex(z0),
        complex(t),
        float(residual),
        abs(_branch(lam0, +1)),
        (abs(q(z0)), abs(q(partner))),
        _minus_branch_roots(),
    )
