"""
Weierstrass data for stationary surfaces in Lorentz 4-space.

A surface is described on the punctured Riemann sphere by two Gauss maps
``phi``, ``psi`` and a height differential ``dh = h(z) dz``.  The immersion
is ``x = 2 Re ∫ x_z dz`` with

    x_z = ((phi + psi) h, -i (phi - psi) h, (1 - phi psi) h, (1 + phi psi) h).

This module validates the local regularity and period conditions, classifies
the ends, evaluates the three integer total-curvature formulas and builds
the catalog of reference data.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Union

import numpy as np

from . import cxratio as cx
from ._util import fmt_point, pi_multiple, same_point
from .cxratio import INF, Poly, RationalMap
from .quadcurv import GaussMapCallable

__all__ = [
    "WeierstrassData",
    "EndReport",
    "CurvatureReport",
    "RegularityReport",
    "PeriodReport",
    "PunctureResidues",
    "ConstantGaussMapError",
    "NonRationalDataError",
    "BadSingularEndError",
    "IncompleteEndError",
    "xz_components",
    "check_regularity",
    "check_periods",
    "classify_end",
    "end_multiplicity",
    "total_curvature",
    "catalog",
    "CATALOG_NAMES",
    "meeks",
    "epsilon_family",
    "essential",
    "section4_candidate",
    "rejected_m2",
]

MapLike = Union[RationalMap, GaussMapCallable]

#: default absolute tolerance on periods (2 pi i times residues)
PERIOD_TOL = 1e-9
#: chordal tolerance for deciding phi(p) == conj(psi(p)) at an end
VALUE_TOL = 1e-9


class ConstantGaussMapError(ValueError):
    """Constant Gauss maps are a degenerate case this model excludes."""


class NonRationalDataError(TypeError):
    """Raised by residue-based checks when the data is given by callables."""


class BadSingularEndError(ValueError):
    """The index formulas do not apply when an end has m = n."""


class IncompleteEndError(ValueError):
    """An end with reduced multiplicity below one is not complete."""


# --------------------------------------------------------------------------
# data model
# --------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class WeierstrassData:
    """Weierstrass data ``(phi, psi, dh = h dz)`` on the punctured sphere.

    Parameters
    ----------
    phi, psi : RationalMap or GaussMapCallable
        The two Gauss maps.
    h : RationalMap or GaussMapCallable
        Coefficient of the height differential in the global coordinate.
    punctures : tuple
        The ends, as complex numbers or :data:`~stationary.cxratio.INF`.
    genus : int
        Genus of the compactified cover; only 0 is supported.
    involution_antipodal : bool
        Whether the data claims symmetry under ``z -> -1/conj(z)``.
    name, params : optional
        Catalog provenance; used to serialise callable-based data.
    """

    phi: MapLike
    psi: MapLike
    h: MapLike
    punctures: tuple = ()
    genus: int = 0
    involution_antipodal: bool = False
    name: str = ""
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "punctures", tuple(self.punctures))
        if self.genus != 0:
            raise ValueError("only genus 0 (the Riemann sphere) is supported")
        pts = self.punctures
        for i in range(len(pts)):
            for j in range(i + 1, len(pts)):
                if same_point(pts[i], pts[j], 1e-12):
                    raise ValueError(f"duplicate puncture {fmt_point(pts[i])}")
        for label, f in (("phi", self.phi), ("psi", self.psi)):
            if isinstance(f, RationalMap) and f.is_constant():
                raise ConstantGaussMapError(
                    f"{label} is constant; constant Gauss maps are outside the model"
                )
        if isinstance(self.h, RationalMap) and self.h.is_zero():
            raise ValueError("dh vanishes identically")

    @property
    def is_rational(self) -> bool:
        return all(isinstance(f, RationalMap) for f in (self.phi, self.psi, self.h))

    def require_rational(self, what: str = "this operation"):
        if not self.is_rational:
            raise NonRationalDataError(
                f"{what} needs rational data; use quadcurv.integrate_curvature or "
                "surface_mesh.loop_defect for callable-based data"
            )

    def is_puncture(self, p, tol: float = 1e-8) -> bool:
        return any(same_point(p, q, tol) for q in self.punctures)

    def xz(self, z) -> np.ndarray:
        """Evaluate the four components of ``x_z`` at finite points."""
        z = np.asarray(z, dtype=complex)
        f, g, h = (evaluate(m, z) for m in (self.phi, self.psi, self.h))
        return np.stack([(f + g) * h, -1j * (f - g) * h, (1 - f * g) * h, (1 + f * g) * h])


def evaluate(f: MapLike, z):
    """Evaluate a rational map or callable at finite points."""
    if isinstance(f, RationalMap):
        return f(z)
    return f.evaluate(z)


def evaluate_derivative(f: MapLike, z):
    if isinstance(f, RationalMap):
        return cx.derivative(f)(z)
    return f.derivative(z)


def xz_components(data: WeierstrassData) -> list[RationalMap]:
    """``x_z`` as four rational maps (coefficients of ``dz``)."""
    data.require_rational("x_z assembly")
    f, g, h = data.phi, data.psi, data.h
    fg = f * g
    return [(f + g) * h, (f - g) * h * (-1j), (1 - fg) * h, (1 + fg) * h]


# --------------------------------------------------------------------------
# regularity
# --------------------------------------------------------------------------


@dataclass
class RegularityReport:
    passed: bool
    coincident_poles: list = field(default_factory=list)
    order_mismatches: list = field(default_factory=list)
    stray_poles: list = field(default_factory=list)
    notes: list = field(default_factory=list)

    def lines(self) -> list[str]:
        out = [f"regularity: {'pass' if self.passed else 'FAIL'}"]
        for p in self.coincident_poles:
            out.append(f"  coincident poles of phi and psi at {fmt_point(p)}")
        for p, oh, need in self.order_mismatches:
            out.append(f"  dh has order {oh} at {fmt_point(p)} but the Gauss maps need {need}")
        for p, k in self.stray_poles:
            out.append(f"  x_z dz has a pole of order {k} at non-puncture {fmt_point(p)}")
        out.extend(f"  note: {n}" for n in self.notes)
        return out


def _pole_order(f: RationalMap, p) -> int:
    if f.is_zero():
        return 0
    return max(0, -cx.order_at(f, p))


def _form_order(h: RationalMap, p) -> int:
    """Order of the form ``h dz`` at ``p`` (``dz`` has a double pole at infinity)."""
    k = cx.order_at(h, p)
    return k - 2 if p is INF else k


def _candidate_points(*maps: RationalMap) -> list:
    pts: list = [INF]
    for f in maps:
        for p, _ in cx.zeros_poles(f):
            if p is INF:
                continue
            if not any(q is not INF and abs(q - p) <= 1e-8 * max(1, abs(p)) for q in pts):
                pts.append(p)
    return pts


def check_regularity(data: WeierstrassData) -> RegularityReport:
    """Local regularity away from the punctures.

    Checks that the poles of ``phi`` and ``psi`` never coincide, that ``dh``
    vanishes exactly to the pole order of the Gauss maps and nowhere else,
    and that ``x_z dz`` has no pole off the puncture set.  The global
    condition ``phi != conj(psi)`` is left to :mod:`stationary.singscan`.
    """
    if not data.is_rational:
        return RegularityReport(
            passed=True,
            notes=["skipped: local checks need rational data (non-rational data)"],
        )
    f, g, h = data.phi, data.psi, data.h
    rep = RegularityReport(passed=True)
    comps = xz_components(data)
    for p in _candidate_points(f, g, h):
        if data.is_puncture(p):
            continue
        a, b = _pole_order(f, p), _pole_order(g, p)
        if a and b:
            rep.coincident_poles.append(p)
        oh = _form_order(h, p)
        need = max(a, b)
        if oh != need:
            rep.order_mismatches.append((p, oh, need))
        worst = max(_form_pole(c, p) for c in comps)
        if worst > 0:
            rep.stray_poles.append((p, worst))
    rep.passed = not (rep.coincident_poles or rep.order_mismatches or rep.stray_poles)
    rep.notes.append("global condition phi != conj(psi) is checked by singscan")
    return rep


def _form_pole(f: RationalMap, p) -> int:
    """Pole order of ``f dz`` at ``p`` (0 when holomorphic)."""
    if f.is_zero():
        return 0
    return max(0, -_form_order(f, p))


# --------------------------------------------------------------------------
# periods
# --------------------------------------------------------------------------


@dataclass
class PunctureResidues:
    point: object
    res_h: complex
    res_phih: complex
    res_psih: complex
    res_phipsih: complex
    horizontal: float  # |2 pi i Res(phi h) + conj(2 pi i Res(psi h))|
    vertical_h: float  # Re(2 pi i Res h)
    vertical_phipsih: float  # Re(2 pi i Res(phi psi h))
    passed: bool


@dataclass
class PeriodReport:
    passed: bool
    tol: float
    ends: list

    def lines(self) -> list[str]:
        out = [f"periods: {'pass' if self.passed else 'FAIL'} (tol {self.tol:g})"]
        for e in self.ends:
            out.append(
                f"  end {fmt_point(e.point)}: Res h={e.res_h:.3g} Res phi h={e.res_phih:.3g} "
                f"Res psi h={e.res_psih:.3g} Res phi psi h={e.res_phipsih:.3g}"
            )
            if abs(e.horizontal) > self.tol:
                out.append(f"    horizontal condition fails: defect {e.horizontal:.6g}")
            if abs(e.vertical_h) > self.tol:
                out.append(f"    vertical condition fails: Re∮dh = {e.vertical_h:.12g}")
            if abs(e.vertical_phipsih) > self.tol:
                out.append(
                    f"    vertical condition fails: Re∮phi psi dh = {e.vertical_phipsih:.12g}"
                )
        return out


def check_periods(data: WeierstrassData, tol: float = PERIOD_TOL) -> PeriodReport:
    """Residue form of the period conditions at every puncture.

    Small loops around the punctures generate the homology of the punctured
    sphere, so per-puncture residues decide every period.
    """
    data.require_rational("residue-based period validation")
    f, g, h = data.phi, data.psi, data.h
    fh, gh, fgh = f * h, g * h, f * g * h
    ends = []
    tpi = 2j * math.pi
    for p in data.punctures:
        r = [cx.residue(m, p) for m in (h, fh, gh, fgh)]
        hor = abs(tpi * r[1] + np.conj(tpi * r[2]))
        vh = (tpi * r[0]).real
        vfg = (tpi * r[3]).real
        ok = hor <= tol and abs(vh) <= tol and abs(vfg) <= tol
        ends.append(PunctureResidues(p, *r, hor, vh, vfg, ok))
    # residues away from the punctures must vanish too
    return PeriodReport(all(e.passed for e in ends), tol, ends)


# --------------------------------------------------------------------------
# ends
# --------------------------------------------------------------------------


@dataclass
class EndReport:
    """Classification of one end.

    ``ind``-type fields are 0 at regular ends and undefined (reported as 0)
    at bad singular ends.
    """

    point: object
    kind: str
    m: int
    n: int
    ind: int
    ind_plus: int
    ind10: int
    ind01: int
    d: int
    d_tilde: int
    complete: bool
    value: object = None  # common value phi(p) = conj(psi(p)) at singular ends

    def line(self) -> str:
        return (
            f"end {fmt_point(self.point)}: {self.kind} m={self.m} n={self.n} ind={self.ind} "
            f"ind+={self.ind_plus} ind10={self.ind10} ind01={self.ind01} d={self.d} "
            f"d~={self.d_tilde} {'complete' if self.complete else 'INCOMPLETE'}"
        )


def _conj_point(v):
    return INF if v is INF else complex(np.conj(v))


def _end_indices(data: WeierstrassData, p):
    f, g = data.phi, data.psi
    vf, vg = cx.rat_eval(f, p), cx.rat_eval(g, p)
    if cx.chordal(vf, _conj_point(vg)) > VALUE_TOL:
        return "regular", 0, 0, None
    if vf is INF:
        # invert both maps so the common value becomes 0
        f0, g0, value = f.reciprocal(), g.reciprocal(), INF
    else:
        f0, g0, value = f - vf, g - np.conj(vf), vf
    m = cx.order_at(f0, p)
    n = cx.order_at(g0, p)
    return ("bad_singular" if m == n else "good_singular"), m, n, value


def _index_triple(kind, m, n):
    if kind != "good_singular":
        return 0, 0, 0, 0
    ind = m if m < n else -n
    plus = abs(ind)
    return ind, plus, (plus + ind) // 2, (plus - ind) // 2


def end_multiplicity(data: WeierstrassData, p):
    """``(d, d_tilde, complete)`` at an end.

    ``d + 1`` is the largest pole order among the components of ``x_z dz``.
    """
    comps = xz_components(data)
    d = max(_form_pole(c, p) for c in comps) - 1
    kind, m, n, _ = _end_indices(data, p)
    _, plus, _, _ = _index_triple(kind, m, n)
    dt = d - plus
    return d, dt, dt >= 1


def classify_end(data: WeierstrassData, p) -> EndReport:
    """Regular, good singular (m != n) or bad singular (m == n) end at ``p``."""
    data.require_rational("end classification")
    if not data.is_puncture(p):
        raise ValueError(f"{fmt_point(p)} is not a puncture of the data")
    kind, m, n, value = _end_indices(data, p)
    ind, plus, i10, i01 = _index_triple(kind, m, n)
    d, dt, complete = end_multiplicity(data, p)
    return EndReport(p, kind, m, n, ind, plus, i10, i01, d, dt, complete, value)


# --------------------------------------------------------------------------
# total curvature
# --------------------------------------------------------------------------


@dataclass
class CurvatureReport:
    """Total curvature ``-∫K`` over the cover, in units of pi.

    ``quotient_value`` is half the cover value and is set only when the
    antipodal symmetry has been verified numerically.
    """

    by_deg_phi: int
    by_deg_psi: int
    by_jorge_meeks: int
    agreement: bool
    quotient_value: float | None = None
    ends: list = field(default_factory=list)

    @property
    def cover_value(self) -> int:
        return self.by_deg_phi

    def lines(self) -> list[str]:
        out = [
            "total curvature -∫K on the cover:",
            f"  from deg phi:  {pi_multiple(self.by_deg_phi)}",
            f"  from deg psi:  {pi_multiple(self.by_deg_psi)}",
            f"  Jorge-Meeks:   {pi_multiple(self.by_jorge_meeks)}",
            f"  agreement: {'yes' if self.agreement else 'NO'}",
        ]
        if self.quotient_value is not None:
            out.append(f"  quotient (non-orientable): {pi_multiple(self.quotient_value)}")
        return out


def total_curvature(data: WeierstrassData) -> CurvatureReport:
    """Three integer formulas for ``-∫K``, in units of pi."""
    data.require_rational("the index formulas")
    ends = [classify_end(data, p) for p in data.punctures]
    bad = [e for e in ends if e.kind == "bad_singular"]
    if bad:
        raise BadSingularEndError(
            "bad singular end at "
            + ", ".join(fmt_point(e.point) for e in bad)
            + ": the curvature integral diverges there and the index formulas do not apply"
        )
    inc = [e for e in ends if not e.complete]
    if inc:
        raise IncompleteEndError(
            "incomplete end (d~ < 1) at " + ", ".join(fmt_point(e.point) for e in inc)
        )
    r = len(ends)
    by_phi = 4 * (cx.rat_degree(data.phi) - sum(e.ind10 for e in ends))
    by_psi = 4 * (cx.rat_degree(data.psi) - sum(e.ind01 for e in ends))
    by_jm = 2 * (2 * data.genus + r - 2 + sum(e.d_tilde for e in ends))
    rep = CurvatureReport(by_phi, by_psi, by_jm, by_phi == by_psi == by_jm, None, ends)
    if data.involution_antipodal:
        from .nonorientable import check_involution

        if check_involution(data).passed:
            rep.quotient_value = by_phi / 2
    return rep


# --------------------------------------------------------------------------
# catalog
# --------------------------------------------------------------------------

_Z = RationalMap.z()


def meeks(lam: complex = 1j, m: int = 1) -> WeierstrassData:
    """Generalised Meeks Möbius strip with parameter ``|lam| = 1`` and ``m >= 1``."""
    lam = complex(lam)
    if abs(abs(lam) - 1) > 1e-12:
        raise ValueError("meeks: |lambda| must be 1")
    if abs(lam - 1) < 1e-12 or abs(lam + 1) < 1e-12:
        raise ValueError("meeks: lambda must differ from ±1")
    if int(m) != m or m < 1:
        raise ValueError("meeks: m must be an integer >= 1")
    m = int(m)
    lb = lam.conjugate()
    zz = Poly.monomial(2 * m)
    phi = RationalMap(Poly([-lam, 1]) * zz, Poly([-lb, 1]))
    psi = RationalMap(Poly([1, lb]), Poly([1, lam]) * zz)
    h = RationalMap(Poly([-lb, 1]) * Poly([1, lam]) * 1j, Poly.monomial(2))
    return WeierstrassData(phi, psi, h, (0j, INF), 0, True, "meeks", {"lam": lam, "m": m})


def epsilon_family(eps: float = 0.1) -> WeierstrassData:
    """One-end family with a good singular end at ``z = 0``.

    ``psi`` is the antipodal pullback of ``phi`` and ``dh`` is normalised so
    that ``eps -> 0`` gives ``i (z + 1)(z - 1) dz / z**2``.
    """
    eps = float(eps)
    if not eps > 0 or not math.isfinite(eps):
        raise ValueError("epsilon_family: eps must be a positive real number")
    a0 = math.sqrt(2 * eps + eps**2)
    A = Poly([a0, 0, 0, 1 + eps, 1])
    phi = RationalMap(Poly([0, -1, 1]), A)
    psi = cx.involution_pullback(phi)
    h = RationalMap(A * A.sharp(4) * (-1j), Poly.monomial(5))
    return WeierstrassData(phi, psi, h, (0j, INF), 0, True, "epsilon_family", {"eps": eps})


def essential(p: int = 2) -> WeierstrassData:
    """Möbius strip family with essential singularities at both ends (callables)."""
    if int(p) != p or p < 2:
        raise ValueError("essential: p must be an integer >= 2")
    p = int(p)
    k = 2 * p - 1

    def e(z):
        return np.exp(0.5 * (z - 1 / z))

    def log_e(z):
        return 0.5 * (z - 1 / z)

    def de_ratio(z):
        return 0.5 * (1 + 1 / z**2)

    phi = GaussMapCallable(
        evaluate=lambda z: z**k * e(z),
        derivative=lambda z: z**k * e(z) * (k / z + de_ratio(z)),
        description=f"z^{k} exp((z - 1/z)/2)",
        log_evaluate=lambda z: k * np.log(z) + log_e(z),
        log_derivative=lambda z: k / z + de_ratio(z),
    )
    psi = GaussMapCallable(
        evaluate=lambda z: -(z ** (-k)) * e(z),
        derivative=lambda z: -(z ** (-k)) * e(z) * (-k / z + de_ratio(z)),
        description=f"-z^(-{k}) exp((z - 1/z)/2)",
        log_evaluate=lambda z: 1j * np.pi - k * np.log(z) + log_e(z),
        log_derivative=lambda z: -k / z + de_ratio(z),
    )
    h = GaussMapCallable(
        evaluate=lambda z: -de_ratio(z) / e(z),
        derivative=lambda z: (z**-3 + de_ratio(z) ** 2) / e(z),
        description="d/dz exp(-(z - 1/z)/2)",
    )
    return WeierstrassData(phi, psi, h, (0j, INF), 0, True, "essential", {"p": p})


OMEGA = complex(-0.5, math.sqrt(3) / 2)


def section4_candidate() -> WeierstrassData:
    """The unique two-end candidate singled out by the isotropy system.

    Built from the partial-fraction forms of ``phi dh``, ``psi dh`` and
    ``phi psi dh``; the Gauss maps are their quotients.
    """
    s3 = math.sqrt(3)
    w, w2 = OMEGA, OMEGA**2
    zm2 = 1 / (_Z - 1) ** 2
    zp2 = 1 / (_Z + 1) ** 2
    fh = 1 / _Z**2 + w * zm2 + w * zp2
    gh = 1 + w2 * zm2 + w2 * zp2
    fgh = RationalMap(Poly([0, -s3 * 1j]), Poly([1, 0, -1]) ** 2)
    h = 1 / _Z**3 - _Z + RationalMap(Poly([0, 16j / s3]), Poly([1, 0, -1]) ** 2)
    phi = fgh / gh
    psi = fgh / fh
    return WeierstrassData(
        phi, psi, h, (0j, INF, 1 + 0j, -1 + 0j), 0, True, "section4_candidate", {}
    )


def rejected_m2(a=(1, 0, 0, 0, 0, 1)) -> WeierstrassData:
    """The ``m = 2`` construction that violates the vertical period condition.

    ``phi = z**2 / A`` with ``deg A = 5``, ``psi`` its antipodal pullback and
    ``dh = i A A# dz / z**6``; then ``phi psi dh = i dz / z``.
    """
    A = Poly(a)
    if A.degree != 5 or abs(A.coeffs[0]) == 0:
        raise ValueError("rejected_m2: A must have degree 5 and A(0) != 0")
    phi = RationalMap(Poly.monomial(2), A)
    psi = cx.involution_pullback(phi)
    h = RationalMap(A * A.sharp(5) * 1j, Poly.monomial(6))
    return WeierstrassData(
        phi, psi, h, (0j, INF), 0, True, "rejected_m2", {"a": [complex(x) for x in A.coeffs]}
    )


_BUILDERS = {
    "meeks": meeks,
    "epsilon_family": epsilon_family,
    "essential": essential,
    "section4_candidate": section4_candidate,
    "rejected_m2": rejected_m2,
}
_ALIASES = {"epsilon": "epsilon_family", "eps": "epsilon_family", "section4": "section4_candidate"}
CATALOG_NAMES = tuple(_BUILDERS)


def catalog(name: str, **params) -> WeierstrassData:
    """Build a catalog entry by name.

    Names: ``meeks`` (``lam``, ``m``), ``epsilon_family`` (``eps``),
    ``essential`` (``p``), ``section4_candidate`` and the test fixture
    ``rejected_m2`` (``a``).
    """
    key = _ALIASES.get(name, name)
    if key not in _BUILDERS:
        raise KeyError(f"unknown catalog entry {name!r}; choose from {', '.join(CATALOG_NAMES)}")
    return _BUILDERS[key](**params)
