"""
Antipodal symmetry and the non-orientable quotient.

Data invariant under ``I(z) = -1/conj(z)`` in the sense

    phi(I z) = conj(psi(z)),  psi(I z) = conj(phi(z)),  I^* dh = conj(dh)

descends to a surface in which every pair of ends ``{p, I(p)}`` becomes a
single end of a punctured projective plane.  For such data each end has
zero flux.  The functions here check the symmetry by sampling, test the
flux at each end and report the quotient topology.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import cxratio as cx
from ._util import fmt_point, same_point
from .cxratio import INF
from .weierstrass import WeierstrassData, evaluate, xz_components

__all__ = [
    "InvolutionReport",
    "InvolutionStructureError",
    "FluxVector",
    "FluxReport",
    "QuotientReport",
    "antipode",
    "check_involution",
    "residue_vector",
    "flux_vanishing_check",
    "quotient_report",
]

SYMMETRY_TOL = 1e-9
FLUX_TOL = 1e-9


class InvolutionStructureError(ValueError):
    """The puncture set is not closed under the antipodal map."""


def antipode(p):
    """``I(p) = -1/conj(p)`` on the extended plane."""
    if p is INF:
        return 0j
    p = complex(p)
    if p == 0:
        return INF
    return -1 / p.conjugate()


@dataclass
class InvolutionReport:
    phi_symmetry_residual: float
    psi_symmetry_residual: float
    dh_symmetry_residual: float
    fixed_point_free: bool
    puncture_pairing: list
    passed: bool
    tol: float = SYMMETRY_TOL

    def lines(self) -> list[str]:
        return [
            f"involution z -> -1/conj(z): {'pass' if self.passed else 'FAIL'}",
            f"  residuals: phi {self.phi_symmetry_residual:.2e}  psi "
            f"{self.psi_symmetry_residual:.2e}  dh {self.dh_symmetry_residual:.2e}",
            f"  puncture pairs: {self.puncture_pairing}",
        ]


def _pairing(data: WeierstrassData) -> list[tuple[int, int]]:
    pts = data.punctures
    pairs = []
    seen = set()
    for i, p in enumerate(pts):
        if i in seen:
            continue
        q = antipode(p)
        match = [j for j, x in enumerate(pts) if same_point(x, q, 1e-8)]
        if not match:
            raise InvolutionStructureError(
                f"puncture {fmt_point(p)} has no antipodal partner {fmt_point(q)}"
            )
        j = match[0]
        pairs.append((i, j))
        seen.update((i, j))
    return pairs


def _sample_points(data: WeierstrassData, count: int = 50) -> np.ndarray:
    half = count // 2
    theta = 2 * np.pi * (np.arange(half) + 0.37) / half
    inner = 0.5 * np.exp(1j * theta)
    pts = np.concatenate([inner, -1 / np.conj(inner)])
    keep = [
        z for z in pts if not any(p is not INF and abs(z - p) < 1e-3 for p in data.punctures)
    ]
    return np.array(keep)


def _rel(a, b) -> float:
    with np.errstate(all="ignore"):
        r = np.abs(a - b) / np.maximum(1.0, np.maximum(np.abs(a), np.abs(b)))
    r = np.where(np.isfinite(r), r, np.inf)
    return float(r.max())


def check_involution(data: WeierstrassData, tol: float = SYMMETRY_TOL) -> InvolutionReport:
    """Sampled residuals of the three antipodal symmetry identities.

    Samples lie on ``|z| = 1/2`` and on their images on ``|z| = 2``.
    Residuals are relative to ``max(1, |lhs|, |rhs|)``.

    Raises
    ------
    InvolutionStructureError
        If the punctures are not closed under the antipode.
    """
    pairing = _pairing(data)
    z = _sample_points(data)
    iz = -1 / np.conj(z)
    f, g, h = data.phi, data.psi, data.h
    r_phi = _rel(evaluate(f, iz), np.conj(evaluate(g, z)))
    r_psi = _rel(evaluate(g, iz), np.conj(evaluate(f, z)))
    r_dh = _rel(evaluate(h, iz) / np.conj(z) ** 2, np.conj(evaluate(h, z)))
    passed = max(r_phi, r_psi, r_dh) <= tol
    # |z|**2 = -1 has no solution, so I never has fixed points
    return InvolutionReport(r_phi, r_psi, r_dh, True, pairing, passed, tol)


def residue_vector(data: WeierstrassData, p) -> np.ndarray:
    """Residues at ``p`` of the four components of ``x_z dz``."""
    return np.array([cx.residue(c, p) for c in xz_components(data)], dtype=complex)


@dataclass
class FluxVector:
    """Flux of one end.

    ``residue`` is the coefficient vector of the ``dz/(z - p)`` term and
    ``components`` the real period ``2 Re(2 pi i residue)``.
    """

    point: object
    residue: np.ndarray
    components: np.ndarray
    real_check: bool  # the residue vector is real (period condition)
    symmetry_check: bool  # Res at I(p) equals conj(Res at p)
    vanishes: bool


@dataclass
class FluxReport:
    passed: bool
    ends: list = field(default_factory=list)
    failures: list = field(default_factory=list)

    def lines(self) -> list[str]:
        out = [f"flux at ends: {'pass' if self.passed else 'FAIL'}"]
        for e in self.ends:
            out.append(
                f"  end {fmt_point(e.point)}: |residue| = {np.abs(e.residue).max():.2e}"
                f"  real={e.real_check} symmetric={e.symmetry_check}"
            )
        out.extend(f"  {msg}" for msg in self.failures)
        return out


def flux_vanishing_check(data: WeierstrassData, tol: float = FLUX_TOL) -> FluxReport:
    """Zero flux at every end of antipodally symmetric rational data.

    Two sub-checks are reported separately so a failure shows which
    ingredient broke: (i) the residue vector is real, which is what the
    period conditions give, and (ii) the residues at ``p`` and ``I(p)`` are
    complex conjugate, which is what the symmetry gives.  At the pair
    ``{0, inf}`` of a one-pair puncture set the two force the residue to 0.
    """
    inv = check_involution(data)
    if not inv.passed:
        raise ValueError("flux check needs verified antipodal symmetry; check_involution failed")
    res = {i: residue_vector(data, p) for i, p in enumerate(data.punctures)}
    partner = {}
    for i, j in inv.puncture_pairing:
        partner[i], partner[j] = j, i
    rep = FluxReport(passed=True)
    for i, p in enumerate(data.punctures):
        r = res[i]
        real_ok = bool(np.abs(r.imag).max() <= tol)
        sym_ok = bool(np.abs(res[partner[i]] - np.conj(r)).max() <= tol)
        zero = bool(np.abs(r).max() <= tol)
        period = 2 * (2j * math.pi * r).real
        rep.ends.append(FluxVector(p, r, period, real_ok, sym_ok, zero))
        if not real_ok:
            rep.failures.append(f"end {fmt_point(p)}: residue vector not real (period condition)")
        if not sym_ok:
            rep.failures.append(f"end {fmt_point(p)}: residues at p and I(p) not conjugate")
        if not zero:
            rep.failures.append(f"end {fmt_point(p)}: flux does not vanish")
    rep.passed = not rep.failures
    return rep


@dataclass
class QuotientReport:
    cover_genus: int
    cover_punctures: int
    quotient_ends: int
    euler_characteristic: int
    orientable: bool
    description: str

    def lines(self) -> list[str]:
        return [
            f"quotient: {self.description}",
            f"  cover: sphere minus {self.cover_punctures} points (genus {self.cover_genus})",
            f"  Euler characteristic {self.euler_characteristic}, orientable={self.orientable}",
        ]


def quotient_report(data: WeierstrassData) -> QuotientReport:
    """Topology of the quotient by the antipodal map."""
    r = len(data.punctures)
    if r % 2:
        raise InvolutionStructureError(f"odd number of punctures ({r}) cannot be antipodal")
    inv = check_involution(data)
    if not inv.passed:
        raise ValueError("quotient undefined: antipodal symmetry not verified")
    k = r // 2
    desc = f"projective plane minus {k} point{'s' if k != 1 else ''}"
    if k == 1:
        desc += " (Möbius strip)"
    return QuotientReport(data.genus, r, k, 1 - k, False, desc)
