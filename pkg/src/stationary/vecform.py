"""
Vector-valued rational forms in Lorentz space.

A :class:`VectorForm` is a finite sum of scalar basis elements
``(z - c)**-k`` and ``z**k``, each carrying a coefficient in ``C^4``.
It is how the integrand ``x_z`` of a stationary surface is written in
partial fractions.  The Lorentz product is the complex bilinear extension
of ``x1^2 + x2^2 + x3^2 - x4^2`` (no conjugation).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from math import comb

import numpy as np

from . import cxratio as cx
from .cxratio import INF, FractionTerm, RationalMap
from .weierstrass import WeierstrassData, xz_components

__all__ = [
    "Vec4C",
    "VectorForm",
    "LaurentNormalForm",
    "LaurentHypothesisError",
    "IsotropyReport",
    "ObstructionResult",
    "lorentz_dot",
    "xz_from_data",
    "check_isotropy",
    "laurent_normal_form",
    "two_end_obstruction",
    "metric_identity_residual",
]

ISOTROPY_TOL = 1e-9
REAL_TOL = 1e-9
_CENTER_TOL = 1e-9
_DROP_TOL = 1e-13

_SIGNS = np.array([1.0, 1.0, 1.0, -1.0])


@dataclass(frozen=True)
class Vec4C:
    """A vector in ``C^4`` with the Lorentz product."""

    x1: complex = 0j
    x2: complex = 0j
    x3: complex = 0j
    x4: complex = 0j

    def __post_init__(self):
        for name in ("x1", "x2", "x3", "x4"):
            v = complex(getattr(self, name))
            if not (math.isfinite(v.real) and math.isfinite(v.imag)):
                raise ValueError(f"{name} is not finite")
            object.__setattr__(self, name, v)

    @classmethod
    def of(cls, seq) -> "Vec4C":
        a = np.asarray(seq, dtype=complex).ravel()
        if a.size != 4:
            raise ValueError("need exactly four components")
        return cls(*a)

    def array(self) -> np.ndarray:
        return np.array([self.x1, self.x2, self.x3, self.x4], dtype=complex)

    def conj(self) -> "Vec4C":
        return Vec4C.of(np.conj(self.array()))

    @property
    def real(self) -> np.ndarray:
        return self.array().real

    @property
    def imag(self) -> np.ndarray:
        return self.array().imag

    def norm(self) -> float:
        return float(np.linalg.norm(self.array()))

    def __add__(self, other):
        return Vec4C.of(self.array() + _arr(other))

    def __sub__(self, other):
        return Vec4C.of(self.array() - _arr(other))

    def __neg__(self):
        return Vec4C.of(-self.array())

    def __mul__(self, s):
        return Vec4C.of(self.array() * complex(s))

    __rmul__ = __mul__

    def __truediv__(self, s):
        return Vec4C.of(self.array() / complex(s))

    def __iter__(self):
        return iter(self.array())

    def allclose(self, other, tol: float = 1e-9) -> bool:
        return bool(np.abs(self.array() - _arr(other)).max() <= tol)


def _arr(v) -> np.ndarray:
    if isinstance(v, Vec4C):
        return v.array()
    a = np.asarray(v, dtype=complex)
    if a.shape[0] != 4:
        raise ValueError("expected a 4-vector")
    return a


def lorentz_dot(u, v):
    """Bilinear Lorentz product ``u1 v1 + u2 v2 + u3 v3 - u4 v4``.

    Either argument may be a :class:`Vec4C` or an array whose first axis
    has length 4; extra axes broadcast.
    """
    a, b = _arr(u), _arr(v)
    sig = _SIGNS.reshape((4,) + (1,) * (max(a.ndim, b.ndim) - 1))
    out = (sig * a * b).sum(axis=0)
    return complex(out) if np.ndim(out) == 0 else out


# ---------------------------------------------------------------------------
# scalar expansions in a shared basis
#
# A key is ("m", k) for z**k, k >= 0, or ("p", i, k) for (z - centers[i])**-k.


class _Basis:
    def __init__(self, centers=()):
        self.centers: list[complex] = list(centers)

    def index(self, c) -> int:
        c = complex(c)
        for i, x in enumerate(self.centers):
            if abs(x - c) <= _CENTER_TOL * max(1.0, abs(c)):
                return i
        self.centers.append(c)
        return len(self.centers) - 1

    def key(self, term: FractionTerm):
        if term.kind == "monomial":
            return ("m", term.power)
        return ("p", self.index(term.center), term.power)

    def term(self, key, coeff=1.0) -> FractionTerm:
        if key[0] == "m":
            return FractionTerm("monomial", key[1], complex(coeff))
        return FractionTerm("pole_power", key[2], complex(coeff), self.centers[key[1]])


def _add(acc: dict, key, val):
    acc[key] = acc.get(key, 0j) + val


def _mono_times_pole(a: int, p: complex, i: int, k: int, out: dict, s: complex):
    # z^a = sum_j C(a, j) p^(a-j) (z - p)^j
    for j in range(a + 1):
        c = s * comb(a, j) * p ** (a - j)
        if c == 0:
            continue
        e = j - k
        if e < 0:
            _add(out, ("p", i, -e), c)
        else:
            for l in range(e + 1):
                _add(out, ("m", l), c * comb(e, l) * (-p) ** (e - l))


def _pole_times_pole(p, i, k, q, j, l, out: dict, s: complex):
    # 1/((z-p)^k (z-q)^l) for p != q
    d = p - q
    for r in range(1, k + 1):
        n = k - r
        _add(out, ("p", i, r), s * (-1) ** n * comb(l + n - 1, n) * d ** (-l - n))
    for r in range(1, l + 1):
        n = l - r
        _add(out, ("p", j, r), s * (-1) ** n * comb(k + n - 1, n) * (-d) ** (-k - n))


def _product(basis: _Basis, k1, k2, out: dict, s: complex = 1.0):
    """Accumulate ``s * b(k1) * b(k2)`` into ``out`` in the same basis."""
    if k1[0] == "m" and k2[0] == "m":
        _add(out, ("m", k1[1] + k2[1]), s)
    elif k1[0] == "m" or k2[0] == "m":
        mono, pole = (k1, k2) if k1[0] == "m" else (k2, k1)
        i = pole[1]
        _mono_times_pole(mono[1], basis.centers[i], i, pole[2], out, s)
    elif k1[1] == k2[1]:
        _add(out, ("p", k1[1], k1[2] + k2[2]), s)
    else:
        i, j = k1[1], k2[1]
        _pole_times_pole(basis.centers[i], i, k1[2], basis.centers[j], j, k2[2], out, s)


# ---------------------------------------------------------------------------


@dataclass
class VectorForm:
    """``sum b_i(z) v_i`` with scalar basis elements ``b_i`` and ``v_i`` in C^4.

    ``terms`` holds ``(FractionTerm, Vec4C)`` pairs; the FractionTerm's own
    coefficient multiplies the vector, so basis elements are usually built
    with coefficient 1.  Duplicate basis elements are merged on construction.
    """

    terms: list = field(default_factory=list)

    def __post_init__(self):
        basis = _Basis()
        merged: dict = {}
        for b, v in self.terms:
            key = basis.key(b)
            vec = _arr(v) * complex(b.coeff)
            merged[key] = merged.get(key, np.zeros(4, complex)) + vec
        self._basis = basis
        self._coef = merged
        self.terms = [(basis.term(k), Vec4C.of(v)) for k, v in merged.items()]

    @classmethod
    def from_components(
        cls, comps, snap_to=(), drop_tol: float = _DROP_TOL
    ) -> "VectorForm":
        """Merge four scalar partial-fraction lists into one vector form.

        Centers within 1e-7 of a point in ``snap_to`` are replaced by that
        point.  Coefficients smaller than ``drop_tol`` times the largest are
        discarded.
        """
        if len(comps) != 4:
            raise ValueError("need four component lists")
        snap = [complex(p) for p in snap_to if p is not INF]
        basis = _Basis(snap)
        coef: dict = {}
        for j, terms in enumerate(comps):
            for t in terms:
                key = basis.key(_snapped(t, snap))
                coef.setdefault(key, np.zeros(4, complex))[j] += t.coeff
        scale = max((np.abs(v).max() for v in coef.values()), default=0.0)
        pairs = [
            (basis.term(k), Vec4C.of(v))
            for k, v in coef.items()
            if np.abs(v).max() > drop_tol * scale
        ]
        return cls(_sorted(pairs))

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        out = np.zeros((4,) + z.shape, dtype=complex)
        for b, v in self.terms:
            val = b(z)
            out = out + v.array().reshape((4,) + (1,) * z.ndim) * val
        return out

    evaluate = __call__

    def centers(self) -> list[complex]:
        return [b.center for b, _ in self.terms if b.kind == "pole_power"]

    def coefficient(self, kind: str, power: int, center=None) -> Vec4C:
        """Vector coefficient of one basis element (zero when absent)."""
        for b, v in self.terms:
            if b.kind != kind or b.power != power:
                continue
            if kind == "monomial" or abs(b.center - complex(center)) <= _CENTER_TOL * max(
                1.0, abs(complex(center))
            ):
                return v
        return Vec4C()

    def component(self, j: int) -> list[FractionTerm]:
        """Scalar partial fractions of coordinate ``j`` (0-based)."""
        return [
            FractionTerm(b.kind, b.power, v.array()[j], b.center)
            for b, v in self.terms
            if v.array()[j] != 0
        ]

    def principal_part(self, p) -> dict[int, Vec4C]:
        """Coefficients of ``(z - p)**-k`` (or ``w**-k``, ``w = 1/z``, at infinity).

        At infinity the form ``x_z dz`` is rewritten as ``-x_z(1/w) dw / w^2``;
        ``z^k`` contributes ``-w^-(k+2)`` and each simple pole contributes ``-1/w``.
        """
        out: dict[int, np.ndarray] = {}
        if p is INF:
            for b, v in self.terms:
                if b.kind == "monomial":
                    k = b.power + 2
                    out[k] = out.get(k, 0) - v.array()
                elif b.power == 1:
                    out[1] = out.get(1, 0) - v.array()
        else:
            p = complex(p)
            for b, v in self.terms:
                if b.kind == "pole_power" and abs(b.center - p) <= _CENTER_TOL * max(1.0, abs(p)):
                    out[b.power] = out.get(b.power, 0) + v.array()
        return {k: Vec4C.of(v) for k, v in sorted(out.items())}


def _snapped(t: FractionTerm, snap: list[complex]) -> FractionTerm:
    if t.kind != "pole_power":
        return t
    for p in snap:
        if abs(t.center - p) <= 1e-7 * max(1.0, abs(p)):
            return FractionTerm(t.kind, t.power, t.coeff, p)
    return t


def _sorted(pairs):
    def order(pair):
        b = pair[0]
        if b.kind == "monomial":
            return (1, 0.0, 0.0, b.power)
        return (0, b.center.real, b.center.imag, -b.power)

    return sorted(pairs, key=order)


def xz_from_data(data: WeierstrassData) -> VectorForm:
    """Partial-fraction form of ``((phi+psi)h, -i(phi-psi)h, (1-phi psi)h, (1+phi psi)h)``."""
    comps = xz_components(data)
    return VectorForm.from_components(
        [cx.partial_fractions(c) for c in comps], snap_to=data.punctures
    )


# ---------------------------------------------------------------------------


@dataclass
class IsotropyReport:
    passed: bool
    residual: float
    tol: float
    coefficients: list  # FractionTerm list of <x_z, x_z>

    def lines(self) -> list[str]:
        return [
            f"isotropy <x_z, x_z> = 0: {'pass' if self.passed else 'FAIL'}"
            f" (max coefficient {self.residual:.2e})"
        ]


def check_isotropy(vf: VectorForm, tol: float = ISOTROPY_TOL) -> IsotropyReport:
    """Expand ``<vf, vf>`` exactly in partial fractions and test it is zero.

    Each coordinate is squared separately with the same closed-form product
    rules, then the four squares are combined with signs ``+ + + -``.
    """
    basis = vf._basis
    keys = list(vf._coef)
    total: dict = {}
    for j in range(4):
        sign = _SIGNS[j]
        cj = [(k, vf._coef[k][j]) for k in keys if vf._coef[k][j] != 0]
        for a, (k1, c1) in enumerate(cj):
            for k2, c2 in cj[a:]:
                weight = 1.0 if k2 == k1 else 2.0
                _product(basis, k1, k2, total, sign * weight * c1 * c2)
    residual = max((abs(v) for v in total.values()), default=0.0)
    coeffs = [basis.term(k, v) for k, v in total.items() if v != 0]
    return IsotropyReport(residual <= tol, float(residual), tol, coeffs)


# ---------------------------------------------------------------------------


class LaurentHypothesisError(ValueError):
    """The end does not satisfy the hypotheses of the normal form."""


@dataclass
class LaurentNormalForm:
    """``x_z = (sum_k alpha_k (z-p)^-k) v0 + v1 (z-p)^-2 + O(1)``, ``k = 3..m+2``.

    ``v0`` is normalised to be real with fourth coordinate 1.
    """

    v0: Vec4C
    v1: Vec4C
    alphas: list
    degenerate_span_ok: bool
    point: object = 0j
    m: int = 1
    checks: dict = field(default_factory=dict)

    def lines(self) -> list[str]:
        fmt = lambda v: "(" + ", ".join(f"{complex(x):.6g}" for x in v) + ")"  # noqa: E731
        return [
            f"normal form at {self.point} (m = {self.m}):",
            f"  v0 = {fmt(self.v0)}  v1 = {fmt(self.v1)}",
            "  alphas = " + ", ".join(f"{complex(a):.6g}" for a in self.alphas),
            f"  degenerate span: {self.degenerate_span_ok}",
        ]


def laurent_normal_form(vf, p, m: int, tol: float = 1e-9) -> LaurentNormalForm:
    """Normal form of ``x_z`` at a good singular end with reduced multiplicity 1.

    Parameters
    ----------
    vf : VectorForm or WeierstrassData
    p : complex or INF
    m : int
        Index of the end, ``m >= 1``.

    Raises
    ------
    LaurentHypothesisError
        If the flux at ``p`` is nonzero, if the pole order is not ``m + 2``
        (that is, reduced multiplicity other than 1), or if the extracted
        vectors violate the normal-form invariants.
    """
    if isinstance(vf, WeierstrassData):
        vf = xz_from_data(vf)
    if m < 1:
        raise LaurentHypothesisError("index m must be >= 1")
    pp = vf.principal_part(p)
    if not pp:
        raise LaurentHypothesisError(f"x_z has no pole at {p}")
    flux = pp.get(1, Vec4C())
    if flux.norm() > tol:
        raise LaurentHypothesisError(
            f"nonzero flux at {p}: dz/(z-p) coefficient has norm {flux.norm():.3e}"
        )
    order = max(pp)
    if order != m + 2:
        raise LaurentHypothesisError(
            f"pole order {order} at {p} gives reduced multiplicity {order - 1 - m}, need 1"
        )
    lead = pp[order].array()
    if abs(lead[3]) <= tol:
        raise LaurentHypothesisError("leading coefficient is not a nonzero lightlike real direction")
    v0 = lead / lead[3]
    checks = {
        "v0_imag": float(np.linalg.norm(v0.imag)),
        "v0_null": abs(lorentz_dot(v0, v0)),
    }
    if checks["v0_imag"] > REAL_TOL * np.linalg.norm(v0.real) or checks["v0_null"] > tol:
        raise LaurentHypothesisError(f"leading vector {lead} is not a real lightlike multiple")
    v0 = v0.real.astype(complex)
    alphas = []
    par = 0.0
    for k in range(3, m + 3):
        c = pp.get(k, Vec4C()).array()
        a = c[3]
        alphas.append(complex(a))
        par = max(par, float(np.abs(c - a * v0).max()))
    checks["parallel"] = par
    if par > tol * max(1.0, abs(lead[3])):
        raise LaurentHypothesisError("pole coefficients of order >= 3 are not parallel to v0")
    if abs(alphas[-1]) <= tol:
        raise LaurentHypothesisError("alpha_{m+2} vanishes")
    v1 = pp.get(2, Vec4C()).array()
    checks["v1_null"] = abs(lorentz_dot(v1, v1))
    checks["v0_v1"] = abs(lorentz_dot(v0, v1))
    span_ok = checks["v1_null"] <= tol and checks["v0_v1"] <= tol
    return LaurentNormalForm(Vec4C.of(v0), Vec4C.of(v1), alphas, span_ok, p, m, checks)


# ---------------------------------------------------------------------------


@dataclass
class ObstructionResult:
    """Outcome of the two-regular-ends conformality system for one ``c``.

    ``v1u1``, ``v1u1bar`` and ``u1_sq`` solve the linear system with
    ``v1 = (1, i, 0, 0)``.  ``alpha1``, ``beta2`` are the forced components of
    ``u1``; ``margin_alpha`` and ``margin_beta`` are the right-hand sides of
    ``alpha3^2 - alpha4^2`` and ``beta3^2 - beta4^2``.  When both margins are
    positive, ``|alpha3 beta3| - |alpha4 beta4| >= gap = sqrt(margin_alpha *
    margin_beta) > 0``, which contradicts ``alpha3 beta3 = alpha4 beta4``.
    """

    c: float
    v1u1: complex
    v1u1bar: complex
    u1_sq: complex
    consistency: float
    system_residual: float
    alpha1: float
    beta2: float
    margin_alpha: float
    margin_beta: float
    gap: float
    verdict: str
    matrix: np.ndarray = field(repr=False, default=None)

    def lines(self) -> list[str]:
        return [
            f"two regular ends, c = {self.c:g}",
            f"  v1.u1 = {self.v1u1.real:.12g}  v1.conj(u1) = {self.v1u1bar.real:.12g}"
            f"  |u1|^2 = {self.u1_sq.real:.12g}",
            f"  alpha1 = {self.alpha1:.12g}  beta2 = {self.beta2:.12g}",
            f"  alpha3^2 - alpha4^2 = {self.margin_alpha:.6g}"
            f"  beta3^2 - beta4^2 = {self.margin_beta:.6g}",
            f"  |alpha3 beta3| - |alpha4 beta4| >= {self.gap:.6g}",
            f"  verdict: {self.verdict}",
        ]


def _coeffs_in(f: RationalMap, c: float) -> dict:
    """Coefficients of ``f`` on the basis 1/z^k, 1/(z-c)^k, 1/(cz+1)^k."""
    out = {}
    for t in cx.partial_fractions(f):
        if t.kind == "monomial":
            raise ValueError("unexpected polynomial part")
        if abs(t.center) < 1e-12:
            out[("0", t.power)] = t.coeff
        elif abs(t.center - c) < 1e-9 * max(1, abs(c)):
            out[("c", t.power)] = t.coeff
        else:
            # 1/(z + 1/c)^k = c^k / (cz + 1)^k
            out[("I", t.power)] = t.coeff * c ** (-t.power)
    return out


def two_end_obstruction(c: float) -> ObstructionResult:
    """Conformality system for two regular ends at ``{0, inf}`` and ``{c, -1/c}``.

    With ``x_z = v1/z^2 + conj(v1) + u1/(z-c)^2 + conj(u1)/(cz+1)^2``, half of
    ``<x_z, x_z>`` is a combination of six scalar rational functions with
    coefficients ``|v1|^2, v1.u1, v1.conj(u1), |u1|^2, conj(v1).u1,
    conj(v1).conj(u1)``.  Requiring every partial-fraction coefficient to
    vanish gives six linear equations; with ``|v1|^2 = 2`` they are solved by
    least squares for the other five products.
    """
    c = float(c)
    if c == 0 or not math.isfinite(c):
        raise ValueError("c must be a nonzero real number")
    z = RationalMap.z()
    one = RationalMap.const(1)
    zc = z - c
    Iz = z * c + 1
    # scalar rational functions multiplying each inner product
    funcs = {
        "vv": one / (z * z),
        "X": one / (z * z * zc * zc),
        "Y": one / (z * z * Iz * Iz),
        "Z": one / (zc * zc * Iz * Iz),
        "W": one / (zc * zc),
        "V": one / (Iz * Iz),
    }
    rows = [("0", 1), ("c", 1), ("I", 1), ("0", 2), ("c", 2), ("I", 2)]
    cols = ["X", "Y", "Z", "W", "V"]
    expand = {name: _coeffs_in(f, c) for name, f in funcs.items()}
    A = np.array([[expand[n].get(r, 0) for n in cols] for r in rows], dtype=complex)
    b = -2.0 * np.array([expand["vv"].get(r, 0) for r in rows], dtype=complex)
    sol, *_ = np.linalg.lstsq(A, b, rcond=None)
    X, Y, Z, W, V = sol
    sys_res = float(np.abs(A @ sol - b).max())
    # conj(v1).u1 = conj(v1.conj(u1)) and conj(v1).conj(u1) = conj(v1.u1); Z is real
    consistency = float(max(abs(W - np.conj(Y)), abs(V - np.conj(X)), abs(Z.imag)))
    # v1 = (1, i, 0, 0), u1 = alpha + i beta:
    # v1.u1 = (alpha1 - beta2) + i(alpha2 + beta1), v1.conj(u1) = (alpha1 + beta2) + i(alpha2 - beta1)
    alpha1 = float((X.real + Y.real) / 2)
    beta2 = float((Y.real - X.real) / 2)
    half = Z.real / 2  # |alpha|^2 = |beta|^2 = |u1|^2 / 2 by isotropy
    ma = half - alpha1**2
    mb = half - beta2**2
    gap = math.sqrt(ma * mb) if ma > 0 and mb > 0 else 0.0
    verdict = "infeasible" if gap > 0 else "feasible"
    return ObstructionResult(
        c, complex(X), complex(Y), complex(Z), consistency, sys_res,
        alpha1, beta2, float(ma), float(mb), gap, verdict, A,
    )


def metric_identity_residual(data: WeierstrassData, z) -> float:
    """Relative gap between ``<x_z, conj x_z>`` and ``2 |phi - conj psi|^2 |h|^2``."""
    from .weierstrass import evaluate

    z = np.asarray(z, dtype=complex)
    xz = data.xz(z)
    lhs = lorentz_dot(xz, np.conj(xz))
    f, g, h = (evaluate(u, z) for u in (data.phi, data.psi, data.h))
    rhs = 2 * np.abs(f - np.conj(g)) ** 2 * np.abs(h) ** 2
    return float(np.max(np.abs(lhs - rhs) / np.maximum(np.abs(rhs), 1e-300)))
