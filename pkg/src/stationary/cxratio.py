"""
Complex polynomials and rational maps on the Riemann sphere.

Everything here works in double precision with explicit tolerances.  The
point at infinity is the singleton :data:`INF`; functions that accept an
"extended complex" value branch on it explicitly instead of using a large
float.

Polynomials store ascending coefficients (``c[0] + c[1] z + ...``).
Rational maps are kept reduced: common roots of numerator and denominator
are cancelled by root matching, and the denominator is made monic.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence

import numpy as np

__all__ = [
    "INF",
    "is_inf",
    "Poly",
    "Root",
    "RationalMap",
    "MobiusTransform",
    "FractionTerm",
    "RootFindingError",
    "ClusterAmbiguityError",
    "rat_eval",
    "rat_degree",
    "zeros_poles",
    "order_at",
    "multiplicity_at",
    "laurent",
    "residue",
    "partial_fractions",
    "eval_fractions",
    "derivative",
    "involution_pullback",
    "mobius_apply_data",
    "chordal",
    "compose_mobius",
]

#: trailing coefficients below this fraction of the largest one are dropped
TRIM_RTOL = 1e-13
#: roots closer than this (relative to max(1, |z|)) are candidates for merging
CLUSTER_RTOL = 1e-3
#: a merged cluster must look like a true multiple root to this level
CLUSTER_VERIFY_RTOL = 1e-11
#: Taylor coefficients below this fraction of the largest are treated as zero
ORDER_RTOL = 1e-9

_EPS = np.finfo(float).eps


class _Infinity:
    """The point at infinity of the Riemann sphere."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INF"

    def __reduce__(self):
        return (_Infinity, ())

    def __hash__(self):
        return hash("stationary.INF")


INF = _Infinity()


def is_inf(z) -> bool:
    return z is INF


def chordal(a, b):
    """Chordal distance between two points of the sphere (arrays allowed).

    Infinite entries (numpy ``inf`` or :data:`INF`) are handled, so this is
    the natural way to compare values of meromorphic functions.
    """
    if a is INF or b is INF:
        other = b if a is INF else a
        if other is INF:
            return 0.0
        return 1.0 / math.sqrt(1.0 + abs(other) ** 2)
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    with np.errstate(invalid="ignore", over="ignore", divide="ignore"):
        fa, fb = np.isfinite(a), np.isfinite(b)
        out = np.abs(a - b) / np.sqrt(1.0 + np.abs(a) ** 2) / np.sqrt(1.0 + np.abs(b) ** 2)
        # one infinite value
        out = np.where(fa & ~fb, 1.0 / np.sqrt(1.0 + np.abs(np.where(fa, a, 0)) ** 2), out)
        out = np.where(~fa & fb, 1.0 / np.sqrt(1.0 + np.abs(np.where(fb, b, 0)) ** 2), out)
        out = np.where(~fa & ~fb, 0.0, out)
    return out if out.ndim else float(out)


class RootFindingError(RuntimeError):
    """Simultaneous iteration failed; carries the residual diagnostics."""

    def __init__(self, message, roots=None, residuals=None):
        super().__init__(message)
        self.roots = roots
        self.residuals = residuals


class ClusterAmbiguityError(ValueError):
    """Two roots are too close to tell apart from a single multiple root."""


class Root(NamedTuple):
    value: complex
    multiplicity: int
    spread: float  # max distance of the raw approximations from the merged value


# --------------------------------------------------------------------------
# polynomials
# --------------------------------------------------------------------------


class Poly:
    """Immutable polynomial with complex coefficients in ascending order."""

    __slots__ = ("_c",)

    def __init__(self, coeffs, trim: float = TRIM_RTOL):
        if isinstance(coeffs, Poly):
            c = coeffs._c.copy()
        else:
            c = np.array(coeffs, dtype=complex).ravel()
        if c.size == 0:
            c = np.zeros(1, dtype=complex)
        if not np.all(np.isfinite(c)):
            raise ValueError("polynomial coefficients must be finite")
        scale = np.abs(c).max()
        if scale == 0.0:
            c = np.zeros(1, dtype=complex)
        else:
            keep = np.nonzero(np.abs(c) > trim * scale)[0]
            c = c[: keep[-1] + 1].copy()
        c.flags.writeable = False
        self._c = c

    # construction helpers -------------------------------------------------
    @classmethod
    def monomial(cls, k: int, coeff=1.0) -> "Poly":
        c = np.zeros(k + 1, dtype=complex)
        c[k] = coeff
        return cls(c)

    @classmethod
    def from_roots(cls, roots: Iterable, lead=1.0) -> "Poly":
        c = np.array([lead], dtype=complex)
        for r in roots:
            c = np.convolve(c, np.array([-r, 1.0], dtype=complex))
        return cls(c, trim=0.0)

    # basic properties -----------------------------------------------------
    @property
    def coeffs(self) -> np.ndarray:
        return self._c

    @property
    def degree(self) -> int:
        """Degree; the zero polynomial has degree -1."""
        return -1 if self.is_zero() else self._c.size - 1

    @property
    def lead(self) -> complex:
        return complex(self._c[-1])

    def is_zero(self) -> bool:
        return self._c.size == 1 and self._c[0] == 0

    def norm(self) -> float:
        return float(np.abs(self._c).max())

    def __repr__(self):
        return f"Poly({np.array2string(self._c, precision=6, separator=', ')})"

    def __call__(self, z):
        c = self._c
        if np.isscalar(z):
            acc = complex(c[-1])
            for a in c[-2::-1]:
                acc = acc * z + a
            return acc
        z = np.asarray(z, dtype=complex)
        acc = np.full(z.shape, c[-1], dtype=complex)
        for a in c[-2::-1]:
            acc = acc * z + a
        return acc

    # arithmetic -----------------------------------------------------------
    def _coerce(self, other) -> "Poly":
        return other if isinstance(other, Poly) else Poly([other])

    def __add__(self, other):
        other = self._coerce(other)
        n = max(self._c.size, other._c.size)
        c = np.zeros(n, dtype=complex)
        c[: self._c.size] += self._c
        c[: other._c.size] += other._c
        return Poly(c)

    __radd__ = __add__

    def __neg__(self):
        return Poly(-self._c)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if isinstance(other, Poly):
            return Poly(np.convolve(self._c, other._c))
        return Poly(self._c * complex(other))

    __rmul__ = __mul__

    def __pow__(self, k: int):
        out = Poly([1.0])
        for _ in range(k):
            out = out * self
        return out

    def divmod(self, other: "Poly"):
        """Polynomial long division, ``self = q * other + r``."""
        if other.is_zero():
            raise ZeroDivisionError("division by the zero polynomial")
        num = self._c.astype(complex).copy()
        den = other._c
        dn = den.size - 1
        if num.size - 1 < dn:
            return Poly([0.0]), Poly(num)
        q = np.zeros(num.size - dn, dtype=complex)
        for k in range(num.size - 1, dn - 1, -1):
            coef = num[k] / den[-1]
            q[k - dn] = coef
            num[k - dn : k + 1] -= coef * den
        return Poly(q), Poly(num[:dn] if dn > 0 else [0.0])

    def deriv(self, k: int = 1) -> "Poly":
        c = self._c
        for _ in range(k):
            if c.size == 1:
                return Poly([0.0])
            c = c[1:] * np.arange(1, c.size)
        return Poly(c)

    def conj(self) -> "Poly":
        return Poly(np.conj(self._c), trim=0.0)

    def sharp(self, n: int) -> "Poly":
        """``z**n * conj(p(-1/conj(z)))`` for ``n >= degree``."""
        if n < self.degree:
            raise ValueError("sharp degree must be at least the polynomial degree")
        c = np.zeros(n + 1, dtype=complex)
        for k, a in enumerate(self._c):
            c[n - k] = np.conj(a) * (-1) ** k
        return Poly(c)

    def reversed(self, n: int) -> "Poly":
        """``z**n * p(1/z)`` for ``n >= degree``."""
        c = np.zeros(n + 1, dtype=complex)
        c[n - self._c.size + 1 :] = self._c[::-1]
        return Poly(c)

    def scale_arg(self, a) -> "Poly":
        """``p(a z)``."""
        return Poly(self._c * complex(a) ** np.arange(self._c.size))

    def taylor_shift(self, a) -> np.ndarray:
        """Ascending coefficients of ``p(a + u)`` in ``u`` (not trimmed)."""
        c = self._c.astype(complex).copy()
        n = c.size
        a = complex(a)
        # repeated synthetic division
        for i in range(n - 1):
            for j in range(n - 2, i - 1, -1):
                c[j] += a * c[j + 1]
        return c

    def allclose(self, other: "Poly", atol: float = 1e-12) -> bool:
        n = max(self._c.size, other._c.size)
        a = np.zeros(n, dtype=complex)
        b = np.zeros(n, dtype=complex)
        a[: self._c.size] = self._c
        b[: other._c.size] = other._c
        return bool(np.all(np.abs(a - b) <= atol))

    # roots ------------------------------------------------------------------
    def roots(self) -> np.ndarray:
        """All roots repeated by multiplicity (merged clusters included)."""
        out = []
        for r in self.root_clusters():
            out.extend([r.value] * r.multiplicity)
        return np.array(out, dtype=complex)

    def root_clusters(self, cluster_rtol: float = CLUSTER_RTOL) -> list[Root]:
        """Roots with multiplicity.

        Exact zero roots are split off first.  The remaining roots come from
        Aberth iteration; approximations within ``cluster_rtol`` of each other
        are merged only if the merged point passes a Taylor-coefficient test
        for a genuine multiple root, otherwise :class:`ClusterAmbiguityError`
        is raised.  Every merge is visible through ``Root.spread``.
        """
        if self.is_zero():
            raise ValueError("the zero polynomial has no finite root set")
        c = self._c
        if c.size == 1:
            return []
        scale = np.abs(c).max()
        k0 = 0
        while k0 < c.size - 1 and abs(c[k0]) <= TRIM_RTOL * scale:
            k0 += 1
        out = [Root(0j, k0, 0.0)] if k0 else []
        rest = Poly(c[k0:], trim=0.0)
        if rest.degree >= 1:
            raw = _aberth(rest._c)
            out.extend(_cluster(rest, raw, cluster_rtol))
        return out


def _aberth(c: np.ndarray, maxiter: int = 2000) -> np.ndarray:
    """Aberth-Ehrlich simultaneous iteration on ascending coefficients."""
    n = c.size - 1
    if n == 1:
        return np.array([-c[0] / c[1]])
    # rescale z -> s*z so roots have unit geometric mean
    s = abs(c[0] / c[-1]) ** (1.0 / n)
    cs = c * s ** np.arange(n + 1)
    cs = cs / cs[-1]
    p = Poly(cs, trim=0.0)
    dp = p.deriv()
    absc = np.abs(cs)
    k = np.arange(n)
    z = np.exp(1j * (2 * np.pi * k / n + 0.4)) * (1.0 + 0.05 * np.cos(3.0 * k))
    active = np.ones(n, dtype=bool)
    for _ in range(maxiter):
        pz = p(z)
        dpz = dp(z)
        bound = 16 * _EPS * np.polyval(absc[::-1], np.abs(z))
        active &= np.abs(pz) > bound
        if not active.any():
            break
        diff = z[:, None] - z[None, :]
        np.fill_diagonal(diff, 1.0)
        inv = 1.0 / diff
        np.fill_diagonal(inv, 0.0)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = pz / dpz
            w = ratio / (1.0 - ratio * inv.sum(axis=1))
        bad = ~np.isfinite(w)
        w[bad] = 1e-3 * (1 + abs(z[bad]))
        w[~active] = 0.0
        z = z - w
        active &= np.abs(w) > 2 * _EPS * np.abs(z)
        if not active.any():
            break
    resid = np.abs(p(z)) / np.polyval(absc[::-1], np.abs(z))
    if not np.all(np.isfinite(z)) or resid.max() > 1e-8:
        raise RootFindingError(
            f"Aberth iteration did not converge (max relative residual {resid.max():.3e})",
            roots=z * s,
            residuals=resid,
        )
    return z * s


def _groups(raw: np.ndarray, rtol: float) -> list[list[int]]:
    n = raw.size
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            if abs(raw[i] - raw[j]) <= rtol * max(1.0, abs(raw[i]), abs(raw[j])):
                parent[find(i)] = find(j)
    groups: dict[int, list[int]] = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    return list(groups.values())


def _verified_center(p: Poly, pts: np.ndarray):
    """Polished centre of a cluster and its relative Taylor residual."""
    k = pts.size
    c = _polish_multiple(p, complex(pts.mean()), k)
    t = p.taylor_shift(c)
    return c, float(np.abs(t[:k]).max() / np.abs(t).max())


def _cluster(p: Poly, raw: np.ndarray, rtol: float) -> list[Root]:
    # First pass: anything within rtol must be a verified multiple root.
    merged: dict[int, tuple[complex, list[int]]] = {}
    for idx in _groups(raw, rtol):
        pts = raw[idx]
        c = complex(pts[0])
        if len(idx) > 1:
            c, res = _verified_center(p, pts)
            if res > CLUSTER_VERIFY_RTOL:
                raise ClusterAmbiguityError(
                    f"{len(idx)} roots within {rtol:g} of {c:.12g} do not form a multiple "
                    f"root (Taylor residual {res:.2e}); refusing to merge"
                )
        merged[idx[0]] = (c, idx)
    # Second pass: high multiplicities spread wider than rtol; merge them only
    # when the wider group still verifies as a single multiple root.
    for idx in _groups(raw, 100 * rtol):
        parts = [key for key in merged if key in idx]
        if len(parts) < 2:
            continue
        c, res = _verified_center(p, raw[idx])
        if res <= CLUSTER_VERIFY_RTOL:
            for key in parts:
                del merged[key]
            merged[idx[0]] = (c, idx)
    out = [Root(c, len(idx), float(np.abs(raw[idx] - c).max())) for c, idx in merged.values()]
    out.sort(key=lambda r: (abs(r.value), np.angle(r.value)))
    return out


def _polish_multiple(p: Poly, c: complex, k: int) -> complex:
    q = p.deriv(k - 1)
    dq = q.deriv()
    for _ in range(8):
        d = dq(c)
        if d == 0:
            break
        step = q(c) / d
        c -= step
        if abs(step) <= 4 * _EPS * max(1.0, abs(c)):
            break
    return c


# --------------------------------------------------------------------------
# rational maps
# --------------------------------------------------------------------------


def _as_poly(x) -> Poly:
    if isinstance(x, Poly):
        return x
    if np.isscalar(x):
        return Poly([x])
    return Poly(x)


class RationalMap:
    """A reduced quotient ``num / den`` of complex polynomials.

    Construction cancels common roots (matched within the clustering
    tolerance) and rescales so the denominator is monic.  Instances are
    immutable and support ``+ - * /`` with each other and with scalars.
    """

    __slots__ = ("num", "den")

    def __init__(self, num, den=1.0, reduce: bool = True):
        num, den = _as_poly(num), _as_poly(den)
        if den.is_zero():
            raise ZeroDivisionError("rational map with zero denominator")
        if num.is_zero():
            num, den = Poly([0.0]), Poly([1.0])
        elif reduce and num.degree >= 1 and den.degree >= 1:
            num, den = _cancel_common(num, den)
        lead = den.lead
        object.__setattr__(self, "num", Poly(num.coeffs / lead))
        object.__setattr__(self, "den", Poly(den.coeffs / lead))

    def __setattr__(self, name, value):
        raise AttributeError("RationalMap is immutable")

    @classmethod
    def z(cls) -> "RationalMap":
        return cls(Poly([0.0, 1.0]))

    @classmethod
    def const(cls, c) -> "RationalMap":
        return cls(Poly([c]))

    def __repr__(self):
        return f"RationalMap(num={self.num!r}, den={self.den!r})"

    @property
    def degree(self) -> int:
        return rat_degree(self)

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_constant(self) -> bool:
        return self.num.degree <= 0 and self.den.degree <= 0

    def __call__(self, z):
        """Vectorised evaluation at finite points (poles give complex inf)."""
        n, d = self.num(z), self.den(z)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = np.asarray(n / d) if not np.isscalar(n) else None
        if out is None:
            return n / d if d != 0 else complex(np.inf, np.inf)
        return np.where(d == 0, complex(np.inf, np.inf), out)

    def _coerce(self, other) -> "RationalMap":
        if isinstance(other, RationalMap):
            return other
        return RationalMap(_as_poly(other))

    def __add__(self, other):
        o = self._coerce(other)
        return RationalMap(self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __neg__(self):
        return RationalMap(-self.num, self.den, reduce=False)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        o = self._coerce(other)
        return RationalMap(self.num * o.num, self.den * o.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o.is_zero():
            raise ZeroDivisionError("division by the zero rational map")
        return RationalMap(self.num * o.den, self.den * o.num)

    def __rtruediv__(self, other):
        return self._coerce(other) / self

    def __pow__(self, k: int):
        if k < 0:
            return RationalMap(self.den ** (-k), self.num ** (-k))
        return RationalMap(self.num**k, self.den**k)

    def reciprocal(self) -> "RationalMap":
        return RationalMap(self.den, self.num, reduce=False)

    def at_infinity(self) -> "RationalMap":
        """The map ``w -> f(1/w)``."""
        n = max(self.num.degree, self.den.degree, 0)
        return RationalMap(self.num.reversed(n), self.den.reversed(n), reduce=False)

    def scale_arg(self, a) -> "RationalMap":
        """The map ``z -> f(a z)``."""
        return RationalMap(self.num.scale_arg(a), self.den.scale_arg(a), reduce=False)

    def allclose(self, other: "RationalMap", atol: float = 1e-12) -> bool:
        return self.num.allclose(other.num, atol) and self.den.allclose(other.den, atol)


def _cancel_common(num: Poly, den: Poly):
    rn = num.root_clusters()
    rd = den.root_clusters()
    common = []
    for a in rn:
        for b in rd:
            if abs(a.value - b.value) <= CLUSTER_RTOL * max(1.0, abs(a.value)):
                common.extend([0.5 * (a.value + b.value)] * min(a.multiplicity, b.multiplicity))
                break
    if not common:
        return num, den
    g = Poly.from_roots(common)
    qn, rn_ = num.divmod(g)
    qd, rd_ = den.divmod(g)
    return qn, qd


# --------------------------------------------------------------------------
# operations on rational maps
# --------------------------------------------------------------------------


def rat_eval(f: RationalMap, z):
    """Value of ``f`` at an extended complex point; returns :data:`INF` at poles."""
    if z is INF:
        dn, dd = f.num.degree, f.den.degree
        if dn > dd:
            return INF
        if dn < dd:
            return 0j
        return f.num.lead / f.den.lead
    z = complex(z)
    d = f.den(z)
    n = f.num(z)
    if d == 0 or abs(d) <= 1e-300:
        return INF
    t = f.den.taylor_shift(z)
    if abs(t[0]) <= ORDER_RTOL * np.abs(t).max():
        return INF
    return n / d


def rat_degree(f: RationalMap) -> int:
    """Topological degree ``max(deg num, deg den)`` of the map to the sphere."""
    return max(f.num.degree, f.den.degree, 0)


def _poly_order(p: Poly, a: complex, rtol: float) -> int:
    t = np.abs(p.taylor_shift(a))
    ref = t.max()
    k = 0
    while k < t.size - 1 and t[k] <= rtol * ref:
        k += 1
    return k


def order_at(f: RationalMap, p, rtol: float = ORDER_RTOL) -> int:
    """Order of ``f`` at ``p``: positive for zeros, negative for poles."""
    if f.is_zero():
        raise ValueError("the zero map has no finite order")
    if p is INF:
        return f.den.degree - f.num.degree
    return _poly_order(f.num, p, rtol) - _poly_order(f.den, p, rtol)


def multiplicity_at(f: RationalMap, p, rtol: float = ORDER_RTOL):
    """``(value, multiplicity)`` of ``f`` at ``p``.

    The multiplicity is the local degree of ``f`` at ``p``: the order of the
    zero of ``f - f(p)``, or the pole order when ``f(p)`` is infinite.
    """
    if p is INF:
        return multiplicity_at(f.at_infinity(), 0j, rtol)
    value = rat_eval(f, p)
    if value is INF:
        return INF, -order_at(f, p, rtol)
    shifted = f.num - f.den * value
    if shifted.is_zero():
        raise ValueError("constant map has no finite multiplicity")
    return value, _poly_order(shifted, p, rtol) - _poly_order(f.den, p, rtol)


def zeros_poles(f: RationalMap) -> list[tuple[object, int]]:
    """Zeros (positive order) and poles (negative order) on the sphere."""
    if f.is_zero():
        raise ValueError("the zero map has no divisor")
    out: list[tuple[object, int]] = []
    for r in f.num.root_clusters():
        out.append((r.value, r.multiplicity))
    for r in f.den.root_clusters():
        out.append((r.value, -r.multiplicity))
    k = f.den.degree - f.num.degree
    if k:
        out.append((INF, k))
    return out


def laurent(f: RationalMap, p, nterms: int):
    """Laurent coefficients of ``f`` at ``p``.

    Returns ``(k0, coeffs)`` with ``f(p + u) = sum coeffs[j] u**(k0 + j)``;
    at ``p = INF`` the expansion is in ``w = 1/z``.
    """
    if p is INF:
        return laurent(f.at_infinity(), 0j, nterms)
    if f.is_zero():
        return 0, np.zeros(nterms, dtype=complex)
    p = complex(p)
    kd = _poly_order(f.den, p, ORDER_RTOL)
    kn = _poly_order(f.num, p, ORDER_RTOL)
    n = f.num.taylor_shift(p)[kn:]
    d = f.den.taylor_shift(p)[kd:]
    out = np.zeros(nterms, dtype=complex)
    for j in range(nterms):
        acc = n[j] if j < n.size else 0.0
        for i in range(1, min(j, d.size - 1) + 1):
            acc -= d[i] * out[j - i]
        out[j] = acc / d[0]
    return kn - kd, out


def residue(f: RationalMap, p) -> complex:
    """Residue of the form ``f(z) dz`` at ``p``.

    At ``p = INF`` the residue is ``-c`` where ``c`` is the coefficient of
    ``1/z`` in the expansion at infinity, so all residues sum to zero.
    """
    if f.is_zero():
        return 0j
    if p is INF:
        q, r = f.num.divmod(f.den)
        if r.is_zero() or r.degree != f.den.degree - 1:
            return 0j
        return -r.lead / f.den.lead
    k0, c = laurent(f, p, 1)
    if k0 > -1:
        return 0j
    k0, c = laurent(f, p, -k0)
    return complex(c[-1 - k0])


@dataclass(frozen=True)
class FractionTerm:
    """``coeff / (z - center)**power`` or ``coeff * z**power``."""

    kind: str  # "pole_power" | "monomial"
    power: int
    coeff: complex
    center: complex | None = None

    def __post_init__(self):
        if self.kind == "pole_power":
            if self.power < 1 or self.center is None:
                raise ValueError("pole terms need a center and power >= 1")
        elif self.kind == "monomial":
            if self.power < 0:
                raise ValueError("monomial power must be >= 0")
        else:
            raise ValueError(f"unknown term kind {self.kind!r}")

    def __call__(self, z):
        if self.kind == "monomial":
            return self.coeff * np.asarray(z, dtype=complex) ** self.power
        return self.coeff / (np.asarray(z, dtype=complex) - self.center) ** self.power


def partial_fractions(f: RationalMap) -> list[FractionTerm]:
    """Exact partial-fraction decomposition of a reduced rational map.

    Poles come from :meth:`Poly.root_clusters`, so two distinct poles closer
    than the clustering tolerance raise :class:`ClusterAmbiguityError`.
    """
    terms: list[FractionTerm] = []
    q, _ = f.num.divmod(f.den)
    if not q.is_zero():
        for k, c in enumerate(q.coeffs):
            if c != 0:
                terms.append(FractionTerm("monomial", k, complex(c)))
    for root in f.den.root_clusters():
        k0, c = laurent(f, root.value, root.multiplicity)
        for j in range(c.size):
            power = -(k0 + j)
            if power >= 1 and c[j] != 0:
                terms.append(FractionTerm("pole_power", power, complex(c[j]), root.value))
    return terms


def eval_fractions(terms: Sequence[FractionTerm], z):
    z = np.asarray(z, dtype=complex)
    out = np.zeros(z.shape, dtype=complex)
    for t in terms:
        out = out + t(z)
    return out


def derivative(f: RationalMap) -> RationalMap:
    """Quotient-rule derivative."""
    if f.den.degree == 0:
        return RationalMap(f.num.deriv(), f.den, reduce=False)
    return RationalMap(f.num.deriv() * f.den - f.num * f.den.deriv(), f.den * f.den)


def involution_pullback(f: RationalMap) -> RationalMap:
    """The map ``z -> conj(f(-1/conj(z)))`` (antipodal pullback)."""
    n = max(f.num.degree, f.den.degree, 0)
    return RationalMap(f.num.sharp(n), f.den.sharp(n))


class MobiusTransform:
    """``w -> (a w + b)/(c w + d)`` normalised to ``ad - bc = 1``."""

    __slots__ = ("a", "b", "c", "d")

    def __init__(self, a, b, c, d):
        a, b, c, d = (complex(x) for x in (a, b, c, d))
        det = a * d - b * c
        if abs(det) <= 1e-14 * max(abs(a), abs(b), abs(c), abs(d), 1e-300) ** 2:
            raise ValueError("degenerate Mobius transform (ad - bc = 0)")
        s = np.sqrt(det)
        object.__setattr__(self, "a", a / s)
        object.__setattr__(self, "b", b / s)
        object.__setattr__(self, "c", c / s)
        object.__setattr__(self, "d", d / s)

    def __setattr__(self, name, value):
        raise AttributeError("MobiusTransform is immutable")

    @classmethod
    def identity(cls):
        return cls(1, 0, 0, 1)

    def __repr__(self):
        return f"MobiusTransform(a={self.a:.6g}, b={self.b:.6g}, c={self.c:.6g}, d={self.d:.6g})"

    def __call__(self, w):
        if w is INF:
            return INF if self.c == 0 else self.a / self.c
        den = self.c * w + self.d
        if den == 0:
            return INF
        return (self.a * w + self.b) / den

    def conj(self) -> "MobiusTransform":
        return MobiusTransform(np.conj(self.a), np.conj(self.b), np.conj(self.c), np.conj(self.d))

    def apply(self, f: RationalMap) -> RationalMap:
        """Compose ``self`` after ``f``."""
        return RationalMap(f.num * self.a + f.den * self.b, f.num * self.c + f.den * self.d)


def mobius_apply_data(A: MobiusTransform, phi: RationalMap, psi: RationalMap, h: RationalMap):
    """Transform Weierstrass data by a Lorentz rotation.

    ``phi -> A phi``, ``psi -> conj(A) psi`` and
    ``dh -> (c phi + d)(conj(c) psi + conj(d)) dh``.
    """
    Ab = A.conj()
    phi2 = A.apply(phi)
    psi2 = Ab.apply(psi)
    factor = (phi * A.c + A.d) * (psi * Ab.c + Ab.d)
    return phi2, psi2, factor * h


def compose_mobius(f: RationalMap, A: MobiusTransform) -> RationalMap:
    """The map ``z -> f(A(z))``."""
    n = max(f.num.degree, f.den.degree, 0)
    top = Poly([A.b, A.a])
    bot = Poly([A.d, A.c])

    def homog(p: Poly) -> Poly:
        acc = Poly([0.0])
        for k, c in enumerate(p.coeffs):
            if c != 0:
                acc = acc + (top**k) * (bot ** (n - k)) * c
        return acc

    return RationalMap(homog(f.num), homog(f.den))
