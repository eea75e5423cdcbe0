import math

import numpy as np
import pytest

from stationary import cxratio as cx
from stationary.cxratio import INF, Poly, RationalMap
from stationary.weierstrass import (
    BadSingularEndError,
    ConstantGaussMapError,
    NonRationalDataError,
    WeierstrassData,
    catalog,
    check_periods,
    check_regularity,
    classify_end,
    end_multiplicity,
    total_curvature,
)

from conftest import RATIONAL_ENTRIES, entry

Z = RationalMap.z()
SAMPLES = np.array([0.3 + 0.4j, -1.2 + 0.7j, 2.1 - 0.5j, -0.6 - 1.9j])


# -- catalog --------------------------------------------------------------


def test_meeks_data_at_i(meeks):
    phi = Z * Z * (Z - 1j) / (Z + 1j)
    psi = (1 - 1j * Z) / ((1 + 1j * Z) * Z * Z)
    h = 1j * (Z + 1j) * (1 + 1j * Z) / (Z * Z)
    for a, b in ((meeks.phi, phi), (meeks.psi, psi), (meeks.h, h)):
        assert np.allclose(a(SAMPLES), b(SAMPLES), rtol=1e-13)


def test_epsilon_limit_is_meeks_mobius():
    d = catalog("epsilon_family", eps=1e-10)
    phi = (Z - 1) / (Z * Z * (Z + 1))
    h = 1j * (Z + 1) * (Z - 1) / (Z * Z)
    assert np.allclose(d.phi(SAMPLES), phi(SAMPLES), rtol=1e-3)
    assert np.allclose(d.psi(SAMPLES), -1 / phi(SAMPLES), rtol=1e-3)
    assert np.allclose(d.h(SAMPLES), h(SAMPLES), rtol=1e-3)


def test_epsilon_parameter_a0():
    d = catalog("epsilon_family", eps=0.1)
    assert abs(d.phi.den.coeffs[0] / d.phi.den.lead - math.sqrt(0.21)) < 1e-14


def test_section4_phi(section4):
    w2 = complex(-0.5, math.sqrt(3) / 2) ** 2
    phi = -math.sqrt(3) * 1j * Z / ((Z * Z - 1) ** 2 + 2 * w2 * (Z * Z + 1))
    assert np.allclose(section4.phi(SAMPLES), phi(SAMPLES), rtol=1e-12)


def test_catalog_errors():
    with pytest.raises(KeyError):
        catalog("nope")
    for bad in ({"lam": 1.0}, {"lam": 2j}, {"m": 0}):
        with pytest.raises(ValueError):
            catalog("meeks", **bad)
    with pytest.raises(ValueError):
        catalog("epsilon_family", eps=-1)
    with pytest.raises(ValueError):
        catalog("essential", p=1)


def test_constant_gauss_map_rejected():
    with pytest.raises(ConstantGaussMapError):
        WeierstrassData(RationalMap(Poly([2.0]), Poly([1.0])), Z, Z, (INF,))


# -- regularity -----------------------------------------------------------


@pytest.mark.parametrize("name,params", [("meeks", {}), ("epsilon_family", {"eps": 0.1})])
def test_regularity_passes(name, params):
    assert check_regularity(entry(name, **params)).passed


def test_regularity_detects_unmatched_pole():
    d = WeierstrassData(1 / Z, Z + 2, RationalMap(Poly([1.0]), Poly([1.0])), (INF,))
    rep = check_regularity(d)
    assert not rep.passed
    assert any(abs(p) < 1e-12 for p, *_ in rep.order_mismatches)


# -- periods --------------------------------------------------------------


def test_epsilon_periods(eps01):
    rep = check_periods(eps01)
    assert rep.passed
    for e in rep.ends:
        assert max(e.horizontal, abs(e.vertical_h), abs(e.vertical_phipsih)) < 1e-9


def test_epsilon_period_identities():
    # coefficient identities of the quartic construction
    eps = 0.1
    a = [math.sqrt(2 * eps + eps**2), 0, 0, 1 + eps, 1]
    b0, b1 = -1, 1
    assert abs(a[4] ** 2 - a[3] ** 2 + a[2] ** 2 - a[1] ** 2 + a[0] ** 2) < 1e-14
    assert abs(b1) ** 2 - abs(b0) ** 2 == 0


def test_m2_vertical_period(m2):
    rep = check_periods(m2)
    assert not rep.passed
    e0 = next(e for e in rep.ends if e.point is not INF)
    assert abs(e0.vertical_phipsih + 2 * math.pi) < 1e-9


def test_meeks_residues_zero(meeks):
    e0 = next(e for e in check_periods(meeks).ends if e.point is not INF)
    for r in (e0.res_h, e0.res_phih, e0.res_psih, e0.res_phipsih):
        assert abs(r) < 1e-12


def test_periods_need_rational(essential2):
    with pytest.raises(NonRationalDataError):
        check_periods(essential2)


# -- ends -----------------------------------------------------------------


def test_epsilon_end_at_zero(eps01):
    e = classify_end(eps01, 0j)
    assert (e.kind, e.m, e.n, e.ind, e.ind_plus, e.d, e.d_tilde) == (
        "good_singular", 1, 2, 1, 1, 4, 3
    )
    assert e.complete


def test_epsilon_end_at_infinity(eps01):
    e = classify_end(eps01, INF)
    assert (e.kind, e.m, e.n, e.ind, e.ind_plus, e.d_tilde) == ("good_singular", 2, 1, -1, 1, 3)


def test_meeks_end_regular(meeks):
    e = classify_end(meeks, 0j)
    assert e.kind == "regular" and e.ind == 0


def test_toy_catenoid_like_end():
    d = WeierstrassData(Z, Z + 0.5, 1 / (Z * Z), (0j, INF))
    assert end_multiplicity(d, 0j)[:2] == (1, 1)


def test_classify_requires_puncture(meeks):
    with pytest.raises(ValueError):
        classify_end(meeks, 1 + 0j)


@pytest.mark.parametrize("name,params", RATIONAL_ENTRIES)
def test_index_identities(name, params):
    d = entry(name, **params)
    for p in d.punctures:
        e = classify_end(d, p)
        assert e.ind10 + e.ind01 == e.ind_plus
        assert e.ind10 - e.ind01 == e.ind
        assert e.d_tilde == e.d - e.ind_plus


# -- total curvature ------------------------------------------------------


@pytest.mark.parametrize(
    "name,params,cover",
    [
        ("meeks", {}, 12),
        ("meeks", {"m": 2}, 20),
        ("epsilon_family", {"eps": 0.1}, 12),
        ("epsilon_family", {"eps": 0.01}, 12),
        ("section4_candidate", {}, 12),
    ],
)
def test_curvature_formulas_agree(name, params, cover):
    rep = total_curvature(entry(name, **params))
    assert rep.agreement
    assert rep.by_deg_phi == rep.by_deg_psi == rep.by_jorge_meeks == cover
    assert rep.quotient_value == cover / 2


@pytest.mark.parametrize("name,params", RATIONAL_ENTRIES)
def test_curvature_formulas_agree_everywhere(name, params):
    rep = total_curvature(entry(name, **params))
    assert rep.by_deg_phi == rep.by_deg_psi == rep.by_jorge_meeks
    assert rep.by_deg_phi % 4 == 0


def test_epsilon_ind10_split(eps01):
    rep = total_curvature(eps01)
    assert [e.ind10 for e in rep.ends] == [1, 0]
    assert 4 * (cx.rat_degree(eps01.phi) - 1) == rep.by_deg_phi


def test_bad_end_refused():
    d = WeierstrassData(Z, 2 * Z, 1 / (Z * Z), (0j, INF))
    assert classify_end(d, 0j).kind == "bad_singular"
    with pytest.raises(BadSingularEndError):
        total_curvature(d)


def test_xz_matches_formula(meeks):
    f, g, h = meeks.phi(SAMPLES), meeks.psi(SAMPLES), meeks.h(SAMPLES)
    x = meeks.xz(SAMPLES)
    assert np.allclose(x[0], (f + g) * h)
    assert np.allclose(x[3] - x[2], 2 * f * g * h)
