import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from stationary.cxratio import INF, FractionTerm, Poly, RationalMap
from stationary.vecform import (
    LaurentHypothesisError,
    Vec4C,
    VectorForm,
    check_isotropy,
    laurent_normal_form,
    lorentz_dot,
    metric_identity_residual,
    two_end_obstruction,
    xz_from_data,
)
from stationary.weierstrass import WeierstrassData

from conftest import RATIONAL_ENTRIES, entry

Z = RationalMap.z()
S3 = math.sqrt(3)
B3 = 4 / S3 + S3 / 4
B4 = 4 / S3 - S3 / 4

small = st.floats(-5, 5, allow_nan=False)
vec4 = st.lists(st.builds(complex, small, small), min_size=4, max_size=4).map(np.array)


def pole(k, c=0j):
    return FractionTerm("pole_power", k, 1.0, complex(c))


def mono(k):
    return FractionTerm("monomial", k, 1.0)


# -- Lorentz product --------------------------------------------------------


def test_lightlike_v0():
    assert lorentz_dot((0, 0, 1, 1), (0, 0, 1, 1)) == 0


def test_v0_u0():
    assert lorentz_dot((0, 0, 1, 1), (0, 0, -1, 1)) == -2


def test_isotropic_w():
    w = Vec4C(1, 1j, 0, 0)
    assert lorentz_dot(w, w) == 0
    assert lorentz_dot(w, w.conj()) == 2


@given(vec4, vec4, vec4, st.builds(complex, small, small))
def test_bilinear_symmetric(u, v, w, a):
    assert np.isclose(lorentz_dot(u, v), lorentz_dot(v, u))
    lhs = lorentz_dot(a * u + v, w)
    rhs = a * lorentz_dot(u, w) + lorentz_dot(v, w)
    assert abs(lhs - rhs) <= 1e-9 * (1 + abs(lhs))


@given(vec4)
def test_not_hermitian(u):
    # the product is bilinear: <iu, iu> = -<u, u>
    assert np.isclose(lorentz_dot(1j * u, 1j * u), -lorentz_dot(u, u))


def test_lorentz_dot_broadcasts():
    u = np.arange(12, dtype=complex).reshape(4, 3)
    assert np.allclose(lorentz_dot(u, u), u[0] ** 2 + u[1] ** 2 + u[2] ** 2 - u[3] ** 2)


# -- vector forms -----------------------------------------------------------


def test_vector_form_merges_duplicates():
    vf = VectorForm([(pole(2), (1, 0, 0, 0)), (pole(2), (0, 1, 0, 0))])
    assert len(vf.terms) == 1
    assert vf.coefficient("pole_power", 2, 0).allclose(Vec4C(1, 1, 0, 0))
    assert vf.coefficient("pole_power", 3, 0).norm() == 0


def test_vector_form_evaluation():
    vf = VectorForm([(pole(2), (1, 0, 0, 0)), (mono(1), (0, 0, 1, 1))])
    z = 0.5 + 0.5j
    assert np.allclose(vf(z), [1 / z**2, 0, z, z])


@pytest.mark.parametrize("name,params", RATIONAL_ENTRIES)
def test_xz_from_data_resums(name, params):
    d = entry(name, **params)
    vf = xz_from_data(d)
    z = np.array([0.31 + 0.47j, -0.9 + 1.7j, 2.3 - 0.4j])
    ref = d.xz(z)
    assert np.all(np.abs(vf(z) - ref) <= 1e-9 * (1 + np.abs(ref)))


@pytest.mark.parametrize("name,params", RATIONAL_ENTRIES)
def test_xz_isotropic(name, params):
    rep = check_isotropy(xz_from_data(entry(name, **params)))
    assert rep.passed and rep.residual < 1e-9


def test_non_isotropic_single_term():
    rep = check_isotropy(VectorForm([(pole(2), (1, 0, 0, 0))]))
    assert not rep.passed
    assert abs(rep.residual - 1) < 1e-15


@given(vec4)
def test_isotropy_of_single_term_is_its_square(v):
    rep = check_isotropy(VectorForm([(pole(1, 1.0), v)]))
    assert abs(rep.residual - abs(lorentz_dot(v, v))) <= 1e-12 * (1 + abs(rep.residual))


def test_section4_form(section4):
    vf = xz_from_data(section4)
    v0, v1 = Vec4C(0, 0, 1, 1), Vec4C(1, -1j, 0, 0)
    u1 = Vec4C(-1, S3, B3 * 1j, B4 * 1j)
    assert vf.coefficient("pole_power", 3, 0).allclose(v0)
    assert vf.coefficient("monomial", 1).allclose(-v0)
    assert vf.coefficient("pole_power", 2, 0).allclose(v1)
    assert vf.coefficient("monomial", 0).allclose(v1.conj())
    assert vf.coefficient("pole_power", 2, 1).allclose(u1)
    assert vf.coefficient("pole_power", 2, -1).allclose(u1.conj())
    for c in (0, 1, -1):
        assert vf.coefficient("pole_power", 1, c).norm() < 1e-9


def test_epsilon_flux_coefficient_zero(eps01):
    assert xz_from_data(eps01).coefficient("pole_power", 1, 0).norm() < 1e-9


def test_principal_part_at_infinity(meeks):
    vf = xz_from_data(meeks)
    pp = vf.principal_part(INF)
    assert pp.get(1, Vec4C()).norm() < 1e-9
    assert max(pp) >= 2


def test_metric_identity(rational_entry):
    z = np.array([0.37 + 0.61j, -1.3 + 0.2j, 0.8 - 2.2j])
    assert metric_identity_residual(rational_entry, z) < 1e-9


# -- Laurent normal form ----------------------------------------------------


def test_section4_normal_form(section4):
    lnf = laurent_normal_form(section4, 0j, 1)
    assert lnf.v0.allclose(Vec4C(0, 0, 1, 1))
    assert lnf.v1.allclose(Vec4C(1, -1j, 0, 0))
    assert abs(lnf.alphas[0] - 1) < 1e-9
    assert lnf.degenerate_span_ok
    assert abs(lorentz_dot(lnf.v0, lnf.v0)) < 1e-12


@pytest.mark.parametrize("a2", [1.5, -0.7 + 0.2j])
def test_toy_normal_form(a2):
    m = 2
    # no z**(m+1) term in phi, so the dz/z coefficient vanishes
    phi = a2 * Z**m + Z ** (m + 2)
    psi = 0.9 * Z ** (m + 2)
    h = 1 / Z ** (m + 2)
    d = WeierstrassData(phi, psi, h, (0j, INF))
    lnf = laurent_normal_form(d, 0j, m)
    assert lnf.v0.allclose(Vec4C(0, 0, 1, 1))
    assert lnf.v1.allclose(Vec4C(a2, -1j * a2, 0, 0))


def test_epsilon_family_not_reduced_multiplicity_one(eps01):
    with pytest.raises(LaurentHypothesisError, match="reduced multiplicity 3"):
        laurent_normal_form(eps01, 0j, 1)


def test_nonzero_flux_refused():
    vf = VectorForm([(pole(3), (0, 0, 1, 1)), (pole(1), (1, 0, 0, 0))])
    with pytest.raises(LaurentHypothesisError, match="flux"):
        laurent_normal_form(vf, 0j, 1)


# -- two regular ends -------------------------------------------------------


def _closed(c):
    return -2 * c**4 / (1 + c**2), -2 / (1 + c**2), 2 * (1 + c**2) ** 2


def test_two_end_c1():
    r = two_end_obstruction(1.0)
    assert np.allclose([r.v1u1, r.v1u1bar, r.u1_sq], [-1, -1, 8], atol=1e-12)
    assert r.verdict == "infeasible"


def test_two_end_c2():
    r = two_end_obstruction(2.0)
    assert np.allclose([r.v1u1, r.v1u1bar, r.u1_sq], [-32 / 5, -2 / 5, 50], atol=1e-12)
    assert r.verdict == "infeasible"


def test_two_end_reciprocal_symmetry():
    a, b = two_end_obstruction(2.0), two_end_obstruction(0.5)
    assert b.verdict == "infeasible"
    # c -> 1/c: margins and |u1|^2 scale by c**-4, v1.u1 becomes v1.conj(u1) / c**2
    assert abs(b.margin_alpha - a.margin_alpha / 16) < 1e-9
    assert abs(b.margin_beta - a.margin_beta / 16) < 1e-9
    assert abs(b.v1u1 - a.v1u1bar / 4) < 1e-12
    assert abs(b.u1_sq - a.u1_sq / 16) < 1e-9


@given(st.floats(0.05, 20) | st.floats(-20, -0.05))
def test_two_end_closed_forms(c):
    r = two_end_obstruction(c)
    ref = _closed(c)
    got = (r.v1u1, r.v1u1bar, r.u1_sq)
    for g, e in zip(got, ref):
        assert abs(g - e) <= 1e-9 * max(1, abs(e))
    assert r.verdict == "infeasible"
    assert r.consistency < 1e-9 * max(1, abs(r.u1_sq))


def test_two_end_rejects_zero():
    with pytest.raises(ValueError):
        two_end_obstruction(0.0)
