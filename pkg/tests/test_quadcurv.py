import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from stationary import cxratio as cx
from stationary.cxratio import INF, MobiusTransform, RationalMap
from stationary.quadcurv import (
    GaussMapCallable,
    QuadratureConfig,
    SingularPointError,
    curvature_density,
    integrate_curvature,
)
from stationary.weierstrass import WeierstrassData, catalog, total_curvature

from conftest import entry

Z = RationalMap.z()


def _density_from_derivatives(phi, psi, z):
    dphi, dpsi = cx.derivative(phi)(z), cx.derivative(psi)(z)
    return 4 * dphi * np.conj(dpsi) / (phi(z) - np.conj(psi(z))) ** 2


def test_toy_density_at_one():
    assert abs(curvature_density(Z, -1 / Z, 1.0) - 1) < 1e-15


@given(st.complex_numbers(min_magnitude=0.1, max_magnitude=10, allow_nan=False))
def test_toy_density_formula(z):
    # phi' = 1, conj(psi') = 1/conj(z)**2, phi - conj(psi) = z + 1/conj(z)
    ref = 4 / np.conj(z) ** 2 / (z + 1 / np.conj(z)) ** 2
    assert abs(curvature_density(Z, -1 / Z, z) - ref) <= 1e-12 * max(1, abs(ref))


def test_epsilon_density_cross_assembly(eps01):
    a = curvature_density(eps01.phi, eps01.psi, 1.0)
    b = _density_from_derivatives(eps01.phi, eps01.psi, 1.0)
    assert abs(a - b) < 1e-10 * max(1, abs(b))


@given(st.integers(0, 3), st.complex_numbers(min_magnitude=0.2, max_magnitude=5, allow_nan=False))
def test_density_two_paths(which, z):
    d = [entry("meeks"), entry("epsilon_family", eps=0.1), entry("meeks", m=2),
         entry("epsilon_family", eps=0.5)][which]
    gap = abs(d.phi(z) - np.conj(d.psi(z)))
    if not np.isfinite(gap) or gap < 1e-3 or any(
        p is not INF and abs(z - p) < 0.05 for p in d.punctures
    ):
        return
    a = curvature_density(d.phi, d.psi, z)
    b = _density_from_derivatives(d.phi, d.psi, z)
    assert abs(a - b) <= 1e-8 * max(1, abs(b))


def test_essential_density_finite(essential2):
    v = curvature_density(essential2.phi, essential2.psi, 1.0)
    assert np.isfinite(v)


def test_essential_derivative_finite_difference(essential2):
    f = essential2.phi
    h = 1e-5
    fd = (f(1 + h) - f(1 - h)) / (2 * h)
    assert abs(f.derivative(1.0) - fd) < 1e-8 * abs(fd)


def test_wrong_derivative_rejected():
    with pytest.raises(ValueError):
        GaussMapCallable(evaluate=lambda z: z**2, derivative=lambda z: z)


def test_density_at_singular_point():
    with pytest.raises(SingularPointError):
        curvature_density(Z + 1, Z + 1, 0.0)


def test_config_validation():
    with pytest.raises(ValueError):
        QuadratureConfig(inner_radius=2.0)
    with pytest.raises(ValueError):
        QuadratureConfig(radial_nodes=4)
    with pytest.raises(ValueError):
        QuadratureConfig(refinement_levels=1)


@pytest.mark.parametrize(
    "name,params,cover",
    [("meeks", {}, 12), ("epsilon_family", {"eps": 0.1}, 12), ("meeks", {"m": 2}, 20)],
)
def test_quadrature_matches_index_formula(name, params, cover):
    d = entry(name, **params)
    res = integrate_curvature(d)
    assert res.converged
    assert abs(res.minus_K / math.pi - cover) < 0.01 * cover
    assert total_curvature(d).by_deg_phi == cover
    assert abs(res.quotient_minus_K / math.pi - cover / 2) < 0.01 * cover / 2


def test_essential_quadrature(essential2):
    res = integrate_curvature(essential2)
    assert abs(res.quotient_minus_K - 6 * math.pi) < 0.02 * 6 * math.pi
    assert abs(res.Kperp) < 0.02 * 6 * math.pi


@pytest.mark.parametrize("p", [3])
def test_essential_general_p(p):
    res = integrate_curvature(catalog("essential", p=p))
    assert abs(res.quotient_minus_K / math.pi - 2 * (2 * p - 1)) < 0.02 * 2 * (2 * p - 1)


@given(st.floats(0, 2 * math.pi))
def test_rotation_invariance_of_quadrature(theta):
    d = entry("meeks")
    A = MobiusTransform(np.exp(0.5j * theta), 0, 0, np.exp(-0.5j * theta))
    f, g, h = cx.mobius_apply_data(A, d.phi, d.psi, d.h)
    e = WeierstrassData(f, g, h, d.punctures)
    a = integrate_curvature(d).minus_K
    b = integrate_curvature(e).minus_K
    assert abs(a - b) < 1e-6


def test_recentering_moves_singular_ends():
    # epsilon family moved so that its singular end sits at z = 1
    d = entry("epsilon_family", eps=0.1)
    A = MobiusTransform(1, -1, 0, 1)  # z -> z - 1
    f, g, h = cx.mobius_apply_data(A, d.phi, d.psi, d.h)
    e = WeierstrassData(f, g, h, (1 + 0j, INF))
    res = integrate_curvature(e)
    assert abs(res.minus_K / math.pi - 12) < 0.12


def test_table_csv(meeks):
    res = integrate_curvature(meeks)
    lines = res.table_csv().strip().splitlines()
    assert lines[0] == "level,minus_K,Kperp,abs_total,estimate"
    assert len(lines) == 1 + len(res.table)


def test_good_end_stable_under_halving(eps01):
    a = integrate_curvature(eps01, QuadratureConfig(inner_radius=1e-2))
    b = integrate_curvature(eps01, QuadratureConfig(inner_radius=5e-3))
    assert abs(a.minus_K - b.minus_K) < a.error_estimate


def test_bad_end_absolute_integral_diverges():
    d = WeierstrassData(Z, 2 * Z, 1 / (Z * Z), (0j, INF))
    vals = [
        integrate_curvature(d, QuadratureConfig(inner_radius=1e-2 / 2**k)).abs_total
        for k in range(4)
    ]
    steps = np.diff(vals)
    assert np.all(steps > 1.0)
    # logarithmic growth: equal increments per halving
    assert np.ptp(steps) < 1e-6 * steps.mean()
