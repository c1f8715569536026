import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import special

from xp2.errors import DomainError
from xp2.specfun import (
    agm,
    carlson_rd,
    carlson_rf,
    ellip_e,
    ellip_e_agm,
    ellip_k,
    ellip_k_agm,
    jacobi_sn,
)

M_VALUES = [0.99, 0.5, 0.0, -0.3, -1.0, -9.0, -2500.0, -1e6]


def test_carlson_special_values():
    assert carlson_rf(2.0, 2.0, 2.0) == pytest.approx(2 ** -0.5, rel=1e-15)
    assert carlson_rd(3.0, 3.0, 3.0) == pytest.approx(3 ** -1.5, rel=1e-15)
    assert carlson_rf(0.0, 1.0, 1.0) == pytest.approx(math.pi / 2, rel=1e-15)


@settings(max_examples=50, deadline=None)
@given(st.floats(0, 50), st.floats(1e-3, 50), st.floats(1e-3, 50))
def test_carlson_against_mpmath(x, y, z):
    assert carlson_rf(x, y, z) == pytest.approx(float(mpmath.elliprf(x, y, z)), rel=5e-15)
    assert carlson_rd(x, y, z) == pytest.approx(float(mpmath.elliprd(x, y, z)), rel=5e-14)


def test_carlson_domain():
    with pytest.raises(DomainError):
        carlson_rf(-1.0, 1.0, 1.0)
    with pytest.raises(DomainError):
        carlson_rf(0.0, 0.0, 1.0)
    with pytest.raises(DomainError):
        carlson_rd(1.0, 1.0, 0.0)


@pytest.mark.parametrize("m", M_VALUES)
def test_complete_integrals_against_mpmath(m):
    assert ellip_k(m) == pytest.approx(float(mpmath.ellipk(m)), rel=2e-15)
    assert ellip_e(m) == pytest.approx(float(mpmath.ellipe(m)), rel=2e-15)


@pytest.mark.parametrize("m", M_VALUES)
def test_agm_route_agrees_with_carlson_route(m):
    assert ellip_k_agm(m) == pytest.approx(ellip_k(m), rel=1e-14)
    assert ellip_e_agm(m) == pytest.approx(ellip_e(m), rel=1e-13)


def test_integrand_convention():
    # K(-E^2/a^4) = int_0^{pi/2} dtheta / sqrt(1 + (E^2/a^4) sin^2 theta)
    k2 = 9.0
    f = lambda t: 1.0 / math.sqrt(1 + k2 * math.sin(t) ** 2)
    assert ellip_k(-k2) == pytest.approx(float(mpmath.quad(f, [0, math.pi / 2])), rel=1e-14)


def test_legendre_relation():
    m = 0.37
    k, e = ellip_k(m), ellip_e(m)
    k1, e1 = ellip_k(1 - m), ellip_e(1 - m)
    assert e * k1 + e1 * k - k * k1 == pytest.approx(math.pi / 2, rel=1e-14)


def test_elliptic_limits():
    assert ellip_k(0.0) == pytest.approx(math.pi / 2, rel=1e-16)
    assert ellip_e(1.0) == 1.0
    with pytest.raises(DomainError):
        ellip_k(1.0)
    with pytest.raises(DomainError):
        ellip_e(1.5)


def test_agm_basic():
    assert agm(1.0, 1.0) == 1.0
    # Gauss's constant
    assert 1.0 / agm(1.0, math.sqrt(2.0)) == pytest.approx(0.8346268416740731, rel=1e-15)


@pytest.mark.parametrize("m", [0.1, 0.5, 0.9, 0.999])
def test_sn_against_scipy_positive_parameter(m):
    u = np.linspace(-8, 8, 101)
    sn_ref = special.ellipj(u, m)[0]
    assert np.max(np.abs(jacobi_sn(u, m) - sn_ref)) < 5e-13


@pytest.mark.parametrize("m", [-0.5, -9.0, -100.0])
def test_sn_against_mpmath_negative_parameter(m):
    for u in [0.1, 0.7, 1.3, 2.9, -4.4]:
        ref = mpmath.ellipfun("sn", u, m=m)
        assert abs(mpmath.im(ref)) < 1e-20
        ref = float(mpmath.re(ref))
        assert jacobi_sn(u, m) == pytest.approx(ref, abs=1e-12)


def test_sn_quarter_period_and_parity():
    for m in [-9.0, -0.3, 0.6]:
        k = ellip_k(m)
        assert jacobi_sn(k, m) == pytest.approx(1.0, abs=1e-13)
        assert jacobi_sn(-0.4, m) == pytest.approx(-jacobi_sn(0.4, m), abs=1e-15)
        assert jacobi_sn(0.4 + 4 * k, m) == pytest.approx(jacobi_sn(0.4, m), abs=1e-12)


def test_sn_circular_limit():
    u = np.linspace(0, 6, 13)
    assert np.allclose(jacobi_sn(u, 0.0), np.sin(u), atol=1e-15)


def test_sn_domain():
    with pytest.raises(DomainError):
        jacobi_sn(0.5, 1.2)
