import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from xp2 import classical
from xp2.errors import DomainError
from xp2.model import EnergyPoint, ModelParams


@pytest.fixture
def orbit(unit):
    return unit, EnergyPoint.from_e(unit, 3.0)


def test_hamiltonian_values(unit):
    assert classical.hamiltonian(unit, 0.0, 3.0) == 10.0
    assert classical.hamiltonian(ModelParams(2.0), 1.0, 1.0) == 25.0


def test_energy_point_relations(unit):
    ep = EnergyPoint.from_h(unit, 10.0)
    assert ep.e == pytest.approx(3.0, rel=1e-15)
    with pytest.raises(DomainError):
        EnergyPoint.from_h(unit, 0.5)
    with pytest.raises(DomainError):
        EnergyPoint.from_e(unit, -1.0)


def test_model_params_validation():
    with pytest.raises(DomainError):
        ModelParams(0.0)
    with pytest.raises(DomainError):
        ModelParams(1.0, hbar=-1.0)


def test_period_limits(unit):
    assert classical.period(unit, EnergyPoint.from_e(unit, 0.0)) == pytest.approx(math.pi)
    a = ModelParams(1.7)
    assert classical.period(a, EnergyPoint.from_e(a, 0.0)) == pytest.approx(math.pi / 1.7 ** 2)


def test_period_frozen_value(orbit):
    # K(-9) by mpmath, scaled by 2/a^2
    assert classical.period(*orbit) == pytest.approx(1.6305286191794428, rel=1e-14)


def test_trajectory_initial_point_and_conservation(orbit):
    params, ep = orbit
    t = np.linspace(0, 2 * classical.period(params, ep), 801)
    x, p = classical.trajectory(params, ep, t)
    assert x[0] == 0.0
    assert p[0] == pytest.approx(3.0, rel=1e-15)
    h = classical.hamiltonian(params, x, p)
    assert np.max(np.abs(h - ep.h_e)) < 1e-11


def test_trajectory_matches_numerical_orbit(orbit):
    params, ep = orbit
    t = np.linspace(0, classical.period(params, ep), 401)
    x_sn, p_sn = classical.trajectory(params, ep, t)
    x_ode, p_ode = classical.integrate_orbit(params, ep, t, 1e-12)
    assert np.max(np.abs(x_sn - x_ode)) < 1e-9
    assert np.max(np.abs(p_sn - p_ode)) < 1e-9


def test_return_time_equals_period(orbit):
    params, ep = orbit
    assert classical.return_time(params, ep, 1e-12) == pytest.approx(
        classical.period(params, ep), rel=1e-10)


def test_p_is_x_shifted_by_quarter_period(orbit):
    params, ep = orbit
    quarter = classical.period(params, ep) / 4
    t = np.linspace(0, 1, 11)
    x, p = classical.trajectory(params, ep, t)
    x_shift, _ = classical.trajectory(params, ep, t + quarter)
    assert np.allclose(p, x_shift, atol=1e-13)


def test_velocity_relation_on_orbit(orbit):
    params, ep = orbit
    t = np.linspace(0.05, 1.5, 30)
    x, p = classical.trajectory(params, ep, t)
    xdot = 2 * p * (x * x + params.a ** 2)
    assert np.allclose(xdot ** 2, classical.velocity_squared(params, ep, x), rtol=1e-11,
                       atol=1e-10)


@pytest.mark.parametrize("e", [1e2, 1e3, 1e4])
def test_asymptotic_period_converges(unit, e):
    ep = EnergyPoint.from_e(unit, e)
    rel = abs(classical.period(unit, ep) - classical.period_asymptotic(unit, ep))
    rel /= classical.period(unit, ep)
    assert rel < 3.0 * math.log(4 * e) / e ** 2


def test_crude_asymptotic_period_misses_the_constant(unit):
    ep = EnergyPoint.from_e(unit, 1e4)
    exact = classical.period(unit, ep)
    crude = classical.period_asymptotic(unit, ep, crude=True)
    assert exact - crude == pytest.approx(2 * math.log(4) / 1e4, rel=1e-3)


def test_phase_boundary(orbit):
    params, ep = orbit
    assert classical.phase_boundary(params, ep, 0.0) == pytest.approx(3.0)
    assert classical.phase_boundary(params, ep, [-3.0, 3.0]) == pytest.approx([0.0, 0.0])
    with pytest.raises(DomainError):
        classical.phase_boundary(params, ep, 3.5)


def test_canonical_map_roundtrip_and_hamiltonian():
    rng = np.random.default_rng(11)
    params = ModelParams(0.8)
    x, p = rng.uniform(-20, 20, 10_000), rng.uniform(-20, 20, 10_000)
    u, v = classical.to_uv(params, x, p)
    xb, pb = classical.from_uv(params, u, v)
    assert np.allclose(xb, x, rtol=1e-13, atol=1e-13)
    assert np.allclose(pb, p, rtol=1e-13, atol=1e-13)
    h = classical.hamiltonian(params, x, p)
    assert np.max(np.abs(classical.hamiltonian_uv(params, u, v) / h - 1)) < 1e-12


def test_canonical_map_preserves_poisson_bracket():
    # Jacobian determinant of (x, p) -> (u, v) is 1
    params = ModelParams(1.3)
    x, p, d = 0.7, -1.9, 1e-6
    u_x = [(a - b) / (2 * d) for a, b in zip(classical.to_uv(params, x + d, p),
                                             classical.to_uv(params, x - d, p))]
    u_p = [(a - b) / (2 * d) for a, b in zip(classical.to_uv(params, x, p + d),
                                             classical.to_uv(params, x, p - d))]
    assert u_x[0] * u_p[1] - u_x[1] * u_p[0] == pytest.approx(1.0, abs=1e-8)


@settings(max_examples=40, deadline=None)
@given(st.floats(0.1, 5), st.floats(0.1, 5), st.floats(-3, 3), st.floats(-3, 3))
def test_general_regulators_reduce_to_symmetric(a, b, x, p):
    params, r = classical.normalize_general(a, b)
    lhs = (x * x + a * a) * (p * p + b * b)
    rhs = classical.hamiltonian(params, r * x, p / r)
    assert lhs == pytest.approx(rhs, rel=1e-12)


def test_normalize_general_rejects_zero():
    with pytest.raises(DomainError):
        classical.normalize_general(0.0, 1.0)
