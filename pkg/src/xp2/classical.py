"""Classical dynamics of H = (x^2 + a^2)(p^2 + a^2).

Orbits are closed level curves H = E^2 + a^4. With x(0) = 0 and p(0) = E/a the
motion is

    x(t) = (E/a) sn(2 a^2 t | -E^2/a^4),   p(t) = x(t + T_E/4),

with period T_E = (2/a^2) K(-E^2/a^4). A direct integration of Hamilton's
equations is kept alongside as an independent check of these formulas.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from xp2.errors import DomainError
from xp2.model import EnergyPoint, ModelParams
from xp2.numerics import OdeSystem, ode_solve
from xp2.specfun import ellip_k, jacobi_sn


@dataclass(frozen=True)
class PhasePoint:
    x: float
    p: float


@dataclass(frozen=True)
class UVPoint:
    u: float
    v: float


def hamiltonian(params: ModelParams, x, p):
    """(x^2 + a^2)(p^2 + a^2); works elementwise on arrays."""
    a2 = params.a ** 2
    return (np.square(x) + a2) * (np.square(p) + a2)


def normalize_general(a: float, b: float) -> tuple[ModelParams, float]:
    """Reduce (x^2+a^2)(p^2+b^2) to the symmetric model.

    Returns the model with regulator sqrt(|ab|) and the scale ``r`` of the
    canonical map x' = r x, p' = p / r, under which
    (x^2 + a^2)(p^2 + b^2) = (x'^2 + |ab|)(p'^2 + |ab|).
    """
    if a == 0 or b == 0:
        raise DomainError("both regulators must be non-zero")
    r = math.sqrt(abs(b) / abs(a))
    return ModelParams(math.sqrt(abs(a * b))), r


def elliptic_parameter(params: ModelParams, ep: EnergyPoint) -> float:
    return -(ep.e / params.a ** 2) ** 2


def period(params: ModelParams, ep: EnergyPoint) -> float:
    """Exact period (2/a^2) K(-E^2/a^4); the E -> 0 limit is pi/a^2."""
    return 2.0 / params.a ** 2 * ellip_k(elliptic_parameter(params, ep))


def period_asymptotic(params: ModelParams, ep: EnergyPoint, crude: bool = False) -> float:
    """Large-E period (2/E) ln(4E/a^2).

    ``crude`` drops the factor 4, giving the estimate obtained from
    integrating dx/x between a and E/a.
    """
    if ep.e <= 0:
        raise DomainError("asymptotic period needs E > 0")
    factor = 1.0 if crude else 4.0
    return 2.0 / ep.e * math.log(factor * ep.e / params.a ** 2)


def trajectory(params: ModelParams, ep: EnergyPoint, times):
    """Closed-form (x(t), p(t)) sampled at ``times``; x(0) = 0, p(0) = E/a."""
    t = np.asarray(times, dtype=float)
    if ep.e == 0:
        return np.zeros_like(t), np.zeros_like(t)
    a = params.a
    m = elliptic_parameter(params, ep)
    amp = ep.e / a
    quarter = period(params, ep) / 4.0
    x = amp * jacobi_sn(2 * a * a * t, m)
    p = amp * jacobi_sn(2 * a * a * (t + quarter), m)
    return x, p


def hamilton_rhs(params: ModelParams) -> OdeSystem:
    """Hamilton's equations xdot = 2p(x^2+a^2), pdot = -2x(p^2+a^2)."""
    a2 = params.a ** 2

    def rhs(t, y):
        x, p = y[0], y[1]
        return np.array([2 * p * (x * x + a2), -2 * x * (p * p + a2)])

    return OdeSystem(2, rhs)


def integrate_orbit(params: ModelParams, ep: EnergyPoint, times, tol: float = 1e-12):
    """Numerical orbit from (0, E/a) by Runge-Kutta; returns (x, p) at ``times``."""
    times = np.asarray(times, dtype=float)
    sol = ode_solve(hamilton_rhs(params), [0.0, ep.e / params.a], (0.0, float(times[-1])),
                    tol, t_eval=times)
    return sol.y[:, 0], sol.y[:, 1]


def return_time(params: ModelParams, ep: EnergyPoint, tol: float = 1e-12) -> float:
    """First time the integrated orbit crosses x = 0 upward again.

    The crossing is located on the dense output of the integrator.
    """
    if ep.e <= 0:
        raise DomainError("return time needs E > 0")
    horizon = 1.5 * period(params, ep)
    sol = ode_solve(hamilton_rhs(params), [0.0, ep.e / params.a], (0.0, horizon), tol,
                    event=lambda t, y: y[0], event_direction=1, terminal=True)
    if not sol.t_events:
        raise DomainError("orbit did not return within 1.5 periods")
    return float(sol.t_events[0])


def phase_boundary(params: ModelParams, ep: EnergyPoint, x):
    """Upper branch p(x) >= 0 of the level set H = E^2 + a^4."""
    a = params.a
    x = np.asarray(x, dtype=float)
    turning = ep.e / a
    if np.any(np.abs(x) > turning * (1 + 1e-14)):
        raise DomainError(f"|x| exceeds the turning point E/a = {turning}")
    num = np.clip(ep.e ** 2 - (a * x) ** 2, 0.0, None)
    p = np.sqrt(num / (x * x + a * a))
    return float(p) if p.ndim == 0 else p


def to_uv(params: ModelParams, x, p):
    """Canonical map x = a sinh u, p = v / (a cosh u)."""
    a = params.a
    u = np.arcsinh(np.asarray(x, dtype=float) / a)
    v = np.asarray(p, dtype=float) * a * np.cosh(u)
    return u, v


def from_uv(params: ModelParams, u, v):
    a = params.a
    u = np.asarray(u, dtype=float)
    return a * np.sinh(u), np.asarray(v, dtype=float) / (a * np.cosh(u))


def hamiltonian_uv(params: ModelParams, u, v):
    """v^2 + a^4 cosh^2 u."""
    return np.square(v) + params.a ** 4 * np.cosh(u) ** 2


def velocity_squared(params: ModelParams, ep: EnergyPoint, x):
    """xdot^2 on the orbit, 4 (x^2 + a^2)(E^2 - a^2 x^2)."""
    a = params.a
    x = np.asarray(x, dtype=float)
    return 4.0 * (x * x + a * a) * (ep.e ** 2 - (a * x) ** 2)
