"""Semiclassical level counting.

The action is I(E) = (1/2pi) * (enclosed phase-space area) and the staircase
estimate is N(E) = I(E)/hbar. Levels follow from N(E_n) = n - delta with the
Maslov offset delta = 1/2 by default.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from xp2 import classical
from xp2.errors import DomainError, SolverError
from xp2.model import EnergyPoint, Level, ModelParams, Parity, Spectrum
from xp2.numerics import Bracket, find_root, quad
from xp2.specfun import ellip_e, ellip_k


@dataclass(frozen=True)
class SemiclassicalConfig:
    maslov_offset: float = 0.5
    quad_tol: float = 1e-13
    root_tol: float = 1e-13

    def __post_init__(self):
        if not 0 <= self.maslov_offset < 1:
            raise DomainError("Maslov offset must lie in [0, 1)")


def _area_integrand(params: ModelParams, e: float):
    # x = (E/a) sin(theta) removes the square-root zero at the turning point
    a = params.a
    k = (e / (a * a)) ** 2
    scale = e * e / (a * a)

    def f(theta):
        s = math.sin(theta)
        c = math.cos(theta)
        return scale * c * c / math.sqrt(1.0 + k * s * s)

    return f


def action(params: ModelParams, ep: EnergyPoint, method: str = "closed",
           tol: float = 1e-13) -> float:
    """Action variable I(E) = (4/2pi) int_0^{E/a} sqrt((E^2 - a^2 x^2)/(x^2 + a^2)) dx.

    ``method="closed"`` uses [(E^2+a^4)/a^2 K(m) - a^2 E(m)] with m = -E^2/a^4;
    ``method="quad"`` integrates the substituted integrand directly.
    """
    e = ep.e
    if e == 0:
        return 0.0
    if method == "closed":
        a2 = params.a ** 2
        m = -(e / a2) ** 2
        inner = (e * e + a2 * a2) / a2 * ellip_k(m) - a2 * ellip_e(m)
    elif method == "quad":
        inner = quad(_area_integrand(params, e), 0.0, math.pi / 2, tol)
    else:
        raise ValueError(f"unknown method {method!r}")
    return 4.0 * inner / (2.0 * math.pi)


def counting(params: ModelParams, ep: EnergyPoint, method: str = "closed") -> float:
    """N(E) = I(E)/hbar, the semiclassical number of states below E."""
    return action(params, ep, method) / params.hbar


def level_spacing(params: ModelParams, ep: EnergyPoint, asymptotic: bool = False) -> float:
    """Local level spacing pi hbar / (T_E E).

    With ``asymptotic`` the large-E period is used, which gives
    pi hbar / (2 ln(4E/a^2)).
    """
    if ep.e <= 0:
        raise DomainError("level spacing needs E > 0")
    if asymptotic:
        return math.pi * params.hbar / (2.0 * math.log(4.0 * ep.e / params.a ** 2))
    return math.pi * params.hbar / (classical.period(params, ep) * ep.e)


def semiclassical_levels(params: ModelParams, cfg: SemiclassicalConfig = SemiclassicalConfig(),
                         n_max: int = 10, n_min: int = 1) -> Spectrum:
    """Solve N(E_n) = n - delta for n = n_min..n_max."""
    if n_max < 1 or n_min < 1 or n_min > n_max:
        raise DomainError(f"bad level range {n_min}..{n_max}")

    def excess(e, target):
        return counting(params, EnergyPoint.from_e(params, e)) - target

    levels = []
    prev = 0.0
    # first trial width: one level spacing at the energy where N ~ 1
    width = level_spacing(params, EnergyPoint.from_e(params, max(params.a ** 2, 1e-3)))
    for n in range(1, n_max + 1):
        target = n - cfg.maslov_offset
        lo, hi = prev, prev + width
        tries = 0
        while excess(hi, target) < 0:
            lo, hi = hi, hi + 2 * (hi - prev)
            tries += 1
            if tries > 200:
                raise SolverError(f"could not bracket level {n}")
        e_n = find_root(lambda e: excess(e, target), Bracket(lo, hi), cfg.root_tol)
        width = max(e_n - prev, 1e-12)
        prev = e_n
        if n >= n_min:
            ep = EnergyPoint.from_e(params, e_n)
            levels.append(Level(n, Parity.of_level(n), e_n, ep.h_e, excess(e_n, target),
                                "semiclassical"))
    return Spectrum(levels, {"backend": "semiclassical", "a": params.a, "hbar": params.hbar,
                             "maslov_offset": cfg.maslov_offset})
