"""Schrodinger form of the three orderings in the variable x = a sinh u.

With x = a sinh u each ordering becomes -phi'' + V(u) phi = E^2 phi, where

    V_1(u) = -1/2 - tanh^2(u)/4 + a^4 sinh^2 u,   phi = sqrt(cosh u) psi_1,
    V_2(u) = a^4 sinh^2 u,                          phi = phi_2(x(u)),
    V_3(u) = -1/2 + 3 tanh^2(u)/4 + a^4 sinh^2 u,  phi = sqrt(cosh u) psi_3.

In all three cases int psi^2 dx is a constant multiple of int phi^2 du.
This module provides the potentials, a finite-difference eigensolver and,
for form II, the modified Mathieu equation

    y'' = (c - 2q cosh 2u) y,   c = -(E^2 + a^4/2),  q = -a^4/4,

whose solutions that decay at u -> infinity define the levels.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np

from xp2.errors import DomainError, SolverError
from xp2.model import EnergyPoint, Level, ModelParams, Parity, QuantForm, Spectrum
from xp2.numerics import Bracket, OdeSystem, SymTridiag, find_root, ode_solve, quad, sym_eigen
from xp2.quantum.shooting import locate_levels, refine_levels
from xp2.semiclassical import SemiclassicalConfig, semiclassical_levels

FD_STEP = 0.002
FD_MARGIN = 5.0
FD_TAIL_TOL = 1e-8
# decay exponent reached before the Riccati continuation takes over; the
# leftover decaying component shifts roots by about exp(-2 WKB_CUT)
WKB_CUT = 20.0
RICCATI_STEP = 0.01


@dataclass(frozen=True)
class Potential:
    form: QuantForm
    params: ModelParams

    def __call__(self, u):
        return potential(self.form, self.params, u)


def potential(form: QuantForm, params: ModelParams, u):
    """V_I(u) for hbar = 1 (pass ``params.natural_units()`` otherwise)."""
    form = QuantForm.parse(form)
    u = np.asarray(u, dtype=float)
    base = params.a ** 4 * np.sinh(u) ** 2
    t2 = np.tanh(u) ** 2
    if form is QuantForm.I:
        v = -0.5 - 0.25 * t2 + base
    elif form is QuantForm.II:
        v = base
    else:
        v = -0.5 + 0.75 * t2 + base
    return float(v) if v.ndim == 0 else v


def u_ode_rhs(form: QuantForm, params: ModelParams, e) -> OdeSystem:
    """(phi, phi') system for phi'' = (V_I(u) - E^2) phi; ``e`` may be an array."""
    form = QuantForm.parse(form)
    lam = np.asarray(e, dtype=float) ** 2

    def rhs(u, y):
        return np.array([y[1], (potential(form, params, u) - lam) * y[0]])

    return OdeSystem(2, rhs, linear=True)


# -- finite differences --------------------------------------------------------

@dataclass(frozen=True)
class GridSpec:
    """Symmetric grid on [-u_max, u_max] with ``n`` interior points."""

    u_max: float
    n: int

    def __post_init__(self):
        if not self.u_max > 0:
            raise DomainError("u_max must be positive")
        if self.n < 3:
            raise DomainError("grid needs at least 3 interior points")

    @property
    def step(self) -> float:
        return 2.0 * self.u_max / (self.n + 1)

    def points(self) -> np.ndarray:
        return -self.u_max + self.step * np.arange(1, self.n + 1)

    def refined(self) -> "GridSpec":
        return GridSpec(self.u_max, 2 * self.n + 1)

    @classmethod
    def for_levels(cls, params: ModelParams, n_max: int, step: float = FD_STEP,
                   margin: float = FD_MARGIN) -> "GridSpec":
        """Grid reaching ``margin`` past the outer turning point of level n_max + 1."""
        nat = params.natural_units()
        top = semiclassical_levels(nat, SemiclassicalConfig(), n_max + 1).levels[-1].e
        u_max = math.asinh(top / nat.a ** 2) + margin
        n = int(math.ceil(2 * u_max / step)) - 1
        return cls(u_max, max(n, 3))


def _fd_eigen(v_fn: Callable, grid: GridSpec, k: int, vectors: bool):
    h = grid.step
    u = grid.points()
    diag = 2.0 / h ** 2 + v_fn(u)
    off = np.full(grid.n - 1, -1.0 / h ** 2)
    return sym_eigen(SymTridiag(diag, off), k, vectors=vectors)


def spectrum_fd(form: QuantForm, params: ModelParams, grid: GridSpec | None = None,
                n_max: int = 10, potential_fn: Callable | None = None) -> Spectrum:
    """Levels from -phi'' + V phi = E^2 phi with Dirichlet ends at +-u_max.

    Eigenvalues on ``grid`` and on the grid with half the spacing are
    combined by Richardson extrapolation, (4 lam_fine - lam_coarse)/3. The
    residual of each level is the change in E caused by the extrapolation.
    ``potential_fn`` replaces V_I (used for sanity checks).
    """
    form = QuantForm.parse(form)
    if n_max < 1:
        raise DomainError("n_max must be >= 1")
    nat = params.natural_units()
    grid = grid or GridSpec.for_levels(params, n_max)
    if n_max > grid.n // 4:
        raise DomainError(f"grid with {grid.n} points is too coarse for {n_max} levels")
    v_fn = potential_fn or (lambda u: potential(form, nat, u))
    coarse = _fd_eigen(v_fn, grid, n_max, vectors=False)
    fine, vecs = _fd_eigen(v_fn, grid.refined(), n_max, vectors=True)
    tail = np.max(np.abs(vecs[[0, -1], :]), axis=0) / np.max(np.abs(vecs), axis=0)
    if np.any(tail > FD_TAIL_TOL):
        warnings.warn(f"u_max = {grid.u_max:g} may be too small: boundary amplitude "
                      f"{np.max(tail):.2e} exceeds {FD_TAIL_TOL:g}", RuntimeWarning, stacklevel=2)
    lam = (4.0 * fine - coarse) / 3.0
    levels = []
    for n, (lam_n, lam_f) in enumerate(zip(lam, fine), start=1):
        parity = _fd_parity(vecs[:, n - 1])
        if lam_n < 0:
            levels.append(Level(n, parity, math.nan, math.nan, float(lam_n), "fd", valid=False))
            continue
        e = math.sqrt(lam_n) * params.hbar
        resid = abs(math.sqrt(lam_n) - math.sqrt(max(lam_f, 0.0))) * params.hbar
        levels.append(Level(n, parity, e, params.level_value(e), resid, "fd"))
    return Spectrum(levels, {"backend": "fd", "form": form.label, "a": params.a,
                             "hbar": params.hbar, "u_max": grid.u_max, "n_points": grid.n,
                             "step": grid.step})


def _fd_parity(vec) -> Parity:
    return Parity.EVEN if np.dot(vec, vec[::-1]) >= 0 else Parity.ODD


# -- modified Mathieu equation ----------------------------------------------------

@dataclass(frozen=True)
class MathieuParams:
    """Coefficients of y'' = (c - 2q cosh 2u) y."""

    c: float
    q: float

    @classmethod
    def for_level(cls, params: ModelParams, e: float) -> "MathieuParams":
        """Form II at energy label ``e`` (hbar = 1 units)."""
        a4 = params.a ** 4
        return cls(-(e * e + 0.5 * a4), -0.25 * a4)

    def q_of_u(self, u):
        return self.c - 2.0 * self.q * np.cosh(2.0 * u)


def _turning_point(c: float, q: float) -> float:
    """Largest u >= 0 where c - 2q cosh 2u changes sign (0 if it never does)."""
    if q >= 0:
        raise DomainError("the decaying continuation needs q < 0")
    ratio = c / (2.0 * q)
    return 0.5 * math.acosh(ratio) if ratio > 1 else 0.0


def _decay_exponent(c: float, q: float, u_t: float, u: float) -> float:
    """int_{u_t}^{u} sqrt(c - 2q cosh 2s) ds."""
    if u <= u_t:
        return 0.0
    f = lambda s: math.sqrt(max(c - 2.0 * q * math.cosh(2.0 * s), 0.0))
    return quad(f, u_t, u, 1e-12)


def _cut_point(c: float, q: float, u_t: float, target: float) -> float:
    g = lambda u: _decay_exponent(c, q, u_t, u) - target
    hi = u_t + 1.0
    while g(hi) < 0:
        hi += 1.0
    return find_root(g, Bracket(u_t, hi), 1e-6)


def _terminal_batch(c, q: float, odd, u_max: float, tol: float):
    """Renormalized terminal values for arrays of c (same q) and parities.

    Up to u_cut, where the decay exponent reaches WKB_CUT, the equation is
    integrated directly. Beyond it the solution is a pure growing mode to
    working precision, so w = y'/y - sqrt(Q) is advanced with the implicit
    trapezoidal rule (the Riccati equation is stiff but contracting there).
    The returned value is y(u_max) Q^(1/4) exp(-int sqrt(Q)), which keeps the
    sign of y and is smooth in c.
    """
    c = np.asarray(c, dtype=float)
    odd = np.asarray(odd, dtype=bool)
    u_t = np.array([_turning_point(ci, q) for ci in c])
    # the most negative c has the outermost turning point and the latest cut
    i = int(np.argmin(c))
    stop = min(_cut_point(c[i], q, u_t[i], WKB_CUT), u_max)

    def rhs(u, y):
        return np.array([y[1], (c - 2.0 * q * np.cosh(2.0 * u)) * y[0]])

    y0 = np.where(odd, 0.0, 1.0), np.where(odd, 1.0, 0.0)
    sol = ode_solve(OdeSystem(2, rhs, linear=True), np.array(y0), (0.0, stop), tol)
    y, dy = sol.y_final
    log_y = sol.log_scale[-1] + np.log(np.abs(y))
    sign = np.sign(y)
    qq = c - 2.0 * q * np.cosh(2.0 * stop)
    if np.any(qq <= 0):
        if stop < u_max:
            raise SolverError("Mathieu continuation started inside the allowed region")
        # u_max lies inside the oscillatory region for some entries: report y itself
        return sign * np.exp(np.minimum(log_y, 700.0))
    phi = np.array([_decay_exponent(ci, q, ti, stop) for ci, ti in zip(c, u_t)])
    g = log_y - phi + 0.25 * np.log(qq)
    if stop < u_max:
        w = dy / y - np.sqrt(qq)
        g = g + _riccati_tail(c, q, w, stop, u_max)
    return sign * np.exp(np.clip(g, -700.0, 700.0))


def _riccati_tail(c, q, w, u0, u1):
    """int_{u0}^{u1} (w + Q'/(4Q)) du along w' = -2 sqrt(Q) w - w^2 - Q'/(2 sqrt(Q))."""
    n = max(int(math.ceil((u1 - u0) / RICCATI_STEP)), 1)
    h = (u1 - u0) / n

    def coeffs(u):
        qq = c - 2.0 * q * np.cosh(2.0 * u)
        dq = -4.0 * q * np.sinh(2.0 * u)
        return np.sqrt(qq), dq / (2.0 * np.sqrt(qq)), dq / (4.0 * qq)

    total = np.zeros_like(c)
    s0, r0, l0 = coeffs(u0)
    for k in range(1, n + 1):
        s1, r1, l1 = coeffs(u0 + k * h)
        # trapezoid: w1 - w0 = h/2 [f0 + f1], f = -2 s w - w^2 - r, quadratic in w1
        f0 = -2.0 * s0 * w - w * w - r0
        rhs = w + 0.5 * h * (f0 - r1)
        b = 1.0 + h * s1
        aa = 0.5 * h
        # aa w1^2 + b w1 - rhs = 0, take the root continuous with w1 ~ rhs/b
        w1 = 2.0 * rhs / (b + np.sqrt(b * b + 4.0 * aa * rhs))
        total += 0.5 * h * (w + l0 + w1 + l1)
        w, s0, r0, l0 = w1, s1, r1, l1
    return total


def mathieu_terminal(mp: MathieuParams, parity: Parity, u_max: float = 12.0,
                     tol: float = 1e-11) -> float:
    """Signed, renormalized value at u_max of the parity solution of the Mathieu equation.

    Even solutions start from (y, y') = (1, 0), odd ones from (0, 1). Zeros as
    a function of the energy are the form II levels; the value is
    y(u_max) Q(u_max)^(1/4) exp(-int_{u_t}^{u_max} sqrt(Q) du) with
    Q = c - 2q cosh 2u, which tends to a finite limit as u_max grows.
    """
    if not u_max > 0:
        raise DomainError("u_max must be positive")
    if mp.q == 0:
        # free equation y'' = c y
        if mp.c > 0:
            k = math.sqrt(mp.c)
            return math.cosh(k * u_max) if parity is Parity.EVEN else math.sinh(k * u_max) / k
        k = math.sqrt(-mp.c)
        if parity is Parity.EVEN:
            return math.cos(k * u_max)
        return math.sin(k * u_max) / k if k > 0 else u_max
    out = _terminal_batch([mp.c], mp.q, [parity is Parity.ODD], u_max, tol)
    return float(out[0])


def spectrum_mathieu(params: ModelParams, n_max: int = 10, u_max: float = 12.0,
                     tol: float = 1e-11, root_tol: float = 1e-12) -> Spectrum:
    """Form II levels as zeros of the Mathieu terminal value, alternating parity."""
    if n_max < 1:
        raise DomainError("n_max must be >= 1")
    nat = params.natural_units()
    q = -0.25 * nat.a ** 4

    def ends(e):
        e = np.atleast_1d(np.asarray(e, dtype=float))
        c = -(e * e + 0.5 * nat.a ** 4)
        both = _terminal_batch(np.concatenate([c, c]), q,
                               np.concatenate([np.ones(e.size, bool), np.zeros(e.size, bool)]),
                               u_max, tol)
        return both.reshape(2, e.size)  # row 0 odd, row 1 even

    found, step = locate_levels(n_max, ends, nat, None, 3)
    roots, resid = refine_levels(found, ends, root_tol)
    levels = []
    for n, (e_nat, r, (_, _, parity)) in enumerate(zip(roots, resid, found), start=1):
        e = float(e_nat) * params.hbar
        levels.append(Level(n, parity, e, params.level_value(e), float(r), "mathieu"))
    return Spectrum(levels, {"backend": "mathieu", "form": "H2", "a": params.a,
                             "hbar": params.hbar, "u_max": u_max, "scan_step": step})


def mathieu_wavefunction(params: ModelParams, level: Level, u_extent: float | None = None,
                         samples: int = 2001, tol: float = 1e-11):
    """Form II eigenfunction on a symmetric u-grid, normalized to int phi^2 du = 1.

    The parity solution from u = 0 is joined at the turning point to the
    solution integrated inward from the decaying end, which keeps the tail
    free of the growing mode.
    """
    nat = params.natural_units()
    e = level.e / params.hbar
    mp = MathieuParams.for_level(nat, e)
    u_t = _turning_point(mp.c, mp.q)
    u_end = _cut_point(mp.c, mp.q, u_t, WKB_CUT)
    extent = u_end if u_extent is None else min(u_extent, u_end)
    half = (samples + 1) // 2
    us = np.linspace(0.0, extent, half)
    rhs = lambda u, y: np.array([y[1], mp.q_of_u(u) * y[0]])
    system = OdeSystem(2, rhs, linear=True)
    y0 = [0.0, 1.0] if level.parity is Parity.ODD else [1.0, 0.0]
    inner = us[us <= u_t]
    outer = us[us > u_t]
    left = ode_solve(system, y0, (0.0, u_t), tol, t_eval=np.append(inner, u_t)).unscaled()[:, 0]
    qe = mp.q_of_u(u_end)
    right_t = np.concatenate([[u_end], outer[::-1], [u_t]])
    right = ode_solve(system, [1.0, -math.sqrt(qe)], (u_end, u_t), tol,
                      t_eval=np.unique(right_t)[::-1])
    right_y = right.unscaled()[:, 0][::-1]  # ascending in u, starts at u_t
    right_y = right_y * (left[-1] / right_y[0])
    phi_half = np.concatenate([left[:-1], right_y[1:][: outer.size]])
    sign = 1.0 if level.parity is Parity.EVEN else -1.0
    u = np.concatenate([-us[:0:-1], us])
    phi = np.concatenate([sign * phi_half[:0:-1], phi_half])
    from scipy.integrate import simpson
    phi = phi / math.sqrt(simpson(phi ** 2, x=u))
    ref = phi[np.argmax(np.abs(phi) * (u >= 0))]
    return u, phi * np.sign(ref)
