"""Parity-aware shooting on the unified x-space equation.

All three orderings reduce to

    (x^2 + a^2) phi'' + drift * x * phi' + (E^2 + c - a^2 x^2) phi = 0

for an auxiliary function phi (phi = psi for form I, phi = (x^2+a^2)^(1/4) psi
for form II, phi = (x^2+a^2)^(1/2) psi for form III). Bound states decay as
exp(-a x), so the equation is integrated inward from a large x_max, where
both (phi, phi') = (1, -a) and any other start converge onto the decaying
branch, down to x = 0. There parity fixes the matching condition: phi'(0) = 0
for even states and phi(0) = 0 for odd ones.

Energies are handled in units with hbar = 1; other values of hbar are mapped
there by ``ModelParams.natural_units``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from xp2.errors import DomainError, SolverError
from xp2.model import EnergyPoint, Level, ModelParams, Parity, QuantForm, Spectrum
from xp2.numerics import OdeSystem, find_roots, ode_solve
from xp2.semiclassical import SemiclassicalConfig, level_spacing, semiclassical_levels


@dataclass(frozen=True)
class ShootingConfig:
    x_max: float | None = None  # defaults to 40/a
    ode_tol: float = 1e-11
    scan_step: float | None = None  # defaults to a quarter of the local level spacing
    root_tol: float = 1e-12
    refine_attempts: int = 3

    def resolved_x_max(self, a: float) -> float:
        return self.x_max if self.x_max is not None else 40.0 / a


def ode_rhs(form: QuantForm, params: ModelParams, e) -> OdeSystem:
    """First-order system for y = (phi, phi') as a function of x.

    ``e`` may be an array; the state then carries one column per energy.
    """
    a2 = params.a ** 2
    drift, c = form.drift, form.c
    k = np.asarray(e, dtype=float) ** 2 + c

    def rhs(x, y):
        phi, dphi = y[0], y[1]
        ddphi = -(drift * x * dphi + (k - a2 * x * x) * phi) / (x * x + a2)
        return np.array([dphi, ddphi])

    return OdeSystem(2, rhs, linear=True)


def _natural(params: ModelParams) -> tuple[ModelParams, float]:
    return params.natural_units(), params.hbar


def _endpoint(form, params, energies, cfg):
    """Normalized (phi(0), phi'(0)) for each energy, integrated inward."""
    energies = np.atleast_1d(np.asarray(energies, dtype=float))
    x_max = cfg.resolved_x_max(params.a)
    y0 = np.empty((2,) + energies.shape)
    y0[0] = 1.0
    y0[1] = -params.a
    sol = ode_solve(ode_rhs(form, params, energies), y0, (x_max, 0.0), cfg.ode_tol)
    end = sol.y_final
    norm = np.hypot(end[0], end[1])
    if not np.all(np.isfinite(norm)) or np.any(norm == 0):
        raise SolverError("shooting produced a non-finite or vanishing state")
    return end / norm


def _mismatch_from_end(end, parity):
    return end[1] if parity is Parity.EVEN else end[0]


def shoot(form: QuantForm, params: ModelParams, e, parity: Parity,
          cfg: ShootingConfig = ShootingConfig()):
    """Sign-preserving matching mismatch at x = 0.

    Returns phi'(0) (even) or phi(0) (odd) divided by |(phi(0), phi'(0))|.
    Zeros in ``e`` are eigenvalues of the given parity. ``e`` is in physical
    units; arrays are evaluated in one vectorized integration.
    """
    if np.any(np.asarray(e) < 0):
        raise DomainError("energy label must be >= 0")
    nat, hbar = _natural(params)
    end = _endpoint(QuantForm.parse(form), nat, np.asarray(e, dtype=float) / hbar, cfg)
    out = _mismatch_from_end(end, parity)
    return float(out[0]) if np.ndim(e) == 0 else out


def _scan_roots(energies, end):
    """Brackets of sign changes for both parities, merged in energy order."""
    found = []
    for parity, row in ((Parity.EVEN, end[1]), (Parity.ODD, end[0])):
        s = np.sign(row)
        idx = np.nonzero(s[:-1] * s[1:] < 0)[0]
        for i in idx:
            found.append((energies[i], energies[i + 1], parity))
    found.sort(key=lambda t: t[0])
    return found


def _alternates(found):
    expected = Parity.EVEN
    for _, _, parity in found:
        if parity is not expected:
            return False
        expected = Parity.ODD if expected is Parity.EVEN else Parity.EVEN
    return True


def locate_levels(n_max: int, mismatch_ends, params_nat: ModelParams, step: float | None,
                  attempts: int):
    """Scan upward in energy until ``n_max`` alternating-parity brackets are found.

    ``mismatch_ends(E_array)`` returns the normalized endpoint pairs
    (value, derivative) for the array of energies. Shared by the x-space and
    Mathieu shooting backends.
    """
    sc = semiclassical_levels(params_nat, SemiclassicalConfig(), n_max + 2)
    top = sc.levels[-1].e + 2 * level_spacing(params_nat, EnergyPoint.from_e(params_nat,
                                                                             sc.levels[-1].e))
    if step is None:
        step = 0.25 * level_spacing(params_nat, EnergyPoint.from_e(params_nat, top))
    for _ in range(attempts):
        grid = np.arange(0.0, top + step, step)
        grid[0] = 1e-9
        found = _scan_roots(grid, mismatch_ends(grid))
        if len(found) >= n_max and _alternates(found[:n_max]):
            return found[:n_max], step
        step /= 2
    raise SolverError(f"could not isolate {n_max} alternating-parity levels below E={top:.4g}; "
                      "try a finer scan step")


def refine_levels(found, mismatch_ends, tol):
    lo = np.array([f[0] for f in found])
    hi = np.array([f[1] for f in found])
    odd = np.array([f[2] is Parity.ODD for f in found])

    def f(e):
        end = mismatch_ends(e)
        return np.where(odd, end[0], end[1])

    roots = find_roots(f, lo, hi, tol)
    return roots, f(roots)


def spectrum_shooting(form: QuantForm, params: ModelParams, n_max: int = 10,
                      cfg: ShootingConfig = ShootingConfig(), n_min: int = 1) -> Spectrum:
    """Lowest ``n_max`` levels of one ordering by x-space shooting."""
    form = QuantForm.parse(form)
    if n_max < 1:
        raise DomainError("n_max must be >= 1")
    nat, hbar = _natural(params)

    def ends(e):
        return _endpoint(form, nat, e, cfg)

    found, step = locate_levels(n_max, ends, nat, cfg.scan_step, cfg.refine_attempts)
    roots, resid = refine_levels(found, ends, cfg.root_tol)
    levels = []
    for n, (e_nat, r, (_, _, parity)) in enumerate(zip(roots, resid, found), start=1):
        if n < n_min:
            continue
        e = float(e_nat) * hbar
        levels.append(Level(n, parity, e, params.level_value(e), float(r), "shooting"))
    return Spectrum(levels, {"backend": "shooting", "form": form.label, "a": params.a,
                             "hbar": params.hbar, "x_max": cfg.resolved_x_max(nat.a),
                             "ode_tol": cfg.ode_tol, "scan_step": step})


@dataclass
class Wavefunction:
    """Unit-normalized bound state sampled on a symmetric grid."""

    x: np.ndarray
    psi: np.ndarray
    n: int
    parity: Parity
    e: float
    form: QuantForm

    def norm(self) -> float:
        from scipy.integrate import simpson
        return float(simpson(self.psi ** 2, x=self.x))

    def sign_changes(self, rel_floor: float = 1e-8) -> int:
        """Interior sign changes, ignoring samples lost in the numerical tails."""
        keep = np.abs(self.psi) > rel_floor * np.max(np.abs(self.psi))
        s = np.sign(self.psi[keep])
        return int(np.count_nonzero(s[:-1] * s[1:] < 0))


def _psi_from_phi(form, x, phi, a):
    s2 = x * x + a * a
    if form is QuantForm.I:
        return phi
    if form is QuantForm.II:
        return phi / s2 ** 0.25
    return phi / np.sqrt(s2)


def wavefunction_shooting(form: QuantForm, params: ModelParams, level: Level,
                          cfg: ShootingConfig = ShootingConfig(), samples: int = 4001,
                          x_extent: float | None = None) -> Wavefunction:
    """Recover psi_n on [-x_extent, x_extent] from the inward integration at E_n.

    The auxiliary function is converted to psi, mirrored according to parity
    and normalized with Simpson's rule in physical units.
    """
    form = QuantForm.parse(form)
    nat, hbar = _natural(params)
    x_max = cfg.resolved_x_max(nat.a)
    extent = x_max if x_extent is None else min(x_extent / np.sqrt(hbar), x_max)
    half = (samples + 1) // 2
    xs = np.linspace(extent, 0.0, half)
    sol = ode_solve(ode_rhs(form, nat, level.e / hbar), [1.0, -nat.a], (x_max, 0.0),
                    cfg.ode_tol, t_eval=xs)
    phi = sol.y[:, 0] * np.exp(sol.log_scale - sol.log_scale[-1])
    psi_half = _psi_from_phi(form, xs, phi, nat.a)[::-1]
    x_half = xs[::-1]
    sign = 1.0 if level.parity is Parity.EVEN else -1.0
    x = np.concatenate([-x_half[:0:-1], x_half])
    psi = np.concatenate([sign * psi_half[:0:-1], psi_half])
    x_phys = x * np.sqrt(hbar)
    wf = Wavefunction(x_phys, psi, level.n, level.parity, level.e, form)
    scale = np.sqrt(wf.norm())
    # fix the overall sign so psi is positive just right of the origin region
    ref = psi[np.argmax(np.abs(psi) * (x >= 0))]
    wf.psi = psi / scale * np.sign(ref)
    return wf
