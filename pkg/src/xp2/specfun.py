"""Complete elliptic integrals and the Jacobi function sn.

Parameter convention
--------------------
Everything here uses the *parameter* ``m`` (not the modulus ``k = sqrt(m)``)::

    K(m) = int_0^{pi/2} dtheta / sqrt(1 - m sin^2 theta)

The model needs negative parameters, ``m = -E^2/a^4``, for which
``1 - m sin^2`` becomes ``1 + (E^2/a^4) sin^2``. Passing a modulus where a
parameter is expected gives wrong answers silently, so be careful at call
sites.
"""

from __future__ import annotations

import math

import numpy as np

from xp2.errors import DomainError

_RF_TOL = 3e-3  # Carlson's r = 1e-16 gives (3r)^(1/6)
_RD_TOL = 1.5e-3


def carlson_rf(x: float, y: float, z: float) -> float:
    """Carlson's symmetric integral R_F(x, y, z); at most one argument may be zero."""
    if min(x, y, z) < 0 or (x == 0) + (y == 0) + (z == 0) > 1:
        raise DomainError("R_F needs non-negative arguments with at most one zero")
    x0, y0 = x, y
    a0 = (x + y + z) / 3.0
    q = max(abs(a0 - x), abs(a0 - y), abs(a0 - z)) / _RF_TOL
    a = a0
    fourn = 1.0
    while q >= fourn * abs(a):
        sx, sy, sz = math.sqrt(x), math.sqrt(y), math.sqrt(z)
        lam = sx * sy + sx * sz + sy * sz
        x, y, z = (x + lam) / 4, (y + lam) / 4, (z + lam) / 4
        a = (a + lam) / 4
        fourn *= 4.0
    X = (a0 - x0) / (fourn * a)
    Y = (a0 - y0) / (fourn * a)
    Z = -(X + Y)
    e2 = X * Y - Z * Z
    e3 = X * Y * Z
    return (1 - e2 / 10 + e3 / 14 + e2 * e2 / 24 - 3 * e2 * e3 / 44) / math.sqrt(a)


def carlson_rd(x: float, y: float, z: float) -> float:
    """Carlson's R_D(x, y, z) = R_J(x, y, z, z); ``z`` > 0 and x + y > 0."""
    if min(x, y) < 0 or z <= 0 or x + y == 0:
        raise DomainError("R_D needs x, y >= 0 with x + y > 0 and z > 0")
    x0, y0 = x, y
    a0 = (x + y + 3 * z) / 5.0
    q = max(abs(a0 - x), abs(a0 - y), abs(a0 - z)) / _RD_TOL
    a = a0
    fourn = 1.0
    tail = 0.0
    while q >= fourn * abs(a):
        sx, sy, sz = math.sqrt(x), math.sqrt(y), math.sqrt(z)
        lam = sx * sy + sx * sz + sy * sz
        tail += 1.0 / (fourn * sz * (z + lam))
        x, y, z = (x + lam) / 4, (y + lam) / 4, (z + lam) / 4
        a = (a + lam) / 4
        fourn *= 4.0
    X = (a0 - x0) / (fourn * a)
    Y = (a0 - y0) / (fourn * a)
    Z = -(X + Y) / 3
    xy = X * Y
    z2 = Z * Z
    e2 = xy - 6 * z2
    e3 = (3 * xy - 8 * z2) * Z
    e4 = 3 * (xy - z2) * z2
    e5 = xy * z2 * Z
    series = (1 - 3 * e2 / 14 + e3 / 6 + 9 * e2 * e2 / 88 - 3 * e4 / 22
              - 9 * e2 * e3 / 52 + 3 * e5 / 26)
    return series / (fourn * a * math.sqrt(a)) + 3 * tail


def ellip_k(m: float) -> float:
    """Complete elliptic integral of the first kind K(m), m < 1."""
    if not m < 1:
        raise DomainError(f"K(m) diverges for m >= 1 (got m={m})")
    return carlson_rf(0.0, 1.0 - m, 1.0)


def ellip_e(m: float) -> float:
    """Complete elliptic integral of the second kind E(m), m <= 1."""
    if m > 1:
        raise DomainError(f"E(m) is complex for m > 1 (got m={m})")
    if m == 1:
        return 1.0
    y = 1.0 - m
    return carlson_rf(0.0, y, 1.0) - m * carlson_rd(0.0, y, 1.0) / 3.0


_AGM_TOL = 4 * np.finfo(float).eps
_AGM_MAXITER = 64


def agm(a: float, b: float) -> float:
    """Arithmetic-geometric mean of two positive numbers."""
    for _ in range(_AGM_MAXITER):
        if abs(a - b) <= _AGM_TOL * a:
            break
        a, b = 0.5 * (a + b), math.sqrt(a * b)
    return a


def ellip_k_agm(m: float) -> float:
    """K(m) from the arithmetic-geometric mean; independent of the Carlson route."""
    if not m < 1:
        raise DomainError(f"K(m) diverges for m >= 1 (got m={m})")
    return math.pi / (2.0 * agm(1.0, math.sqrt(1.0 - m)))


def ellip_e_agm(m: float) -> float:
    """E(m) by the AGM with the Legendre c_n-sum (valid for negative m too)."""
    if not m < 1:
        raise DomainError(f"use ellip_e for m >= 1 (got m={m})")
    a, b = 1.0, math.sqrt(1.0 - m)
    total = 0.5 * m
    power = 0.5
    for _ in range(_AGM_MAXITER):
        if abs(a - b) <= _AGM_TOL * a:
            break
        c = 0.5 * (a - b)
        a, b = 0.5 * (a + b), math.sqrt(a * b)
        power *= 2.0
        total += power * c * c
    return math.pi / (2.0 * a) * (1.0 - total)


def _sn_cn_dn_agm(u, m):
    """sn, cn, dn for 0 < m < 1 by descending Landen (AGM) transformation."""
    a = [1.0]
    c = [math.sqrt(m)]
    b = math.sqrt(1.0 - m)
    while abs(c[-1]) > _AGM_TOL * a[-1] and len(a) < _AGM_MAXITER:
        an, bn = 0.5 * (a[-1] + b), math.sqrt(a[-1] * b)
        c.append(0.5 * (a[-1] - b))
        a.append(an)
        b = bn
    n = len(a) - 1
    phi = (2.0 ** n) * a[-1] * u
    for j in range(n, 0, -1):
        phi = 0.5 * (phi + np.arcsin(c[j] / a[j] * np.sin(phi)))
    sn, cn = np.sin(phi), np.cos(phi)
    # dn >= sqrt(1-m) > 0 on the real line; cn/cos(phi_1 - phi_0) is 0/0 at u = K
    dn = np.sqrt(1.0 - m * sn * sn)
    return sn, cn, dn


def jacobi_sn(u, m: float):
    """Jacobi elliptic function sn(u | m) for real ``u`` and m < 1.

    Negative parameters are mapped to the interval (0, 1) by the
    imaginary-modulus transformation

        sn(u | m) = sd(u sqrt(1-m) | mu) / sqrt(1-m),   mu = -m / (1-m),

    and ``sd = sn/dn`` there comes from the AGM. Accepts scalars or arrays.
    """
    if not m < 1:
        raise DomainError(f"sn(u|m) implemented for m < 1 only (got m={m})")
    u_arr = np.asarray(u, dtype=float)
    if m == 0.0:
        out = np.sin(u_arr)
    elif m > 0.0:
        quarter = ellip_k(m)
        ur = u_arr - 4 * quarter * np.round(u_arr / (4 * quarter))
        out = _sn_cn_dn_agm(ur, m)[0]
    else:
        root = math.sqrt(1.0 - m)
        mu = -m / (1.0 - m)
        v = u_arr * root
        quarter = ellip_k(mu)
        vr = v - 4 * quarter * np.round(v / (4 * quarter))
        sn, _, dn = _sn_cn_dn_agm(vr, mu)
        out = sn / (dn * root)
    return float(out) if np.ndim(out) == 0 else out
