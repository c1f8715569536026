"""Adaptive quadrature on finite intervals."""

from __future__ import annotations

import warnings
from typing import Callable

from scipy import integrate

from xp2.errors import AccuracyError


def quad(f: Callable[[float], float], lo: float, hi: float, tol: float = 1e-12,
         limit: int = 200) -> float:
    """Integral of ``f`` over ``[lo, hi]`` to relative accuracy ``tol``.

    Globally adaptive Gauss-Kronrod (21-point) bisection from QUADPACK.
    Integrable endpoint singularities must be removed by the caller through a
    change of variables; nothing here special-cases them.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    with warnings.catch_warnings():
        warnings.simplefilter("error", integrate.IntegrationWarning)
        try:
            value, _ = integrate.quad(f, lo, hi, epsabs=0.0, epsrel=tol, limit=limit)
        except integrate.IntegrationWarning as exc:
            raise AccuracyError(f"quadrature did not reach rtol={tol:g}: {exc}") from None
    return float(value)
