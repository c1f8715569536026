"""Bracketed root finding (Brent's method), scalar and vectorized."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from xp2.errors import BracketError, EvaluationError

EPS = np.finfo(float).eps


@dataclass(frozen=True)
class Bracket:
    lo: float
    hi: float

    def __post_init__(self):
        if not self.lo < self.hi:
            raise BracketError(f"empty bracket [{self.lo}, {self.hi}]")


def _checked(f, x):
    fx = f(x)
    if not math.isfinite(fx):
        raise EvaluationError(f"non-finite function value {fx!r} at {x!r}")
    return fx


def find_root(f: Callable[[float], float], b: Bracket, tol: float = 1e-12,
              maxiter: int = 200) -> float:
    """Zero of ``f`` inside ``b`` by Brent's method.

    The returned point is within ``tol`` of a sign change of ``f``.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    a, c = float(b.lo), float(b.hi)
    fa, fc = _checked(f, a), _checked(f, c)
    if fa == 0.0:
        return a
    if fc == 0.0:
        return c
    if (fa > 0) == (fc > 0):
        raise BracketError(f"no sign change on [{a}, {c}]: f={fa:g}, {fc:g}")

    # b_ is the best estimate, a is the previous iterate, c keeps the sign change
    b_, fb = c, fc
    c, fc = a, fa
    d = e = b_ - a
    for _ in range(maxiter):
        if (fb > 0) == (fc > 0):
            c, fc = a, fa
            d = e = b_ - a
        if abs(fc) < abs(fb):
            a, fa = b_, fb
            b_, fb = c, fc
            c, fc = a, fa
        tol1 = 2.0 * EPS * abs(b_) + 0.5 * tol
        xm = 0.5 * (c - b_)
        if abs(xm) <= tol1 or fb == 0.0:
            return b_
        if abs(e) >= tol1 and abs(fa) > abs(fb):
            s = fb / fa
            if a == c:
                p = 2.0 * xm * s
                q = 1.0 - s
            else:
                q = fa / fc
                r = fb / fc
                p = s * (2.0 * xm * q * (q - r) - (b_ - a) * (r - 1.0))
                q = (q - 1.0) * (r - 1.0) * (s - 1.0)
            if p > 0:
                q = -q
            p = abs(p)
            if 2.0 * p < min(3.0 * xm * q - abs(tol1 * q), abs(e * q)):
                e, d = d, p / q
            else:
                d = e = xm
        else:
            d = e = xm
        a, fa = b_, fb
        b_ += d if abs(d) > tol1 else math.copysign(tol1, xm)
        fb = _checked(f, b_)
    raise EvaluationError(f"Brent iteration did not converge in {maxiter} steps")


def find_roots(f: Callable[[np.ndarray], np.ndarray], lo, hi, tol: float = 1e-12,
               maxiter: int = 200) -> np.ndarray:
    """Brent's method applied elementwise to many brackets at once.

    ``f`` maps an array of abscissae to an array of values of the same shape;
    element ``i`` of the result is a zero of the ``i``-th scalar problem on
    ``[lo[i], hi[i]]``. One call to ``f`` advances every bracket, which is what
    makes this worthwhile when ``f`` is an expensive vectorized shot.
    """
    a = np.array(lo, dtype=float, copy=True)
    b = np.array(hi, dtype=float, copy=True)
    if a.shape != b.shape:
        raise ValueError("lo and hi must have the same shape")
    if np.any(~(a < b)):
        raise BracketError("every bracket needs lo < hi")
    fa, fb = np.asarray(f(a), float), np.asarray(f(b), float)
    if not (np.all(np.isfinite(fa)) and np.all(np.isfinite(fb))):
        raise EvaluationError("non-finite function value at a bracket end")
    if np.any((fa != 0) & (fb != 0) & ((fa > 0) == (fb > 0))):
        raise BracketError("no sign change in at least one bracket")

    c, fc = a.copy(), fa.copy()
    d = b - a
    e = d.copy()
    root = np.where(fa == 0.0, a, b)
    done = (fb == 0.0) | (fa == 0.0)

    for _ in range(maxiter):
        same = (fb > 0) == (fc > 0)
        c = np.where(same, a, c)
        fc = np.where(same, fa, fc)
        d = np.where(same, b - a, d)
        e = np.where(same, b - a, e)

        swap = np.abs(fc) < np.abs(fb)
        a = np.where(swap, b, a)
        fa = np.where(swap, fb, fa)
        b = np.where(swap, c, b)
        fb = np.where(swap, fc, fb)
        c = np.where(swap, a, c)
        fc = np.where(swap, fa, fc)

        tol1 = 2.0 * EPS * np.abs(b) + 0.5 * tol
        xm = 0.5 * (c - b)
        newly = ~done & ((np.abs(xm) <= tol1) | (fb == 0.0))
        root[newly] = b[newly]
        done |= newly
        if np.all(done):
            return root

        with np.errstate(divide="ignore", invalid="ignore"):
            s = fb / fa
            secant = a == c
            q_ = fa / fc
            r_ = fb / fc
            p = np.where(secant, 2.0 * xm * s,
                         s * (2.0 * xm * q_ * (q_ - r_) - (b - a) * (r_ - 1.0)))
            q = np.where(secant, 1.0 - s, (q_ - 1.0) * (r_ - 1.0) * (s - 1.0))
        q = np.where(p > 0, -q, q)
        p = np.abs(p)
        try_interp = (np.abs(e) >= tol1) & (np.abs(fa) > np.abs(fb))
        with np.errstate(divide="ignore", invalid="ignore"):
            accept = try_interp & (2.0 * p < np.minimum(3.0 * xm * q - np.abs(tol1 * q),
                                                        np.abs(e * q)))
            step = np.where(accept, p / q, xm)
        e = np.where(accept, d, xm)
        d = step

        a = np.where(done, a, b)
        fa = np.where(done, fa, fb)
        move = np.where(np.abs(d) > tol1, d, np.copysign(tol1, xm))
        b = np.where(done, b, b + move)
        new = np.asarray(f(b), float)
        if not np.all(np.isfinite(new[~done])):
            raise EvaluationError("non-finite function value during refinement")
        fb = np.where(done, fb, new)
    raise EvaluationError(f"vectorized Brent did not converge in {maxiter} steps")
