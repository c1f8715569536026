"""Explicit Runge-Kutta integration: Dormand-Prince 5(4) and fixed-step RK4.

The state has shape ``(dimension, *batch)``. Every column of the batch is an
independent copy of the system (for example one shooting energy per column);
all columns share one step-size sequence, controlled by the worst column.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from xp2.errors import StepSizeError
from xp2.numerics.roots import Bracket, find_root

# Dormand-Prince tableau
C = (0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0)
A2 = (1 / 5,)
A3 = (3 / 40, 9 / 40)
A4 = (44 / 45, -56 / 15, 32 / 9)
A5 = (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729)
A6 = (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656)
B = (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84)
# fifth-order minus embedded fourth-order weights
E = (71 / 57600, 0.0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40)

# quartic continuous extension (Hairer, Norsett & Wanner)
P = np.array([
    [1, -8048581381 / 2820520608, 8663915743 / 2820520608, -12715105075 / 11282082432],
    [0, 0, 0, 0],
    [0, 131558114200 / 32700410799, -68118460800 / 10900136933, 87487479700 / 32700410799],
    [0, -1754552775 / 470086768, 14199869525 / 1410260304, -10690763975 / 1880347072],
    [0, 127303824393 / 49829197408, -318862633887 / 49829197408, 701980252875 / 199316789632],
    [0, -282668133 / 205662961, 2019193451 / 616988883, -1453857185 / 822651844],
    [0, 40617522 / 29380423, -110615467 / 29380423, 69997945 / 29380423],
])

SAFETY = 0.9
MIN_FACTOR = 0.2
MAX_FACTOR = 10.0
BETA = 0.04  # PI controller memory
ALPHA = 0.2 - 0.75 * BETA

RESCALE_ABOVE = 1e100


@dataclass(frozen=True)
class OdeSystem:
    """First-order system ``y' = rhs(t, y)``.

    ``linear`` marks a homogeneous linear system. Only those may be
    renormalized during integration, since any multiple of a solution is
    again a solution.
    """

    dimension: int
    rhs: Callable[[float, np.ndarray], np.ndarray]
    linear: bool = False

    def __post_init__(self):
        if self.dimension < 1:
            raise ValueError("dimension must be positive")


@dataclass
class OdeSolution:
    """Samples of an integrated trajectory.

    For renormalized linear systems the true state at sample ``i`` is
    ``y[i] * exp(log_scale[i])``.
    """

    t: np.ndarray
    y: np.ndarray
    log_scale: np.ndarray
    t_events: list = field(default_factory=list)
    y_events: list = field(default_factory=list)
    nsteps: int = 0
    nfev: int = 0

    @property
    def t_final(self) -> float:
        return float(self.t[-1])

    @property
    def y_final(self) -> np.ndarray:
        return self.y[-1]

    def unscaled(self) -> np.ndarray:
        return self.y * np.exp(self.log_scale)[:, None]


def _rms(err, scale):
    # RMS over the state components, max over batch columns
    r = np.sqrt(np.mean((err / scale) ** 2, axis=0))
    return float(np.max(r))


def _initial_step(f, t0, y0, f0, direction, rtol, atol, span):
    scale = atol + np.abs(y0) * rtol
    d0 = _rms(y0, scale)
    d1 = _rms(f0, scale)
    h0 = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
    h0 = min(h0, span)
    y1 = y0 + direction * h0 * f0
    f1 = f(t0 + direction * h0, y1)
    d2 = _rms(f1 - f0, scale) / h0
    if d1 <= 1e-15 and d2 <= 1e-15:
        h1 = max(1e-6, h0 * 1e-3)
    else:
        h1 = (0.01 / max(d1, d2)) ** (1 / 5)
    return min(100 * h0, h1, span)


class _Events:
    """Sign-change detection of a scalar event function on each step."""

    def __init__(self, g, direction, terminal):
        self.g = g
        self.direction = direction
        self.terminal = terminal
        self.last = None

    def check(self, t_old, t_new, y_new, interp, tol):
        g_new = float(self.g(t_new, y_new))
        g_old, self.last = self.last, g_new
        if g_old is None or g_old == g_new:
            return None
        crossing = (g_old < 0 <= g_new) if self.direction > 0 else \
            (g_old > 0 >= g_new) if self.direction < 0 else (g_old * g_new <= 0 and g_old != 0)
        if not crossing:
            return None
        lo, hi = sorted((t_old, t_new))

        def g_of_t(t):
            return float(self.g(t, interp(t)))

        if g_of_t(lo) == 0.0:
            return lo
        if g_of_t(hi) == 0.0:
            return hi
        return find_root(g_of_t, Bracket(lo, hi), tol=tol)


def ode_solve(sys: OdeSystem, y0, t_span: Sequence[float], tol: float = 1e-10, *,
              atol: float | None = None, t_eval=None, method: str = "dopri5",
              first_step: float | None = None, max_step: float = math.inf,
              rk4_step: float | None = None, event=None, event_direction: int = 0,
              terminal: bool = False, max_steps: int = 2_000_000) -> OdeSolution:
    """Integrate ``sys`` from ``t_span[0]`` to ``t_span[1]``.

    ``tol`` is the relative tolerance (and absolute, unless ``atol`` is given).
    With ``t_eval`` the solution is returned at those times through the
    continuous extension; otherwise at every accepted step. ``event`` is a
    scalar function ``g(t, y)``; its zeros are located on the dense output and
    reported in ``t_events``. Integration backward in time is allowed.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    t0, t1 = float(t_span[0]), float(t_span[1])
    y = np.array(y0, dtype=float)
    if y.shape[0] != sys.dimension:
        raise ValueError(f"initial state has leading size {y.shape[0]}, expected {sys.dimension}")
    if method == "rk4":
        return _rk4(sys, y, t0, t1, rk4_step, t_eval)
    if method != "dopri5":
        raise ValueError(f"unknown method {method!r}")
    rtol = tol
    atol = tol if atol is None else atol
    direction = 1.0 if t1 >= t0 else -1.0
    span = abs(t1 - t0)
    f = sys.rhs

    batch = y.shape[1:]
    log_scale = np.zeros(batch)
    if t_eval is not None:
        t_eval = np.asarray(t_eval, dtype=float)
        if np.any(np.diff(t_eval) * direction < 0):
            raise ValueError("t_eval must be ordered along the integration direction")
        out_t, out_y, out_s = [], [], []
        next_eval = 0
        while next_eval < len(t_eval) and t_eval[next_eval] == t0:
            out_t.append(t0)
            out_y.append(y.copy())
            out_s.append(log_scale.copy())
            next_eval += 1
    else:
        out_t, out_y, out_s = [t0], [y.copy()], [log_scale.copy()]

    events = _Events(event, event_direction, terminal) if event is not None else None
    if events is not None:
        events.last = float(event(t0, y))
    t_events, y_events = [], []

    k1 = f(t0, y)
    nfev = 1
    if span == 0.0:
        return OdeSolution(np.array(out_t), np.array(out_y), np.array(out_s), nfev=nfev)
    h = first_step if first_step is not None else _initial_step(f, t0, y, k1, direction,
                                                                  rtol, atol, span)
    nfev += 1
    h = min(h, max_step)
    err_old = 1e-4
    t = t0
    nsteps = 0
    stop = False
    while not stop:
        if nsteps >= max_steps:
            raise StepSizeError(f"exceeded {max_steps} steps at t={t}")
        min_h = 16 * np.spacing(abs(t) + 1.0)
        rejected = False
        while True:
            if h < min_h:
                raise StepSizeError(f"step size underflow at t={t} (h={h:.3e})")
            last = (t1 - t) * direction <= h
            hs = (t1 - t) if last else direction * h
            k2 = f(t + C[1] * hs, y + hs * (A2[0] * k1))
            k3 = f(t + C[2] * hs, y + hs * (A3[0] * k1 + A3[1] * k2))
            k4 = f(t + C[3] * hs, y + hs * (A4[0] * k1 + A4[1] * k2 + A4[2] * k3))
            k5 = f(t + C[4] * hs, y + hs * (A5[0] * k1 + A5[1] * k2 + A5[2] * k3 + A5[3] * k4))
            k6 = f(t + hs, y + hs * (A6[0] * k1 + A6[1] * k2 + A6[2] * k3 + A6[3] * k4
                                      + A6[4] * k5))
            y_new = y + hs * (B[0] * k1 + B[2] * k3 + B[3] * k4 + B[4] * k5 + B[5] * k6)
            t_new = t1 if last else t + hs
            k7 = f(t_new, y_new)
            nfev += 6
            err_vec = hs * (E[0] * k1 + E[2] * k3 + E[3] * k4 + E[4] * k5 + E[5] * k6
                            + E[6] * k7)
            scale = atol + rtol * np.maximum(np.abs(y), np.abs(y_new))
            err = _rms(err_vec, scale)
            if not math.isfinite(err):
                h *= MIN_FACTOR
                rejected = True
                continue
            if err <= 1.0:
                if err == 0.0:
                    factor = MAX_FACTOR
                else:
                    factor = SAFETY * err ** -ALPHA * err_old ** BETA
                    factor = min(MAX_FACTOR, max(MIN_FACTOR, factor))
                if rejected:
                    factor = min(1.0, factor)
                err_old = max(err, 1e-4)
                break
            h *= max(MIN_FACTOR, SAFETY * err ** -ALPHA)
            rejected = True

        nsteps += 1
        ks = (k1, k2, k3, k4, k5, k6, k7)

        def interp(tq, t=t, y=y, hs=hs, ks=ks):
            theta = (tq - t) / hs
            q = P @ np.array([theta, theta ** 2, theta ** 3, theta ** 4])
            acc = ks[0] * q[0]
            for j in range(2, 7):
                acc = acc + ks[j] * q[j]
            return y + hs * acc

        if events is not None:
            te = events.check(t, t_new, y_new, interp, tol=max(1e-14, 1e-3 * tol) * max(1.0, abs(t_new)))
            if te is not None:
                ye = interp(te)
                t_events.append(te)
                y_events.append(ye * np.exp(log_scale))
                if events.terminal:
                    t_new, y_new, stop = te, ye, True
                    k7 = f(t_new, y_new)

        if t_eval is not None:
            while next_eval < len(t_eval) and (t_eval[next_eval] - t_new) * direction <= 0:
                te_ = t_eval[next_eval]
                out_t.append(te_)
                out_y.append(y_new.copy() if te_ == t_new else interp(te_))
                out_s.append(log_scale.copy())
                next_eval += 1
        else:
            out_t.append(t_new)
            out_y.append(y_new.copy())
            out_s.append(log_scale.copy())

        t, y, k1 = t_new, y_new, k7
        if sys.linear:
            mag = np.max(np.abs(y), axis=0)
            big = mag > RESCALE_ABOVE
            if np.any(big):
                factor_ = np.where(big, mag, 1.0)
                y = y / factor_
                k1 = k1 / factor_
                log_scale = log_scale + np.log(factor_)
        if t == t1:
            stop = True
        h = min(abs(hs) * factor, max_step)

    return OdeSolution(np.array(out_t), np.array(out_y), np.array(out_s), t_events, y_events,
                       nsteps, nfev)


def _rk4(sys, y, t0, t1, step, t_eval):
    """Classical fixed-step RK4; debugging backend without error control."""
    if step is None or step <= 0:
        raise ValueError("method='rk4' needs a positive rk4_step")
    n = max(1, math.ceil(abs(t1 - t0) / step))
    hs = (t1 - t0) / n
    ts = t0 + hs * np.arange(n + 1)
    f = sys.rhs
    ys = [y.copy()]
    for i in range(n):
        t = ts[i]
        k1 = f(t, y)
        k2 = f(t + hs / 2, y + hs / 2 * k1)
        k3 = f(t + hs / 2, y + hs / 2 * k2)
        k4 = f(t + hs, y + hs * k3)
        y = y + hs / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        ys.append(y.copy())
    ys = np.array(ys)
    if t_eval is not None:
        t_eval = np.asarray(t_eval, dtype=float)
        flat = ys.reshape(len(ts), -1)
        order = np.argsort(ts)
        cols = [np.interp(t_eval, ts[order], flat[order, j]) for j in range(flat.shape[1])]
        ys = np.stack(cols, axis=1).reshape((len(t_eval),) + y.shape)
        ts = t_eval
    return OdeSolution(ts, ys, np.zeros((len(ts),) + y.shape[1:]), nsteps=n, nfev=4 * n)
