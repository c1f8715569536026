"""Harmonic-oscillator basis representation of the three orderings.

x and p are tridiagonal in the oscillator eigenbasis with length scale b:

    x = b (a + a^dag) / sqrt(2),    p = i (a^dag - a) / (sqrt(2) b).

Products are formed in a basis padded by a few extra states and then cut back
to N x N, so polynomial operators such as x^2 p^2 come out as exact
projections onto the first N states (a plain product of truncated matrices
is wrong in its last rows and creates spurious edge states). Functions like
sqrt(x^2 + a^2) come from the spectral decomposition of the X matrix, i.e. a
discrete-variable representation on the Gauss-Hermite points.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from xp2.errors import DomainError
from xp2.model import Level, ModelParams, Parity, QuantForm, Spectrum
from xp2.numerics import dense_sym_eigen

EDGE_FRACTION = 0.1
EDGE_WEIGHT_LIMIT = 1e-8


@dataclass(frozen=True)
class OscillatorBasisConfig:
    size: int = 400
    length_scale: float | None = None  # defaults to sqrt(a)
    pad: int = 8

    def __post_init__(self):
        if self.size < 2:
            raise DomainError("basis size must be at least 2")
        if self.length_scale is not None and self.length_scale <= 0:
            raise DomainError("length scale must be positive")

    def scale(self, a: float) -> float:
        return self.length_scale if self.length_scale is not None else math.sqrt(a)


def _ladder_xp(n: int, b: float):
    up = np.diag(np.sqrt(np.arange(1, n, dtype=float)), -1)  # a^dag
    down = up.T
    x = (b / math.sqrt(2.0)) * (down + up)
    p = (1j / (math.sqrt(2.0) * b)) * (up - down)
    return x.astype(complex), p


def build_oscillator_matrices(params: ModelParams, cfg: OscillatorBasisConfig = OscillatorBasisConfig()):
    """N x N matrices of x and p (hbar = 1); X is real symmetric, P imaginary Hermitian."""
    nat = params.natural_units()
    x, p = _ladder_xp(cfg.size, cfg.scale(nat.a))
    return x, p


def _matrix_function(x, f):
    w, u = np.linalg.eigh(x.real)
    return ((u * f(w)) @ u.T).astype(complex)


class _Padded:
    """Operator algebra in the padded basis, projected on demand."""

    def __init__(self, params: ModelParams, cfg: OscillatorBasisConfig):
        self.n = cfg.size
        self.a = params.a
        self.big = cfg.size + cfg.pad
        self.x, self.p = _ladder_xp(self.big, cfg.scale(params.a))
        self.eye = np.eye(self.big, dtype=complex)
        self.x2 = self.x @ self.x
        self.p2 = self.p @ self.p

    def cut(self, m):
        return m[: self.n, : self.n]

    def hamiltonian(self, form: QuantForm):
        a2 = self.a ** 2
        x2, p2, eye = self.x2, self.p2, self.eye
        if form is QuantForm.I:
            h = 0.5 * (x2 @ p2 + p2 @ x2) + a2 * (x2 + p2) + a2 * a2 * eye
        elif form is QuantForm.II:
            q = _matrix_function(self.x, lambda v: (v * v + a2) ** 0.25)
            m = q @ self.p @ q
            h = m @ m + a2 * (x2 + a2 * eye)
        else:
            s = _matrix_function(self.x, lambda v: np.sqrt(v * v + a2))
            h = s @ (p2 + a2 * eye) @ s
        return self.cut(h)

    def ladder_variant(self, sign: float, shift: float = -1.0):
        """0.5 (A A^dag + A^dag A) with A = (xp+px)/2 + i a (x + sign p) + shift a^2."""
        a = self.a
        x, p, eye = self.x, self.p, self.eye
        op = 0.5 * (x @ p + p @ x) + 1j * a * (x + sign * p) + shift * a * a * eye
        dag = op.conj().T
        return self.cut(0.5 * (op @ dag + dag @ op))


def _parity_of(vec) -> Parity:
    even = np.sum(np.abs(vec[0::2]) ** 2)
    odd = np.sum(np.abs(vec[1::2]) ** 2)
    return Parity.EVEN if even >= odd else Parity.ODD


def matrix_hamiltonian(form: QuantForm, params: ModelParams,
                       cfg: OscillatorBasisConfig = OscillatorBasisConfig()):
    """Hermitian N x N matrix of the chosen ordering in natural units (hbar = 1)."""
    nat = params.natural_units()
    return _Padded(nat, cfg).hamiltonian(QuantForm.parse(form))


def spectrum_matrix(form: QuantForm, params: ModelParams,
                    cfg: OscillatorBasisConfig = OscillatorBasisConfig(), n_max: int = 10,
                    n_min: int = 1, vectors: bool = False):
    """Lowest levels by diagonalizing the ordering in the oscillator basis.

    Eigenstates with noticeable weight on the top tenth of the basis, or with
    H_E < a^4, are truncation artifacts; they are reported with
    ``valid=False`` and do not receive a level number. With ``vectors`` the
    basis coefficients of the numbered levels are returned as well.
    """
    form = QuantForm.parse(form)
    if n_max > cfg.size // 4:
        raise DomainError(f"n_max={n_max} too large for basis size {cfg.size} (limit N/4)")
    nat = params.natural_units()
    h = _Padded(nat, cfg).hamiltonian(form)
    k = min(cfg.size, 2 * n_max + 16)
    w, v = dense_sym_eigen(h, k, vectors=True)
    edge = int(math.ceil(cfg.size * (1 - EDGE_FRACTION)))
    levels, coeffs, rejected = [], [], []
    n = 0
    floor = nat.a ** 4
    for value, vec in zip(w, v.T):
        weight = float(np.sum(np.abs(vec[edge:]) ** 2))
        if value < floor or weight > EDGE_WEIGHT_LIMIT:
            rejected.append(Level(0, _parity_of(vec), math.nan, float(value) * params.hbar ** 2,
                                  weight, "matrix", valid=False))
            continue
        n += 1
        if n > n_max:
            break
        if n < n_min:
            continue
        e = math.sqrt(value - floor) * params.hbar
        levels.append(Level(n, _parity_of(vec), e, params.level_value(e), weight, "matrix"))
        coeffs.append(vec)
    spec = Spectrum(levels, {"backend": "matrix", "form": form.label, "a": params.a,
                             "hbar": params.hbar, "basis_size": cfg.size,
                             "length_scale": cfg.scale(nat.a), "rejected": rejected})
    if vectors:
        return spec, np.array(coeffs).T
    return spec


def shifted_identity_check(params: ModelParams,
                           cfg: OscillatorBasisConfig = OscillatorBasisConfig(),
                           n_levels: int = 10) -> dict:
    """Compare 0.5(AA^dag + A^dag A) and its B-variant with H_1 + 3/4.

    A = D + ia(x + p) - a^2 and B = D + ia(x - p) - a^2 with D = (xp+px)/2.
    For each variant the result holds the low eigenvalue shifts, their largest
    deviation from 3/4 and the largest entry of H' - H_1 - 3/4 on the interior
    block (first N/2 states). ``max_deviation`` covers A and B.

    Expanding the products gives (D - a^2)^2 + a^2 (x + p)^2 for A, which is
    H_1 + 3/4, but (D - a^2)^2 + a^2 (x - p)^2 = H_1 + 3/4 - 4 a^2 D for B. The
    entry "B_plus" uses D + ia(x - p) + a^2, for which the identity does hold.
    """
    nat = params.natural_units()
    ops = _Padded(nat, cfg)
    h1 = ops.hamiltonian(QuantForm.I)
    w1 = dense_sym_eigen(h1, n_levels)
    interior = cfg.size // 2
    out = {}
    for name, sign, shift in (("A", 1.0, -1.0), ("B", -1.0, -1.0), ("B_plus", -1.0, 1.0)):
        hp = ops.ladder_variant(sign, shift)
        wp = dense_sym_eigen(hp, n_levels)
        diff = hp - h1 - 0.75 * np.eye(cfg.size)
        out[name] = {
            "shifts": wp - w1,
            "max_shift_error": float(np.max(np.abs(wp - w1 - 0.75))),
            "interior_norm": float(np.max(np.abs(diff[:interior, :interior]))),
        }
    out["max_deviation"] = max(out["A"]["max_shift_error"], out["B"]["max_shift_error"])
    return out


def hermite_functions(n_max: int, x, b: float):
    """Oscillator eigenfunctions 0..n_max-1 at ``x`` (rows), by stable recursion."""
    xi = np.asarray(x, dtype=float) / b
    out = np.empty((n_max, xi.size))
    out[0] = np.pi ** -0.25 * np.exp(-0.5 * xi * xi) / math.sqrt(b)
    if n_max > 1:
        out[1] = math.sqrt(2.0) * xi * out[0]
    for k in range(2, n_max):
        out[k] = math.sqrt(2.0 / k) * xi * out[k - 1] - math.sqrt((k - 1) / k) * out[k - 2]
    return out


def wavefunction_matrix(coeffs, params: ModelParams, cfg: OscillatorBasisConfig, x):
    """psi(x) for basis coefficient vectors (columns) from ``spectrum_matrix``."""
    nat = params.natural_units()
    hb = math.sqrt(params.hbar)
    basis = hermite_functions(cfg.size, np.asarray(x) / hb, cfg.scale(nat.a))
    psi = (basis.T @ coeffs) / math.sqrt(hb)
    return np.real_if_close(psi)
