"""Symmetric eigensolvers returning the lowest part of the spectrum."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh_tridiagonal


@dataclass(frozen=True)
class SymTridiag:
    """Symmetric tridiagonal matrix stored by its diagonals."""

    diagonal: np.ndarray
    off_diagonal: np.ndarray

    def __post_init__(self):
        d = np.asarray(self.diagonal, dtype=float)
        e = np.asarray(self.off_diagonal, dtype=float)
        if d.ndim != 1 or e.ndim != 1 or len(e) != len(d) - 1:
            raise ValueError(f"off-diagonal must have length {len(d) - 1}, got {len(e)}")
        object.__setattr__(self, "diagonal", d)
        object.__setattr__(self, "off_diagonal", e)

    @property
    def size(self) -> int:
        return len(self.diagonal)

    def dense(self) -> np.ndarray:
        return (np.diag(self.diagonal) + np.diag(self.off_diagonal, 1)
                + np.diag(self.off_diagonal, -1))


def sym_eigen(m: SymTridiag, k: int, vectors: bool = False):
    """The ``k`` smallest eigenvalues of ``m`` in ascending order.

    Bisection on Sturm counts (LAPACK ``stebz``), with inverse iteration for
    the eigenvectors when ``vectors`` is set; vectors come back as columns.
    """
    if not 1 <= k <= m.size:
        raise ValueError(f"k={k} outside 1..{m.size}")
    if m.size == 1:
        w = m.diagonal.copy()
        return (w, np.ones((1, 1))) if vectors else w
    return eigh_tridiagonal(m.diagonal, m.off_diagonal, eigvals_only=not vectors,
                            select="i", select_range=(0, k - 1), lapack_driver="stebz")


def dense_sym_eigen(m, k: int, vectors: bool = False):
    """The ``k`` smallest eigenvalues of a dense symmetric (or Hermitian) matrix.

    Householder reduction to tridiagonal form followed by an implicit QL/QR
    sweep (LAPACK ``syevd``/``heevd``). The matrix is symmetrized first so
    round-off asymmetry from operator products cannot leak in.
    """
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError("matrix must be square")
    if not 1 <= k <= m.shape[0]:
        raise ValueError(f"k={k} outside 1..{m.shape[0]}")
    h = 0.5 * (m + m.conj().T)
    if vectors:
        w, v = np.linalg.eigh(h)
        return w[:k], v[:, :k]
    return np.linalg.eigvalsh(h)[:k]
