"""Numerical kernels: root finding, quadrature, ODE integration, eigensolvers."""

from xp2.numerics.eigen import SymTridiag, dense_sym_eigen, sym_eigen
from xp2.numerics.ode import OdeSolution, OdeSystem, ode_solve
from xp2.numerics.quadrature import quad
from xp2.numerics.roots import Bracket, find_root, find_roots

__all__ = [
    "Bracket", "OdeSolution", "OdeSystem", "SymTridiag", "dense_sym_eigen", "find_root",
    "find_roots", "ode_solve", "quad", "sym_eigen",
]
