"""Quantum spectra of the three orderings: x-space shooting and oscillator-basis matrices."""

from xp2.quantum.oscillator import (
    OscillatorBasisConfig,
    build_oscillator_matrices,
    hermite_functions,
    matrix_hamiltonian,
    shifted_identity_check,
    spectrum_matrix,
    wavefunction_matrix,
)
from xp2.quantum.shooting import (
    ShootingConfig,
    Wavefunction,
    ode_rhs,
    shoot,
    spectrum_shooting,
    wavefunction_shooting,
)

__all__ = [
    "OscillatorBasisConfig", "ShootingConfig", "Wavefunction", "build_oscillator_matrices",
    "hermite_functions", "matrix_hamiltonian", "ode_rhs", "shifted_identity_check", "shoot",
    "spectrum_matrix", "spectrum_shooting", "wavefunction_matrix", "wavefunction_shooting",
]
