"""
Dimple Trap - Processors
Fizik çözücüleri
"""

from .bound_spectrum import EigenState, Spectrum, eigenfunction, solve_level, solve_spectrum
from .jwkb import compare_spectra, jwkb_level, n_prime
from .sudden_transitions import probability_sweep, transition_amplitude
from .scattering import parabolic_amplitudes, sweep
from .delta_limit import dimple_to_delta_convergence, limit_study

__all__ = [
    "EigenState",
    "Spectrum",
    "eigenfunction",
    "solve_level",
    "solve_spectrum",
    "compare_spectra",
    "jwkb_level",
    "n_prime",
    "probability_sweep",
    "transition_amplitude",
    "parabolic_amplitudes",
    "sweep",
    "dimple_to_delta_convergence",
    "limit_study",
]
