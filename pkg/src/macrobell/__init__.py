"""Simulation of macroscopic polarization Bell states from parametric down-conversion."""

__version__ = "0.1.0"

from .gaussian import GaussianState, make_phi_state, make_singlet, make_state, make_triplet  # noqa: E402
from .stokes import StokesMoments, nrf, stokes_moments_gaussian, witness  # noqa: E402

__all__ = [
    "GaussianState", "StokesMoments", "make_phi_state", "make_singlet", "make_state",
    "make_triplet", "nrf", "stokes_moments_gaussian", "witness", "__version__",
]
