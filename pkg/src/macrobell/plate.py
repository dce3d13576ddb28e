"""Dichroic quartz plate and Mach-Zehnder phase scan.

Crystal quartz dispersion uses the two-pole Sellmeier fit of G. Ghosh,
Opt. Commun. 163, 95 (1999), wavelength in micrometres:

    n^2 = A + B l^2 / (l^2 - C) + D l^2 / (l^2 - E)

    ordinary:      A=1.28604141 B=1.07044083 C=1.00585997e-2 D=1.10202242 E=100
    extraordinary: A=1.28851804 B=1.09509924 C=1.02101864e-2 D=1.15662475 E=100
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .gaussian import apply_mode_phases, make_phi_state, make_triplet
from .stokes import nrf, stokes_moments_gaussian, witness

SPEED_OF_LIGHT = 299_792_458.0
LAMBDA_A = 635e-9
LAMBDA_B = 805e-9
WAVELENGTH_RANGE = (0.4e-6, 1.1e-6)
COHERENCE_TIME = 5e-12

SELLMEIER = {
    "ghosh1999": {
        "ordinary": (1.28604141, 1.07044083, 1.00585997e-2, 1.10202242, 100.0),
        "extraordinary": (1.28851804, 1.09509924, 1.02101864e-2, 1.15662475, 100.0),
    },
}


class WavelengthOutOfRange(ValueError):
    pass


@dataclass(frozen=True)
class PlateSpec:
    thickness: float = 170e-6
    material: str = "ghosh1999"
    lambda_a: float = LAMBDA_A
    lambda_b: float = LAMBDA_B

    def __post_init__(self):
        if self.thickness < 0:
            raise ValueError("plate thickness must be non-negative")
        if self.material not in SELLMEIER:
            raise ValueError(f"unknown dispersion model {self.material!r}")


def refractive_index(wavelength: float, ray: str, material: str = "ghosh1999") -> float:
    lo, hi = WAVELENGTH_RANGE
    if not lo <= wavelength <= hi:
        raise WavelengthOutOfRange(
            f"wavelength {wavelength * 1e9:.1f} nm outside {lo * 1e9:.0f}-{hi * 1e9:.0f} nm")
    try:
        a, b, c, d, e = SELLMEIER[material][ray]
    except KeyError:
        raise ValueError(f"unknown ray {ray!r} or material {material!r}") from None
    l2 = (wavelength * 1e6) ** 2
    return math.sqrt(a + b * l2 / (l2 - c) + d * l2 / (l2 - e))


def plate_mode_phases(spec: PlateSpec) -> np.ndarray:
    """Phases k d for (AH, AV, BH, BV); H travels as the ordinary ray."""
    out = []
    for lam in (spec.lambda_a, spec.lambda_b):
        for ray in ("ordinary", "extraordinary"):
            out.append(2 * math.pi / lam * refractive_index(lam, ray, spec.material) * spec.thickness)
    return np.array(out)


def oe_delay(spec: PlateSpec, wavelength: float) -> float:
    """|phi_o - phi_e| in radians for one wavelength."""
    n_o = refractive_index(wavelength, "ordinary", spec.material)
    n_e = refractive_index(wavelength, "extraordinary", spec.material)
    return abs(2 * math.pi / wavelength * (n_o - n_e) * spec.thickness)


def residual_phase(spec: PlateSpec) -> float:
    """Deviation of the delay difference between the two wavelengths from pi, wrapped to (-pi, pi]."""
    diff = oe_delay(spec, spec.lambda_a) - oe_delay(spec, spec.lambda_b)
    return float(np.angle(np.exp(1j * (diff - math.pi))))


def converted_witness_bound(residual: float, gamma: float) -> float:
    """Witness value of a singlet whose (AV, BH) pairing carries an extra phase ``residual``.

    The residual rotates one beam's Stokes vector about the S1 axis, leaving
    S1 noiseless and giving Var(S2) = Var(S3) = 2 (1 - cos) * 2 N0 (N0 + 1).
    """
    n0 = math.sinh(gamma) ** 2
    return 2.0 * (1.0 - math.cos(residual)) * (1.0 + n0)


def convert_psi_plus(gamma: float, spec: PlateSpec | None = None):
    """Send the Psi-plus state through the plate; returns the output state."""
    spec = spec or PlateSpec()
    return apply_mode_phases(make_triplet("psi_plus", gamma), plate_mode_phases(spec))


def converted_witness(gamma: float, spec: PlateSpec | None = None) -> float:
    return witness(stokes_moments_gaussian(convert_psi_plus(gamma, spec))).lhs


def coherence_visibility(path_offset: float, coherence_time: float = COHERENCE_TIME) -> float:
    """Gaussian interference visibility exp(-(dL / (c tau))^2)."""
    return math.exp(-((path_offset / (SPEED_OF_LIGHT * coherence_time)) ** 2))


def nrf_s2(gamma: float, phi: float) -> float:
    return nrf(stokes_moments_gaussian(make_phi_state(gamma, phi)), 2)


@dataclass(frozen=True)
class PhaseScan:
    phi: np.ndarray
    nrf: np.ndarray
    offset: float
    amplitude: float
    path_offsets: np.ndarray
    envelope_min: np.ndarray
    envelope_max: np.ndarray


def mz_phase_scan(gamma: float, phi_grid, path_offsets=(),
                  coherence_time: float = COHERENCE_TIME) -> PhaseScan:
    """NRF of S2 versus interferometer phase, plus the min/max envelope versus path offset.

    The envelope scales the phase-dependent part of the NRF by the pump
    coherence visibility.
    """
    phi = np.asarray(phi_grid, dtype=float)
    if phi.size == 0:
        raise ValueError("phase grid is empty")
    values = np.array([nrf_s2(gamma, p) for p in phi])
    top, bottom = nrf_s2(gamma, 0.0), nrf_s2(gamma, math.pi)
    offset = (top + bottom) / 2
    amplitude = (top - bottom) / 2
    dl = np.asarray(path_offsets, dtype=float)
    vis = np.array([coherence_visibility(x, coherence_time) for x in dl])
    return PhaseScan(phi, values, offset, amplitude, dl,
                     offset - vis * abs(amplitude), offset + vis * abs(amplitude))
