"""Truncated Fock-space construction of the four-mode Bell states.

Amplitudes are stored as a complex table ``amp[n_AH, n_AV, n_BH, n_BV]``.
The truncation keeps every component whose photon number per beam is at
most ``n_max``; that subspace is closed under polarization rotations and
phase plates, so every operator used here acts exactly on it. The only
approximation is the discarded norm, which is known in closed form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .gaussian import PolarizationRotation
from .stokes import StokesMoments, stokes_matrix

TAIL_TOL = 1e-12
N_MAX_LIMIT = 60

AXES = {"AH": 0, "AV": 1, "BH": 2, "BV": 3}


class TruncationError(ValueError):
    """The requested truncation discards more norm than allowed."""


@dataclass(frozen=True, eq=False)
class FockState:
    n_max: int
    amplitudes: np.ndarray
    tail_bound: float

    @property
    def norm(self) -> float:
        return float(np.sum(np.abs(self.amplitudes) ** 2))

    def amplitude(self, n_ah: int, n_av: int, n_bh: int, n_bv: int) -> complex:
        idx = (n_ah, n_av, n_bh, n_bv)
        if max(idx) > self.n_max:
            return 0j
        return complex(self.amplitudes[idx])


def pair_tail(gamma: float, n_max: int) -> float:
    """Probability that a beam of a two-pair state holds more than ``n_max`` photons.

    The beam total is a sum of two geometric variables with ratio
    x = tanh^2(gamma), so P(N) = (N + 1)(1 - x)^2 x^N.
    """
    x = math.tanh(gamma) ** 2
    k = n_max + 1
    return x**k * ((k + 1) * (1 - x) + x)


def choose_n_max(gamma: float, tol: float = TAIL_TOL) -> int:
    for n in range(1, N_MAX_LIMIT + 1):
        if pair_tail(gamma, n) < tol:
            return n
    raise TruncationError(f"gain {gamma} needs n_max > {N_MAX_LIMIT} for tail < {tol}")


def _build(gamma: float, n_max: int | None, tol: float, pairing: str, phase: complex) -> FockState:
    if not (math.isfinite(gamma) and gamma >= 0):
        raise ValueError("gain must be finite and non-negative")
    if n_max is None:
        n_max = choose_n_max(gamma, tol)
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    tail = pair_tail(gamma, n_max)
    if tail > tol:
        raise TruncationError(f"truncation tail {tail:.3e} exceeds {tol:.1e} at n_max={n_max}")
    t = math.tanh(gamma)
    c2 = math.cosh(gamma) ** 2
    amp = np.zeros((n_max + 1,) * 4, dtype=complex)
    for n in range(n_max + 1):
        for m in range(n_max + 1 - n):
            value = t ** (n + m) / c2 * phase**m
            if pairing == "cross":
                amp[n, m, m, n] = value
            else:
                amp[n, m, n, m] = value
    return FockState(n_max, amp, tail)


def build_singlet(gamma: float, n_max: int | None = None, tol: float = TAIL_TOL) -> FockState:
    """amp(n, m, m, n) = (-1)^m tanh^(n+m) / cosh^2."""
    return _build(gamma, n_max, tol, "cross", -1.0)


def build_phi_state(gamma: float, phi: float, n_max: int | None = None,
                    tol: float = TAIL_TOL) -> FockState:
    """amp(n, m, n, m) = exp(i m phi) tanh^(n+m) / cosh^2."""
    return _build(gamma, n_max, tol, "parallel", np.exp(1j * phi))


def build_psi_plus(gamma: float, n_max: int | None = None, tol: float = TAIL_TOL) -> FockState:
    return _build(gamma, n_max, tol, "cross", 1.0)


def build_state(kind: str, gamma: float, n_max: int | None = None) -> FockState:
    if kind in ("singlet", "psi_minus"):
        return build_singlet(gamma, n_max)
    if kind == "psi_plus":
        return build_psi_plus(gamma, n_max)
    if kind == "phi_minus":
        return build_phi_state(gamma, np.pi, n_max)
    if kind == "phi_plus":
        return build_phi_state(gamma, 0.0, n_max)
    raise ValueError(f"unknown state kind {kind!r}")


def expansion_amplitude(gamma: float, n_ah: int, n_av: int, n_bh: int, n_bv: int) -> float:
    """Singlet amplitude from the combined N-photon expansion.

    Expands (a_H^+ b_V^+ - a_V^+ b_H^+)^N / N! |0> by the binomial theorem,
    independently of the product-of-two-Schmidt-decompositions form.
    """
    if n_ah != n_bv or n_av != n_bh:
        return 0.0
    n, m = n_ah, n_av
    total = n + m
    t = math.tanh(gamma)
    # (1/N!) C(N, m) (-1)^m (a_H^+ b_V^+)^n (a_V^+ b_H^+)^m |0> = (-1)^m |n, m, m, n>
    coeff = math.comb(total, m) * (-1) ** m / math.factorial(total)
    coeff *= math.factorial(n) * math.factorial(m)
    return t**total / math.cosh(gamma) ** 2 * coeff


# --- operators on the amplitude table ---------------------------------------

def _annihilate(psi: np.ndarray, axis: int) -> np.ndarray:
    n = psi.shape[axis]
    out = np.zeros_like(psi)
    src = [slice(None)] * 4
    dst = [slice(None)] * 4
    src[axis] = slice(1, n)
    dst[axis] = slice(0, n - 1)
    shape = [1] * 4
    shape[axis] = n - 1
    weights = np.sqrt(np.arange(1, n)).reshape(shape)
    out[tuple(dst)] = psi[tuple(src)] * weights
    return out


def _create(psi: np.ndarray, axis: int) -> np.ndarray:
    n = psi.shape[axis]
    out = np.zeros_like(psi)
    src = [slice(None)] * 4
    dst = [slice(None)] * 4
    src[axis] = slice(0, n - 1)
    dst[axis] = slice(1, n)
    shape = [1] * 4
    shape[axis] = n - 1
    weights = np.sqrt(np.arange(1, n)).reshape(shape)
    out[tuple(dst)] = psi[tuple(src)] * weights
    return out


def apply_quadratic(psi: np.ndarray, K: np.ndarray) -> np.ndarray:
    """(sum_ij K_ij a_i^dagger a_j) psi for a 4x4 coefficient matrix."""
    out = np.zeros_like(psi)
    for j in range(4):
        col = K[:, j]
        if not np.any(col):
            continue
        lowered = _annihilate(psi, j)
        for i in range(4):
            if K[i, j] != 0:
                out += K[i, j] * _create(lowered, i)
    return out


def stokes_moments_exact(state: FockState) -> StokesMoments:
    psi = state.amplitudes / math.sqrt(state.norm)
    means, variances = [], []
    for k in range(4):
        s_psi = apply_quadratic(psi, stokes_matrix(k))
        mean = np.vdot(psi, s_psi).real
        means.append(mean)
        if k:
            variances.append(np.vdot(s_psi, s_psi).real - mean**2)
    return StokesMoments(*means, *variances)


def photon_number_moments(state: FockState) -> tuple[np.ndarray, np.ndarray]:
    """Mean photon numbers and their 4x4 covariance matrix."""
    prob = np.abs(state.amplitudes) ** 2
    prob = prob / prob.sum()
    grid = np.indices(prob.shape).reshape(4, -1).astype(float)
    p = prob.reshape(-1)
    mean = grid @ p
    centered = grid - mean[:, None]
    cov = (centered * p) @ centered.T
    return mean, cov


def stokes_square_identity(state: FockState, beam: str) -> tuple[float, float]:
    """Return <S1^2 + S2^2 + S3^2> and <S0 (S0 + 2)> for one beam."""
    psi = state.amplitudes / math.sqrt(state.norm)
    lhs = 0.0
    for k in (1, 2, 3):
        s_psi = apply_quadratic(psi, stokes_matrix(k, beams=beam))
        lhs += np.vdot(s_psi, s_psi).real
    s0_psi = apply_quadratic(psi, stokes_matrix(0, beams=beam))
    rhs = np.vdot(s0_psi, s0_psi).real + 2 * np.vdot(psi, s0_psi).real
    return float(lhs), float(rhs)


def _block_matrix(U: np.ndarray, total: int) -> np.ndarray:
    """Induced unitary on the ``total``-photon states |k, total-k> of two modes.

    Uses R a_j^dagger R^dagger = sum_i U_ij a_i^dagger, the Schroedinger
    counterpart of the Heisenberg map a -> U a.
    """
    D = np.zeros((total + 1, total + 1), dtype=complex)
    for k in range(total + 1):
        # polynomial in x = a_H^dagger, with y = a_V^dagger filling the rest
        p1 = np.array([math.comb(k, j) * U[0, 0] ** j * U[1, 0] ** (k - j) for j in range(k + 1)])
        r = total - k
        p2 = np.array([math.comb(r, j) * U[0, 1] ** j * U[1, 1] ** (r - j) for j in range(r + 1)])
        poly = np.convolve(p1, p2)
        for kp in range(total + 1):
            norm = math.sqrt(math.factorial(kp) * math.factorial(total - kp)
                             / (math.factorial(k) * math.factorial(r)))
            D[kp, k] = poly[kp] * norm
    return D


def apply_rotation_fock(state: FockState, rot: PolarizationRotation) -> FockState:
    amp = state.amplitudes.copy()
    n_max = state.n_max
    for beam, axes in (("A", (0, 1)), ("B", (2, 3))):
        if beam not in rot.beams:
            continue
        # move the beam's two axes to the front
        work = np.moveaxis(amp, axes, (0, 1))
        out = np.zeros_like(work)
        for total in range(n_max + 1):
            D = _block_matrix(rot.U, total)
            ks = np.arange(total + 1)
            block = work[ks, total - ks]
            out[ks, total - ks] = np.tensordot(D, block, axes=(1, 0))
        amp = np.moveaxis(out, (0, 1), axes)
    return FockState(n_max, amp, state.tail_bound)


def apply_mode_phases_fock(state: FockState, phases) -> FockState:
    phases = np.asarray(list(phases), dtype=float)
    if phases.size != 4:
        raise ValueError("expected 4 phases")
    n = np.arange(state.n_max + 1)
    amp = state.amplitudes
    for axis, phi in enumerate(phases):
        shape = [1] * 4
        shape[axis] = -1
        amp = amp * np.exp(1j * phi * n).reshape(shape)
    return FockState(state.n_max, amp, state.tail_bound)


# --- Schmidt spectrum -------------------------------------------------------

@dataclass(frozen=True)
class SchmidtSpectrum:
    gamma: float
    lam: np.ndarray

    @property
    def schmidt_number(self) -> float:
        lam = self.lam / self.lam.sum()
        return float(1.0 / np.sum(lam**2))

    @property
    def captured(self) -> float:
        return float(self.lam.sum())


def schmidt_spectrum(gamma: float, n_max: int) -> SchmidtSpectrum:
    """lambda_n = tanh^(2n) / cosh^2 for n = 0..n_max."""
    if gamma < 0:
        raise ValueError("gain must be non-negative")
    n = np.arange(n_max + 1)
    lam = np.tanh(gamma) ** (2 * n) / np.cosh(gamma) ** 2
    return SchmidtSpectrum(gamma, lam)
