"""Zero-mean Gaussian states of polarization-entangled squeezed vacuum.

A state is stored through its normally ordered second moments

    N[i, j] = <a_i^dagger a_j>,    M[i, j] = <a_i a_j>,

which is all that is needed for photon-number moments of a zero-mean
Gaussian state (Isserlis/Wick). Mode ``4 * k + c`` is channel ``c`` of
mode pair ``k`` with channel order (AH, AV, BH, BV).

Transforms act in the Heisenberg picture, ``a -> U a`` for a polarization
rotation and ``a_i -> exp(i phi_i) a_i`` for a phase plate.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Sequence

import numpy as np

UNITARY_TOL = 1e-12

CHANNELS = ("AH", "AV", "BH", "BV")


class Beam(str, Enum):
    A = "A"
    B = "B"


class Pol(str, Enum):
    H = "H"
    V = "V"


@dataclass(frozen=True)
class ModeId:
    pair_index: int
    beam: Beam
    pol: Pol

    def __post_init__(self):
        if self.pair_index < 0:
            raise ValueError("pair_index must be >= 0")
        object.__setattr__(self, "beam", Beam(self.beam))
        object.__setattr__(self, "pol", Pol(self.pol))

    @property
    def index(self) -> int:
        offset = (0 if self.beam is Beam.A else 2) + (0 if self.pol is Pol.H else 1)
        return 4 * self.pair_index + offset

    @classmethod
    def parse(cls, label: str, pair_index: int = 0) -> "ModeId":
        """Build from a channel label such as ``"AH"``."""
        if label not in CHANNELS:
            raise ValueError(f"unknown channel {label!r}")
        return cls(pair_index, Beam(label[0]), Pol(label[1]))


@dataclass(frozen=True, eq=False)
class GaussianState:
    N: np.ndarray
    M: np.ndarray

    def __post_init__(self):
        N = np.array(self.N, dtype=complex)
        M = np.array(self.M, dtype=complex)
        N.setflags(write=False)
        M.setflags(write=False)
        object.__setattr__(self, "N", N)
        object.__setattr__(self, "M", M)
        check_state(self)

    @property
    def n_modes(self) -> int:
        return self.N.shape[0]

    @property
    def n_pairs(self) -> int:
        return self.n_modes // 4

    def mean_photons(self) -> float:
        return float(np.trace(self.N).real)


def check_state(state: GaussianState, tol: float = UNITARY_TOL) -> None:
    """Raise ``ValueError`` unless N is Hermitian with non-negative diagonal and M symmetric."""
    N, M = state.N, state.M
    if N.ndim != 2 or N.shape[0] != N.shape[1] or N.shape != M.shape:
        raise ValueError("N and M must be square matrices of equal shape")
    if N.shape[0] % 4:
        raise ValueError("mode count must be a multiple of 4")
    scale = max(1.0, float(np.max(np.abs(N), initial=0.0)), float(np.max(np.abs(M), initial=0.0)))
    if np.max(np.abs(N - N.conj().T), initial=0.0) > tol * scale:
        raise ValueError("N is not Hermitian")
    if np.max(np.abs(M - M.T), initial=0.0) > tol * scale:
        raise ValueError("M is not symmetric")
    if np.min(N.diagonal().real, initial=0.0) < -tol * scale:
        raise ValueError("N has a negative diagonal entry")


def vacuum(n_pairs: int = 1) -> GaussianState:
    n = 4 * n_pairs
    return GaussianState(np.zeros((n, n)), np.zeros((n, n)))


def _check_gain(gamma: float) -> float:
    gamma = float(gamma)
    if not np.isfinite(gamma) or gamma < 0:
        raise ValueError(f"gain must be finite and non-negative, got {gamma}")
    return gamma


def _paired_state(gamma: float, pairs: Sequence[tuple[int, int, complex]]) -> GaussianState:
    gamma = _check_gain(gamma)
    sh, ch = np.sinh(gamma), np.cosh(gamma)
    N = np.eye(4) * sh**2
    M = np.zeros((4, 4), dtype=complex)
    for i, j, phase in pairs:
        M[i, j] = M[j, i] = phase * ch * sh
    return GaussianState(N, M)


def make_singlet(gamma: float) -> GaussianState:
    """Four-mode singlet: AH paired with BV, AV paired with BH with a minus sign."""
    return _paired_state(gamma, [(0, 3, 1.0), (1, 2, -1.0)])


def make_phi_state(gamma: float, phi: float) -> GaussianState:
    """AH-BH and AV-BV pairing with relative phase ``phi``; phi=pi is Phi-minus."""
    return _paired_state(gamma, [(0, 2, 1.0), (1, 3, np.exp(1j * phi))])


def make_triplet(kind: str, gamma: float) -> GaussianState:
    if kind == "psi_plus":
        return _paired_state(gamma, [(0, 3, 1.0), (1, 2, 1.0)])
    if kind == "phi_minus":
        return make_phi_state(gamma, np.pi)
    if kind == "phi_plus":
        return make_phi_state(gamma, 0.0)
    raise ValueError(f"unknown triplet kind {kind!r}")


def make_state(kind: str, gamma: float) -> GaussianState:
    if kind in ("singlet", "psi_minus"):
        return make_singlet(gamma)
    return make_triplet(kind, gamma)


@dataclass(frozen=True, eq=False)
class PolarizationRotation:
    """2x2 unitary on the (H, V) operators of beam A, beam B, or both."""

    U: np.ndarray
    beams: str = "AB"

    def __post_init__(self):
        U = np.array(self.U, dtype=complex)
        if U.shape != (2, 2):
            raise ValueError("rotation must be a 2x2 matrix")
        if np.max(np.abs(U @ U.conj().T - np.eye(2))) > UNITARY_TOL:
            raise ValueError("rotation matrix is not unitary")
        if self.beams not in ("A", "B", "AB"):
            raise ValueError("beams must be 'A', 'B' or 'AB'")
        U.setflags(write=False)
        object.__setattr__(self, "U", U)

    @classmethod
    def rotator(cls, theta: float, beams: str = "AB") -> "PolarizationRotation":
        """Real rotation of the polarization plane by ``theta``."""
        c, s = np.cos(theta), np.sin(theta)
        return cls(np.array([[c, -s], [s, c]]), beams)

    @classmethod
    def random(cls, rng: np.random.Generator, beams: str = "AB") -> "PolarizationRotation":
        z = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        q, r = np.linalg.qr(z)
        q = q * (np.diag(r) / np.abs(np.diag(r)))
        # re-orthonormalize to hit the 1e-12 unitarity gate
        u, _, vh = np.linalg.svd(q)
        return cls(u @ vh, beams)


# Heisenberg maps from (H, V) to the (x, x-perp) modes of each Stokes basis,
# chosen so that S_k = n_x - n_perp in basis k.
BASIS_ROTATIONS = {
    1: np.eye(2, dtype=complex),
    2: np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2),
    3: np.array([[1, -1j], [1, 1j]], dtype=complex) / np.sqrt(2),
}


def basis_rotation(k: int, beams: str = "AB") -> PolarizationRotation:
    """Rotation that makes Stokes parameter ``k`` the H/V number difference."""
    return PolarizationRotation(BASIS_ROTATIONS[k], beams)


# local unitary on beam B that maps each triplet onto the singlet pattern
_SINGLET_FRAMES = {
    "singlet": np.eye(2),
    "psi_minus": np.eye(2),
    "psi_plus": np.diag([-1.0, 1.0]),
    "phi_minus": np.array([[0.0, 1.0], [1.0, 0.0]]),
    "phi_plus": np.array([[0.0, 1.0], [-1.0, 0.0]]),
}


def singlet_frame(kind: str) -> PolarizationRotation:
    """Beam-B analysis frame in which the given Bell state looks like the singlet."""
    try:
        return PolarizationRotation(_SINGLET_FRAMES[kind], "B")
    except KeyError:
        raise ValueError(f"unknown state kind {kind!r}") from None


def _block_unitary(rot: PolarizationRotation, n_pairs: int) -> np.ndarray:
    block = np.eye(4, dtype=complex)
    if "A" in rot.beams:
        block[0:2, 0:2] = rot.U
    if "B" in rot.beams:
        block[2:4, 2:4] = rot.U
    return np.kron(np.eye(n_pairs), block)


def apply_rotation(state: GaussianState, rot: PolarizationRotation) -> GaussianState:
    W = _block_unitary(rot, state.n_pairs)
    return GaussianState(W.conj() @ state.N @ W.T, W @ state.M @ W.T)


@dataclass(frozen=True)
class LossMap:
    eta: tuple

    def __post_init__(self):
        eta = tuple(float(e) for e in np.atleast_1d(self.eta))
        if any(not (0.0 <= e <= 1.0) for e in eta):
            raise ValueError(f"transmissions must lie in [0, 1], got {eta}")
        object.__setattr__(self, "eta", eta)

    @classmethod
    def uniform(cls, eta: float, n_modes: int = 4) -> "LossMap":
        return cls((eta,) * n_modes)

    def vector(self, n_modes: int) -> np.ndarray:
        eta = np.asarray(self.eta)
        if eta.size == n_modes:
            return eta
        if eta.size == 4 and n_modes % 4 == 0:
            return np.tile(eta, n_modes // 4)
        raise ValueError(f"loss map has {eta.size} entries for {n_modes} modes")


def apply_loss(state: GaussianState, loss: LossMap) -> GaussianState:
    """Independent beamsplitter (vacuum admixture) on every mode."""
    r = np.sqrt(loss.vector(state.n_modes))
    scale = np.outer(r, r)
    return GaussianState(state.N * scale, state.M * scale)


def apply_mode_phases(state: GaussianState, phases: Iterable[float]) -> GaussianState:
    phases = np.asarray(list(phases), dtype=float)
    if phases.size == 4 and state.n_modes > 4:
        phases = np.tile(phases, state.n_pairs)
    if phases.size != state.n_modes:
        raise ValueError(f"expected {state.n_modes} phases, got {phases.size}")
    u = np.exp(1j * phases)
    return GaussianState(state.N * np.outer(u.conj(), u), state.M * np.outer(u, u))


def combine(states: Sequence[GaussianState]) -> GaussianState:
    """Direct sum of independent mode pairs."""
    if not states:
        raise ValueError("need at least one state")
    n = sum(s.n_modes for s in states)
    N = np.zeros((n, n), dtype=complex)
    M = np.zeros((n, n), dtype=complex)
    k = 0
    for s in states:
        N[k:k + s.n_modes, k:k + s.n_modes] = s.N
        M[k:k + s.n_modes, k:k + s.n_modes] = s.M
        k += s.n_modes
    return GaussianState(N, M)


def _index(mode) -> int:
    if isinstance(mode, ModeId):
        return mode.index
    if isinstance(mode, str):
        return ModeId.parse(mode).index
    return int(mode)


def photon_covariance(state: GaussianState, i, j) -> float:
    """Cov(n_i, n_j) = |N_ij|^2 + |M_ij|^2 + delta_ij N_ii."""
    i, j = _index(i), _index(j)
    val = abs(state.N[i, j]) ** 2 + abs(state.M[i, j]) ** 2
    if i == j:
        val += state.N[i, i].real
    return float(val)


def photon_covariance_matrix(state: GaussianState) -> np.ndarray:
    return np.abs(state.N) ** 2 + np.abs(state.M) ** 2 + np.diag(state.N.diagonal().real)


def quadratic_mean(state: GaussianState, K: np.ndarray) -> float:
    """<sum_ij K_ij a_i^dagger a_j> for Hermitian K."""
    return float(np.sum(K * state.N).real)


def quadratic_covariance(state: GaussianState, K: np.ndarray, L: np.ndarray) -> complex:
    """<S T> - <S><T> for S = a^dagger K a, T = a^dagger L a (Wick)."""
    N, M = state.N, state.M
    P = N.T
    anomalous = np.sum(M.conj() * (K @ M @ L.T))
    normal = np.trace(K @ P @ L @ P) + np.sum((K @ L) * N)
    return complex(anomalous + normal)
