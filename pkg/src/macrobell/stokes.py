"""Stokes observables, noise reduction factors and the variance witness.

Per beam, with mode operators a_H, a_V,

    S0 = n_H + n_V,          S1 = n_H - n_V,
    S2 = a_H^+ a_V + a_V^+ a_H   (diagonal minus antidiagonal),
    S3 = -i (a_H^+ a_V - a_V^+ a_H)   (right minus left circular),

and the two-beam observables are the sums over beams A and B. Any
separable state obeys sum_i Var(S_i) >= 2 <S0>.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from .gaussian import GaussianState, quadratic_covariance, quadratic_mean

THRESHOLD = 2.0

_PAULI = {
    0: np.eye(2, dtype=complex),
    1: np.diag([1.0, -1.0]).astype(complex),
    2: np.array([[0, 1], [1, 0]], dtype=complex),
    3: np.array([[0, -1j], [1j, 0]], dtype=complex),
}


class WitnessUndefined(ValueError):
    """Raised when the shot-noise normalization <S0> vanishes."""


def stokes_matrix(k: int, n_pairs: int = 1, beams: str = "AB") -> np.ndarray:
    """Coefficient matrix K with S_k = a^dagger K a over all modes."""
    if k not in _PAULI:
        raise ValueError(f"Stokes index must be 0..3, got {k}")
    block = np.zeros((4, 4), dtype=complex)
    if "A" in beams:
        block[0:2, 0:2] = _PAULI[k]
    if "B" in beams:
        block[2:4, 2:4] = _PAULI[k]
    return np.kron(np.eye(n_pairs), block)


@dataclass(frozen=True)
class StokesMoments:
    mean_S0: float
    mean_S1: float
    mean_S2: float
    mean_S3: float
    var_S1: float
    var_S2: float
    var_S3: float
    # standard errors, only for sampled input
    se_mean_S0: float | None = None
    se_var: tuple | None = None
    extra: dict = field(default_factory=dict, compare=False)

    @property
    def means(self) -> np.ndarray:
        return np.array([self.mean_S1, self.mean_S2, self.mean_S3])

    @property
    def variances(self) -> np.ndarray:
        return np.array([self.var_S1, self.var_S2, self.var_S3])

    def scaled(self, factor: float) -> "StokesMoments":
        """Moments of ``factor`` independent copies (means and variances add)."""
        se_var = None if self.se_var is None else tuple(np.sqrt(factor) * np.asarray(self.se_var))
        se_s0 = None if self.se_mean_S0 is None else math.sqrt(factor) * self.se_mean_S0
        return StokesMoments(
            *(factor * v for v in (self.mean_S0, self.mean_S1, self.mean_S2, self.mean_S3,
                                   self.var_S1, self.var_S2, self.var_S3)),
            se_mean_S0=se_s0,
            se_var=se_var,
        )


def stokes_moments_gaussian(state: GaussianState) -> StokesMoments:
    means = []
    for k in range(4):
        means.append(quadratic_mean(state, stokes_matrix(k, state.n_pairs)))
    variances = []
    for k in (1, 2, 3):
        K = stokes_matrix(k, state.n_pairs)
        variances.append(quadratic_covariance(state, K, K).real)
    return StokesMoments(*means, *variances)


def stokes_variance_s0(state: GaussianState) -> float:
    K = stokes_matrix(0, state.n_pairs)
    return quadratic_covariance(state, K, K).real


@dataclass(frozen=True)
class WitnessResult:
    lhs: float
    threshold: float = THRESHOLD
    stderr: float | None = None

    @property
    def violated(self) -> bool:
        return self.lhs < self.threshold

    @property
    def sigma_below(self) -> float | None:
        if not self.stderr:
            return None
        return (self.threshold - self.lhs) / self.stderr


def witness(moments: StokesMoments) -> WitnessResult:
    """Sum of the three Stokes variances over <S0>; below 2 certifies non-separability."""
    s0 = moments.mean_S0
    if not s0 > 0:
        raise WitnessUndefined("witness needs <S0> > 0")
    lhs = float(np.sum(moments.variances)) / s0
    stderr = None
    if moments.se_var is not None:
        se_var = np.asarray(moments.se_var, dtype=float)
        var_term = float(np.sum(se_var**2)) / s0**2
        s0_term = (lhs * (moments.se_mean_S0 or 0.0) / s0) ** 2
        stderr = math.sqrt(var_term + s0_term)
    return WitnessResult(lhs=lhs, stderr=stderr)


def nrf(moments: StokesMoments, i: int) -> float:
    """Noise reduction factor Var(S_i) / <S0>."""
    if i not in (1, 2, 3):
        raise ValueError("Stokes index must be 1, 2 or 3")
    if not moments.mean_S0 > 0:
        raise WitnessUndefined("NRF needs <S0> > 0")
    return float(moments.variances[i - 1] / moments.mean_S0)


def aggregate_modes(per_pair: Sequence[StokesMoments]) -> StokesMoments:
    """Moments of independent mode pairs: means and variances add."""
    if not per_pair:
        raise ValueError("need at least one mode pair")
    fields = ("mean_S0", "mean_S1", "mean_S2", "mean_S3", "var_S1", "var_S2", "var_S3")
    total = {f: math.fsum(getattr(m, f) for m in per_pair) for f in fields}
    if all(m.se_var is not None for m in per_pair):
        total["se_var"] = tuple(np.sqrt(np.sum([np.square(m.se_var) for m in per_pair], axis=0)))
        total["se_mean_S0"] = math.sqrt(math.fsum((m.se_mean_S0 or 0.0) ** 2 for m in per_pair))
    return StokesMoments(**total)


# --- separable mixtures -----------------------------------------------------

@dataclass(frozen=True)
class BeamComponent:
    """Single-beam product factor: ``coherent`` (fully polarized) or ``thermal`` (unpolarized).

    ``stokes`` is the unit polarization direction of a coherent beam;
    ``modes`` is the number of thermal modes per polarization.
    """

    kind: str
    mean: float
    stokes: tuple = (1.0, 0.0, 0.0)
    modes: int = 1

    def __post_init__(self):
        if self.kind not in ("coherent", "thermal"):
            raise ValueError(f"unknown component kind {self.kind!r}")
        if self.mean < 0:
            raise ValueError("mean photon number must be >= 0")
        s = np.asarray(self.stokes, dtype=float)
        object.__setattr__(self, "stokes", tuple(s / np.linalg.norm(s)))

    def stokes_mean(self) -> np.ndarray:
        if self.kind == "coherent":
            return self.mean * np.asarray(self.stokes)
        return np.zeros(3)

    def stokes_var(self) -> np.ndarray:
        if self.kind == "coherent":
            return np.full(3, self.mean)
        # two unpolarized thermal fields, mean/2 each split over `modes` modes
        half = self.mean / 2
        return np.full(3, 2 * half * (1 + half / self.modes))

    def sample_counts(self, basis: int, size: int, rng: np.random.Generator) -> np.ndarray:
        """Photon counts (n_x, n_perp) in Stokes basis ``basis``."""
        if self.kind == "coherent":
            s = self.stokes[basis - 1]
            lam = self.mean * np.array([(1 + s) / 2, (1 - s) / 2])
            return rng.poisson(lam, size=(size, 2))
        if self.mean == 0:
            return np.zeros((size, 2), dtype=np.int64)
        per_mode = self.mean / 2 / self.modes
        return rng.negative_binomial(self.modes, 1 / (1 + per_mode), size=(size, 2))


@dataclass(frozen=True)
class SeparableConfig:
    weights: tuple
    beam_a: tuple
    beam_b: tuple

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if np.any(w < 0) or not math.isclose(float(w.sum()), 1.0, abs_tol=1e-9):
            raise ValueError("mixing weights must be non-negative and sum to 1")
        if not (len(w) == len(self.beam_a) == len(self.beam_b)):
            raise ValueError("weights and components must have equal length")

    @classmethod
    def random(cls, rng: np.random.Generator, max_components: int = 4,
               max_mean: float = 50.0) -> "SeparableConfig":
        n = int(rng.integers(1, max_components + 1))
        weights = rng.dirichlet(np.ones(n))

        def draw():
            kind = "coherent" if rng.random() < 0.5 else "thermal"
            direction = rng.normal(size=3)
            return BeamComponent(kind, float(rng.uniform(0.1, max_mean)), tuple(direction),
                                 int(rng.integers(1, 4)))

        return cls(tuple(weights), tuple(draw() for _ in range(n)), tuple(draw() for _ in range(n)))


def _separable_analytic(config: SeparableConfig) -> StokesMoments:
    w = np.asarray(config.weights)
    means = np.zeros(3)
    second = np.zeros(3)
    s0 = 0.0
    for p, a, b in zip(w, config.beam_a, config.beam_b):
        ma, mb = a.stokes_mean(), b.stokes_mean()
        # product state: second moment of S_A + S_B
        second += p * (a.stokes_var() + ma**2 + b.stokes_var() + mb**2 + 2 * ma * mb)
        means += p * (ma + mb)
        s0 += p * (a.mean + b.mean)
    var = second - means**2
    return StokesMoments(s0, *means, *var)


def sample_separable_ensemble(config: SeparableConfig, rng: np.random.Generator | None = None,
                              pulses: int = 0) -> StokesMoments:
    """Stokes moments of a classical mixture of product states.

    With ``pulses == 0`` the moments are exact; otherwise ``pulses`` pulses
    per Stokes basis are sampled and the result carries standard errors.
    """
    if pulses <= 0:
        return _separable_analytic(config)
    if rng is None:
        raise ValueError("sampling needs an rng")
    w = np.asarray(config.weights)
    s0_samples = []
    means, variances, se_var = [], [], []
    for basis in (1, 2, 3):
        which = rng.choice(len(w), size=pulses, p=w)
        counts = np.zeros((pulses, 2))
        for j, (a, b) in enumerate(zip(config.beam_a, config.beam_b)):
            sel = np.flatnonzero(which == j)
            if sel.size:
                counts[sel] = a.sample_counts(basis, sel.size, rng) + b.sample_counts(basis, sel.size, rng)
        s = counts[:, 0] - counts[:, 1]
        s0_samples.append(counts.sum(axis=1))
        var = s.var(ddof=1)
        means.append(s.mean())
        variances.append(var)
        # fourth-moment form; mixtures are far from normal
        m4 = float(np.mean((s - s.mean()) ** 4))
        se_var.append(math.sqrt(max(m4 - (pulses - 3) / (pulses - 1) * var**2, 0.0) / pulses))
    s0 = np.concatenate(s0_samples)
    return StokesMoments(float(s0.mean()), *means, *variances,
                         se_mean_S0=float(s0.std(ddof=1) / math.sqrt(s0.size)),
                         se_var=tuple(se_var))


def with_stderr(moments: StokesMoments, se_mean_S0: float, se_var: Sequence[float]) -> StokesMoments:
    return replace(moments, se_mean_S0=se_mean_S0, se_var=tuple(se_var))
