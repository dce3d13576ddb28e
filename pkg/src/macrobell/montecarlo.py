"""Pulse-resolved Monte Carlo of the polarization-entanglement experiment.

Each pulse carries photon counts in four channels (AH, AV, BH, BV) expressed
in the polarization basis of the Stokes measurement. Within one basis every
supported Bell state is a set of perfectly paired two-mode squeezed vacua,
so the sum over ``n_pairs`` mode pairs of geometric pair counts is a single
negative-binomial draw per pairing.

Randomness is keyed by (seed, stream, block) through counter-based Philox
substreams over fixed-size pulse blocks, so results never depend on the
number of worker threads.
"""

from __future__ import annotations

import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np
from scipy import stats

from . import gaussian as ge
from .stokes import StokesMoments, aggregate_modes, stokes_moments_gaussian, witness

BLOCK_SIZE = 4096
MIN_POSTSELECTED = 100

# substream ids
_STREAM_SHOT_NOISE = 10
_STREAM_CALIBRATION = 100

CHANNEL_INDEX = {"AH": (0,), "AV": (1,), "BH": (2,), "BV": (3,), "A": (0, 1), "B": (2, 3)}


class SimulationError(ValueError):
    pass


class CalibrationError(SimulationError):
    pass


@dataclass(frozen=True)
class ExperimentConfig:
    gamma: float = 0.33
    n_pairs: int = 250_000
    pulses: int = 20_000
    eta: tuple = (1.0, 1.0, 1.0, 1.0)
    pump_jitter: float = 0.0
    electronic_noise_electrons: float = 300.0
    detector_gain: float = 1.0
    seed: int = 0
    aperture_ratio: float = 1.0
    state: str = "singlet"

    def __post_init__(self):
        eta = tuple(float(e) for e in np.broadcast_to(np.asarray(self.eta, dtype=float), (4,)))
        object.__setattr__(self, "eta", eta)
        if self.pulses < 1:
            raise ValueError("pulses must be >= 1")
        if self.n_pairs < 1:
            raise ValueError("n_pairs must be >= 1")
        if not all(0.0 <= e <= 1.0 for e in eta):
            raise ValueError("channel efficiencies must lie in [0, 1]")
        if not (math.isfinite(self.gamma) and self.gamma >= 0):
            raise ValueError("gain must be finite and non-negative")
        if self.pump_jitter < 0 or self.electronic_noise_electrons < 0:
            raise ValueError("noise parameters must be non-negative")
        if not self.aperture_ratio > 0:
            raise ValueError("aperture ratio must be positive")
        if self.detector_gain <= 0:
            raise ValueError("detector gain must be positive")
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError("seed must be an unsigned 64-bit integer")

    @classmethod
    def from_mean_photons(cls, mean_photons: float, gamma: float, **kw) -> "ExperimentConfig":
        """Pick ``n_pairs`` so that each beam carries ``mean_photons`` = 2 M sinh^2(gamma)."""
        n0 = math.sinh(gamma) ** 2
        return cls(gamma=gamma, n_pairs=max(1, round(mean_photons / (2 * n0))), **kw)

    @property
    def photons_per_mode(self) -> float:
        return math.sinh(self.gamma) ** 2

    @property
    def mean_photons_per_beam(self) -> float:
        return 2 * self.n_pairs * self.photons_per_mode

    def mode_counts(self) -> tuple[float, float, float]:
        """(matched pairs, unmatched pairs seen only by A, unmatched pairs seen only by B)."""
        r = self.aperture_ratio
        m = float(self.n_pairs)
        return m * min(r, 1.0), m * max(r - 1.0, 0.0), m * max(1.0 - r, 0.0)


def aperture_ratio(d1: float, d2: float, lambda_a: float = 635e-9, lambda_b: float = 805e-9) -> float:
    """(D1 / lambda_A) / (D2 / lambda_B); equal to 1 when the apertures select the same modes."""
    return (d1 / lambda_a) / (d2 / lambda_b)


def matched_fraction(r: float) -> float:
    return min(r, 1.0 / r)


@dataclass(frozen=True)
class PulseSample:
    basis: int
    generated: np.ndarray
    detected: np.ndarray
    readout: np.ndarray


@dataclass(frozen=True)
class PulseEnsemble:
    """Per-pulse counts: ``generated``/``detected`` are (P, 4), ``readout`` is (P, 2).

    The two readout columns are the x and x-perp detectors; each registers
    both wavelengths.
    """

    basis: int
    generated: np.ndarray
    detected: np.ndarray
    readout: np.ndarray

    def __len__(self) -> int:
        return self.generated.shape[0]

    def __getitem__(self, i: int) -> PulseSample:
        return PulseSample(self.basis, self.generated[i], self.detected[i], self.readout[i])

    def counts(self, channel: str, stage: str = "detected") -> np.ndarray:
        try:
            cols = CHANNEL_INDEX[channel]
        except KeyError:
            raise ValueError(f"unknown channel {channel!r}") from None
        data = self.detected if stage == "detected" else self.generated
        return data[:, list(cols)].sum(axis=1)


def block_rng(seed: int, stream: int, block: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(int(seed), spawn_key=(stream, block))))


def pairing_structure(kind: str, basis: int) -> tuple[list[tuple[int, int]], list[int]]:
    """Mode pairs (and unpaired thermal modes) of a Bell state seen in Stokes basis ``basis``."""
    state = ge.apply_rotation(ge.make_state(kind, 0.5), ge.basis_rotation(basis))
    tol = 1e-9
    N, M = state.N, state.M
    if np.max(np.abs(N - np.diag(N.diagonal()))) > tol:
        raise SimulationError(f"state {kind!r} is not photon-number diagonal in basis {basis}")
    pairs = []
    for i in range(4):
        partners = [j for j in range(4) if abs(M[i, j]) > tol]
        if len(partners) > 1 or (partners and (partners[0] < 2) == (i < 2)):
            raise SimulationError(f"state {kind!r} has no pair structure in basis {basis}")
        if partners and i < partners[0]:
            pairs.append((i, partners[0]))
    paired = {k for p in pairs for k in p}
    return pairs, [k for k in range(4) if k not in paired]


def _generate(config: ExperimentConfig, basis: int, size: int, rng: np.random.Generator) -> np.ndarray:
    pairs, lone = pairing_structure(config.state, basis)
    gamma = np.full(size, config.gamma)
    if config.pump_jitter > 0:
        gamma = np.clip(gamma * (1.0 + config.pump_jitter * rng.standard_normal(size)), 0.0, None)
    p = 1.0 - np.tanh(gamma) ** 2
    matched, extra_a, extra_b = config.mode_counts()
    counts = np.zeros((size, 4), dtype=np.int64)

    def thermal(n_modes):
        if n_modes <= 0:
            return np.zeros(size, dtype=np.int64)
        return rng.negative_binomial(n_modes, p)

    for i, j in pairs:
        n = thermal(matched)
        counts[:, i] += n
        counts[:, j] += n
    for i in lone:
        counts[:, i] += thermal(matched)
    for i in range(4):
        counts[:, i] += thermal(extra_a if i < 2 else extra_b)
    return counts


def apply_detection(sample, config: ExperimentConfig, rng: np.random.Generator):
    """Binomial thinning per channel, then two detectors with Gaussian electronic noise.

    Works on a single ``PulseSample`` or a ``PulseEnsemble``.
    """
    generated = np.asarray(sample.generated)
    detected = rng.binomial(generated, np.asarray(config.eta))
    det = np.atleast_2d(detected)
    signal = np.stack([det[:, 0] + det[:, 2], det[:, 1] + det[:, 3]], axis=1).astype(float)
    readout = config.detector_gain * signal
    if config.electronic_noise_electrons > 0:
        readout = readout + rng.normal(0.0, config.electronic_noise_electrons, size=readout.shape)
    if generated.ndim == 1:
        readout = readout[0]
    return replace(sample, detected=detected, readout=readout)


def _simulate_block(config: ExperimentConfig, basis: int, block: int) -> PulseEnsemble:
    start = block * BLOCK_SIZE
    size = min(BLOCK_SIZE, config.pulses - start)
    rng = block_rng(config.seed, basis, block)
    generated = _generate(config, basis, size, rng)
    empty = PulseEnsemble(basis, generated, generated, np.zeros((size, 2)))
    return apply_detection(empty, config, rng)


def simulate(config: ExperimentConfig, basis: int = 1, threads: int = 1) -> PulseEnsemble:
    """Simulate ``config.pulses`` pulses measured in Stokes basis ``basis``."""
    if basis not in (1, 2, 3):
        raise ValueError("basis must be 1, 2 or 3")
    n_blocks = -(-config.pulses // BLOCK_SIZE)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(lambda b: _simulate_block(config, basis, b), range(n_blocks)))
    else:
        parts = [_simulate_block(config, basis, b) for b in range(n_blocks)]
    return PulseEnsemble(
        basis,
        np.concatenate([p.generated for p in parts]),
        np.concatenate([p.detected for p in parts]),
        np.concatenate([p.readout for p in parts]),
    )


def simulate_stokes_run(config: ExperimentConfig, threads: int = 1) -> dict[int, PulseEnsemble]:
    """One pulse train per waveplate setting, as in the three-basis Stokes measurement."""
    return {k: simulate(config, k, threads) for k in (1, 2, 3)}


def sample_pulse(config: ExperimentConfig, pulse_index: int, basis: int = 1) -> PulseSample:
    """Pulse ``pulse_index`` of the ensemble; identical to ``simulate(config, basis)[pulse_index]``."""
    if not 0 <= pulse_index < config.pulses:
        raise IndexError("pulse index out of range")
    block, offset = divmod(pulse_index, BLOCK_SIZE)
    return _simulate_block(config, basis, block)[offset]


# --- estimation --------------------------------------------------------------

def _jackknife_se(values: np.ndarray, stat, groups: int) -> float:
    n = values.shape[0]
    groups = min(groups, n)
    edges = np.linspace(0, n, groups + 1).astype(int)
    keep = np.ones(n, dtype=bool)
    reps = []
    for g in range(groups):
        keep[:] = True
        keep[edges[g]:edges[g + 1]] = False
        reps.append(stat(values[keep]))
    reps = np.asarray(reps)
    return float(math.sqrt((groups - 1) / groups * np.sum((reps - reps.mean()) ** 2)))


def estimate_stokes(ensembles: dict[int, PulseEnsemble], alpha: float = 1.0,
                    electronic_var: float = 0.0, groups: int = 50) -> StokesMoments:
    """Stokes means and variances in photon units from detector readouts.

    ``alpha`` converts readout units to photons (shot-noise calibration slope)
    and ``electronic_var`` is the electronic-noise variance of the difference
    signal, subtracted before normalization.
    """
    means, variances, se_var, normal_se = [], [], [], []
    s0_all = []
    for k in (1, 2, 3):
        ens = ensembles[k]
        if len(ens) < 2:
            raise SimulationError("need at least two pulses per basis")
        diff = ens.readout[:, 0] - ens.readout[:, 1]
        s0_all.append((ens.readout[:, 0] + ens.readout[:, 1]) / alpha)
        raw = diff.var(ddof=1)
        variances.append((raw - electronic_var) / alpha**2)
        means.append(diff.mean() / alpha)
        se_var.append(_jackknife_se(diff, lambda d: d.var(ddof=1), groups) / alpha**2)
        normal_se.append(math.sqrt(2 * raw**2 / (len(diff) - 1)) / alpha**2)
    s0 = np.concatenate(s0_all)
    return StokesMoments(
        float(s0.mean()), *means, *variances,
        se_mean_S0=float(s0.std(ddof=1) / math.sqrt(s0.size)),
        se_var=tuple(se_var),
        extra={"se_var_normal": tuple(normal_se)},
    )


def electronic_variance(config: ExperimentConfig) -> float:
    """Electronic-noise variance of the two-detector difference signal."""
    return 2.0 * config.electronic_noise_electrons**2


def estimate_stokes_for(config: ExperimentConfig, ensembles: dict[int, PulseEnsemble]) -> StokesMoments:
    return estimate_stokes(ensembles, alpha=config.detector_gain, electronic_var=electronic_variance(config))


def analytic_stokes_moments(config: ExperimentConfig) -> StokesMoments:
    """Exact Stokes moments of the simulated model without pump jitter.

    Loss acts on the channels of each measurement basis; unmatched modes are
    pairs whose partner is lost entirely.
    """
    matched, extra_a, extra_b = config.mode_counts()
    eta = np.asarray(config.eta)
    pieces = []
    for count, mask in ((matched, (1, 1, 1, 1)), (extra_a, (1, 1, 0, 0)), (extra_b, (0, 0, 1, 1))):
        if count <= 0:
            continue
        per_basis = []
        state = ge.make_state(config.state, config.gamma)
        for k in (1, 2, 3):
            rotated = ge.apply_rotation(state, ge.basis_rotation(k))
            lossy = ge.apply_loss(rotated, ge.LossMap(tuple(eta * np.asarray(mask))))
            per_basis.append(stokes_moments_gaussian(lossy))
        # in basis k the Stokes parameter S_k is the H/V difference
        s0 = np.mean([m.mean_S0 for m in per_basis])
        combined = StokesMoments(
            s0, *(m.mean_S1 for m in per_basis), *(m.var_S1 for m in per_basis))
        pieces.append(combined.scaled(count))
    return aggregate_modes(pieces)


# --- calibration ---------------------------------------------------------------

@dataclass(frozen=True)
class CalibrationResult:
    alpha: float
    electronic_var: float
    se_alpha: float
    se_electronic_var: float
    mean_sum: np.ndarray
    var_diff: np.ndarray
    residuals: np.ndarray
    levels: np.ndarray


def calibrate_shot_noise(config: ExperimentConfig, levels, pulses: int | None = None) -> CalibrationResult:
    """Fit Var(S-) = alpha <S+> + electronic variance with a Poissonian (laser) source.

    The laser light is split evenly onto the two detectors.
    """
    levels = np.asarray(levels, dtype=float)
    if np.unique(levels).size < 3 or np.any(levels <= 0):
        raise CalibrationError("need at least three distinct positive levels")
    pulses = pulses or config.pulses
    mean_sum, var_diff = [], []
    for i, level in enumerate(levels):
        rng = block_rng(config.seed, _STREAM_CALIBRATION + i, 0)
        generated = np.zeros((pulses, 4), dtype=np.int64)
        generated[:, 0:2] = rng.poisson(level / 2, size=(pulses, 2))
        sample = apply_detection(PulseEnsemble(1, generated, generated, np.zeros((pulses, 2))), config, rng)
        r = sample.readout
        mean_sum.append((r[:, 0] + r[:, 1]).mean())
        var_diff.append((r[:, 0] - r[:, 1]).var(ddof=1))
    x, y = np.asarray(mean_sum), np.asarray(var_diff)
    # weighted least squares, Var(s^2) ~ 2 sigma^4 / (n - 1)
    w = (pulses - 1) / (2 * y**2)
    A = np.stack([x, np.ones_like(x)], axis=1)
    Aw = A * np.sqrt(w)[:, None]
    coef, *_ = np.linalg.lstsq(Aw, y * np.sqrt(w), rcond=None)
    cov = np.linalg.inv(Aw.T @ Aw)
    if not np.all(np.isfinite(cov)):
        raise CalibrationError("degenerate calibration fit")
    return CalibrationResult(
        alpha=float(coef[0]), electronic_var=float(coef[1]),
        se_alpha=float(math.sqrt(cov[0, 0])), se_electronic_var=float(math.sqrt(cov[1, 1])),
        mean_sum=x, var_diff=y, residuals=y - A @ coef, levels=levels,
    )


# --- photon-number distributions -------------------------------------------

@dataclass(frozen=True)
class Histogram:
    edges: np.ndarray
    counts: np.ndarray
    total: int
    mean: float
    variance: float
    warning: str | None = None

    @property
    def centers(self) -> np.ndarray:
        return 0.5 * (self.edges[:-1] + self.edges[1:])

    @classmethod
    def from_samples(cls, values, bin_width: float | None = None, center: float | None = None,
                     warning: str | None = None) -> "Histogram":
        values = np.asarray(values, dtype=float)
        if values.size == 0:
            raise SimulationError("cannot histogram an empty sample")
        if bin_width is None:
            bin_width = freedman_diaconis(values)
        if center is None:
            center = float(np.round(np.median(values)))
        lo = center + bin_width * (math.floor((values.min() - center) / bin_width + 0.5) - 1.5)
        hi = center + bin_width * (math.ceil((values.max() - center) / bin_width - 0.5) + 1.5)
        n_bins = int(round((hi - lo) / bin_width))
        edges = lo + bin_width * np.arange(n_bins + 1)
        counts, _ = np.histogram(values, bins=edges)
        var = float(values.var(ddof=1)) if values.size > 1 else 0.0
        return cls(edges, counts, int(values.size), float(values.mean()), var, warning)

    def fwhm(self) -> float:
        """Full width at half maximum from half-maximum crossings.

        Well-resolved peaks (five or more bins above 70% of the maximum) take
        their height from a parabola through the log-counts of those bins,
        and each crossing from a quadratic through the flank bins between
        20% and 80% of the height. Narrow histograms use the raw maximum and
        linear interpolation between neighbouring bin centers.
        """
        c = self.counts.astype(float)
        if self.total == 0 or c.max() <= 0:
            raise SimulationError("FWHM undefined for an empty histogram")
        x = self.centers
        peak = int(np.argmax(c))
        height = c[peak]
        top = _contiguous(c >= 0.7 * height, peak)
        if top.size >= 5:
            a, b, k = np.polyfit(x[top] - x[peak], np.log(c[top]), 2)
            if a < 0:
                height = max(height * 0.7, math.exp(k - b * b / (4 * a)))
        half = height / 2
        below = np.flatnonzero(c < half)
        left_out = below[below < peak]
        right_out = below[below > peak]
        if left_out.size == 0 or right_out.size == 0:
            raise SimulationError("FWHM undefined: histogram never drops below half maximum")
        edges = []
        for outer, step in ((left_out[-1], 1), (right_out[0], -1)):
            band = _contiguous((c >= 0.2 * height) & (c <= 0.8 * height), outer + step, outer)
            if band.size >= 6:
                mid = x[band].mean()
                roots = np.roots(np.polyfit(x[band] - mid, c[band], 2) - [0, 0, half])
                roots = roots[np.isreal(roots)].real + mid
                roots = roots[(roots >= x[band].min()) & (roots <= x[band].max())]
                if roots.size == 1:
                    edges.append(float(roots[0]))
                    continue
            inner = outer + step
            edges.append(x[outer] + (half - c[outer]) * (x[inner] - x[outer]) / (c[inner] - c[outer]))
        return float(edges[1] - edges[0])


def freedman_diaconis(values: np.ndarray) -> float:
    """Freedman-Diaconis bin width, rounded up to whole counts (minimum 1)."""
    q75, q25 = np.percentile(values, [75, 25])
    width = 2 * (q75 - q25) / values.size ** (1 / 3)
    return float(max(1.0, math.ceil(width)))


def conditional_distribution(ensemble: PulseEnsemble, channel_b: str, channel_a: str,
                             window: tuple[int, int]) -> Histogram:
    """Counts in ``channel_b`` over pulses whose ``channel_a`` count lies in ``window`` (inclusive)."""
    lo, hi = window
    if hi < lo:
        raise ValueError("empty window")
    herald = ensemble.counts(channel_a)
    sel = (herald >= lo) & (herald <= hi)
    if not sel.any():
        raise SimulationError("post-selection is empty")
    warning = None
    if sel.sum() < MIN_POSTSELECTED:
        warning = f"only {int(sel.sum())} post-selected pulses"
        warnings.warn(warning, stacklevel=2)
    return Histogram.from_samples(ensemble.counts(channel_b)[sel], bin_width=1.0, warning=warning)


@dataclass(frozen=True)
class OperationalMeasure:
    R: float
    unconditional: Histogram
    conditional: Histogram
    slope: float


def operational_measure(ensemble: PulseEnsemble, config: ExperimentConfig,
                        herald: str = "A", target: str = "B") -> OperationalMeasure:
    """Width ratio of unconditional to conditional photon-number distributions.

    The conditional distribution pools every herald value: each target count
    is shifted by the regression of target on herald, which is the
    post-selected distribution for a vanishing window stacked over windows.
    With pump jitter the numerator comes from a simulated shot-noise-limited
    source of the same mean.
    """
    y = ensemble.counts(target).astype(float)
    x = ensemble.counts(herald).astype(float)
    if y.size < 2:
        raise SimulationError("need at least two pulses")
    if config.pump_jitter > 0:
        rng = block_rng(config.seed, _STREAM_SHOT_NOISE, 0)
        reference = rng.poisson(y.mean(), size=y.size).astype(float)
    else:
        reference = y
    unconditional = Histogram.from_samples(reference)
    vx = x.var()
    slope = float(np.mean((x - x.mean()) * (y - y.mean())) / vx) if vx > 0 else 0.0
    pooled = y - slope * (x - x.mean())
    width = freedman_diaconis(pooled)
    conditional = Histogram.from_samples(pooled, bin_width=width, center=float(y.mean()))
    return OperationalMeasure(unconditional.fwhm() / conditional.fwhm(), unconditional, conditional, slope)


def measure_R(ensemble: PulseEnsemble, config: ExperimentConfig) -> float:
    return operational_measure(ensemble, config).R


def operational_config(eta: float, mean_photons: float = 1e4, gamma: float = 0.05,
                       herald_eta: float = 1.0, **kw) -> ExperimentConfig:
    """Configuration for the width-ratio measurement: herald beam A, measured beam B."""
    kw.setdefault("electronic_noise_electrons", 0.0)
    return ExperimentConfig.from_mean_photons(
        mean_photons, gamma, eta=(herald_eta, herald_eta, eta, eta), **kw)


def poisson_chi_square(samples, min_expected: float = 5.0) -> tuple[float, int, float]:
    """Chi-square test of integer samples against a Poissonian of the sample mean.

    Returns (statistic, degrees of freedom, p-value); bins are merged from the
    tails until every expected count reaches ``min_expected``.
    """
    samples = np.asarray(samples)
    n = samples.size
    mu = samples.mean()
    lo, hi = int(samples.min()), int(samples.max())
    k = np.arange(lo, hi + 1)
    observed = np.bincount(samples - lo, minlength=k.size).astype(float)
    expected = n * stats.poisson.pmf(k, mu)
    expected[0] += n * stats.poisson.cdf(lo - 1, mu)
    expected[-1] += n * stats.poisson.sf(hi, mu)
    obs_bins, exp_bins = [], []
    acc_o = acc_e = 0.0
    for o, e in zip(observed, expected):
        acc_o += o
        acc_e += e
        if acc_e >= min_expected:
            obs_bins.append(acc_o)
            exp_bins.append(acc_e)
            acc_o = acc_e = 0.0
    if acc_e > 0 and exp_bins:
        obs_bins[-1] += acc_o
        exp_bins[-1] += acc_e
    o, e = np.asarray(obs_bins), np.asarray(exp_bins)
    stat = float(np.sum((o - e) ** 2 / e))
    dof = o.size - 2
    return stat, dof, float(stats.chi2.sf(stat, dof))


# --- aperture matching ---------------------------------------------------------

@dataclass(frozen=True)
class MismatchPoint:
    d1: float
    ratio: float
    matched: float
    lhs: float
    stderr: float
    lhs_analytic: float


def mode_mismatch_sweep(config: ExperimentConfig, d1_values, d2: float = 8.9e-3,
                        lambda_a: float = 635e-9, lambda_b: float = 805e-9,
                        threads: int = 1) -> list[MismatchPoint]:
    """Witness versus aperture A1 diameter with aperture A2 fixed."""
    rows = []
    for d1 in d1_values:
        r = aperture_ratio(d1, d2, lambda_a, lambda_b)
        cfg = replace(config, aperture_ratio=r)
        moments = estimate_stokes_for(cfg, simulate_stokes_run(cfg, threads))
        result = witness(moments)
        analytic = witness(analytic_stokes_moments(cfg)).lhs
        rows.append(MismatchPoint(float(d1), r, matched_fraction(r), result.lhs, result.stderr, analytic))
    return rows


def matched_d1(d2: float = 8.9e-3, lambda_a: float = 635e-9, lambda_b: float = 805e-9) -> float:
    return d2 * lambda_a / lambda_b


def _contiguous(mask: np.ndarray, start: int, also: int | None = None) -> np.ndarray:
    """Indices of the run of True in ``mask`` containing ``start`` (or ``also``)."""
    for seed in (start, also):
        if seed is None or not 0 <= seed < mask.size or not mask[seed]:
            continue
        lo = hi = seed
        while lo > 0 and mask[lo - 1]:
            lo -= 1
        while hi < mask.size - 1 and mask[hi + 1]:
            hi += 1
        return np.arange(lo, hi + 1)
    return np.arange(0)
