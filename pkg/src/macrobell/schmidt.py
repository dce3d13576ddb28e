"""Schmidt numbers and the operational width-ratio measure."""

from __future__ import annotations

import math
from dataclasses import dataclass

SERIES_CUTOFF = 15.0


def bessel_i0_scaled(x: float) -> float:
    """exp(-x) I_0(x) for x >= 0, relative error below 1e-10.

    Power series below ``SERIES_CUTOFF``, Hankel asymptotic series above.
    """
    x = float(x)
    if x < 0 or not math.isfinite(x):
        raise ValueError("argument must be finite and non-negative")
    if x < SERIES_CUTOFF:
        q = x * x / 4
        term, total, k = 1.0, 1.0, 0
        while term > 1e-17 * total:
            k += 1
            term *= q / (k * k)
            total += term
        return total * math.exp(-x)
    # sum_k ((2k-1)!!)^2 / (k! (8x)^k), truncated at the smallest term
    term, total, k = 1.0, 1.0, 0
    while True:
        k += 1
        nxt = term * (2 * k - 1) ** 2 / (k * 8 * x)
        if nxt >= term or nxt < 1e-17 * total:
            break
        term = nxt
        total += term
    return total / math.sqrt(2 * math.pi * x)


def schmidt_single(gamma: float) -> float:
    """K = 1 + 2 sinh^2(gamma) for one two-mode squeezed pair."""
    if gamma < 0:
        raise ValueError("gain must be non-negative")
    return 1.0 + 2.0 * math.sinh(gamma) ** 2


def schmidt_product(gamma: float, n_pairs: int) -> float:
    """ln K for ``n_pairs`` independent four-mode states, K = (1 + 2 N0)^(2M)."""
    if n_pairs < 1:
        raise ValueError("need at least one mode pair")
    return 2 * n_pairs * math.log1p(2.0 * math.sinh(gamma) ** 2)


def schmidt_product_linear(gamma: float, n_pairs: int) -> float | None:
    """Linear-domain K, or None when it overflows a float."""
    log_k = schmidt_product(gamma, n_pairs)
    if log_k > math.log(1.7976931348623157e308):
        return None
    return math.exp(log_k)


def schmidt_poisson(mean_photons: float) -> float:
    """K = exp(2N) / I_0(2N) for a Poissonian Schmidt spectrum of mean N."""
    if mean_photons < 0:
        raise ValueError("mean photon number must be non-negative")
    return 1.0 / bessel_i0_scaled(2.0 * mean_photons)


def schmidt_asymptotic(mean_photons: float) -> float:
    """Large-N form 2 sqrt(pi N)."""
    if not mean_photons > 0:
        raise ValueError("mean photon number must be positive")
    return 2.0 * math.sqrt(math.pi * mean_photons)


def operational_R(mean_photons: float) -> float:
    """FWHM of a Poissonian of mean N over a unit-width conditional: 2 sqrt(2 N ln 2).

    Large-N asymptotic only; it vanishes as N -> 0.
    """
    if not mean_photons > 0:
        raise ValueError("mean photon number must be positive")
    return 2.0 * math.sqrt(2.0 * mean_photons * math.log(2.0))


def operational_R_eta(eta: float) -> float:
    """Loss-limited width ratio 1 / sqrt(1 - eta)."""
    if not 0.0 <= eta < 1.0:
        raise ValueError("efficiency must lie in [0, 1)")
    return 1.0 / math.sqrt(1.0 - eta)


@dataclass(frozen=True)
class EntanglementReport:
    K_single: float
    log_K_product: float
    K_product: float | None
    K_poisson: float
    K_asymptotic: float
    R_ideal: float
    R_eta: float


def entanglement_report(gamma: float, n_pairs: int, mean_photons: float,
                        eta: float) -> EntanglementReport:
    """Closed-form measures; degenerates to unity when there is no light."""
    if mean_photons > 0:
        k_asym = schmidt_asymptotic(mean_photons)
        r_ideal = operational_R(mean_photons)
    else:
        k_asym = r_ideal = 1.0
    return EntanglementReport(
        K_single=schmidt_single(gamma),
        log_K_product=schmidt_product(gamma, n_pairs),
        K_product=schmidt_product_linear(gamma, n_pairs),
        K_poisson=schmidt_poisson(mean_photons),
        K_asymptotic=k_asym,
        R_ideal=r_ideal,
        R_eta=operational_R_eta(eta),
    )
