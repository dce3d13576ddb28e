import math

import mpmath
import numpy as np
import pytest

from macrobell import fock, schmidt


def reference_i0_scaled(x):
    with mpmath.workdps(40):
        return float(mpmath.besseli(0, x) * mpmath.exp(-x))


@pytest.mark.parametrize("x", np.concatenate([[0.0, 2.0, 14.99, 15.0, 200.0], np.logspace(-3, 6, 50)]))
def test_bessel_against_mpmath(x):
    assert schmidt.bessel_i0_scaled(x) == pytest.approx(reference_i0_scaled(x), rel=1e-10)


def test_bessel_examples():
    assert schmidt.bessel_i0_scaled(0) == 1.0
    assert schmidt.bessel_i0_scaled(2.0) * math.exp(2.0) == pytest.approx(2.2795853023360673, rel=1e-14)
    asym = 1 / math.sqrt(400 * math.pi) * (1 + 1 / 1600 + 9 / (2 * 1600**2) + 225 / (6 * 1600**3))
    assert schmidt.bessel_i0_scaled(200.0) == pytest.approx(asym, rel=1e-10)
    with pytest.raises(ValueError):
        schmidt.bessel_i0_scaled(-1.0)


def test_single_and_product():
    assert schmidt.schmidt_single(0.0) == 1.0
    assert schmidt.schmidt_single(0.33) == pytest.approx(1.2258, abs=1e-4)
    spectrum = fock.schmidt_spectrum(0.33, 60)
    assert schmidt.schmidt_single(0.33) == pytest.approx(spectrum.schmidt_number, abs=1e-9)
    assert schmidt.schmidt_product(0.2, 1) == pytest.approx(2 * math.log(schmidt.schmidt_single(0.2)))
    assert schmidt.schmidt_product(0.0, 10) == 0.0
    assert schmidt.schmidt_product(0.33, 10**6) == pytest.approx(4.07e5, rel=2e-3)
    assert schmidt.schmidt_product_linear(0.33, 10**6) is None
    assert schmidt.schmidt_product_linear(0.2, 1) == pytest.approx(schmidt.schmidt_single(0.2) ** 2)
    with pytest.raises(ValueError):
        schmidt.schmidt_product(0.1, 0)


def test_poisson_and_asymptotic():
    assert schmidt.schmidt_poisson(0.0) == 1.0
    k = schmidt.schmidt_poisson(1e5)
    assert 1119 <= k <= 1123
    assert schmidt.schmidt_asymptotic(1e5) == pytest.approx(1120.998, abs=1e-3)
    assert schmidt.schmidt_poisson(100) == pytest.approx(35.449, rel=1e-3)
    assert schmidt.schmidt_asymptotic(1 / (4 * math.pi)) == pytest.approx(1.0)
    for n in (100, 1e3, 1e6, 1e12):
        assert schmidt.schmidt_poisson(n) / schmidt.schmidt_asymptotic(n) == pytest.approx(1, abs=1e-3)
    with pytest.raises(ValueError):
        schmidt.schmidt_asymptotic(0.0)


def test_operational_values():
    assert schmidt.operational_R(1e5) == pytest.approx(744.7, abs=0.05)
    assert schmidt.operational_R(1e4) == pytest.approx(235.5, abs=0.05)
    assert schmidt.operational_R_eta(0.0) == 1.0
    assert schmidt.operational_R_eta(0.57) == pytest.approx(1.525, abs=5e-4)
    with pytest.raises(ValueError):
        schmidt.operational_R_eta(1.0)


def test_monotonicity():
    n = np.logspace(-2, 7, 40)
    for f in (schmidt.schmidt_poisson, schmidt.schmidt_asymptotic, schmidt.operational_R):
        vals = [f(x) for x in n]
        assert all(b >= a for a, b in zip(vals, vals[1:]))
    eta = np.linspace(0, 0.99, 30)
    vals = [schmidt.operational_R_eta(e) for e in eta]
    assert all(b >= a for a, b in zip(vals, vals[1:]))


def test_partitions_differ():
    # single-pair and multimode Schmidt numbers answer different partitions
    g, m = 0.1, 50
    n = 2 * m * math.sinh(g) ** 2
    assert schmidt.schmidt_single(g) != pytest.approx(schmidt.schmidt_poisson(n), rel=1e-3)


def test_report_and_degenerate():
    r = schmidt.entanglement_report(0.05, 10**6, 1e5, 0.57)
    assert r.K_poisson >= 1 and r.K_asymptotic >= 1 and r.R_eta >= 1
    assert r.log_K_product == pytest.approx(schmidt.schmidt_product(0.05, 10**6))
    d = schmidt.entanglement_report(0.0, 1, 0.0, 0.0)
    assert (d.K_single, d.K_product, d.K_poisson, d.K_asymptotic, d.R_ideal, d.R_eta) == (1, 1, 1, 1, 1, 1)
