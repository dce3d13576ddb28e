import math

import numpy as np
import pytest

from macrobell import fock
from macrobell import gaussian as ge
from macrobell.stokes import stokes_moments_gaussian


def test_zero_gain_vacuum():
    s = fock.build_singlet(0.0, n_max=3)
    assert s.amplitude(0, 0, 0, 0) == 1
    assert s.norm == pytest.approx(1.0)
    assert np.count_nonzero(s.amplitudes) == 1
    v = fock.stokes_moments_exact(s)
    assert np.allclose([v.mean_S0, *v.means, *v.variances], 0)


def test_single_pair_amplitude():
    g = 0.1
    s = fock.build_singlet(g)
    assert s.amplitude(1, 0, 0, 1) == pytest.approx(math.tanh(g) / math.cosh(g) ** 2)
    assert s.amplitude(0, 1, 1, 0) == pytest.approx(-math.tanh(g) / math.cosh(g) ** 2)


def test_norm_deficit_and_tail():
    s = fock.build_singlet(0.3, n_max=40)
    assert 1 - s.norm < 1e-12
    assert 1 - s.norm <= s.tail_bound * (1 + 1e-9) + 1e-16
    auto = fock.build_singlet(0.3)
    assert auto.tail_bound < fock.TAIL_TOL


def test_tail_formula_matches_discarded_norm():
    g, n = 0.4, 12
    x = math.tanh(g) ** 2
    # per-beam totals follow (N + 1)(1 - x)^2 x^N
    kept = sum((k + 1) * (1 - x) ** 2 * x**k for k in range(n + 1))
    assert fock.pair_tail(g, n) == pytest.approx(1 - kept, rel=1e-10)
    assert fock.build_singlet(g, n, tol=1.0).norm == pytest.approx(kept, rel=1e-12)


def test_truncation_error_is_explicit():
    with pytest.raises(fock.TruncationError):
        fock.build_singlet(0.5, n_max=5)
    with pytest.raises(fock.TruncationError):
        fock.build_singlet(3.0)


def test_norm_monotone_in_n_max():
    norms = [fock.build_singlet(0.5, n, tol=1.0).norm for n in range(1, 30)]
    assert all(b >= a for a, b in zip(norms, norms[1:]))


def test_twin_correlation_support():
    amp = fock.build_singlet(0.4).amplitudes
    idx = np.argwhere(np.abs(amp) > 0)
    assert np.all(idx[:, 0] == idx[:, 3]) and np.all(idx[:, 1] == idx[:, 2])


def test_combined_expansion_agrees():
    g = 0.35
    s = fock.build_singlet(g)
    for n in range(5):
        for m in range(5):
            assert s.amplitude(n, m, m, n) == pytest.approx(fock.expansion_amplitude(g, n, m, m, n), abs=1e-15)
    assert fock.expansion_amplitude(g, 1, 0, 1, 0) == 0.0
    # combined weight of the N-photon block is (N + 1) tanh^(2N) / cosh^4
    for total in range(5):
        w = sum(fock.expansion_amplitude(g, n, total - n, total - n, n) ** 2 for n in range(total + 1))
        assert w == pytest.approx((total + 1) * math.tanh(g) ** (2 * total) / math.cosh(g) ** 4)


def test_singlet_moments_vanish():
    m = fock.stokes_moments_exact(fock.build_singlet(0.2))
    assert np.allclose(m.means, 0, atol=1e-12)
    assert np.allclose(m.variances, 0, atol=1e-12)
    assert m.mean_S0 == pytest.approx(4 * math.sinh(0.2) ** 2, rel=1e-10)


def test_phi_state_s2_suppression_and_marginals():
    lo = fock.stokes_moments_exact(fock.build_phi_state(0.2, math.pi))
    hi = fock.stokes_moments_exact(fock.build_phi_state(0.2, 0.0))
    assert lo.var_S2 < hi.var_S2
    a = np.abs(fock.build_phi_state(0.2, 0.4).amplitudes)
    b = np.abs(fock.build_phi_state(0.2, 2.1).amplitudes)
    assert np.allclose(a, b)
    assert fock.build_phi_state(0.0, 0.0, n_max=2).amplitude(0, 0, 0, 0) == 1


@pytest.mark.parametrize("beam", ["A", "B"])
def test_stokes_square_identity(beam):
    rng = np.random.default_rng(5)
    state = fock.apply_rotation_fock(fock.build_phi_state(0.3, 0.8), ge.PolarizationRotation.random(rng))
    lhs, rhs = fock.stokes_square_identity(state, beam)
    assert lhs == pytest.approx(rhs, rel=1e-10)


def test_rotation_identity_and_singlet_invariance():
    s = fock.build_singlet(0.3)
    same = fock.apply_rotation_fock(s, ge.PolarizationRotation(np.eye(2)))
    assert np.allclose(same.amplitudes, s.amplitudes)
    U = ge.PolarizationRotation.random(np.random.default_rng(1)).U
    special = U / np.sqrt(np.linalg.det(U))
    rot = fock.apply_rotation_fock(s, ge.PolarizationRotation(special))
    assert np.allclose(rot.amplitudes, s.amplitudes, atol=1e-12)
    assert rot.norm == pytest.approx(s.norm, abs=1e-14)
    # a general U(2) multiplies each pair creation operator by det U
    general = fock.apply_rotation_fock(s, ge.PolarizationRotation(U))
    n = np.indices(s.amplitudes.shape)
    total = n[0] + n[1]
    assert np.allclose(general.amplitudes, s.amplitudes * np.linalg.det(U) ** total, atol=1e-12)


def test_rotation_preserves_norm_and_agrees_with_engine():
    rng = np.random.default_rng(11)
    for kind in ("singlet", "psi_plus", "phi_minus", "phi_plus"):
        rot = ge.PolarizationRotation.random(rng, beams="A")
        f = fock.apply_rotation_fock(fock.build_state(kind, 0.2), rot)
        g = ge.apply_rotation(ge.make_state(kind, 0.2), rot)
        assert f.norm == pytest.approx(fock.build_state(kind, 0.2).norm, abs=1e-14)
        a, b = stokes_moments_gaussian(g), fock.stokes_moments_exact(f)
        assert np.allclose(a.means, b.means, atol=1e-10)
        assert np.allclose(a.variances, b.variances, atol=1e-10)


def test_mode_phases_match_engine():
    phases = [0.4, 1.9, -0.7, 2.5]
    f = fock.apply_mode_phases_fock(fock.build_psi_plus(0.25), phases)
    g = ge.apply_mode_phases(ge.make_triplet("psi_plus", 0.25), phases)
    a, b = stokes_moments_gaussian(g), fock.stokes_moments_exact(f)
    assert np.allclose(a.variances, b.variances, atol=1e-10)


def test_schmidt_spectrum():
    sp = fock.schmidt_spectrum(0.0, 5)
    assert sp.lam[0] == 1 and not np.any(sp.lam[1:])
    assert sp.schmidt_number == pytest.approx(1.0)
    sp = fock.schmidt_spectrum(0.33, 60)
    assert sp.schmidt_number == pytest.approx(1 + 2 * math.sinh(0.33) ** 2, abs=1e-9)
    assert np.all(np.diff(sp.lam) <= 0)
    n = np.arange(61)
    # mean photon number of the pair: 2 sinh^2
    assert 2 * np.sum(n * sp.lam) == pytest.approx(2 * math.sinh(0.33) ** 2, rel=1e-12)
    with pytest.raises(ValueError):
        fock.schmidt_spectrum(-1.0, 3)
