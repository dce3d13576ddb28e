import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from macrobell import fock
from macrobell import gaussian as ge
from macrobell.stokes import stokes_matrix, stokes_moments_gaussian, witness


def cs(gamma):
    return math.cosh(gamma) * math.sinh(gamma)


def idx(label):
    return ge.ModeId.parse(label).index


def same_up_to_phase(a, b, atol=1e-12):
    k = np.unravel_index(np.argmax(np.abs(b)), b.shape)
    phase = a[k] / b[k]
    return abs(abs(phase) - 1) < atol and np.allclose(a, phase * b, atol=atol)


def test_mode_ids():
    assert [ge.ModeId.parse(c).index for c in ge.CHANNELS] == [0, 1, 2, 3]
    assert ge.ModeId(2, "B", "V").index == 11
    with pytest.raises(ValueError):
        ge.ModeId.parse("CH")
    with pytest.raises(ValueError):
        ge.ModeId(-1, "A", "H")


def test_singlet_structure():
    g = 0.33
    s = ge.make_singlet(g)
    assert np.allclose(s.N, np.eye(4) * math.sinh(g) ** 2)
    assert math.isclose(s.N[0, 0].real, 0.11292, rel_tol=1e-4)
    assert s.M[idx("AH"), idx("BV")] == pytest.approx(cs(g))
    assert s.M[idx("AV"), idx("BH")] == pytest.approx(-cs(g))
    assert np.count_nonzero(np.abs(s.M) > 0) == 4  # two entries, symmetric


@pytest.mark.parametrize("maker", [ge.make_singlet, lambda g: ge.make_phi_state(g, 1.3),
                                   lambda g: ge.make_triplet("phi_plus", g)])
def test_zero_gain_is_vacuum(maker):
    s = maker(0.0)
    assert not np.any(s.N) and not np.any(s.M)


@pytest.mark.parametrize("bad", [-0.1, math.nan, math.inf])
def test_invalid_gain(bad):
    with pytest.raises(ValueError):
        ge.make_singlet(bad)


def test_unknown_kind():
    with pytest.raises(ValueError):
        ge.make_triplet("psi_zero", 0.1)


def test_phi_and_triplets():
    g = 0.2
    phi = ge.make_phi_state(g, 0.7)
    assert phi.M[idx("AH"), idx("BH")] == pytest.approx(cs(g))
    assert phi.M[idx("AV"), idx("BV")] == pytest.approx(np.exp(0.7j) * cs(g))
    pp = ge.make_triplet("psi_plus", g)
    assert pp.M[idx("AH"), idx("BV")] == pytest.approx(cs(g))
    assert pp.M[idx("AV"), idx("BH")] == pytest.approx(cs(g))
    assert np.allclose(ge.make_triplet("phi_minus", g).M, ge.make_phi_state(g, math.pi).M)
    assert np.allclose(ge.make_triplet("phi_plus", g).M, ge.make_phi_state(g, 0.0).M)


def test_non_unitary_rejected():
    with pytest.raises(ValueError):
        ge.PolarizationRotation(np.array([[1, 0], [0, 1.001]]))


def test_identity_rotation():
    s = ge.make_singlet(0.3)
    r = ge.apply_rotation(s, ge.PolarizationRotation(np.eye(2)))
    assert np.allclose(r.N, s.N) and np.allclose(r.M, s.M)


def test_singlet_rotation_invariance():
    rng = np.random.default_rng(3)
    s = ge.make_singlet(0.4)
    base = stokes_moments_gaussian(s)
    for _ in range(5):
        r = stokes_moments_gaussian(ge.apply_rotation(s, ge.PolarizationRotation.random(rng)))
        assert np.allclose(r.means, base.means, atol=1e-12)
        assert np.allclose(r.variances, base.variances, atol=1e-12)
        assert r.mean_S0 == pytest.approx(base.mean_S0, abs=1e-12)


def test_45_degree_rotation_maps_phi_minus_to_psi_plus():
    # the equal-rotation image of Phi-minus is the symmetric Psi-plus pattern;
    # the singlet is invariant under equal rotations, so it cannot be reached.
    g = 0.25
    out = ge.apply_rotation(ge.make_triplet("phi_minus", g), ge.PolarizationRotation.rotator(math.pi / 4))
    target = ge.make_triplet("psi_plus", g)
    assert np.allclose(out.M, target.M, atol=1e-12)
    assert np.allclose(out.N, target.N, atol=1e-12)
    f = fock.apply_rotation_fock(fock.build_state("phi_minus", g), ge.PolarizationRotation.rotator(math.pi / 4))
    assert same_up_to_phase(f.amplitudes, fock.build_psi_plus(g).amplitudes)


def test_singlet_frames():
    g = 0.15
    singlet = ge.make_singlet(g)
    for kind in ("psi_plus", "phi_minus", "phi_plus"):
        out = ge.apply_rotation(ge.make_triplet(kind, g), ge.singlet_frame(kind))
        assert same_up_to_phase(out.M, singlet.M), kind


@pytest.mark.parametrize("kind", ["psi_plus", "phi_minus", "phi_plus"])
def test_triplet_witness_zero_in_own_basis(kind):
    state = ge.apply_rotation(ge.make_triplet(kind, 0.15), ge.singlet_frame(kind))
    assert witness(stokes_moments_gaussian(state)).lhs == pytest.approx(0.0, abs=1e-12)


def test_loss():
    s = ge.make_singlet(0.2)
    assert np.allclose(ge.apply_loss(s, ge.LossMap.uniform(1.0)).N, s.N)
    lossy = ge.apply_loss(s, ge.LossMap.uniform(0.57))
    assert np.trace(lossy.N).real == pytest.approx(0.57 * np.trace(s.N).real)
    assert witness(stokes_moments_gaussian(lossy)).lhs == pytest.approx(3 * 0.43, abs=1e-12)
    with pytest.raises(ValueError):
        ge.LossMap((1.2, 1, 1, 1))


def test_psi_plus_plate_phases_give_singlet():
    g = 0.2
    pp = ge.make_triplet("psi_plus", g)
    out = ge.apply_mode_phases(pp, [0.0, math.pi, 0.0, 0.0])
    singlet = ge.make_singlet(g)
    assert np.allclose(out.M, singlet.M, atol=1e-12)
    assert np.allclose(out.N, singlet.N)


def test_mode_phases_keep_populations():
    s = ge.make_phi_state(0.3, 0.4)
    out = ge.apply_mode_phases(s, [0.3, -1.2, 2.0, 0.9])
    assert np.allclose(out.N.diagonal(), s.N.diagonal())
    assert stokes_moments_gaussian(out).mean_S0 == pytest.approx(stokes_moments_gaussian(s).mean_S0)
    with pytest.raises(ValueError):
        ge.apply_mode_phases(s, [0.0, 1.0])
    same = ge.apply_mode_phases(s, [0, 0, 0, 0])
    assert np.allclose(same.M, s.M)


def test_thermal_single_mode_covariance():
    # one mode of a two-mode squeezed pair is thermal; choose n = 2
    gamma = math.asinh(math.sqrt(2.0))
    s = ge.make_singlet(gamma)
    assert ge.photon_covariance(s, "AH", "AH") == pytest.approx(6.0)


def test_twin_difference_noiseless():
    s = ge.make_singlet(0.7)
    var = (ge.photon_covariance(s, "AH", "AH") + ge.photon_covariance(s, "BV", "BV")
           - 2 * ge.photon_covariance(s, "AH", "BV"))
    assert var == pytest.approx(0.0, abs=1e-12)
    cov = ge.photon_covariance_matrix(s)
    assert np.allclose(cov, cov.T)


def test_covariance_matches_oracle():
    g = 0.1
    cov = ge.photon_covariance_matrix(ge.make_singlet(g))
    _, oracle = fock.photon_number_moments(fock.build_singlet(g))
    assert np.allclose(cov, oracle, atol=1e-10)


def test_quadratic_covariance_is_stokes_variance():
    s = ge.apply_loss(ge.make_singlet(0.3), ge.LossMap.uniform(0.6))
    K = stokes_matrix(2)
    m = stokes_moments_gaussian(s)
    assert ge.quadratic_covariance(s, K, K).real == pytest.approx(m.var_S2)


def test_combine_and_multipair_rotation():
    s = ge.combine([ge.make_singlet(0.1), ge.make_singlet(0.2)])
    assert s.n_pairs == 2 and s.n_modes == 8
    r = ge.apply_rotation(s, ge.PolarizationRotation.rotator(0.3))
    ge.check_state(r)
    assert witness(stokes_moments_gaussian(r)).lhs == pytest.approx(0.0, abs=1e-12)


unit = st.floats(0, 2 * math.pi, allow_nan=False)


@settings(max_examples=40, deadline=None)
@given(st.floats(0, 1.0), unit, unit, unit, st.sampled_from(["singlet", "psi_plus", "phi_minus", "phi_plus"]),
       st.floats(0, 1), st.sampled_from(["A", "B", "AB"]))
def test_transforms_preserve_structure(gamma, a, b, c, kind, eta, beams):
    U = np.array([[np.cos(a), -np.exp(1j * b) * np.sin(a)],
                  [np.exp(1j * c) * np.sin(a), np.exp(1j * (b + c)) * np.cos(a)]])
    s = ge.make_state(kind, gamma)
    r = ge.apply_rotation(s, ge.PolarizationRotation(U, beams))
    ge.check_state(r)
    assert np.trace(r.N).real == pytest.approx(np.trace(s.N).real, abs=1e-10)
    p = ge.apply_mode_phases(r, [a, b, c, a + b])
    ge.check_state(p)
    assert np.trace(p.N).real == pytest.approx(np.trace(s.N).real, abs=1e-10)
    lossy = ge.apply_loss(p, ge.LossMap.uniform(eta))
    ge.check_state(lossy)
    assert np.trace(lossy.N).real == pytest.approx(eta * np.trace(s.N).real, abs=1e-10)
