import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spincavity.gates import (
    Ebs,
    Ideal,
    Lossy,
    apply_gate,
    diagonal_coefficients,
    photon_rotation_matrix,
    spin_rotation_by_photons,
)
from spincavity.protocols import BellState, prepare_bell
from spincavity.qstate import KET, Basis, PureState, branch_probabilities, join, make_state, overlap_amplitude, pol, port, project, spin

SPIN = spin()


def both(state, mode):
    return apply_gate(apply_gate(state, pol(1), SPIN, mode), pol(2), SPIN, mode)


def with_plus(bell):
    return join(prepare_bell(bell), make_state([(SPIN, KET["+"])]))


def random_state(seed, labels):
    rng = np.random.default_rng(seed)
    v = rng.normal(size=2 ** len(labels)) + 1j * rng.normal(size=2 ** len(labels))
    return PureState(tuple(labels), v / np.linalg.norm(v))


def test_ideal_angle_is_wrapped():
    assert Ideal(3 * math.pi / 2).delta_phi == pytest.approx(-math.pi / 2)
    assert Ideal(-math.pi).delta_phi == pytest.approx(math.pi)


def test_coefficient_order():
    assert np.allclose(diagonal_coefficients(Ideal()), [1, 1j, 1j, 1])
    assert diagonal_coefficients(Lossy(0.3, 0.2j)) == (0.3, 0.2j, 0.2j, 0.3)
    with pytest.raises(TypeError):
        diagonal_coefficients(Ebs())


def test_gate_acts_on_r_down_and_l_up():
    st_ = make_state([(pol(1), KET["R"]), (SPIN, KET["down"])])
    assert np.allclose(apply_gate(st_, pol(1), SPIN, Ideal()).amplitudes, [0, 1j, 0, 0])
    # spin listed before the photon
    st_ = make_state([(SPIN, KET["up"]), (pol(1), KET["L"])])
    assert np.allclose(apply_gate(st_, pol(1), SPIN, Ideal()).amplitudes, [0, 1j, 0, 0])


@pytest.mark.parametrize("bell, partner", [(BellState.PHI_PLUS, BellState.PHI_MINUS),
                                           (BellState.PHI_MINUS, BellState.PHI_PLUS)])
def test_phi_flips_sign_and_spin(bell, partner):
    out = both(with_plus(bell), Ideal())
    want = join(prepare_bell(partner), make_state([(SPIN, KET["-"])]))
    assert abs(overlap_amplitude(want, out)) == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("bell", [BellState.PSI_PLUS, BellState.PSI_MINUS])
def test_psi_gains_i(bell):
    out = both(with_plus(bell), Ideal())
    assert overlap_amplitude(with_plus(bell), out) == pytest.approx(1j, abs=1e-12)


def test_lossy_unit_phase_equals_ideal():
    st_ = random_state(1, [pol(1), pol(2), SPIN])
    assert np.allclose(both(st_, Lossy(1, 1j)).amplitudes, both(st_, Ideal()).amplitudes, atol=1e-15)


def test_lossy_norm_loss():
    st_ = random_state(2, [pol(1), SPIN])
    out = apply_gate(st_, pol(1), SPIN, Lossy(0.9, 0.4))
    amp2 = np.abs(st_.amplitudes) ** 2
    expected = 0.81 * (amp2[0] + amp2[3]) + 0.16 * (amp2[1] + amp2[2])
    assert out.norm2 == pytest.approx(expected, abs=1e-12)


@settings(max_examples=30, deadline=None)
@given(st.floats(-math.pi, math.pi), st.floats(-math.pi, math.pi), st.integers(0, 1000))
def test_ideal_angles_compose(a, b, seed):
    st_ = random_state(seed, [pol(1), SPIN])
    ab = apply_gate(apply_gate(st_, pol(1), SPIN, Ideal(a)), pol(1), SPIN, Ideal(b))
    direct = apply_gate(st_, pol(1), SPIN, Ideal(a + b))
    assert np.allclose(ab.amplitudes, direct.amplitudes, atol=1e-12)
    assert direct.norm2 == pytest.approx(1.0, abs=1e-12)


@settings(max_examples=20, deadline=None)
@given(st.floats(-math.pi, math.pi), st.floats(-math.pi, math.pi), st.integers(0, 1000))
def test_port_measurement_commutes_with_polarization(pt, pr, seed):
    st_ = random_state(seed, [pol(1), SPIN])
    out = apply_gate(st_, pol(1), SPIN, Ebs(np.exp(1j * pt), np.exp(1j * pr)))
    for k in (0, 1):
        for h in (0, 1):
            a = project(project(out, port(1), Basis.TR, k), pol(1), Basis.HV, h)
            b = project(project(out, pol(1), Basis.HV, h), port(1), Basis.TR, k)
            assert np.allclose(a.amplitudes, b.amplitudes, atol=1e-12)
    assert sum(branch_probabilities(out, port(1), Basis.TR)) == pytest.approx(1.0, abs=1e-12)


def test_single_r_photon_quarter_turn():
    st_ = make_state([(SPIN, (0.6, 0.8))])
    out = spin_rotation_by_photons(st_, SPIN, ["R"])
    assert np.allclose(out.amplitudes, [0.6, 0.8j])


def test_two_r_photons_flip_the_down_sign():
    st_ = make_state([(SPIN, (0.6, 0.8))])
    assert np.allclose(spin_rotation_by_photons(st_, SPIN, ["R", "R"]).amplitudes, [0.6, -0.8])


def test_four_photons_are_identity_up_to_phase():
    m = photon_rotation_matrix(["R"] * 4, math.pi / 2)
    assert np.allclose(m / m[0, 0], np.eye(2))
    m = photon_rotation_matrix(["L"] * 4, math.pi / 2)
    assert np.allclose(m / m[0, 0], np.eye(2))


def test_r_and_l_rotations_commute():
    r = photon_rotation_matrix(["R"], 0.37)
    l = photon_rotation_matrix(["L"], 1.21)
    assert np.allclose(r @ l, l @ r, atol=1e-12)
    with pytest.raises(ValueError):
        photon_rotation_matrix(["H"], 0.1)
