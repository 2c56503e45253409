import math

import numpy as np
import pytest
from scipy.linalg import expm

from oracles import random_density
from qwshrink import channels as ch
from qwshrink.errors import InvariantViolation
from qwshrink.states import PAULI, DensityMatrix, StateVector, bloch, expect, partial_trace, phase_encode, to_density

X, Y, Z, I2 = PAULI["X"], PAULI["Y"], PAULI["Z"], PAULI["I"]
GRID = np.linspace(0, 1, 21)


@pytest.mark.parametrize("build", [ch.phase_damping, ch.phase_flip, ch.ancilla_shrink_channel, ch.amplitude_damping])
def test_builtin_channels_complete(build):
    for p in GRID:
        assert build(p).completeness_residual() < 1e-12
    with pytest.raises(ValueError):
        build(1.1)


def test_bloch_laws(rng):
    for _ in range(5):
        rho = DensityMatrix(random_density(2, rng))
        b = bloch(rho)
        for p in GRID:
            pd = bloch(ch.phase_damping(p)(rho))
            assert (pd.x, pd.y, pd.z) == pytest.approx((math.sqrt(1 - p) * b.x, math.sqrt(1 - p) * b.y, b.z), abs=1e-12)
            pf = bloch(ch.phase_flip(p)(rho))
            assert pf.x == pytest.approx((1 - 2 * p) * b.x, abs=1e-12)
            an = bloch(ch.ancilla_shrink_channel(p)(rho))
            assert (an.x, an.z) == pytest.approx(((2 * p - 1) * b.x, b.z), abs=1e-12)
            ad = bloch(ch.amplitude_damping(p)(rho))
            assert ad.z == pytest.approx(p + (1 - p) * b.z, abs=1e-12)


def test_phase_damping_one_kills_coherence():
    psi = phase_encode(np.array([0.2, 0.1, 0.9, 0.0, 0.3, -1.0, 0.2, 0.4]), 1.0)
    out = ch.apply_channel(psi, ch.phase_damping(1.0), targets=[1])
    red = partial_trace(out, [1]).rho
    assert abs(red[0, 1]) < 1e-15 and abs(red[1, 0]) < 1e-15
    # other qubits keep their coherence
    assert abs(partial_trace(out, [0]).rho[0, 1]) > 0.1


def test_apply_channel_rejects_incomplete():
    bad = ch.KrausChannel((np.diag([1.0, 0.9]),), name="bad")
    with pytest.raises(InvariantViolation) as exc:
        ch.apply_channel(DensityMatrix(np.eye(2) / 2), bad)
    assert exc.value.name == "kraus_completeness"


def test_kraus_shape_checks():
    with pytest.raises(ValueError):
        ch.KrausChannel(())
    with pytest.raises(ValueError):
        ch.KrausChannel((np.eye(2), np.eye(4)))
    with pytest.raises(ValueError):
        ch.KrausChannel((np.eye(3),))


def test_identity_channel(rng):
    rho = DensityMatrix(random_density(4, rng))
    np.testing.assert_allclose(ch.identity_channel(2)(rho).rho, rho.rho)


def test_channel_json_round_trip():
    c = ch.amplitude_damping(0.3)
    back = ch.KrausChannel.from_json(c.to_json())
    assert back.name == c.name
    for a, b in zip(c.ops, back.ops):
        np.testing.assert_array_equal(a, b)


def test_retention_for_multiplier():
    assert ch.retention_for_multiplier(0.0) == 0.5
    assert ch.retention_for_multiplier(1.0) == 1.0
    assert ch.retention_for_multiplier(0.6) == pytest.approx(0.8)


def test_retention_vector_theta():
    r = ch.RetentionVector([1.0, 0.5, 0.0], [1, -1, 1])
    np.testing.assert_allclose(r.theta, [0.0, -math.pi / 4, math.pi / 2])
    back = ch.RetentionVector.from_theta(r.theta)
    np.testing.assert_allclose(back.s, r.s, atol=1e-15)
    with pytest.raises(ValueError):
        ch.RetentionVector([1.2])
    with pytest.raises(ValueError):
        ch.RetentionVector([0.5], [0.5])


@pytest.mark.parametrize("n", [1, 2, 3])
def test_dilation_equals_kraus(n, rng):
    for _ in range(5):
        s = rng.random(1 << n)
        dil = ch.ancilla_dilation(s, n, signs=rng.choice([-1.0, 1.0], 1 << n))
        kraus = ch.kraus_from_dilation(dil)
        rho = DensityMatrix(random_density(1 << n, rng))
        np.testing.assert_allclose(dil.apply(rho).rho, kraus(rho).rho, atol=1e-10)
        # diagonal populations in the ancilla-0 branch scale by s_j
        joint = dil.joint_state(rho).rho
        np.testing.assert_allclose(np.diag(joint).real[0::2], s * np.diag(rho.rho).real, atol=1e-12)


def test_uniform_angle_dilation_is_identity_channel(rng):
    # same-sign angles: both Kraus operators are multiples of I
    rho = DensityMatrix(random_density(2, rng))
    out = ch.ancilla_dilation([0.3, 0.3], 1).apply(rho)
    np.testing.assert_allclose(out.rho, rho.rho, atol=1e-12)


@pytest.mark.parametrize("s", [0.0, 0.25, 0.8, 1.0])
def test_signed_dilation_reproduces_ancilla_channel(s, rng):
    rho = DensityMatrix(random_density(2, rng))
    out = ch.ancilla_shrink_dilation(s).apply(rho)
    np.testing.assert_allclose(out.rho, ch.ancilla_shrink_channel(s)(rho).rho, atol=1e-12)


def test_dilation_shape_check():
    with pytest.raises(ValueError):
        ch.ancilla_dilation([0.5, 0.5, 0.5], 1)
    with pytest.raises(InvariantViolation):
        ch.DilationUnitary(np.diag([1, 1, 1, 2.0]), 1)


def test_weak_measurement():
    rho = DensityMatrix(np.array([[0.5, 0.5], [0.5, 0.5]]))
    w = ch.weak_measurement(0.4, X)
    out = w.apply(rho)
    np.testing.assert_allclose(out.rho, rho.rho)
    assert w.kraus().completeness_residual() < 1e-12
    proj = np.diag([1.0, 0.0])
    with pytest.raises(InvariantViolation) as exc:
        ch.weak_measurement(0.5, proj).apply(rho)
    assert exc.value.name == "trace_preservation"
    out = ch.weak_measurement(0.5, proj, renormalize=True).apply(rho)
    assert out.renormalized
    assert np.trace(out.rho).real == pytest.approx(1.0)


def test_feedback_map():
    P0, P1 = np.diag([1.0, 0.0]), np.diag([0.0, 1.0])
    fb = ch.feedback_map([(P0, I2), (P1, X)])
    out = fb(DensityMatrix(np.eye(2) / 2))
    np.testing.assert_allclose(out.rho, np.diag([1.0, 0.0]), atol=1e-15)
    with pytest.raises(InvariantViolation) as exc:
        ch.feedback_map([(P0, I2)])
    assert exc.value.name == "measurement_completeness"
    with pytest.raises(InvariantViolation):
        ch.feedback_map([(P0, I2), (P1, 2 * X)])


@pytest.mark.parametrize("n", [2, 3, 4])
@pytest.mark.parametrize("alpha", [0.05, 0.7])
def test_mixing_unitary_matches_expm(n, alpha):
    U = np.eye(1 << n, dtype=complex)
    for j in range(n - 1):
        H = sum(
            np.kron(np.kron(np.eye(1 << (n - j - 2)), np.kron(P, P)), np.eye(1 << j)) for P in (X, Y)
        )
        U = U @ expm(-1j * alpha * H)
    np.testing.assert_allclose(ch.mixing_unitary(alpha, n), U, atol=1e-12)


def test_mixing_preserves_excitation_number():
    d = np.array([0.3, -0.5, 0.8, 0.1])
    psi = ch.one_excitation_encode(d)
    np.testing.assert_allclose(ch.one_excitation_decode(psi), d)
    out = ch.mixing_unitary(0.2, 4) @ psi.amps
    assert np.sum(np.abs(out[1 << np.arange(4)]) ** 2) == pytest.approx(1.0)


def test_mixing_first_order_error_is_quadratic():
    d = np.array([0.3, -0.5, 0.8, 0.1])
    errs = []
    for alpha in (1e-2, 1e-3):
        psi = ch.one_excitation_encode(d)
        out = StateVector(ch.mixing_unitary(alpha, 4) @ psi.amps, norm=psi.norm, length=4)
        errs.append(np.abs(ch.one_excitation_decode(out) - ch.mixing_first_order(d, alpha)).max())
    assert errs[1] < errs[0] / 50


def test_mixing_needs_two_qubits():
    with pytest.raises(ValueError):
        ch.mixing_unitary(0.1, 1)


def test_expectation_after_damping_matches_multiplier():
    psi = StateVector(np.array([1.0, 1.0]) / math.sqrt(2))
    out = ch.phase_damping(0.36)(to_density(psi))
    assert expect(out, "X") == pytest.approx(0.8)
