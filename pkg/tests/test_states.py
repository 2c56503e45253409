import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from oracles import kron_embed, naive_partial_trace, random_density
from qwshrink.errors import InvariantViolation
from qwshrink.pipeline import EXAMPLE_VECTOR
from qwshrink.states import (
    HADAMARD,
    PAULI,
    DensityMatrix,
    PauliString,
    StateVector,
    amplitude_decode,
    amplitude_encode,
    apply_operator,
    apply_unitary,
    bloch,
    expect,
    expectation_encode,
    hybrid_decode,
    hybrid_encode,
    partial_trace,
    phase_encode,
    random_density_matrix,
    rescale_to_unit,
    state_from_csv,
    state_to_csv,
    to_density,
)

EXAMPLE_RESCALED = np.array([0.2, 0.1, 0.9, 0.0, 0.3, -1.0, 0.2, 0.4])


def test_amplitude_round_trip_with_padding():
    x = np.array([3.0, -4.0, 0.0, 1.0, 2.0])
    psi = amplitude_encode(x)
    assert psi.amps.size == 8 and psi.length == 5
    assert psi.norm_residual() < 1e-12
    np.testing.assert_allclose(amplitude_decode(psi), x, atol=1e-12)


def test_amplitude_zero_vector_rejected():
    with pytest.raises(ValueError):
        amplitude_encode(np.zeros(4))


def test_state_size_checks():
    with pytest.raises(ValueError):
        StateVector(np.ones(3))
    with pytest.raises(ValueError):
        StateVector(np.ones(1 << 13))


@pytest.mark.parametrize("v", [-1.0, -0.35, 0.0, 0.5, 1.0])
def test_expectation_encode(v):
    psi = expectation_encode(v)
    assert expect(psi, "X") == pytest.approx(v, abs=1e-12)
    assert expect(psi, "Z") == pytest.approx(0.0, abs=1e-12)
    with pytest.raises(ValueError):
        expectation_encode(1.5)


def test_phase_encode_example_vector():
    psi = phase_encode(EXAMPLE_RESCALED, 1.0)
    np.testing.assert_allclose(np.abs(psi.amps), 1 / math.sqrt(8), atol=1e-12)
    np.testing.assert_allclose(np.angle(psi.amps), EXAMPLE_RESCALED, atol=1e-12)


@settings(max_examples=50, deadline=None)
@given(arrays(float, st.integers(1, 16),
              elements=st.floats(-10, 10).filter(lambda v: v == 0 or abs(v) > 1e-100)))
def test_hybrid_round_trip(x):
    if not np.any(x):
        return
    np.testing.assert_allclose(hybrid_decode(hybrid_encode(x)), x, atol=1e-9)


def test_hybrid_negative_phase():
    psi = hybrid_encode([1.0, -1.0])
    # sign qubit is the most significant; index 3 = (sign=1, j=1) carries -1
    np.testing.assert_allclose(psi.amps.real, [0.5, 0.5, 0.5, -0.5])


def test_pauli_string_qubit_order():
    # letters[0] acts on qubit 0, which is the least significant bit
    np.testing.assert_allclose(PauliString("XZ").matrix(), np.kron(PAULI["Z"], PAULI["X"]))
    with pytest.raises(ValueError):
        PauliString("XA")


@pytest.mark.parametrize("targets", [[0], [2], [1, 3], [3, 0], [2, 0, 1]])
def test_apply_operator_matches_embedding(targets, rng):
    n = 4
    k = len(targets)
    op = rng.standard_normal((1 << k, 1 << k)) + 1j * rng.standard_normal((1 << k, 1 << k))
    psi = StateVector(rng.standard_normal(1 << n) + 0j)
    full = kron_embed(op, targets, n)
    np.testing.assert_allclose(apply_operator(psi, op, targets), full @ psi.amps, atol=1e-12)
    rho = DensityMatrix(random_density(1 << n, rng))
    np.testing.assert_allclose(apply_operator(rho, op, targets), full @ rho.rho @ full.conj().T, atol=1e-12)


def test_apply_operator_rejects_bad_targets():
    psi = StateVector(np.ones(4) / 2)
    with pytest.raises(ValueError):
        apply_operator(psi, PAULI["X"], [2])
    with pytest.raises(ValueError):
        apply_operator(psi, np.eye(4), [0, 0])
    with pytest.raises(ValueError):
        apply_operator(psi, np.eye(4), [0])


def test_apply_unitary_rejects_non_unitary():
    psi = StateVector(np.array([1.0, 0.0]))
    with pytest.raises(InvariantViolation) as exc:
        apply_unitary(psi, np.array([[1.0, 0.0], [0.0, 0.5]]))
    assert exc.value.name == "unitarity"
    out = apply_unitary(psi, HADAMARD)
    np.testing.assert_allclose(out.amps, [1 / math.sqrt(2)] * 2)


@pytest.mark.parametrize("keep", [[0], [1], [2], [0, 2], [1, 2]])
def test_partial_trace_matches_oracle(keep, rng):
    rho = random_density(8, rng)
    np.testing.assert_allclose(partial_trace(DensityMatrix(rho), keep).rho, naive_partial_trace(rho, keep, 3),
                               atol=1e-12)


def test_bloch_of_plus_state():
    psi = StateVector(np.array([1.0, 1.0]) / math.sqrt(2))
    b = bloch(psi)
    assert (b.x, b.y, b.z) == pytest.approx((1.0, 0.0, 0.0))
    assert b.length() == pytest.approx(1.0)


def test_expect_length_mismatch():
    with pytest.raises(ValueError):
        expect(StateVector(np.ones(4) / 2), "X")


def test_density_validation(rng):
    rho = random_density_matrix(2, rng)
    rho.validate()
    assert 0.25 <= rho.purity() <= 1.0
    with pytest.raises(InvariantViolation) as exc:
        DensityMatrix(np.diag([1.2, -0.2])).validate()
    assert exc.value.name == "density_psd"
    with pytest.raises(InvariantViolation):
        DensityMatrix(np.diag([0.6, 0.6])).validate()


def test_rescale_maxabs_example_vector():
    d, rec = rescale_to_unit(EXAMPLE_VECTOR)
    np.testing.assert_allclose(d, EXAMPLE_RESCALED, atol=1e-15)
    assert rec.scale == 10.0
    np.testing.assert_allclose(rec.undo(d), EXAMPLE_VECTOR)


def test_rescale_affine():
    d, rec = rescale_to_unit(EXAMPLE_VECTOR, "affine")
    assert d.min() == -1.0 and d.max() == 1.0
    np.testing.assert_allclose(rec.undo(d), EXAMPLE_VECTOR, atol=1e-12)
    with pytest.raises(ValueError):
        rescale_to_unit(np.ones(3), "affine")
    with pytest.raises(ValueError):
        rescale_to_unit(np.zeros(3))
    with pytest.raises(ValueError):
        rescale_to_unit(np.ones(3), "minmax")


def test_state_csv_round_trip(rng):
    psi = StateVector((rng.standard_normal(8) + 1j * rng.standard_normal(8)) / 4)
    text = state_to_csv(psi)
    assert text.startswith("index,re,im\n") and "\r" not in text
    np.testing.assert_array_equal(state_from_csv(text).amps, psi.amps)


def test_to_density_is_projector(rng):
    psi = StateVector(np.exp(1j * rng.random(4)) / 2)
    rho = to_density(psi)
    assert rho.purity() == pytest.approx(1.0)
