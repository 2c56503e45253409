import math

import numpy as np
import pytest

from qwshrink.errors import InvariantViolation
from qwshrink.givens import (
    GivensPlan,
    Rotation,
    givens_apply,
    givens_apply_inverse,
    givens_factorize,
    givens_replay,
    rotation_count_report,
    rotation_matrix,
)
from qwshrink.wavelets import build_filter, build_wavelet_matrix


def test_haar_2x2_is_one_rotation():
    H = np.array([[1, 1], [1, -1]]) / math.sqrt(2)
    plan = givens_factorize(H)
    assert len(plan) == 1
    assert plan.rotations[0].theta == pytest.approx(math.pi / 4)
    assert plan.signs.tolist() == [1.0, -1.0]
    np.testing.assert_allclose(givens_replay(plan), H, atol=1e-15)


def test_rotation_matrix_convention():
    G = rotation_matrix(3, 0, 2, 0.3)
    c, s = math.cos(0.3), math.sin(0.3)
    np.testing.assert_allclose(G, [[c, 0, -s], [0, 1, 0], [s, 0, c]])


@pytest.mark.parametrize("N", [1, 2, 3, 7, 16, 33])
def test_random_orthogonal_replay(N, rng):
    Q, _ = np.linalg.qr(rng.standard_normal((N, N)))
    plan = givens_factorize(Q)
    assert len(plan) <= N * (N - 1) // 2
    assert np.linalg.norm(givens_replay(plan) - Q) < 1e-12
    x = rng.standard_normal((4, N))
    np.testing.assert_allclose(givens_apply(plan, x), x @ Q.T, atol=1e-12)
    np.testing.assert_allclose(givens_apply_inverse(plan, givens_apply(plan, x)), x, atol=1e-12)


def test_identity_needs_no_rotations():
    plan = givens_factorize(np.eye(5))
    assert len(plan) == 0
    assert plan.signs.tolist() == [1.0] * 5


def test_non_orthogonal_rejected():
    with pytest.raises(InvariantViolation) as exc:
        givens_factorize(np.array([[1.0, 0.1], [0.0, 1.0]]))
    assert exc.value.name == "orthogonality"


def test_non_square_rejected():
    with pytest.raises(ValueError):
        givens_factorize(np.ones((2, 3)))


def test_bad_rotation_index():
    plan = GivensPlan((Rotation(0, 5, 0.1),), np.ones(3))
    with pytest.raises(IndexError):
        givens_replay(plan)
    with pytest.raises(IndexError):
        givens_apply(plan, np.ones(3))


# frozen regression values recorded from the first verified run
@pytest.mark.parametrize(
    "name,N,J,count,depth",
    [("haar", 8, 1, 8, 7), ("daub4", 8, 1, 19, 11), ("daub4", 1024, 3, 8270, 1543)],
)
def test_rotation_count_regression(name, N, J, count, depth):
    W = build_wavelet_matrix(build_filter(name), N, J)
    plan = givens_factorize(W)
    rep = rotation_count_report(plan)
    assert (rep.count, rep.depth) == (count, depth)
    assert np.linalg.norm(givens_replay(plan) - W.matrix) < 1e-10


def test_report_layers_disjoint_pairs():
    plan = GivensPlan((Rotation(0, 1, 0.1), Rotation(2, 3, 0.1), Rotation(1, 2, 0.1)), np.ones(4))
    rep = rotation_count_report(plan)
    assert (rep.count, rep.depth, rep.max_layer_width) == (3, 2, 2)
