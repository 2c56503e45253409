"""Givens-rotation factorization of real orthogonal matrices.

A plan stores rotations ``G(i, j, theta)`` with ``cos`` on the diagonal,
``-sin`` at ``(i, j)`` and ``sin`` at ``(j, i)``.  Replaying a plan forms the
matrix product of the rotations in plan order, followed by the ``+-1`` sign
diagonal::

    W = G_1 G_2 ... G_K diag(signs)

The factorization is column-major QR-by-Givens: column ``c`` is cleared below
the diagonal by rotating each nonzero row ``r > c`` against pivot row ``c``.
Orthogonality forces the resulting triangular factor to be a sign diagonal.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvariantViolation
from .wavelets import OrthogonalTransform

ORTHO_TOL = 1e-10


@dataclass(frozen=True)
class Rotation:
    i: int
    j: int
    theta: float


@dataclass(frozen=True)
class GivensPlan:
    rotations: tuple[Rotation, ...]
    signs: np.ndarray

    @property
    def N(self) -> int:
        return int(self.signs.size)

    def __len__(self) -> int:
        return len(self.rotations)


def rotation_matrix(N: int, i: int, j: int, theta: float) -> np.ndarray:
    G = np.eye(N)
    c, s = math.cos(theta), math.sin(theta)
    G[i, i] = G[j, j] = c
    G[i, j] = -s
    G[j, i] = s
    return G


def givens_factorize(W, tol: float = ORTHO_TOL) -> GivensPlan:
    """Factor an orthogonal matrix into plane rotations and a sign diagonal.

    Accepts an :class:`OrthogonalTransform` or a square array.  Raises
    :class:`InvariantViolation` if ``||W W^T - I||_F`` exceeds ``tol``.
    """
    M = W.matrix if isinstance(W, OrthogonalTransform) else W
    A = np.array(M, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {A.shape}")
    N = A.shape[0]
    resid = float(np.linalg.norm(A @ A.T - np.eye(N)))
    if resid > tol:
        raise InvariantViolation("orthogonality", resid, "givens_factorize input")

    rotations = []
    for c in range(N - 1):
        rows = np.nonzero(A[c + 1 :, c])[0] + c + 1
        for r in rows:
            a, b = A[c, c], A[r, c]
            if b == 0.0:
                continue
            rho = math.hypot(a, b)
            cs, sn = a / rho, b / rho
            # apply G(c, r, theta)^T from the left; columns < c are already zero
            top = A[c, c:].copy()
            bot = A[r, c:]
            A[c, c:] = cs * top + sn * bot
            A[r, c:] = cs * bot - sn * top
            A[r, c] = 0.0
            rotations.append(Rotation(int(c), int(r), math.atan2(b, a)))
    signs = np.where(np.diag(A) < 0, -1.0, 1.0)
    signs.setflags(write=False)
    return GivensPlan(tuple(rotations), signs)


def _check_indices(plan: GivensPlan, N: int) -> None:
    for rot in plan.rotations:
        if rot.i == rot.j or not (0 <= rot.i < N and 0 <= rot.j < N):
            raise IndexError(f"rotation ({rot.i}, {rot.j}) invalid for N={N}")


def givens_replay(plan: GivensPlan, N: int | None = None) -> np.ndarray:
    """Rebuild the matrix ``G_1 ... G_K diag(signs)`` from a plan."""
    N = plan.N if N is None else N
    if plan.signs.size != N:
        raise ValueError(f"plan has {plan.signs.size} signs, expected {N}")
    _check_indices(plan, N)
    M = np.eye(N)
    for rot in plan.rotations:
        c, s = math.cos(rot.theta), math.sin(rot.theta)
        ci = M[:, rot.i].copy()
        cj = M[:, rot.j]
        M[:, rot.i] = c * ci + s * cj
        M[:, rot.j] = c * cj - s * ci
    return M * plan.signs[None, :]


def givens_apply(plan: GivensPlan, x) -> np.ndarray:
    """Apply the replayed matrix to signals on the last axis without forming it.

    The sign diagonal acts first, then the rotations in reverse plan order.
    """
    y = np.array(x, dtype=float) * plan.signs
    _check_indices(plan, plan.N)
    for rot in reversed(plan.rotations):
        c, s = math.cos(rot.theta), math.sin(rot.theta)
        yi = y[..., rot.i].copy()
        yj = y[..., rot.j]
        y[..., rot.i] = c * yi - s * yj
        y[..., rot.j] = s * yi + c * yj
    return y


def givens_apply_inverse(plan: GivensPlan, y) -> np.ndarray:
    """Apply the transpose of the replayed matrix (the reversed cascade)."""
    x = np.array(y, dtype=float)
    for rot in plan.rotations:
        c, s = math.cos(rot.theta), math.sin(rot.theta)
        xi = x[..., rot.i].copy()
        xj = x[..., rot.j]
        x[..., rot.i] = c * xi + s * xj
        x[..., rot.j] = c * xj - s * xi
    return x * plan.signs


@dataclass(frozen=True)
class RotationReport:
    count: int
    depth: int
    max_layer_width: int


def rotation_count_report(plan: GivensPlan) -> RotationReport:
    """Rotation count and parallel depth under disjoint-pair scheduling.

    Layers are assigned greedily in plan order: each rotation lands one layer
    after the latest layer touching either of its indices.
    """
    last: dict[int, int] = {}
    widths: dict[int, int] = {}
    for rot in plan.rotations:
        layer = max(last.get(rot.i, 0), last.get(rot.j, 0)) + 1
        last[rot.i] = last[rot.j] = layer
        widths[layer] = widths.get(layer, 0) + 1
    return RotationReport(
        count=len(plan.rotations),
        depth=max(widths, default=0),
        max_layer_width=max(widths.values(), default=0),
    )
