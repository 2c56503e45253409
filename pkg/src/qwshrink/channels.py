"""CPTP maps as Kraus sets, ancilla dilations and the shrinkage channels.

Dilations put the system on the high qubits and the ancilla on the low ones,
so ``rho_S (x) |0><0|_E`` is literally ``np.kron(rho_S, |0><0|)`` and
``K_e = <e| U_SE |0>_E`` is a slice of ``U_SE`` reshaped to
``(d_S, d_E, d_S, d_E)``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import InvariantViolation
from .states import PAULI, DensityMatrix, StateVector, apply_operator, partial_trace, unitarity_residual

KRAUS_TOL = 1e-12
APPLY_TOL = 1e-10

_I2 = PAULI["I"]
_X = PAULI["X"]
_Y = PAULI["Y"]
_Z = PAULI["Z"]


@dataclass(frozen=True)
class KrausChannel:
    ops: tuple[np.ndarray, ...]
    name: str = "kraus"

    def __post_init__(self):
        ops = tuple(np.asarray(K, dtype=complex) for K in self.ops)
        if not ops:
            raise ValueError("a channel needs at least one Kraus operator")
        d = ops[0].shape[0]
        for K in ops:
            if K.shape != (d, d):
                raise ValueError(f"Kraus operators must all be {d}x{d}, got {K.shape}")
        if d & (d - 1):
            raise ValueError(f"Kraus dimension {d} is not a power of two")
        object.__setattr__(self, "ops", ops)

    @property
    def dim(self) -> int:
        return self.ops[0].shape[0]

    @property
    def num_qubits(self) -> int:
        return self.dim.bit_length() - 1

    def completeness_residual(self) -> float:
        total = sum(K.conj().T @ K for K in self.ops)
        return float(np.max(np.abs(total - np.eye(self.dim))))

    def check(self, tol: float = KRAUS_TOL) -> "KrausChannel":
        resid = self.completeness_residual()
        if resid > tol:
            raise InvariantViolation("kraus_completeness", resid, self.name)
        return self

    def __call__(self, rho, targets: Sequence[int] | None = None) -> DensityMatrix:
        return apply_channel(rho, self, targets)

    def to_json(self) -> str:
        return json.dumps({"name": self.name, "ops": [_matrix_to_list(K) for K in self.ops]})

    @classmethod
    def from_json(cls, text: str) -> "KrausChannel":
        doc = json.loads(text)
        return cls(tuple(_matrix_from_list(m) for m in doc["ops"]), name=doc.get("name", "kraus"))


def _matrix_to_list(M: np.ndarray) -> list:
    return [[[float(z.real), float(z.imag)] for z in row] for row in M]


def _matrix_from_list(rows) -> np.ndarray:
    return np.array([[complex(re, im) for re, im in row] for row in rows])


def _unit_interval(value: float, label: str) -> float:
    value = float(value)
    if not 0.0 <= value <= 1.0:
        raise ValueError(f"{label} must lie in [0, 1], got {value}")
    return value


def apply_channel(rho, channel: KrausChannel, targets: Sequence[int] | None = None,
                  tol: float = APPLY_TOL) -> DensityMatrix:
    """``sum_m K_m rho K_m^dagger`` with the Kraus set embedded on ``targets``."""
    if isinstance(rho, StateVector):
        rho = DensityMatrix(np.outer(rho.amps, rho.amps.conj()))
    if targets is None:
        targets = list(range(channel.num_qubits))
    if len(targets) != channel.num_qubits:
        raise ValueError(
            f"channel acts on {channel.num_qubits} qubits but {len(targets)} targets given"
        )
    channel.check(tol)
    out = sum(apply_operator(rho, K, targets) for K in channel.ops)
    return DensityMatrix(out)


def identity_channel(num_qubits: int = 1) -> KrausChannel:
    return KrausChannel((np.eye(1 << num_qubits, dtype=complex),), name="identity")


def phase_damping(gamma: float) -> KrausChannel:
    """Pure dephasing: transverse Bloch components scale by ``sqrt(1 - gamma)``."""
    gamma = _unit_interval(gamma, "gamma")
    K0 = np.diag([1.0, math.sqrt(1.0 - gamma)]).astype(complex)
    K1 = np.diag([0.0, math.sqrt(gamma)]).astype(complex)
    return KrausChannel((K0, K1), name=f"phase_damping({gamma:g})")


def phase_flip(gamma: float) -> KrausChannel:
    """``(1 - gamma) rho + gamma Z rho Z``; ``<X>`` scales by ``1 - 2 gamma``."""
    gamma = _unit_interval(gamma, "gamma")
    return KrausChannel(
        (math.sqrt(1.0 - gamma) * _I2, math.sqrt(gamma) * _Z), name=f"phase_flip({gamma:g})"
    )


def ancilla_shrink_channel(s: float) -> KrausChannel:
    """``s rho + (1 - s) Z rho Z``; ``<X>, <Y>`` scale by ``2s - 1``, ``<Z>`` is kept."""
    s = _unit_interval(s, "s")
    return KrausChannel(
        (math.sqrt(s) * _I2, math.sqrt(1.0 - s) * _Z), name=f"ancilla_shrink({s:g})"
    )


def amplitude_damping(gamma: float) -> KrausChannel:
    """Decay towards ``|0>`` with probability ``gamma``."""
    gamma = _unit_interval(gamma, "gamma")
    K0 = np.diag([1.0, math.sqrt(1.0 - gamma)]).astype(complex)
    K1 = np.array([[0.0, math.sqrt(gamma)], [0.0, 0.0]], dtype=complex)
    return KrausChannel((K0, K1), name=f"amplitude_damping({gamma:g})")


def retention_for_multiplier(m: float) -> float:
    """Retention ``s`` making :func:`ancilla_shrink_channel` scale ``<X>`` by ``m``.

    The channel multiplies ``<X>`` by ``2s - 1``, hence ``s = (1 + m) / 2``.
    """
    m = _unit_interval(m, "multiplier")
    return 0.5 * (1.0 + m)


# ---------------------------------------------------------------------------
# dilations


@dataclass(frozen=True)
class RetentionVector:
    """Per-basis-state retentions ``s_j`` and their signed control angles.

    ``theta_j = sign_j * arccos(sqrt(s_j))``; the sign does not change
    ``s_j = cos^2 theta_j`` but does change the phase of the flipped branch.
    """

    s: np.ndarray
    signs: np.ndarray | None = None

    def __post_init__(self):
        s = np.asarray(self.s, dtype=float).ravel()
        if np.any((s < 0.0) | (s > 1.0)):
            raise ValueError("retentions must lie in [0, 1]")
        object.__setattr__(self, "s", s)
        signs = np.ones_like(s) if self.signs is None else np.asarray(self.signs, dtype=float).ravel()
        if signs.shape != s.shape or not np.all(np.abs(signs) == 1.0):
            raise ValueError("signs must be +-1, one per retention")
        object.__setattr__(self, "signs", signs)

    @property
    def theta(self) -> np.ndarray:
        return self.signs * np.arccos(np.sqrt(self.s))

    @classmethod
    def from_theta(cls, theta) -> "RetentionVector":
        theta = np.asarray(theta, dtype=float)
        return cls(np.cos(theta) ** 2, np.where(theta < 0, -1.0, 1.0))


@dataclass(frozen=True)
class DilationUnitary:
    """Joint unitary on system (high qubits) and ancilla (low qubits).

    The ancilla always starts in ``|0...0>``.
    """

    U: np.ndarray
    n_sys: int
    ancilla_qubits: int = 1

    def __post_init__(self):
        U = np.asarray(self.U, dtype=complex)
        dim = 1 << (self.n_sys + self.ancilla_qubits)
        if U.shape != (dim, dim):
            raise ValueError(f"dilation unitary must be {dim}x{dim}, got {U.shape}")
        resid = unitarity_residual(U)
        if resid > 1e-10:
            raise InvariantViolation("unitarity", resid, "dilation")
        object.__setattr__(self, "U", U)

    @property
    def d_sys(self) -> int:
        return 1 << self.n_sys

    @property
    def d_env(self) -> int:
        return 1 << self.ancilla_qubits

    def joint_state(self, rho) -> DensityMatrix:
        """``U (rho (x) |0><0|) U^dagger`` before the ancilla is discarded."""
        rho = rho.rho if isinstance(rho, DensityMatrix) else np.asarray(rho, dtype=complex)
        env0 = np.zeros((self.d_env, self.d_env))
        env0[0, 0] = 1.0
        joint = np.kron(rho, env0)
        return DensityMatrix(self.U @ joint @ self.U.conj().T)

    def apply(self, rho) -> DensityMatrix:
        """Dilate, evolve and trace out the ancilla."""
        keep = range(self.ancilla_qubits, self.ancilla_qubits + self.n_sys)
        return partial_trace(self.joint_state(rho), keep)


def ancilla_dilation(s, n_sys: int, signs=None) -> DilationUnitary:
    """Block-diagonal ``exp(-i sum_j theta_j |j><j| (x) X_E)``.

    On system basis state ``|j>`` the ancilla sees
    ``[[cos t, -i sin t], [-i sin t, cos t]]`` with ``t = theta_j``, leaving
    ``|0>_E`` populated with probability ``s_j``.
    """
    ret = s if isinstance(s, RetentionVector) else RetentionVector(s, signs)
    if ret.s.size != 1 << n_sys:
        raise ValueError(f"need {1 << n_sys} retentions for {n_sys} system qubits, got {ret.s.size}")
    c = np.cos(ret.theta)
    sn = np.sin(ret.theta)
    d = ret.s.size
    U = np.zeros((2 * d, 2 * d), dtype=complex)
    idx = 2 * np.arange(d)
    U[idx, idx] = c
    U[idx + 1, idx + 1] = c
    U[idx, idx + 1] = -1j * sn
    U[idx + 1, idx] = -1j * sn
    return DilationUnitary(U, n_sys=n_sys, ancilla_qubits=1)


def ancilla_shrink_dilation(s: float) -> DilationUnitary:
    """Single-qubit dilation whose induced channel is ``s rho + (1-s) Z rho Z``.

    Opposite control angles on ``|0>`` and ``|1>`` make the flipped branch
    carry ``Z`` instead of the identity.
    """
    s = _unit_interval(s, "s")
    return ancilla_dilation(RetentionVector([s, s], [1.0, -1.0]), n_sys=1)


def kraus_from_dilation(dil: DilationUnitary, tol: float = APPLY_TOL) -> KrausChannel:
    """``K_e = <e| U_SE |0>_E`` for every ancilla basis state ``e``."""
    dS, dE = dil.d_sys, dil.d_env
    U4 = dil.U.reshape(dS, dE, dS, dE)
    ops = tuple(U4[:, e, :, 0].copy() for e in range(dE))
    ch = KrausChannel(ops, name="from_dilation")
    ch.check(tol)
    return ch


# ---------------------------------------------------------------------------
# hybrid mechanisms


class WeakMeasurement:
    """``rho -> (1 - eta) rho + eta M rho M^dagger``.

    When ``M^dagger M != I`` the map is not trace preserving; ``apply`` then
    raises unless ``renormalize=True``, in which case the output is divided by
    its trace and flagged via ``DensityMatrix.renormalized``.
    """

    def __init__(self, eta: float, M, renormalize: bool = False):
        self.eta = _unit_interval(eta, "eta")
        self.M = np.asarray(M, dtype=complex)
        if self.M.ndim != 2 or self.M.shape[0] != self.M.shape[1]:
            raise ValueError("measurement operator must be square")
        self.renormalize = renormalize

    @property
    def num_qubits(self) -> int:
        return self.M.shape[0].bit_length() - 1

    def kraus(self) -> KrausChannel:
        d = self.M.shape[0]
        return KrausChannel(
            (math.sqrt(1.0 - self.eta) * np.eye(d, dtype=complex), math.sqrt(self.eta) * self.M),
            name=f"weak_measurement({self.eta:g})",
        )

    def apply(self, rho, targets: Sequence[int] | None = None) -> DensityMatrix:
        if isinstance(rho, StateVector):
            rho = DensityMatrix(np.outer(rho.amps, rho.amps.conj()))
        targets = list(range(self.num_qubits)) if targets is None else targets
        out = (1.0 - self.eta) * rho.rho
        if self.eta:
            out = out + self.eta * apply_operator(rho, self.M, targets)
        tr = complex(np.trace(out))
        if abs(tr - 1.0) <= KRAUS_TOL:
            return DensityMatrix(out)
        if not self.renormalize:
            raise InvariantViolation("trace_preservation", abs(tr - 1.0), "weak measurement")
        if abs(tr) == 0.0:
            raise ValueError("weak measurement annihilated the state")
        return DensityMatrix(out / tr, renormalized=True)

    __call__ = apply


def weak_measurement(eta: float, M, renormalize: bool = False) -> WeakMeasurement:
    return WeakMeasurement(eta, M, renormalize)


def feedback_map(pairs, tol: float = KRAUS_TOL) -> KrausChannel:
    """Composite channel ``rho -> sum_m R_m M_m rho M_m^dagger R_m^dagger``.

    ``pairs`` holds ``(M_m, R_m)``.  The measurement set must be complete and
    each correction unitary, both to ``tol``.
    """
    pairs = [(np.asarray(M, dtype=complex), np.asarray(R, dtype=complex)) for M, R in pairs]
    if not pairs:
        raise ValueError("feedback map needs at least one (M, R) pair")
    d = pairs[0][0].shape[0]
    meas = sum(M.conj().T @ M for M, _ in pairs)
    resid = float(np.max(np.abs(meas - np.eye(d))))
    if resid > tol:
        raise InvariantViolation("measurement_completeness", resid, "feedback map")
    for m, (_, R) in enumerate(pairs):
        r = unitarity_residual(R)
        if r > tol:
            raise InvariantViolation("unitarity", r, f"feedback correction {m}")
    return KrausChannel(tuple(R @ M for M, R in pairs), name="feedback").check(tol)


def _two_qubit_hop(alpha: float) -> np.ndarray:
    """``exp(-i alpha (XX + YY))`` in the ``|00>,|01>,|10>,|11>`` basis."""
    c, s = math.cos(2 * alpha), math.sin(2 * alpha)
    U = np.eye(4, dtype=complex)
    U[1, 1] = U[2, 2] = c
    U[1, 2] = U[2, 1] = -1j * s
    return U


def mixing_unitary(alpha: float, n: int) -> np.ndarray:
    """Open-chain neighbour mixing ``prod_j exp(-i alpha (X_j X_{j+1} + Y_j Y_{j+1}))``.

    Factors are multiplied left to right for ``j = 0 .. n-2``.
    """
    if n < 2:
        raise ValueError(f"mixing needs at least 2 qubits, got {n}")
    hop = _two_qubit_hop(alpha)
    dim = 1 << n
    U = np.eye(dim, dtype=complex)
    for j in range(n - 1):
        # qubit j is the low bit of the pair, so kron order is (high, pair, low)
        E = np.kron(np.kron(np.eye(1 << (n - j - 2)), hop), np.eye(1 << j))
        U = U @ E
    return U


def one_excitation_encode(d) -> StateVector:
    """Place ``d_j`` on the basis state with only qubit ``j`` excited."""
    d = np.asarray(d, dtype=float).ravel()
    nrm = float(np.linalg.norm(d))
    if nrm == 0.0:
        raise ValueError("cannot encode an all-zero vector")
    amps = np.zeros(1 << d.size, dtype=complex)
    amps[1 << np.arange(d.size)] = d / nrm
    return StateVector(amps, norm=nrm, length=d.size)


def one_excitation_decode(state: StateVector) -> np.ndarray:
    n = state.n
    return state.norm * state.amps[1 << np.arange(n)]


def mixing_first_order(d, alpha: float) -> np.ndarray:
    """First-order effective coefficients under :func:`mixing_unitary`.

    ``d_j - 2 i alpha (d_{j-1} + d_{j+1})`` on an open chain: the neighbour
    sum enters with weight ``alpha`` up to the fixed factor ``-2i`` set by
    the ``XX + YY`` normalization.
    """
    d = np.asarray(d, dtype=complex).ravel()
    nb = np.zeros_like(d)
    nb[1:] += d[:-1]
    nb[:-1] += d[1:]
    return d - 2j * alpha * nb
