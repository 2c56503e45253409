"""Dense statevectors and density matrices on a few qubits.

Qubit ``q`` is bit ``q`` of the basis index (qubit 0 is least significant).
A local operator acting on ``targets`` uses the same convention internally:
bit ``m`` of its row/column index belongs to qubit ``targets[m]``.  With
``targets = range(n)`` the operator is applied as the plain matrix.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import InvariantViolation

MAX_QUBITS = 12
NORM_TOL = 1e-12
UNITARY_TOL = 1e-10

PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}
HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2.0)


def _num_qubits(dim: int) -> int:
    n = dim.bit_length() - 1
    if dim < 1 or (1 << n) != dim:
        raise ValueError(f"dimension {dim} is not a power of two")
    if n > MAX_QUBITS:
        raise ValueError(f"{n} qubits exceeds the dense ceiling of {MAX_QUBITS}")
    return n


@dataclass(frozen=True)
class StateVector:
    """Pure state; ``norm`` and ``length`` remember the classical input."""

    amps: np.ndarray
    norm: float = 1.0
    length: int | None = None

    def __post_init__(self):
        amps = np.asarray(self.amps, dtype=complex).ravel()
        _num_qubits(amps.size)
        object.__setattr__(self, "amps", amps)
        if self.length is None:
            object.__setattr__(self, "length", amps.size)

    @property
    def n(self) -> int:
        return _num_qubits(self.amps.size)

    def norm_residual(self) -> float:
        return abs(float(np.vdot(self.amps, self.amps).real) - 1.0)

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amps) ** 2


@dataclass(frozen=True)
class DensityMatrix:
    rho: np.ndarray
    renormalized: bool = field(default=False, compare=False)

    def __post_init__(self):
        rho = np.asarray(self.rho, dtype=complex)
        if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
            raise ValueError(f"density matrix must be square, got {rho.shape}")
        _num_qubits(rho.shape[0])
        object.__setattr__(self, "rho", rho)

    @property
    def n(self) -> int:
        return _num_qubits(self.rho.shape[0])

    def residuals(self) -> dict[str, float]:
        rho = self.rho
        return {
            "hermitian": float(np.max(np.abs(rho - rho.conj().T))),
            "unit_trace": abs(complex(np.trace(rho)) - 1.0),
            "psd": max(0.0, -float(np.linalg.eigvalsh((rho + rho.conj().T) / 2).min())),
        }

    def validate(self, tol: float = 1e-12, psd_tol: float = 1e-10) -> None:
        """Raise :class:`InvariantViolation` unless this is a valid state."""
        res = self.residuals()
        for key in ("hermitian", "unit_trace"):
            if res[key] > tol:
                raise InvariantViolation(f"density_{key}", res[key])
        if res["psd"] > psd_tol:
            raise InvariantViolation("density_psd", res["psd"])

    def purity(self) -> float:
        return float(np.real(np.trace(self.rho @ self.rho)))


@dataclass(frozen=True)
class BlochVector:
    x: float
    y: float
    z: float

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z])

    def length(self) -> float:
        return math.sqrt(self.x**2 + self.y**2 + self.z**2)


@dataclass(frozen=True)
class PauliString:
    """Tensor product of Pauli letters; ``letters[q]`` acts on qubit ``q``."""

    letters: str

    def __post_init__(self):
        letters = self.letters.upper()
        if not letters or set(letters) - set("IXYZ"):
            raise ValueError(f"invalid Pauli string {self.letters!r}")
        object.__setattr__(self, "letters", letters)

    def __len__(self) -> int:
        return len(self.letters)

    def matrix(self) -> np.ndarray:
        out = np.array([[1.0 + 0j]])
        for letter in self.letters:  # qubit 0 ends up as the rightmost factor
            out = np.kron(PAULI[letter], out)
        return out


# ---------------------------------------------------------------------------
# tensor plumbing


def _state_axes(n: int, targets: Sequence[int]) -> list[int]:
    # C-order reshape puts qubit n-1 on axis 0; local MSB first
    return [n - 1 - q for q in reversed(targets)]


def _check_targets(n: int, targets: Sequence[int]) -> list[int]:
    targets = [int(t) for t in targets]
    if not targets:
        raise ValueError("targets must be non-empty")
    if len(set(targets)) != len(targets):
        raise ValueError(f"duplicate targets {targets}")
    for t in targets:
        if not 0 <= t < n:
            raise ValueError(f"target qubit {t} out of range for {n} qubits")
    return targets


def _apply_left(tensor: np.ndarray, op: np.ndarray, n: int, targets: Sequence[int], offset: int = 0):
    """Contract a ``2^k x 2^k`` operator into ``tensor`` on the target axes.

    ``offset`` shifts the axes (used for the column index of a density matrix).
    """
    k = len(targets)
    axes = [offset + a for a in _state_axes(n, targets)]
    op_t = op.reshape((2,) * (2 * k))
    out = np.tensordot(op_t, tensor, axes=(list(range(k, 2 * k)), axes))
    return np.moveaxis(out, list(range(k)), axes)


def apply_operator(state, op, targets: Sequence[int] | None = None):
    """Apply an arbitrary (not necessarily unitary) operator on ``targets``.

    Statevectors map to ``op |psi>``; density matrices to ``op rho op^dagger``.
    No normalization is performed.
    """
    op = np.asarray(op, dtype=complex)
    n = state.n
    targets = list(range(n)) if targets is None else _check_targets(n, targets)
    if op.shape != (1 << len(targets),) * 2:
        raise ValueError(f"operator shape {op.shape} does not match {len(targets)} targets")
    if isinstance(state, StateVector):
        t = _apply_left(state.amps.reshape((2,) * n), op, n, targets)
        return t.reshape(-1)
    t = state.rho.reshape((2,) * (2 * n))
    t = _apply_left(t, op, n, targets)
    t = _apply_left(t, op.conj(), n, targets, offset=n)
    return t.reshape(1 << n, 1 << n)


def unitarity_residual(U) -> float:
    U = np.asarray(U, dtype=complex)
    return float(np.linalg.norm(U.conj().T @ U - np.eye(U.shape[0])))


def apply_unitary(state, U, targets: Sequence[int] | None = None, tol: float = UNITARY_TOL):
    """Embed ``U`` on ``targets`` (identity elsewhere) and apply it."""
    U = np.asarray(U, dtype=complex)
    if U.ndim != 2 or U.shape[0] != U.shape[1]:
        raise ValueError(f"unitary must be square, got {U.shape}")
    resid = unitarity_residual(U)
    if resid > tol:
        raise InvariantViolation("unitarity", resid, "apply_unitary")
    out = apply_operator(state, U, targets)
    if isinstance(state, StateVector):
        return StateVector(out, norm=state.norm, length=state.length)
    return DensityMatrix(out)


# ---------------------------------------------------------------------------
# encodings


def _pad_pow2(x: np.ndarray) -> np.ndarray:
    size = max(1, x.size)
    target = 1 << (size - 1).bit_length()
    if target == x.size:
        return x
    return np.concatenate([x, np.zeros(target - x.size, dtype=x.dtype)])


def amplitude_encode(x) -> StateVector:
    """``|x> = x / ||x||``, zero-padded to a power-of-two length."""
    x = np.asarray(x, dtype=float).ravel()
    nrm = float(np.linalg.norm(x))
    if nrm == 0.0:
        raise ValueError("cannot amplitude-encode an all-zero vector")
    return StateVector(_pad_pow2(x) / nrm, norm=nrm, length=x.size)


def amplitude_decode(state: StateVector) -> np.ndarray:
    """Undo :func:`amplitude_encode` (real part, original length, rescaled)."""
    return state.norm * state.amps.real[: state.length]


def rz(phi: float) -> np.ndarray:
    return np.diag([np.exp(-0.5j * phi), np.exp(0.5j * phi)])


def expectation_encode(v: float) -> StateVector:
    """One qubit ``Rz(arccos v)|+>`` whose ``<X>`` equals ``v``."""
    v = float(v)
    if not abs(v) <= 1.0:
        raise ValueError(f"expectation encoding needs |v| <= 1, got {v}")
    plus = np.array([1.0, 1.0], dtype=complex) / math.sqrt(2.0)
    return StateVector(rz(math.acos(v)) @ plus)


def phase_encode(d, alpha: float) -> StateVector:
    """Uniform superposition with diagonal phases ``alpha * d_j``."""
    d = np.asarray(d, dtype=float).ravel()
    _num_qubits(d.size)
    if alpha < 0:
        raise ValueError(f"alpha must be non-negative, got {alpha}")
    return StateVector(np.exp(1j * alpha * d) / math.sqrt(d.size))


def hybrid_encode(x) -> StateVector:
    """Magnitudes in amplitudes, signs as a relative phase on a sign qubit.

    The index register occupies the low qubits and the sign qubit is the
    most significant one.  Each index carries
    ``|x_j| (|0> + e^{i pi [x_j < 0]} |1>) / sqrt(2)``, so negative entries
    get a relative phase of -1.
    """
    raw = np.asarray(x, dtype=float).ravel()
    x = _pad_pow2(raw)
    nrm = float(np.linalg.norm(x))
    if nrm == 0.0:
        raise ValueError("cannot hybrid-encode an all-zero vector")
    mag = np.abs(x) / (nrm * math.sqrt(2.0))
    phase = np.where(x < 0, -1.0, 1.0)
    return StateVector(np.concatenate([mag, mag * phase]), norm=nrm, length=raw.size)


def hybrid_decode(state: StateVector) -> np.ndarray:
    half = state.amps.size // 2
    low, high = state.amps[:half], state.amps[half:]
    mag = math.sqrt(2.0) * np.abs(low) * state.norm
    sign = np.where(np.real(high * np.conj(low)) < 0, -1.0, 1.0)
    return (sign * mag)[: state.length]


@dataclass(frozen=True)
class Rescale:
    """Record of a map onto ``[-1, 1]``: ``d = (y - offset) / scale``."""

    scale: float
    offset: float = 0.0
    mode: str = "maxabs"

    def apply(self, y) -> np.ndarray:
        return (np.asarray(y, dtype=float) - self.offset) / self.scale

    def undo(self, d) -> np.ndarray:
        return np.asarray(d, dtype=float) * self.scale + self.offset


def rescale_to_unit(y, mode: str = "maxabs") -> tuple[np.ndarray, Rescale]:
    """Map ``y`` into ``[-1, 1]``.

    ``maxabs`` (default) divides by ``max |y_i|`` and keeps zero at zero;
    ``affine`` is the min-max map sending ``min y`` to -1 and ``max y`` to 1.
    """
    y = np.asarray(y, dtype=float)
    if not np.any(y):
        raise ValueError("cannot rescale an all-zero vector")
    if mode == "maxabs":
        rec = Rescale(float(np.max(np.abs(y))))
    elif mode == "affine":
        lo, hi = float(y.min()), float(y.max())
        if hi == lo:
            raise ValueError("affine rescale needs a non-constant vector")
        rec = Rescale((hi - lo) / 2.0, (hi + lo) / 2.0, "affine")
    else:
        raise ValueError(f"unknown rescale mode {mode!r}")
    return rec.apply(y), rec


# ---------------------------------------------------------------------------
# observables


def to_density(psi: StateVector) -> DensityMatrix:
    return DensityMatrix(np.outer(psi.amps, psi.amps.conj()))


def _as_density(state) -> DensityMatrix:
    return to_density(state) if isinstance(state, StateVector) else state


def expect(rho, pauli: PauliString | str, tol: float = 1e-10) -> float:
    """``Tr(rho P)``; the imaginary part must vanish to ``tol``."""
    rho = _as_density(rho)
    P = pauli if isinstance(pauli, PauliString) else PauliString(pauli)
    if len(P) != rho.n:
        raise ValueError(f"Pauli string of length {len(P)} on a {rho.n}-qubit state")
    t = rho.rho.reshape((2,) * (2 * rho.n))
    for q, letter in enumerate(P.letters):
        if letter != "I":
            t = _apply_left(t, PAULI[letter], rho.n, [q])
    val = complex(np.trace(t.reshape(rho.rho.shape)))
    if abs(val.imag) > tol:
        raise InvariantViolation("real_expectation", abs(val.imag))
    return val.real


def bloch(rho) -> BlochVector:
    rho = _as_density(rho)
    if rho.n != 1:
        raise ValueError(f"Bloch vector needs one qubit, got {rho.n}")
    r = rho.rho
    return BlochVector(
        x=float(2 * r[0, 1].real),
        y=float(-2 * r[0, 1].imag),
        z=float((r[0, 0] - r[1, 1]).real),
    )


def partial_trace(rho, keep: Sequence[int]) -> DensityMatrix:
    """Reduced state on ``keep``; result qubit ``m`` is the ``m``-th smallest kept qubit."""
    rho = _as_density(rho)
    n = rho.n
    keep = sorted(_check_targets(n, keep))
    drop = [q for q in range(n) if q not in keep]
    t = rho.rho.reshape((2,) * (2 * n))
    keep_axes = _state_axes(n, keep)
    drop_axes = _state_axes(n, drop) if drop else []
    perm = keep_axes + drop_axes + [n + a for a in keep_axes] + [n + a for a in drop_axes]
    dk, dd = 1 << len(keep), 1 << len(drop)
    t = np.transpose(t, perm).reshape(dk, dd, dk, dd)
    return DensityMatrix(np.einsum("ajbj->ab", t))


# ---------------------------------------------------------------------------
# serialization


def state_to_csv(state: StateVector) -> str:
    """One row per basis index: ``index,re,im`` with ``%.17g`` numerics."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["index", "re", "im"])
    for j, a in enumerate(state.amps):
        w.writerow([j, "%.17g" % a.real, "%.17g" % a.imag])
    return buf.getvalue()


def state_from_csv(text: str) -> StateVector:
    rows = list(csv.DictReader(io.StringIO(text)))
    amps = np.array([complex(float(r["re"]), float(r["im"])) for r in rows])
    return StateVector(amps)


def random_density_matrix(n: int, rng: np.random.Generator, rank: int | None = None) -> DensityMatrix:
    """Ginibre-distributed mixed state ``G G^dagger / Tr``."""
    d = 1 << n
    k = d if rank is None else rank
    G = rng.standard_normal((d, k)) + 1j * rng.standard_normal((d, k))
    rho = G @ G.conj().T
    return DensityMatrix(rho / np.trace(rho).real)


def random_state_vector(n: int, rng: np.random.Generator) -> StateVector:
    v = rng.standard_normal(1 << n) + 1j * rng.standard_normal(1 << n)
    return StateVector(v / np.linalg.norm(v))
