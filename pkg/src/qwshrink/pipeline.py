"""End-to-end shrinkage experiments.

Every stochastic step draws from :func:`substream`, keyed by the experiment
seed, a stream name and (optionally) a coefficient index, so results do not
depend on evaluation order.
"""

from __future__ import annotations

import math
import time
import zlib
from dataclasses import asdict, dataclass, field

import numpy as np

from .channels import ancilla_dilation, ancilla_shrink_dilation, apply_channel, phase_damping, retention_for_multiplier
from .errors import InvariantViolation
from .policies import ShrinkagePolicy, classical_apply, gamma_of
from .states import (
    HADAMARD,
    PAULI,
    DensityMatrix,
    StateVector,
    amplitude_encode,
    apply_operator,
    expect,
    expectation_encode,
    partial_trace,
    rescale_to_unit,
    to_density,
)
from .wavelets import WaveletFilter, mallat_forward, mallat_inverse

MODES = ("expectation_damping", "ancilla_dilation", "ideal_multiplier")

EXAMPLE_VECTOR = np.array([2.0, 1.0, 9.0, 0.0, 3.0, -10.0, 2.0, 4.0])


def substream(seed: int, name: str, *index: int) -> np.random.Generator:
    """Independent generator for ``(seed, name, index...)``."""
    key = [int(seed) & 0xFFFFFFFFFFFFFFFF, zlib.crc32(name.encode())] + [int(i) for i in index]
    return np.random.default_rng(np.random.SeedSequence(key))


# ---------------------------------------------------------------------------
# signals


def doppler(N: int) -> np.ndarray:
    """Doppler test signal ``sqrt(t(1-t)) sin(2 pi 1.05 / (t + 0.05))`` at ``t = (i + 1/2)/N``."""
    if N < 8:
        raise ValueError(f"doppler needs N >= 8, got {N}")
    t = (np.arange(N) + 0.5) / N
    return np.sqrt(t * (1.0 - t)) * np.sin(2.0 * math.pi * 1.05 / (t + 0.05))


@dataclass(frozen=True)
class NoisySignalSpec:
    signal_name: str
    N: int
    snr: float
    seed: int

    def clean(self) -> np.ndarray:
        if self.signal_name != "doppler":
            raise ValueError("only the doppler signal can be generated; load custom signals from CSV")
        return doppler(self.N)

    def realize(self) -> tuple[np.ndarray, np.ndarray]:
        clean = self.clean()
        return clean, add_noise(clean, self.snr, self.seed)


def add_noise(clean, snr: float, seed: int) -> np.ndarray:
    """Add white Gaussian noise with ``sd(noise) = sd(clean) / snr`` exactly.

    The standard-normal draw is rescaled to unit sample standard deviation, so
    the realized signal-to-noise ratio equals ``snr`` up to rounding.
    ``snr = inf`` returns a copy of ``clean``.
    """
    clean = np.asarray(clean, dtype=float)
    if not snr > 0:
        raise ValueError(f"snr must be positive, got {snr}")
    if math.isinf(snr):
        return clean.copy()
    z = substream(seed, "noise").standard_normal(clean.shape)
    z /= z.std()
    sigma = clean.std() / snr
    return clean + sigma * z


# ---------------------------------------------------------------------------
# measurement


@dataclass(frozen=True)
class ShotResult:
    counts: dict
    shots: int
    seed: int | None = None

    def __post_init__(self):
        if sum(self.counts.values()) != self.shots:
            raise InvariantViolation("shot_count", abs(sum(self.counts.values()) - self.shots))

    def probability(self, outcome: str) -> float:
        return self.counts.get(outcome, 0) / self.shots


def _snap(p: float) -> float:
    # remove rounding noise so certain outcomes stay certain
    if abs(p) < 1e-12:
        return 0.0
    if abs(p - 1.0) < 1e-12:
        return 1.0
    return min(1.0, max(0.0, p))


def sample_bit(p_one: float, shots: int, rng: np.random.Generator) -> ShotResult:
    """Draw ``shots`` single-bit outcomes with ``P(1) = p_one``."""
    if shots < 1:
        raise ValueError(f"shots must be >= 1, got {shots}")
    ones = int(np.count_nonzero(rng.random(shots) < _snap(p_one)))
    return ShotResult({"0": shots - ones, "1": ones}, shots)


def _one_qubit_density(psi) -> DensityMatrix:
    rho = to_density(psi) if isinstance(psi, StateVector) else psi
    if rho.n != 1:
        raise ValueError(f"expected a single-qubit state, got {rho.n} qubits")
    return rho


def measure_x_shots(psi, shots: int, rng: np.random.Generator) -> ShotResult:
    """Hadamard then computational-basis sampling."""
    rho = apply_operator(_one_qubit_density(psi), HADAMARD)
    return sample_bit(float(rho[1, 1].real), shots, rng)


def measure_expectation_x(psi, shots: int, seed: int) -> float:
    """Shot estimate ``(n0 - n1) / shots`` of ``<X>``."""
    res = measure_x_shots(psi, shots, substream(seed, "measure_x"))
    return (res.counts["0"] - res.counts["1"]) / shots


# ---------------------------------------------------------------------------
# coefficient shrinkage


def target_multiplier(policy: ShrinkagePolicy, d) -> np.ndarray:
    """Multiplier ``m in [0, 1]`` that each coefficient should be scaled by.

    Damping kinds give ``sqrt(1 - gamma)``; value kinds give ``f(d) / d``
    (zero where ``d == 0``), which must itself lie in ``[0, 1]``.
    """
    d = np.asarray(d, dtype=float)
    if policy.gamma_valued:
        return np.sqrt(1.0 - np.asarray(gamma_of(policy, d)))
    out = np.asarray(classical_apply(policy, d))
    with np.errstate(divide="ignore", invalid="ignore"):
        m = np.where(d != 0.0, out / np.where(d != 0.0, d, 1.0), 0.0)
    if np.any((m < -1e-15) | (m > 1.0 + 1e-12)):
        raise ValueError(f"policy {policy.kind!r} does not act as a contraction here")
    return np.clip(m, 0.0, 1.0)


_X1 = PAULI["X"]


def _readout(rho: DensityMatrix, shots: int | None, seed: int, index: int) -> float:
    if shots is None:
        return expect(rho, "X")
    res = measure_x_shots(rho, shots, substream(seed, "readout", index))
    return (res.counts["0"] - res.counts["1"]) / shots


def shrink_coefficients(d, policy: ShrinkagePolicy, mode: str = "expectation_damping",
                        shots: int | None = None, seed: int = 0) -> tuple[np.ndarray, np.ndarray]:
    """Shrink rescaled coefficients one qubit at a time.

    Every entry of ``d`` (already on ``[-1, 1]``) is processed; block scoping
    is the caller's job.  Returns ``(shrunk, multipliers)``.

    ``ideal_multiplier`` applies ``m d`` directly.  ``expectation_damping``
    encodes ``<X> = d``, applies phase damping and reads ``<X>``.
    ``ancilla_dilation`` couples a fresh ancilla with retention
    ``s = (1 + m) / 2`` and traces it out.  With ``shots`` the readout is
    sampled instead of exact.
    """
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}; expected one of {MODES}")
    if shots is not None and shots < 1:
        raise ValueError("shot budget must be positive when sampling")
    d = np.asarray(d, dtype=float)
    m = target_multiplier(policy, d)
    if mode == "ideal_multiplier":
        return m * d, m
    if policy.gamma_valued:
        gammas = np.asarray(gamma_of(policy, d), dtype=float)
    else:
        gammas = 1.0 - m**2
    out = np.empty_like(d)
    for i, (di, mi, gi) in enumerate(zip(d, m, gammas)):
        rho = to_density(expectation_encode(di))
        if mode == "expectation_damping":
            rho = apply_channel(rho, phase_damping(gi))
        else:
            rho = ancilla_shrink_dilation(retention_for_multiplier(mi)).apply(rho)
        out[i] = _readout(rho, shots, seed, i)
    return out, m


@dataclass
class DenoiseReport:
    mse_noisy: float | None
    mse_estimate: float | None
    multipliers: np.ndarray = field(repr=False)
    mode: str
    wall_time: float
    scale: float = 1.0
    coeffs_before: np.ndarray | None = field(default=None, repr=False)
    coeffs_after: np.ndarray | None = field(default=None, repr=False)

    def to_dict(self) -> dict:
        out = asdict(self)
        out.pop("coeffs_before")
        out.pop("coeffs_after")
        out["multipliers"] = [float(v) for v in self.multipliers]
        return out


def _mse(a, b) -> float:
    return float(np.mean((np.asarray(a) - np.asarray(b)) ** 2))


def denoise_classical(noisy, filt: WaveletFilter, levels: int, lam: float,
                      clean=None) -> tuple[np.ndarray, DenoiseReport]:
    """Soft-threshold the detail blocks at ``lam`` (raw coefficient units)."""
    t0 = time.perf_counter()
    noisy = np.asarray(noisy, dtype=float)
    coeffs = mallat_forward(noisy, filt, levels)
    mask = coeffs.detail_mask()
    v = coeffs.values.copy()
    lam = float(lam)
    if math.isinf(lam):
        v[mask] = 0.0
    else:
        v[mask] = np.sign(v[mask]) * np.maximum(np.abs(v[mask]) - lam, 0.0)
    estimate = mallat_inverse(coeffs.replace(v), filt)
    with np.errstate(divide="ignore", invalid="ignore"):
        mult = np.where(coeffs.values != 0, v / np.where(coeffs.values != 0, coeffs.values, 1), 0.0)
    report = DenoiseReport(
        mse_noisy=None if clean is None else _mse(noisy, clean),
        mse_estimate=None if clean is None else _mse(estimate, clean),
        multipliers=mult,
        mode="classical_soft",
        wall_time=time.perf_counter() - t0,
    )
    return estimate, report


def denoise_quantum(noisy, filt: WaveletFilter, levels: int, policy: ShrinkagePolicy,
                    mode: str = "expectation_damping", shots: int | None = None, seed: int = 0,
                    clean=None, rescale_mode: str = "maxabs") -> tuple[np.ndarray, DenoiseReport]:
    """Wavelet shrinkage with coefficientwise CPTP attenuation.

    Forward DWT, rescale the in-scope coefficients to ``[-1, 1]``, shrink them
    with :func:`shrink_coefficients`, undo the rescale and invert.  The report
    keeps the coefficient vectors before and after shrinkage.
    """
    t0 = time.perf_counter()
    noisy = np.asarray(noisy, dtype=float)
    coeffs = mallat_forward(noisy, filt, levels)
    mask = coeffs.detail_mask() if policy.scope == "details" else np.ones(noisy.size, bool)
    v = coeffs.values.copy()
    mult = np.ones_like(v)
    scoped = v[mask]
    scale = 1.0
    if np.any(scoped):
        d, rec = rescale_to_unit(scoped, rescale_mode)
        shrunk, m = shrink_coefficients(d, policy, mode, shots=shots, seed=seed)
        v[mask] = rec.undo(shrunk)
        mult[mask] = m
        scale = rec.scale
    estimate = mallat_inverse(coeffs.replace(v), filt)
    report = DenoiseReport(
        mse_noisy=None if clean is None else _mse(noisy, clean),
        mse_estimate=None if clean is None else _mse(estimate, clean),
        multipliers=mult,
        mode=mode,
        wall_time=time.perf_counter() - t0,
        scale=scale,
        coeffs_before=coeffs.values,
        coeffs_after=v,
    )
    return estimate, report


def best_classical_lambda(noisy, clean, filt: WaveletFilter, levels: int, lam_grid):
    """Grid search for the soft threshold with the lowest MSE against ``clean``."""
    best = None
    for lam in lam_grid:
        est, rep = denoise_classical(noisy, filt, levels, lam, clean=clean)
        if best is None or rep.mse_estimate < best[1]:
            best = (float(lam), rep.mse_estimate, est)
    return best


# ---------------------------------------------------------------------------
# ancilla experiments


def _data_ancilla_state(di: float, ancilla_rotation: np.ndarray) -> StateVector:
    # data qubit is qubit 0, ancilla qubit 1
    data = expectation_encode(di).amps
    anc = ancilla_rotation @ np.array([1.0, 0.0], dtype=complex)
    return StateVector(np.kron(anc, data))


def _ancilla_excitation(state: StateVector) -> float:
    rho_anc = partial_trace(to_density(state), [1])
    return float(rho_anc.rho[1, 1].real)


def ry(theta: float) -> np.ndarray:
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    return np.array([[c, -s], [s, c]], dtype=complex)


@dataclass
class AncillaRun:
    probabilities: np.ndarray
    exact: np.ndarray
    shrunk: np.ndarray
    shots: list

    @property
    def z_expectation(self) -> np.ndarray:
        return 1.0 - 2.0 * self.probabilities


def ancilla_flag_experiment(d, lam: float, shots: int, seed: int) -> AncillaRun:
    """Flag coefficients with ``|d_i| > lam`` on an ancilla and sample it.

    The flip is classically controlled, so the flag probability is exactly
    the indicator; ``shrunk`` is the hard-thresholded vector ``P(flag) d``.
    """
    d = np.asarray(d, dtype=float)
    if not 0.0 < lam < 1.0:
        raise ValueError(f"lam must lie in (0, 1), got {lam}")
    if np.any(np.abs(d) > 1.0):
        raise ValueError("coefficients must be rescaled to [-1, 1]")
    probs, exact, results = [], [], []
    for i, di in enumerate(d):
        flip = _X1 if abs(di) > lam else np.eye(2, dtype=complex)
        p = _ancilla_excitation(_data_ancilla_state(di, flip))
        res = sample_bit(p, shots, substream(seed, "flag", i))
        exact.append(p)
        probs.append(res.probability("1"))
        results.append(res)
    probs = np.array(probs)
    return AncillaRun(probs, np.array(exact), probs * d, results)


def smooth_ancilla_experiment(d, shots: int, seed: int) -> AncillaRun:
    """Rotate the ancilla by ``pi |d_i|`` and estimate its excitation probability.

    ``shrunk`` is ``p_hat * d``; the exact curve is
    :func:`qwshrink.policies.smooth_ancilla_probability`.
    """
    d = np.asarray(d, dtype=float)
    if np.any(np.abs(d) > 1.0):
        raise ValueError("coefficients must be rescaled to [-1, 1]")
    probs, exact, results = [], [], []
    for i, di in enumerate(d):
        p = _ancilla_excitation(_data_ancilla_state(di, ry(math.pi * abs(di))))
        res = sample_bit(p, shots, substream(seed, "smooth_ancilla", i))
        exact.append(p)
        probs.append(res.probability("1"))
        results.append(res)
    probs = np.array(probs)
    return AncillaRun(probs, np.array(exact), probs * d, results)


def ancilla_zero_diagonal(coeffs, s) -> tuple[np.ndarray, np.ndarray]:
    """Populations of the ancilla-0 branch before and after a dilated attenuation.

    The coefficient vector is amplitude encoded, each basis state ``|j>``
    rotates a shared ancilla with retention ``s_j``, and the diagonal of the
    (unnormalized) ancilla-0 block is read off.  ``post = s * pre`` exactly.
    """
    psi = amplitude_encode(coeffs)
    s = np.asarray(s, dtype=float)
    if s.size != psi.amps.size:
        raise ValueError(f"need {psi.amps.size} retentions, got {s.size}")
    n = psi.n
    joint = np.kron(psi.amps, np.array([1.0, 0.0]))  # ancilla is qubit 0
    pre = np.abs(joint[0::2]) ** 2
    U = ancilla_dilation(s, n).U
    post_state = U @ joint
    post = np.abs(post_state[0::2]) ** 2
    return pre[: psi.length], post[: psi.length]


# ---------------------------------------------------------------------------
# hardware surrogates


@dataclass(frozen=True)
class HardwareModel:
    T2: float
    shots: int = 1024
    seed: int = 0

    def __post_init__(self):
        if not self.T2 > 0:
            raise ValueError(f"T2 must be positive, got {self.T2}")


def idle_time_for_retention(s: float, model: HardwareModel) -> float:
    """Idle time ``-T2 ln s`` that scales ``<X>`` by ``s``."""
    if not 0.0 < s <= 1.0:
        raise ValueError(f"retention must lie in (0, 1], got {s}")
    return -model.T2 * math.log(s) if s < 1.0 else 0.0


def gamma_from_idle(t: float, model: HardwareModel) -> float:
    """Phase-damping strength ``1 - exp(-2t / T2)`` accumulated while idling."""
    if t < 0:
        raise ValueError(f"idle time must be non-negative, got {t}")
    return -math.expm1(-2.0 * t / model.T2)


def randomized_z_shrink(psi, gamma: float, shots: int, seed: int) -> float:
    """Per shot apply ``Z`` with probability ``gamma``, then measure ``X``.

    The ensemble average converges to ``(1 - 2 gamma) <X>``.
    """
    if not 0.0 <= gamma <= 1.0:
        raise ValueError(f"gamma must lie in [0, 1], got {gamma}")
    if shots < 1:
        raise ValueError(f"shots must be >= 1, got {shots}")
    rho = _one_qubit_density(psi)
    rng = substream(seed, "randomized_z")
    flips = rng.random(shots) < gamma
    p1 = {}
    for flipped in (False, True):
        r = apply_operator(rho, PAULI["Z"]) if flipped else rho.rho
        r = apply_operator(DensityMatrix(r), HADAMARD)
        p1[flipped] = _snap(float(r[1, 1].real))
    u = rng.random(shots)
    ones = np.where(flips, u < p1[True], u < p1[False])
    return float((shots - 2 * np.count_nonzero(ones)) / shots)


# ---------------------------------------------------------------------------
# metrics


@dataclass(frozen=True)
class Metrics:
    mse_estimate: float
    mse_noisy: float
    snr_gain_db: float

    @property
    def perfect(self) -> bool:
        return self.mse_estimate == 0.0


def metrics(clean, estimate, noisy) -> Metrics:
    clean, estimate, noisy = (np.asarray(a, dtype=float) for a in (clean, estimate, noisy))
    if not clean.shape == estimate.shape == noisy.shape:
        raise ValueError("clean, estimate and noisy must have equal lengths")
    mse_e = _mse(estimate, clean)
    mse_n = _mse(noisy, clean)
    if mse_e == 0.0:
        gain = math.inf
    elif mse_n == 0.0:
        gain = -math.inf
    else:
        gain = 10.0 * math.log10(mse_n / mse_e)
    return Metrics(mse_e, mse_n, gain)
