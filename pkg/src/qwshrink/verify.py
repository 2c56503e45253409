"""Self-check of the numerical invariants, as run by ``qwshrink verify``."""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import channels as ch
from .errors import InvariantViolation
from .givens import givens_apply, givens_factorize, givens_replay
from .pipeline import MODES, denoise_quantum, shrink_coefficients
from .policies import HARD_ZERO, ShrinkagePolicy, gamma_of, ideal_shrink
from .states import DensityMatrix, bloch, random_density_matrix
from .wavelets import build_filter, build_wavelet_matrix, filter_residuals, mallat_forward, mallat_inverse

GRID = np.linspace(0.0, 1.0, 21)


@dataclass
class CheckResult:
    name: str
    passed: bool
    residual: float
    tol: float
    seconds: float
    detail: str = ""


def _filters():
    for name in ("haar", "daub4"):
        res = max(filter_residuals(build_filter(name).h).values())
        yield res


def check_filters(**_):
    return max(_filters()), 1e-12


def check_transforms(seed: int = 0, **_):
    rng = np.random.default_rng(seed)
    worst_route, worst_ortho = 0.0, 0.0
    for name in ("haar", "daub4"):
        filt = build_filter(name)
        for N in (8, 64, 256):
            for J in (1, 2, 3):
                W = build_wavelet_matrix(filt, N, J)
                worst_ortho = max(worst_ortho, W.orthogonality_residual())
                x = rng.standard_normal((10, N))
                a = W.forward(x).values
                coeffs = mallat_forward(x, filt, J)
                b = coeffs.values
                c = givens_apply(givens_factorize(W), x)
                worst_route = max(
                    worst_route,
                    np.abs(a - b).max(),
                    np.abs(a - c).max(),
                    np.abs(mallat_inverse(coeffs, filt) - x).max(),
                )
    if worst_ortho > 1e-10:
        raise InvariantViolation("orthogonality", worst_ortho)
    return worst_route, 1e-9


def check_givens(seed: int = 0, **_):
    rng = np.random.default_rng(seed)
    worst = 0.0
    for N in (2, 5, 8, 16):
        Q, _ = np.linalg.qr(rng.standard_normal((N, N)))
        worst = max(worst, float(np.linalg.norm(givens_replay(givens_factorize(Q)) - Q)))
    return worst, 1e-9


def _builtin_channels(inject_fault: bool):
    for p in GRID:
        for build in (ch.phase_damping, ch.phase_flip, ch.ancilla_shrink_channel, ch.amplitude_damping):
            channel = build(p)
            if inject_fault and build is ch.phase_damping and p == GRID[10]:
                ops = list(channel.ops)
                ops[0] = ops[0] * 1.01
                channel = ch.KrausChannel(tuple(ops), name=channel.name + "[corrupted]")
            yield channel


def check_cptp(seed: int = 0, inject_fault: bool = False, **_):
    rng = np.random.default_rng(seed)
    states = [random_density_matrix(1, rng) for _ in range(10)]
    worst = 0.0
    for channel in _builtin_channels(inject_fault):
        resid = channel.completeness_residual()
        if resid > 1e-12:
            raise InvariantViolation("kraus_completeness", resid, channel.name)
        for rho in states:
            out = DensityMatrix(sum(K @ rho.rho @ K.conj().T for K in channel.ops))
            out.validate()
            worst = max(worst, resid, out.residuals()["unit_trace"])
    return worst, 1e-12


def check_dilation(seed: int = 0, **_):
    rng = np.random.default_rng(seed)
    worst = 0.0
    for trial in range(10):
        n = 1 + trial % 3
        dil = ch.ancilla_dilation(rng.random(1 << n), n, signs=rng.choice([-1.0, 1.0], 1 << n))
        kraus = ch.kraus_from_dilation(dil)
        rho = random_density_matrix(n, rng)
        worst = max(worst, float(np.abs(dil.apply(rho).rho - ch.apply_channel(rho, kraus).rho).max()))
    return worst, 1e-10


def check_bloch_laws(seed: int = 0, **_):
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(5):
        rho = random_density_matrix(1, rng)
        b = bloch(rho).as_array()
        for p in GRID:
            pd = bloch(ch.apply_channel(rho, ch.phase_damping(p))).as_array()
            pf = bloch(ch.apply_channel(rho, ch.phase_flip(p))).as_array()
            an = bloch(ch.apply_channel(rho, ch.ancilla_shrink_channel(p))).as_array()
            k = np.sqrt(1.0 - p)
            worst = max(
                worst,
                np.abs(pd - [k * b[0], k * b[1], b[2]]).max(),
                abs(pf[0] - (1 - 2 * p) * b[0]),
                np.abs(an - [(2 * p - 1) * b[0], (2 * p - 1) * b[1], b[2]]).max(),
            )
    return worst, 1e-12


def check_modes(**_):
    d = np.linspace(-1.0, 1.0, 17)
    worst = 0.0
    for policy in (ShrinkagePolicy("hard_gamma", lam=0.4), ShrinkagePolicy("cos4_gamma")):
        outs = [shrink_coefficients(d, policy, mode)[0] for mode in MODES]
        worst = max(worst, np.abs(outs[0] - outs[2]).max(), np.abs(outs[1] - outs[2]).max())
    return worst, 1e-10


def check_policies(**_):
    x = np.linspace(0.0, 1.0, 501)
    worst = 0.0
    for policy in (
        ShrinkagePolicy("hard_gamma", lam=0.4),
        ShrinkagePolicy("exp_gamma", alpha=2.0),
        ShrinkagePolicy("cos_gamma", alpha=4.0),
        ShrinkagePolicy("cos4_gamma"),
    ):
        g = gamma_of(policy, x)
        worst = max(worst, float(np.max(np.maximum(-g, g - 1.0))), float(np.abs(g - gamma_of(policy, -x)).max()))
    return worst, 0.0


def check_contraction(**_):
    x = np.linspace(-1.0, 1.0, 401)
    policies = [ShrinkagePolicy(k, lam=0.4, alpha=4.0) for k in ("hard_gamma", "exp_gamma", "cos_gamma", "cos4_gamma")]
    policies += [ShrinkagePolicy("classical_soft", lam=0.3), ShrinkagePolicy("classical_hard", lam=0.3),
                 ShrinkagePolicy("power_law", exponent=1.8)]
    worst = 0.0
    for policy in policies:
        worst = max(worst, float(np.max(np.abs(ideal_shrink(policy, x)) - np.abs(x))))
    return max(worst, 0.0), 0.0


def check_round_trip(seed: int = 0, **_):
    noisy = np.random.default_rng(seed).standard_normal(64)
    worst = 0.0
    for mode in MODES:
        est, _ = denoise_quantum(noisy, build_filter("daub4"), 3, HARD_ZERO, mode=mode)
        worst = max(worst, float(np.abs(est - noisy).max()))
    return worst, 1e-10


CHECKS: dict[str, Callable] = {
    "filter_conditions": check_filters,
    "transform_routes": check_transforms,
    "givens_replay": check_givens,
    "cptp_certificates": check_cptp,
    "dilation_equivalence": check_dilation,
    "bloch_laws": check_bloch_laws,
    "mode_agreement": check_modes,
    "policy_ranges": check_policies,
    "shrink_contraction": check_contraction,
    "zero_damping_round_trip": check_round_trip,
}


def run_invariant_suite(inject_fault: bool = False, seed: int = 0) -> list[CheckResult]:
    results = []
    for name, fn in CHECKS.items():
        t0 = time.perf_counter()
        try:
            residual, tol = fn(seed=seed, inject_fault=inject_fault)
            passed = residual <= tol
            detail = ""
        except InvariantViolation as exc:
            residual, tol, passed, detail = exc.residual, float("nan"), False, str(exc)
        results.append(CheckResult(name, passed, float(residual), tol, time.perf_counter() - t0, detail))
    return results


def format_table(results: list[CheckResult]) -> str:
    lines = [f"{'invariant':<24} {'status':<6} {'residual':>10} {'tol':>9} {'time':>7}"]
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        lines.append(f"{r.name:<24} {status:<6} {r.residual:>10.2e} {r.tol:>9.1e} {r.seconds:>6.2f}s")
        if r.detail:
            lines.append(f"    {r.detail}")
    return "\n".join(lines)
