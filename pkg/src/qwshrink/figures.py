"""Figure recipes: each takes a validated config and returns CSV text plus a results dict.

Recipes never touch the filesystem; :mod:`qwshrink.cli` writes the artifacts.
"""

from __future__ import annotations

import math
from typing import Callable

import numpy as np

from . import channels as ch
from .errors import InvariantViolation
from .givens import givens_apply, givens_factorize, rotation_count_report
from .io import columns_to_csv, matrix_to_csv, read_signal_csv
from .pipeline import (
    EXAMPLE_VECTOR,
    HardwareModel,
    add_noise,
    ancilla_flag_experiment,
    ancilla_zero_diagonal,
    best_classical_lambda,
    denoise_quantum,
    doppler,
    gamma_from_idle,
    idle_time_for_retention,
    metrics,
    randomized_z_shrink,
    shrink_coefficients,
    smooth_ancilla_experiment,
    substream,
    target_multiplier,
)
from .policies import ShrinkagePolicy, ideal_shrink
from .states import (
    amplitude_decode,
    amplitude_encode,
    apply_unitary,
    expect,
    expectation_encode,
    partial_trace,
    phase_encode,
    rescale_to_unit,
    state_to_csv,
    to_density,
)
from .wavelets import build_filter, build_wavelet_matrix, load_filter_json, mallat_forward

FIGURES = (
    "fig1_dwt",
    "fig5_hard",
    "fig6_smooth",
    "fig3_doppler",
    "fig4_diag",
    "fig7_power",
    "fig8_flag",
    "fig9_smooth_ancilla",
    "fig10_phase_encode",
    "hw_idle",
    "hw_randz",
)

DEFAULT_POLICY = {
    "fig5_hard": {"kind": "hard_gamma", "lambda": 0.4},
    "fig6_smooth": {"kind": "cos4_gamma"},
    "fig7_power": {"kind": "power_law", "exponent": 1.8},
    "fig3_doppler": {"kind": "cos4_gamma"},
    "fig4_diag": {"kind": "cos4_gamma"},
    "fig8_flag": {"kind": "hard_gamma", "lambda": 0.4},
}

CURVE_POINTS = 17


def _policy(cfg: dict) -> ShrinkagePolicy:
    doc = cfg.get("policy", DEFAULT_POLICY.get(cfg["figure"]))
    if doc is None:
        raise ValueError(f"figure {cfg['figure']!r} needs a 'policy'")
    return ShrinkagePolicy.from_dict(doc)


def _filter(cfg: dict, default: str):
    spec = cfg.get("filter", default)
    return load_filter_json(spec) if isinstance(spec, dict) else build_filter(spec)


def _signal(cfg: dict, default_N: int | None = None) -> np.ndarray:
    """Input vector from ``data``, ``signal_csv`` or a named ``signal``."""
    if "data" in cfg:
        return np.asarray(cfg["data"], dtype=float)
    if "signal_csv" in cfg:
        return read_signal_csv(cfg["signal_csv"])
    name = cfg.get("signal", "example_vector" if default_N is None else "doppler")
    if name == "example_vector":
        return EXAMPLE_VECTOR.copy()
    if name == "doppler":
        return doppler(int(cfg.get("N", default_N or 1024)))
    if name == "random":
        return substream(cfg["seed"], "signal").standard_normal(int(cfg.get("N", default_N or 64)))
    raise ValueError(f"unknown signal {name!r}; expected example_vector, doppler or random")


def _index(n: int) -> np.ndarray:
    return np.arange(n)


# ---------------------------------------------------------------------------


def fig1_dwt(cfg):
    x = _signal(cfg)
    filt = _filter(cfg, "haar")
    J = int(cfg.get("levels", 2))
    W = build_wavelet_matrix(filt, x.size, J)
    resid = W.orthogonality_residual()
    if resid > 1e-10:
        raise InvariantViolation("orthogonality", resid, "wavelet matrix")
    plan = givens_factorize(W)
    routes = {
        "mallat": mallat_forward(x, filt, J).values,
        "matrix": W.forward(x).values,
        "givens": givens_apply(plan, x),
    }
    psi = amplitude_encode(x)
    routes["amplitude"] = amplitude_decode(apply_unitary(psi, W.matrix.astype(complex)))
    ref = routes["mallat"]
    report = rotation_count_report(plan)
    results = {
        "orthogonality_residual": resid,
        "route_max_abs_diff": {k: float(np.abs(v - ref).max()) for k, v in routes.items()},
        "rotations": {"count": report.count, "depth": report.depth, "max_layer_width": report.max_layer_width},
    }
    files = {
        "matrix.csv": matrix_to_csv(W.matrix),
        "coefficients.csv": columns_to_csv({"index": _index(x.size), "signal": x, **routes}),
    }
    return files, results


def _shrink_curve(policy, mode, shots, seed):
    x = np.linspace(-1.0, 1.0, CURVE_POINTS)
    measured, _ = shrink_coefficients(x, policy, mode, shots=shots, seed=seed)
    return {"x": x, "ideal": ideal_shrink(policy, x), "measured": measured}


def _shrink_figure(cfg):
    """Shared recipe of the hard, smooth and power-law figures."""
    y = _signal(cfg)
    policy = _policy(cfg)
    mode = cfg.get("mode", "expectation_damping")
    shots = cfg.get("shots")
    d, rec = rescale_to_unit(y, cfg.get("rescale", "maxabs"))
    shrunk, m = shrink_coefficients(d, policy, mode, shots=shots, seed=cfg["seed"])
    ideal = m * d
    files = {
        "shrink.csv": columns_to_csv({
            "index": _index(y.size),
            "input": y,
            "original": d,
            "multiplier": m,
            "ideal": ideal,
            "shrunk": shrunk,
            "shrunk_input_units": rec.undo(shrunk),
        }),
        "curve.csv": columns_to_csv(_shrink_curve(policy, mode, shots, cfg["seed"])),
    }
    results = {
        "policy": policy.to_dict(),
        "mode": mode,
        "shots": shots,
        "scale": rec.scale,
        "max_abs_error": float(np.abs(shrunk - ideal).max()),
    }
    return files, results


def fig3_doppler(cfg):
    N = int(cfg.get("N", 1024))
    clean = _signal(cfg, default_N=N)
    snr = float(cfg.get("snr", 7.0))
    noisy = add_noise(clean, snr, cfg["seed"])
    filt = _filter(cfg, "daub4")
    J = int(cfg.get("levels", 4))
    policy = _policy(cfg)
    mode = cfg.get("mode", "expectation_damping")
    estimate, rep = denoise_quantum(noisy, filt, J, policy, mode=mode, shots=cfg.get("shots"),
                                    seed=cfg["seed"], clean=clean, rescale_mode=cfg.get("rescale", "maxabs"))
    universal = float(np.std(noisy - clean)) * math.sqrt(2.0 * math.log(clean.size))
    lam_grid = np.linspace(0.0, 2.0 * universal, 121)
    lam, mse_classical, classical = best_classical_lambda(noisy, clean, filt, J, lam_grid)
    quantum = metrics(clean, estimate, noisy)
    files = {
        name + ".csv": columns_to_csv({"index": _index(clean.size), name: values})
        for name, values in (("clean", clean), ("noisy", noisy), ("estimate", estimate), ("classical", classical))
    }
    files["coefficients.csv"] = columns_to_csv({
        "index": _index(clean.size),
        "before": rep.coeffs_before,
        "after": rep.coeffs_after,
        "multiplier": rep.multipliers,
    })
    results = {
        "policy": policy.to_dict(),
        "mode": mode,
        "snr": snr,
        "mse_noisy": quantum.mse_noisy,
        "mse_estimate": quantum.mse_estimate,
        "snr_gain_db": quantum.snr_gain_db,
        "classical_lambda": lam,
        "mse_classical": mse_classical,
        "ratio_to_classical": quantum.mse_estimate / mse_classical,
        "rescale_scale": rep.scale,
    }
    return files, results


def fig4_diag(cfg):
    y = _signal(cfg)
    filt = _filter(cfg, "haar")
    J = int(cfg.get("levels", 2))
    policy = _policy(cfg)
    coeffs = mallat_forward(y, filt, J)
    mask = coeffs.detail_mask() if policy.scope == "details" else np.ones(y.size, bool)
    d, _ = rescale_to_unit(coeffs.values[mask], cfg.get("rescale", "maxabs"))
    m = np.ones(y.size)
    m[mask] = target_multiplier(policy, d)
    size = amplitude_encode(coeffs.values).amps.size
    s = np.ones(size)
    s[: y.size] = m**2
    pre, post = ancilla_zero_diagonal(coeffs.values, s)
    files = {"diagonal.csv": columns_to_csv({"index": _index(y.size), "pre": pre, "post": post})}
    results = {"policy": policy.to_dict(), "retained_population": float(post.sum()), "pre_population": float(pre.sum())}
    return files, results


def _unit_data(cfg) -> np.ndarray:
    d, _ = rescale_to_unit(_signal(cfg), cfg.get("rescale", "maxabs"))
    return d


def _ancilla_files(d, run) -> dict:
    return {"ancilla.csv": columns_to_csv({
        "index": _index(d.size),
        "d": d,
        "exact": run.exact,
        "p_hat": run.probabilities,
        "z_expectation": run.z_expectation,
        "shrunk": run.shrunk,
    })}


def fig8_flag(cfg):
    d = _unit_data(cfg)
    policy = _policy(cfg)
    if policy.lam is None:
        raise ValueError("fig8_flag needs a policy with a 'lambda'")
    shots = int(cfg.get("shots", 1024))
    run = ancilla_flag_experiment(d, policy.lam, shots, cfg["seed"])
    return _ancilla_files(d, run), {"lambda": policy.lam, "shots": shots}


def fig9_smooth_ancilla(cfg):
    d = _unit_data(cfg)
    shots = int(cfg.get("shots", 1024))
    run = smooth_ancilla_experiment(d, shots, cfg["seed"])
    sd = np.sqrt(run.exact * (1 - run.exact) / shots)
    return _ancilla_files(d, run), {"shots": shots, "max_standard_error": float(sd.max())}


def fig10_phase_encode(cfg):
    d = _unit_data(cfg)
    alpha = float(cfg.get("alpha", 1.0))
    gamma = float(cfg.get("gamma", 0.5))
    psi = phase_encode(d, alpha)
    rho = to_density(psi)
    after = rho
    for q in range(psi.n):
        after = ch.apply_channel(after, ch.phase_damping(gamma), targets=[q])
    cols = {"qubit": _index(psi.n)}
    for label, state in (("before", rho), ("after", after)):
        xs, ys = [], []
        for q in range(psi.n):
            red = partial_trace(state, [q])
            xs.append(expect(red, "X"))
            ys.append(expect(red, "Y"))
        cols[f"x_{label}"] = np.array(xs)
        cols[f"y_{label}"] = np.array(ys)
    files = {
        "state.csv": state_to_csv(psi),
        "coherence.csv": columns_to_csv(cols),
    }
    results = {"alpha": alpha, "gamma": gamma, "expected_ratio": math.sqrt(1.0 - gamma)}
    return files, results


def _hardware(cfg) -> HardwareModel:
    hw = cfg.get("hardware")
    if hw is None or "T2" not in hw:
        raise ValueError(f"figure {cfg['figure']!r} needs 'hardware' with key 'T2'")
    unknown = set(hw) - {"T2", "shots"}
    if unknown:
        raise ValueError(f"unknown hardware keys: {sorted(unknown)}")
    return HardwareModel(float(hw["T2"]), int(cfg.get("shots", hw.get("shots", 1024))), cfg["seed"])


def hw_idle(cfg):
    model = _hardware(cfg)
    s = np.linspace(0.05, 1.0, 20)
    t = np.array([idle_time_for_retention(v, model) for v in s])
    g = np.array([gamma_from_idle(v, model) for v in t])
    files = {"idle.csv": columns_to_csv({"s": s, "idle_time": t, "gamma": g, "expected": 1.0 - s**2})}
    return files, {"T2": model.T2, "max_round_trip_error": float(np.abs(g - (1.0 - s**2)).max())}


def hw_randz(cfg):
    model = _hardware(cfg)
    gammas = np.linspace(0.0, 1.0, 5)
    xs = np.linspace(-0.8, 0.8, 5)
    rows = {"gamma": [], "x": [], "exact": [], "estimate": []}
    k = 0
    for g in gammas:
        for x in xs:
            sub = int(substream(cfg["seed"], "hw_randz", k).integers(2**62))
            est = randomized_z_shrink(expectation_encode(x), g, model.shots, sub)
            rows["gamma"].append(g)
            rows["x"].append(x)
            rows["exact"].append((1 - 2 * g) * x)
            rows["estimate"].append(est)
            k += 1
    err = np.abs(np.array(rows["estimate"]) - np.array(rows["exact"]))
    return {"randz.csv": columns_to_csv(rows)}, {"shots": model.shots, "max_abs_error": float(err.max()),
                                                   "bound": 4.0 / math.sqrt(model.shots)}


RECIPES: dict[str, Callable] = {
    "fig1_dwt": fig1_dwt,
    "fig5_hard": _shrink_figure,
    "fig6_smooth": _shrink_figure,
    "fig7_power": _shrink_figure,
    "fig3_doppler": fig3_doppler,
    "fig4_diag": fig4_diag,
    "fig8_flag": fig8_flag,
    "fig9_smooth_ancilla": fig9_smooth_ancilla,
    "fig10_phase_encode": fig10_phase_encode,
    "hw_idle": hw_idle,
    "hw_randz": hw_randz,
}


def run_figure(cfg: dict):
    """Dispatch on ``cfg['figure']``; returns ``(files, results)``."""
    return RECIPES[cfg["figure"]](cfg)
