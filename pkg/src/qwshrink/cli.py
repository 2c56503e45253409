"""Command-line runner: ``qwshrink run <config.json>`` and ``qwshrink verify``.

Exit codes: 0 success, 1 numerical invariant violation, 2 configuration error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import sys
from pathlib import Path

from .errors import InvariantViolation
from .figures import FIGURES, run_figure
from .io import write_atomic
from .pipeline import MODES

CONFIG_KEYS = {
    "figure", "signal", "signal_csv", "data", "N", "snr", "seed", "filter", "levels",
    "policy", "mode", "shots", "hardware", "output_dir", "alpha", "gamma", "rescale",
}
REQUIRED_KEYS = ("figure",)

EXIT_OK, EXIT_INVARIANT, EXIT_CONFIG = 0, 1, 2


class ConfigError(ValueError):
    pass


def parse_config(text: str, source: str = "<config>") -> dict:
    try:
        cfg = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{source}: invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    if not isinstance(cfg, dict):
        raise ConfigError(f"{source}: top level must be a JSON object")
    return cfg


def validate_config(cfg: dict) -> dict:
    unknown = sorted(set(cfg) - CONFIG_KEYS)
    if unknown:
        raise ConfigError(f"unknown config keys: {unknown}")
    for key in REQUIRED_KEYS:
        if key not in cfg:
            raise ConfigError(f"missing required config key {key!r}")
    if cfg["figure"] not in FIGURES:
        raise ConfigError(f"unknown figure {cfg['figure']!r}; expected one of {list(FIGURES)}")
    if "mode" in cfg and cfg["mode"] not in MODES:
        raise ConfigError(f"unknown mode {cfg['mode']!r}; expected one of {list(MODES)}")
    seed = cfg.setdefault("seed", 0)
    if not isinstance(seed, int) or isinstance(seed, bool) or seed < 0:
        raise ConfigError(f"seed must be a non-negative integer, got {seed!r}")
    shots = cfg.get("shots")
    if shots is not None and (not isinstance(shots, int) or isinstance(shots, bool) or shots < 1):
        raise ConfigError(f"shots must be a positive integer, got {shots!r}")
    if "output_dir" not in cfg:
        raise ConfigError("missing required config key 'output_dir' (or pass --output-dir)")
    return cfg


def config_hash(cfg: dict) -> str:
    canonical = json.dumps(cfg, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode()).hexdigest()


def _jsonable(obj):
    if isinstance(obj, float) and not math.isfinite(obj):
        return str(obj)
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    return obj


def run_config(cfg: dict) -> tuple[Path, dict]:
    """Run one validated config and write its artifacts; returns (directory, report)."""
    effective = {k: v for k, v in cfg.items() if k != "output_dir"}
    files, results = run_figure(dict(effective))
    report = {
        "figure": cfg["figure"],
        "seed": cfg["seed"],
        "config_sha256": config_hash(effective),
        "config": effective,
        "results": _jsonable(results),
        "artifacts": sorted(files),
    }
    files = dict(files)
    files["report.json"] = json.dumps(report, indent=2, sort_keys=True) + "\n"
    out = Path(cfg["output_dir"])
    write_atomic(out, files)
    return out, report


def cmd_run(args) -> int:
    try:
        path = Path(args.config)
        try:
            text = path.read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
        cfg = parse_config(text, str(path))
        if args.output_dir is not None:
            cfg["output_dir"] = args.output_dir
        if args.seed is not None:
            cfg["seed"] = args.seed
        if args.shots is not None:
            cfg["shots"] = args.shots
        validate_config(cfg)
        out, report = run_config(cfg)
    except InvariantViolation as exc:
        print(f"error: invariant {exc.name!r} violated: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except (ConfigError, ValueError, KeyError, TypeError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    print(f"{report['figure']}: wrote {len(report['artifacts']) + 1} files to {out}")
    return EXIT_OK


def cmd_verify(args) -> int:
    from .verify import format_table, run_invariant_suite

    results = run_invariant_suite(inject_fault=args.inject_fault, seed=args.seed)
    print(format_table(results))
    failed = [r for r in results if not r.passed]
    if failed:
        print(f"FAILED: {failed[0].name}", file=sys.stderr)
        return EXIT_INVARIANT
    print(f"all {len(results)} invariants hold")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qwshrink", description="Wavelet shrinkage with simulated quantum channels.")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a figure recipe from a JSON config")
    run.add_argument("config", help="path to the experiment config")
    run.add_argument("--output-dir", help="override the config's output_dir")
    run.add_argument("--seed", type=int, help="override the config seed")
    run.add_argument("--shots", type=int, help="override the shot budget")
    run.set_defaults(func=cmd_run)

    ver = sub.add_parser("verify", help="run the invariant suite")
    ver.add_argument("--inject-fault", action="store_true", help="corrupt one Kraus operator to exercise the failure path")
    ver.add_argument("--seed", type=int, default=0)
    ver.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
