"""Command-line front end.

Presets reproduce the three benchmark disturbances (sinusoidal, constant
bias, sample-and-hold uniform); custom scenarios come from a flat
key=value config file.  Outputs are a trajectory CSV, a metrics
key=value file, and a one-line comparison report per run; sweeps fan a
gain grid out over a thread pool (the integration kernel releases the
GIL) and reduce to a summary CSV.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace
from pathlib import Path

import numpy as np

from .signals import (NOISE_KINDS, REGRESSOR_KINDS, NoiseSpec, RegressorSpec,
                      TruthSpec)
from .sim import TRAJECTORY_COLUMNS, RunMetrics, ScenarioConfig, Trajectory, run_scenario

EXIT_OK = 0
EXIT_DIVERGED = 1
EXIT_USAGE = 2

PRESET_NAMES = ("fig2", "fig4", "fig6")


class ConfigError(ValueError):
    """Config-file problem, carrying file/line/field context in the message."""


def preset(name: str) -> ScenarioConfig:
    """Benchmark scenario by name.

    All three share the plant (theta=2, estimates from 1.8, regressor
    sin t, filter k=1, extension poles 3 and 5) and differ in the
    disturbance and estimator gains:

      fig2  sinusoidal sin 10t,            gamma=1e4, kappa=1e8
      fig4  constant 0.5,                  gamma=1e4, kappa=1e8
      fig6  uniform on (-0.5, 0.5) held    gamma=10,  kappa=1e10
            over 1e-2 s intervals, seed 0
    """
    if name == "fig2":
        noise = NoiseSpec(kind="sinusoid", amplitude=1.0, angular_frequency=10.0)
        gamma, kappa = 1e4, 1e8
    elif name == "fig4":
        noise = NoiseSpec(kind="constant", constant_value=0.5)
        gamma, kappa = 1e4, 1e8
    elif name == "fig6":
        noise = NoiseSpec(kind="uniform", lo=-0.5, hi=0.5, hold_step=1e-2, seed=0)
        gamma, kappa = 10.0, 1e10
    else:
        raise ConfigError(
            f"unknown preset {name!r}; available: {', '.join(PRESET_NAMES)}")
    return ScenarioConfig(truth=TruthSpec(theta=2.0, theta_hat0=1.8),
                          regressor=RegressorSpec(kind="sinusoid"),
                          noise=noise, k=1.0, beta1=3.0, beta2=5.0,
                          kappa=kappa, gamma=gamma)


def _kind(allowed):
    def parse(v: str) -> str:
        if v not in allowed:
            raise ValueError(f"must be one of {', '.join(allowed)}, got {v!r}")
        return v
    return parse


def _int(v: str) -> int:
    try:
        return int(v)
    except ValueError:
        raise ValueError(f"not an integer: {v!r}") from None


def _float(v: str) -> float:
    try:
        return float(v)
    except ValueError:
        raise ValueError(f"not a number: {v!r}") from None


# config key -> (target, field, parser); targets are assembled in _build_config
_CONFIG_FIELDS = {
    "theta": ("truth", "theta", _float),
    "theta_hat0": ("truth", "theta_hat0", _float),
    "regressor_kind": ("regressor", "kind", _kind(REGRESSOR_KINDS)),
    "regressor_amplitude": ("regressor", "amplitude", _float),
    "regressor_angular_frequency": ("regressor", "angular_frequency", _float),
    "regressor_offset": ("regressor", "offset", _float),
    "noise_kind": ("noise", "kind", _kind(NOISE_KINDS)),
    "noise_amplitude": ("noise", "amplitude", _float),
    "noise_angular_frequency": ("noise", "angular_frequency", _float),
    "noise_constant_value": ("noise", "constant_value", _float),
    "noise_lo": ("noise", "lo", _float),
    "noise_hi": ("noise", "hi", _float),
    "noise_hold_step": ("noise", "hold_step", _float),
    "noise_seed": ("noise", "seed", _int),
    "k": ("scenario", "k", _float),
    "beta1": ("scenario", "beta1", _float),
    "beta2": ("scenario", "beta2", _float),
    "kappa": ("scenario", "kappa", _float),
    "gamma": ("scenario", "gamma", _float),
    "t_end": ("scenario", "t_end", _float),
    "dt": ("scenario", "dt", _float),
    "sample_stride": ("scenario", "sample_stride", _int),
    "steady_state_fraction": ("scenario", "steady_state_fraction", _float),
}


def parse_config(path) -> ScenarioConfig:
    """Load a scenario from a flat key=value file.

    Lines are `key = value`; blank lines and # comments are skipped.
    Unknown keys, duplicates, malformed values, and spec-level validation
    failures all raise ConfigError naming the file, line, and field.
    """
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as e:
        raise ConfigError(f"cannot read config {path}: {e}") from None
    groups: dict = {"truth": {}, "regressor": {}, "noise": {}, "scenario": {}}
    seen = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key = value, got {raw.strip()!r}")
        key, _, val = line.partition("=")
        key, val = key.strip(), val.strip()
        if key not in _CONFIG_FIELDS:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        if key in seen:
            raise ConfigError(
                f"{path}:{lineno}: duplicate key {key!r} (first set on line {seen[key]})")
        seen[key] = lineno
        group, field, parse = _CONFIG_FIELDS[key]
        try:
            groups[group][field] = parse(val)
        except ValueError as e:
            raise ConfigError(f"{path}:{lineno}: {key}: {e}") from None
    return _build_config(groups, str(path))


def _build_config(groups, origin: str) -> ScenarioConfig:
    try:
        truth = TruthSpec(**groups["truth"])
        regressor = RegressorSpec(**{"kind": "sinusoid", **groups["regressor"]})
        noise = NoiseSpec(**groups["noise"])
        return ScenarioConfig(truth=truth, regressor=regressor, noise=noise,
                              **groups["scenario"])
    except (TypeError, ValueError) as e:
        raise ConfigError(f"{origin}: {e}") from None


def write_trajectory_csv(path, traj: Trajectory) -> None:
    """Emit the sampled trajectory with full round-trip precision."""
    with open(path, "w") as f:
        f.write(",".join(TRAJECTORY_COLUMNS) + "\n")
        for row in traj.data:
            f.write(",".join(repr(float(v)) for v in row) + "\n")


def read_trajectory_csv(path) -> np.ndarray:
    """Parse a trajectory CSV back into its (n, 17) array."""
    with open(path) as f:
        header = f.readline().rstrip("\n")
        if header != ",".join(TRAJECTORY_COLUMNS):
            raise ValueError(f"{path}: unexpected header {header!r}")
        rows = [[float(tok) for tok in line.split(",")] for line in f if line.strip()]
    return np.array(rows, dtype=float).reshape(-1, len(TRAJECTORY_COLUMNS))


def improvement_ratio(metrics: RunMetrics):
    """Gradient error over new-method error, or None when meaningless.

    None when either error is non-finite (diverged or empty window) or
    the denominator is below 1e-15 (both methods essentially exact).
    """
    num, den = metrics.max_error_gradient, metrics.max_error_new
    if not (math.isfinite(num) and math.isfinite(den)) or den <= 1e-15:
        return None
    return num / den


def write_metrics(path, metrics: RunMetrics) -> None:
    a = metrics.assumptions
    ratio = improvement_ratio(metrics)
    pairs = [
        ("max_error_new", repr(metrics.max_error_new)),
        ("rms_error_new", repr(metrics.rms_error_new)),
        ("max_error_gradient", repr(metrics.max_error_gradient)),
        ("rms_error_gradient", repr(metrics.rms_error_gradient)),
        ("eps0_new", repr(metrics.eps0_new)),
        ("eps0_gradient", repr(metrics.eps0_gradient)),
        ("improvement_ratio", repr(ratio) if ratio is not None else "n/a"),
        ("diverged", str(metrics.diverged).lower()),
        ("diverged_step", str(metrics.diverged_step)),
        ("sup_abs_noise", repr(a.sup_abs_noise)),
        ("noise_bound_satisfied", str(a.bound_satisfied).lower()),
        ("assumption_violation_fraction", repr(a.violation_fraction)),
        ("assumption_samples", str(a.n_samples)),
    ]
    with open(path, "w") as f:
        for key, val in pairs:
            f.write(f"{key} = {val}\n")


_REPORT_FMT = "{:<10} {:<9} {:>9} {:>9} {:>11} {:>11} {:>11} {:>11} {:>8} {:>6} {:>5}"


def report_header() -> str:
    return _REPORT_FMT.format("scenario", "noise", "gamma", "kappa",
                              "max_new", "rms_new", "max_grad", "rms_grad",
                              "ratio", "viol", "div")


def report_row(name: str, cfg: ScenarioConfig, metrics: RunMetrics) -> str:
    ratio = improvement_ratio(metrics)
    return _REPORT_FMT.format(
        name, cfg.noise.kind, f"{cfg.gamma:g}", f"{cfg.kappa:g}",
        f"{metrics.max_error_new:.3e}", f"{metrics.rms_error_new:.3e}",
        f"{metrics.max_error_gradient:.3e}", f"{metrics.rms_error_gradient:.3e}",
        f"{ratio:.3g}" if ratio is not None else "n/a",
        f"{metrics.assumptions.violation_fraction:.2f}",
        "yes" if metrics.diverged else "no")


def _apply_overrides(cfg: ScenarioConfig, args) -> ScenarioConfig:
    changes = {}
    for field in ("dt", "t_end", "kappa", "gamma"):
        v = getattr(args, field)
        if v is not None:
            changes[field] = v
    if args.seed is not None:
        cfg = replace(cfg, noise=replace(cfg.noise, seed=args.seed))
    return replace(cfg, **changes) if changes else cfg


def run_command(args) -> int:
    if (args.scenario is None) == (args.config is None):
        print("run: give exactly one of a preset name or --config PATH", file=sys.stderr)
        return EXIT_USAGE
    if args.scenario is not None:
        cfg = preset(args.scenario)
        name = args.scenario
    else:
        cfg = parse_config(args.config)
        name = Path(args.config).stem
    cfg = _apply_overrides(cfg, args)

    traj, metrics = run_scenario(cfg)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_trajectory_csv(out / f"{name}_trajectory.csv", traj)
    write_metrics(out / f"{name}_metrics.txt", metrics)
    print(report_header())
    print(report_row(name, cfg, metrics))
    if metrics.diverged:
        print(f"run diverged at step {metrics.diverged_step} "
              f"(t = {metrics.diverged_step * cfg.dt:g}); trajectory truncated",
              file=sys.stderr)
        return EXIT_DIVERGED
    return EXIT_OK


def _gain_list(text: str, flag: str):
    out = []
    for tok in text.split(","):
        tok = tok.strip()
        if not tok:
            continue
        try:
            out.append(float(tok))
        except ValueError:
            raise ConfigError(f"{flag}: not a number: {tok!r}") from None
    return out


def sweep_command(args) -> int:
    cfg0 = preset(args.scenario)
    gammas = _gain_list(args.gamma, "--gamma") if args.gamma else []
    kappas = _gain_list(args.kappa, "--kappa") if args.kappa else []
    if not gammas and not kappas:
        print("sweep: empty grid; give --gamma and/or --kappa", file=sys.stderr)
        return EXIT_USAGE
    grid = [(g, kp) for g in (gammas or [cfg0.gamma]) for kp in (kappas or [cfg0.kappa])]

    def cell(gains):
        g, kp = gains
        cfg = replace(cfg0, gamma=g, kappa=kp)
        traj, metrics = run_scenario(cfg)
        return cfg, traj, metrics

    with ThreadPoolExecutor(max_workers=min(len(grid), os.cpu_count() or 1)) as pool:
        results = list(pool.map(cell, grid))

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    print(report_header())
    summary = out / f"{args.scenario}_sweep_summary.csv"
    any_diverged = False
    with open(summary, "w") as f:
        f.write("scenario,gamma,kappa,max_error_new,rms_error_new,"
                "max_error_gradient,rms_error_gradient,improvement_ratio,"
                "assumption_violation_fraction,diverged\n")
        for cfg, traj, metrics in results:
            cell_name = f"{args.scenario}_g{cfg.gamma:g}_k{cfg.kappa:g}"
            write_trajectory_csv(out / f"{cell_name}_trajectory.csv", traj)
            ratio = improvement_ratio(metrics)
            f.write(",".join([
                args.scenario, repr(cfg.gamma), repr(cfg.kappa),
                repr(metrics.max_error_new), repr(metrics.rms_error_new),
                repr(metrics.max_error_gradient), repr(metrics.rms_error_gradient),
                repr(ratio) if ratio is not None else "",
                repr(metrics.assumptions.violation_fraction),
                str(metrics.diverged).lower()]) + "\n")
            print(report_row(cell_name, cfg, metrics))
            any_diverged = any_diverged or metrics.diverged
    return EXIT_DIVERGED if any_diverged else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="expdrem",
        description="Simulate and compare noise-robust vs gradient parameter identification")
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run one scenario and write trajectory/metrics")
    run_p.add_argument("scenario", nargs="?", choices=PRESET_NAMES,
                       help="preset name (alternative to --config)")
    run_p.add_argument("--config", help="key=value scenario file")
    run_p.add_argument("--out", default=".", help="output directory (default: .)")
    run_p.add_argument("--dt", type=float, help="integration step override")
    run_p.add_argument("--t-end", dest="t_end", type=float, help="horizon override")
    run_p.add_argument("--seed", type=int, help="noise seed override")
    run_p.add_argument("--kappa", type=float, help="new-method gain override")
    run_p.add_argument("--gamma", type=float, help="gradient gain override")
    run_p.set_defaults(func=run_command)

    sweep_p = sub.add_parser("sweep", help="run a gain grid and write a summary CSV")
    sweep_p.add_argument("scenario", choices=PRESET_NAMES)
    sweep_p.add_argument("--gamma", help="comma-separated gradient gains")
    sweep_p.add_argument("--kappa", help="comma-separated new-method gains")
    sweep_p.add_argument("--out", default=".", help="output directory (default: .)")
    sweep_p.set_defaults(func=sweep_command)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code not in (0, None) else EXIT_OK
    try:
        return args.func(args)
    except ConfigError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE


def console_main() -> None:
    sys.exit(main())
