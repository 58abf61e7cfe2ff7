"""Command-line front end: simulate | moments | limits | verify.

All outputs are deterministic given (config, seed).  Files are written
atomically (temp file + rename) so a failing stage never leaves a partial
report behind.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
import tempfile
from pathlib import Path

import numpy as np
import scipy

from . import __version__
from .config import ConfigError, RunConfig, load_config
from .limits import bagchi_pal_limit, randomized_limit
from .moments import asymptotic_K, asymptotic_M, build_moment_ode, solve_moments
from .plotting import histogram_rows, render_histogram
from .rules import RandomizedRule, ReplacementRule
from .simulate import run_ensemble
from .verify import build_report, scaled_samples

DEFAULT_MOMENT_GRID_END = 3.0
DEFAULT_MOMENT_GRID_STEP = 0.1


def _atomic_write(path: Path, write_fn) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w", newline="") as handle:
            write_fn(handle)
        os.chmod(tmp, 0o644)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _limit_for(config: RunConfig):
    tau0 = config.w0 + config.b0
    if isinstance(config.rule, ReplacementRule):
        return bagchi_pal_limit(config.rule, tau0)
    return randomized_limit(config.rule, tau0)


def cmd_simulate(config: RunConfig, workers: int = 1) -> int:
    ensemble = run_ensemble(config.sim_config(), workers=workers)
    pairs = scaled_samples(ensemble, config.rule.k, config.t_star)
    out = config.output_dir / "replicas.csv"

    def write(handle):
        writer = csv.writer(handle)
        writer.writerow(["replica", "final_w", "final_b", "events", "scaled_w", "scaled_b"])
        for idx, (rep, (sw, sb)) in enumerate(zip(ensemble.replicas, pairs)):
            writer.writerow(
                [idx, rep.final.white, rep.final.blue, rep.events, repr(sw), repr(sb)]
            )

    _atomic_write(out, write)
    print(f"wrote {out} ({config.replications} replicas)")
    return 0


def cmd_moments(config: RunConfig) -> int:
    system = build_moment_ode(config.rule, config.order_cap, config.w0, config.b0)
    steps = round(DEFAULT_MOMENT_GRID_END / DEFAULT_MOMENT_GRID_STEP)
    grid = np.linspace(0.0, DEFAULT_MOMENT_GRID_END, steps + 1)
    traj = solve_moments(system, grid)
    k = config.rule.k
    out = config.output_dir / "moments.csv"

    def write(handle):
        writer = csv.writer(handle)
        writer.writerow(["t", "i", "j", "m", "scaled_m"])
        for t_idx, t in enumerate(traj.times):
            for i, j in system.index:
                m = traj.values[t_idx, system.position(i, j)]
                writer.writerow(
                    [f"{t:.6g}", i, j, repr(float(m)),
                     repr(float(m * math.exp(-k * (i + j) * t)))]
                )

    _atomic_write(out, write)
    print(f"wrote {out} (orders up to {config.order_cap}, grid 0..{DEFAULT_MOMENT_GRID_END})")
    return 0


def cmd_limits(config: RunConfig) -> int:
    limit = _limit_for(config)
    tau0 = config.w0 + config.b0
    shape_w, scale_w = limit.marginal("white")
    shape_b, scale_b = limit.marginal("blue")
    print(f"shape  = {limit.shape:.10g}")
    print(f"scale  = {limit.scale:.10g}")
    print(f"weights = white {limit.weights[0]:.6f} / blue {limit.weights[1]:.6f}")
    print(f"white marginal: Gamma({shape_w:.10g}, {scale_w:.10g})")
    print(f"blue marginal:  Gamma({shape_b:.10g}, {scale_b:.10g})")
    print("asymptotic coefficients (i, j, value):")
    for n in range(1, config.order_cap + 1):
        for i in range(n, -1, -1):
            j = n - i
            if isinstance(config.rule, ReplacementRule):
                value = asymptotic_K(i, j, config.rule.b, config.rule.c, config.rule.k, tau0)
            else:
                value = asymptotic_M(i, j, config.rule, tau0)
            print(f"  {i} {j} {value:.10g}")
    return 0


def cmd_verify(config: RunConfig, workers: int = 1) -> int:
    deterministic = isinstance(config.rule, ReplacementRule)
    prop_tol = 0.01 if deterministic else 0.02
    corr_min = 0.999 if deterministic else 0.995

    ensemble = run_ensemble(config.sim_config(), workers=workers)
    system = build_moment_ode(config.rule, config.order_cap, config.w0, config.b0)
    grid = np.linspace(0.0, config.t_star, 61)
    traj = solve_moments(system, grid)
    limit = _limit_for(config)
    report = build_report(
        ensemble, config.sim_config(), limit, traj,
        proportion_tolerance=prop_tol, corr_threshold=corr_min,
    )

    pairs = scaled_samples(ensemble, config.rule.k, config.t_star)
    whites = [w for w, _ in pairs]
    blues = [b for _, b in pairs]

    rows = histogram_rows(whites, "white", *limit.marginal("white"))
    rows += histogram_rows(blues, "blue", *limit.marginal("blue"))
    hist_path = config.output_dir / "histogram.csv"

    def write_hist(handle):
        writer = csv.DictWriter(
            handle,
            fieldnames=["color", "bin_left", "bin_right", "count", "density", "gamma_pdf_mid"],
        )
        writer.writeheader()
        writer.writerows(rows)

    _atomic_write(hist_path, write_hist)

    payload = {
        "config": config.echo(),
        "versions": {
            "polyaproc": __version__,
            "numpy": np.__version__,
            "scipy": scipy.__version__,
        },
        "proportion_white": report.proportion_white,
        "theory_proportion": report.theory_proportion,
        "proportion_tolerance": report.proportion_tolerance,
        "pearson_corr": report.pearson_corr,
        "corr_threshold": report.corr_threshold,
        "ks_white": {"D": report.ks_white[0], "p_approx": report.ks_white[1]},
        "ks_blue": {"D": report.ks_blue[0], "p_approx": report.ks_blue[1]},
        "ks_critical_1pct": report.ks_critical,
        "event_count_mean": report.event_count_mean,
        "event_count_expected": report.event_count_expected,
        "moment_table": [
            {
                "i": r.i,
                "j": r.j,
                "empirical": r.empirical,
                "theoretical": r.theoretical,
                "standard_error": r.standard_error,
                "standardized_error": r.standardized_error,
            }
            for r in report.moment_table
        ],
        "pass_flags": report.pass_flags,
        "all_pass": report.all_pass,
        "note": "KS targets the asymptotic Gamma law; finite-t bias is not corrected",
    }
    report_path = config.output_dir / "report.json"
    _atomic_write(report_path, lambda h: json.dump(payload, h, indent=2))

    render_histogram(whites, "white", limit, str(config.output_dir / "histogram_white.png"))
    render_histogram(blues, "blue", limit, str(config.output_dir / "histogram_blue.png"))

    for name, ok in report.pass_flags.items():
        print(f"{name}: {'PASS' if ok else 'FAIL'}")
    print(f"wrote {report_path}, {hist_path}, and histogram figures")
    return 0 if report.all_pass else 1


def _parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="polyaproc",
        description="Continuous-time two-color Polya process toolkit",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("simulate", "moments", "limits", "verify"):
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="path to key=value config file")
        p.add_argument("--seed", type=int, help="override master seed")
        p.add_argument("--out", help="override output directory")
        p.add_argument("--replications", type=int, help="override ensemble size")
        p.add_argument("--t-star", dest="t_star", type=float, help="override stopping time")
        p.add_argument("--order", type=int, help="override moment order cap")
        if name in ("simulate", "verify"):
            p.add_argument("--workers", type=int, default=1, help="parallel replica workers")
    return parser


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    overrides = {
        "seed": args.seed,
        "output_dir": args.out,
        "replications": args.replications,
        "t_star": args.t_star,
        "order_cap": args.order,
    }
    try:
        config = load_config(args.config, overrides)
        if args.command == "simulate":
            return cmd_simulate(config, workers=args.workers)
        if args.command == "moments":
            return cmd_moments(config)
        if args.command == "limits":
            return cmd_limits(config)
        return cmd_verify(config, workers=args.workers)
    except (ConfigError, ValueError) as exc:
        print(f"error [{args.command}]: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"i/o error [{args.command}]: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
