"""Command-line interface.

Subcommands:

    run <config>                 repeated nested runs, report bundle + figures
    simulate <config> --out DIR  draw a synthetic dataset from sim_* keys
    kscan <config> --k LIST      scaling study over live-point counts

Exit codes: 0 success, 1 partial failure (some run produced no evidence),
2 invalid input (bad config, data file or arguments).
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from .config import load_config
from .dataio import simulate_dataset, write_data, write_meta
from .engine import Quadrature
from .errors import ConfigError, DataError, NestshiftError
from .report import run_analysis, run_kscan, write_kscan_outputs, write_outputs

__all__ = ["main"]


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("config", help="path to a run configuration file")
    parser.add_argument("--seed", type=int, default=None, help="override the base seed")
    parser.add_argument("--runs", type=int, default=None, help="override n_runs")
    parser.add_argument(
        "--no-cluster", action="store_true", help="disable mean-shift clustering"
    )
    parser.add_argument(
        "--quadrature",
        choices=[q.value for q in Quadrature],
        default=None,
        help="override the evidence quadrature rule",
    )
    parser.add_argument(
        "--no-plots", action="store_true", help="skip figure rendering"
    )


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nestshift",
        description="Nested sampling with mean-shift cluster-aware search",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run the sampler and write the report bundle")
    _add_common(p_run)
    p_run.add_argument("--out", default=None, help="override the output directory")

    p_sim = sub.add_parser("simulate", help="write a synthetic dataset")
    p_sim.add_argument("config", help="config with sim_true and sim_grid keys")
    p_sim.add_argument("--out", required=True, help="directory for the dataset")
    p_sim.add_argument("--seed", type=int, default=None, help="override the seed")

    p_scan = sub.add_parser("kscan", help="scaling study over live-point counts")
    _add_common(p_scan)
    p_scan.add_argument(
        "--k", required=True, help="comma-separated live-point counts, e.g. 250,500,1000"
    )
    p_scan.add_argument("--out", default=None, help="override the output directory")
    p_scan.add_argument(
        "--fit-exclude-delta",
        default="",
        help="comma-separated K values excluded from the delta fit",
    )
    p_scan.add_argument(
        "--fit-exclude-cpu",
        default="",
        help="comma-separated K values excluded from the CPU fit",
    )
    return parser


def _parse_int_list(text: str, flag: str) -> list[int]:
    if not text:
        return []
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise ConfigError([f"{flag} expects comma-separated integers, got {text!r}"])


def _cmd_run(args) -> int:
    cfg = load_config(args.config)
    quadrature = Quadrature(args.quadrature) if args.quadrature else None
    report = run_analysis(
        cfg,
        base_seed=args.seed,
        n_runs=args.runs,
        cluster_enabled=False if args.no_cluster else None,
        quadrature=quadrature,
    )
    out_dir = args.out if args.out is not None else cfg.output_dir
    plots = False if args.no_plots else None
    written = write_outputs(report, out_dir, plots=plots)
    ok = len(report.runs)
    total = len(report.rows)
    if report.mean_log_evidence is not None:
        delta = report.delta_log_evidence
        spread = f" +- {delta:.4f}" if delta is not None else ""
        print(f"lnE = {report.mean_log_evidence:.4f}{spread}  ({ok}/{total} runs ok)")
        print(
            f"H_mean = {report.information_mean:.4f}   "
            f"sqrt(H/K) = {report.sqrt_h_over_k:.4f}   "
            f"complexity = {report.complexity_mean:.4f}"
        )
    else:
        print(f"no successful runs ({total} attempted)", file=sys.stderr)
    print(f"wrote {len(written)} files under {Path(out_dir)}")
    return 0 if report.n_failed == 0 else 1


def _cmd_simulate(args) -> int:
    cfg = load_config(args.config)
    if cfg.sim is None:
        raise ConfigError(["simulate needs sim_true and sim_grid in the config"])
    start, stop, count = cfg.sim.grid
    x = np.linspace(start, stop, count)
    seed = args.seed if args.seed is not None else cfg.sampler.seed
    rng = np.random.default_rng(seed)
    dataset = simulate_dataset(
        cfg.model,
        cfg.sim.true_params,
        x,
        cfg.data_kind,
        rng,
        yerr=cfg.sim.yerr,
    )
    out = Path(args.out)
    data_path = out / "data.dat"
    meta_path = out / "data.meta.json"
    write_data(dataset, data_path)
    model_value = cfg.model.family.value
    write_meta(
        meta_path,
        {
            "model": model_value,
            "n_peaks": cfg.model.n_peaks,
            "param_names": list(cfg.model.param_names()),
            "true_params": list(cfg.sim.true_params),
            "grid": [start, stop, count],
            "data_kind": cfg.data_kind.value,
            "seed": seed,
            "yerr": cfg.sim.yerr,
        },
    )
    print(f"wrote {data_path} and {meta_path}")
    return 0


def _cmd_kscan(args) -> int:
    cfg = load_config(args.config)
    k_values = _parse_int_list(args.k, "--k")
    if not k_values:
        raise ConfigError(["--k needs at least one live-point count"])
    quadrature = Quadrature(args.quadrature) if args.quadrature else None
    report = run_kscan(
        cfg,
        k_values,
        base_seed=args.seed,
        n_runs=args.runs,
        cluster_enabled=False if args.no_cluster else None,
        quadrature=quadrature,
        exclude_delta=tuple(_parse_int_list(args.fit_exclude_delta, "--fit-exclude-delta")),
        exclude_cpu=tuple(_parse_int_list(args.fit_exclude_cpu, "--fit-exclude-cpu")),
    )
    out_dir = args.out if args.out is not None else cfg.output_dir
    written = write_kscan_outputs(report, out_dir, plots=not args.no_plots)
    for row in report.rows:
        delta = "null" if row.delta_log_evidence is None else f"{row.delta_log_evidence:.4f}"
        mean = "null" if row.mean_log_evidence is None else f"{row.mean_log_evidence:.4f}"
        print(f"K={row.n_live}: lnE={mean} delta={delta} cpu={row.cpu_s:.2f}s ok={row.n_ok}")
    if report.delta_fit is not None:
        print(f"delta scaling exponent: {report.delta_fit[0]:.4f}")
    if report.cpu_fit is not None:
        print(f"cpu scaling exponent: {report.cpu_fit[0]:.4f}")
    print(f"wrote {len(written)} files under {Path(out_dir)}")
    failed = sum(r.n_failed for r in report.rows)
    return 0 if failed == 0 else 1


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "simulate":
            return _cmd_simulate(args)
        return _cmd_kscan(args)
    except (ConfigError, DataError) as exc:
        for problem in exc.problems:
            print(f"error: {problem}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NestshiftError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
