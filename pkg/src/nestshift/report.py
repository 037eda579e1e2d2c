"""Run orchestration and report writing.

``run_analysis`` executes the configured number of independent runs
(seeded base + index, sequentially, bit-reproducibly), aggregates evidence
and posterior summaries, and ``write_outputs`` lays the results down as
delimited files plus rendered figures:

    results.txt            flat key: value summary, machine-parseable
    posterior_samples.dat  weight logL p1..pJ, pooled across runs
    summary.csv            per-parameter moments, CIs, ML value
    hist_<name>.csv        weighted marginals with out-of-range mass
    joint_<a>_<b>.csv      requested 2-d marginals
    trace.csv              run, m, logweight, params for every sample
    figures/*.png          trace, marginals, joints (and kscan.png)

Every results.txt field is present even on partial failure; unavailable
values are written as ``null``.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from . import figures
from .config import RunConfig
from .dataio import read_data
from .engine import (
    NestedRun,
    Quadrature,
    combine_runs,
    run_nested,
)
from .errors import NestshiftError
from .models import Dataset, make_loglike
from .posterior import (
    ParamSummary,
    WeightedPosterior,
    combine_posteriors,
    joint_hist,
    marginal_hist,
    summarize,
)

__all__ = [
    "AnalysisReport",
    "KscanReport",
    "KscanRow",
    "RunRow",
    "fit_power_law",
    "run_analysis",
    "run_kscan",
    "write_kscan_outputs",
    "write_outputs",
]


def _fmt(value) -> str:
    if value is None:
        return "null"
    if isinstance(value, bool):
        return "on" if value else "off"
    if isinstance(value, float):
        return repr(value)
    return str(value)


@dataclass
class RunRow:
    """One run's ledger line; failed runs keep nulls and the error text."""

    index: int
    seed: int
    log_evidence: float | None
    information: float | None
    complexity: float | None
    iterations: int | None
    n_terms: int | None
    total_tries: int | None
    strategy_evals: int | None
    recenters: int | None
    syntheses: int | None
    cluster_invocations: int | None
    stop_reason: str
    error: str | None
    wall_s: float
    cpu_s: float

    @property
    def ok(self) -> bool:
        return self.error is None and self.log_evidence is not None


@dataclass
class AnalysisReport:
    config: RunConfig
    sampler_used: object
    cluster_enabled: bool
    rows: list[RunRow]
    runs: list[NestedRun]
    mean_log_evidence: float | None
    delta_log_evidence: float | None
    information_mean: float | None
    complexity_mean: float | None
    sqrt_h_over_k: float | None
    posterior: WeightedPosterior | None
    summaries: dict[str, ParamSummary]
    wall_s: float
    cpu_s: float

    @property
    def n_failed(self) -> int:
        return sum(1 for r in self.rows if not r.ok)


def run_analysis(
    cfg: RunConfig,
    data: Dataset | None = None,
    *,
    base_seed: int | None = None,
    n_runs: int | None = None,
    cluster_enabled: bool | None = None,
    quadrature: Quadrature | None = None,
) -> AnalysisReport:
    """Execute the configured repetition of nested runs and aggregate them."""
    if data is None:
        if cfg.data_path is None:
            raise NestshiftError("no dataset: config has no data path")
        data = read_data(cfg.data_path, cfg.data_kind)
    sampler = cfg.sampler
    if quadrature is not None:
        sampler = replace(sampler, quadrature=quadrature)
    seed0 = sampler.seed if base_seed is None else base_seed
    repeats = sampler.n_runs if n_runs is None else n_runs
    clustered = cfg.cluster_enabled if cluster_enabled is None else cluster_enabled
    cluster_config = cfg.cluster if clustered else None

    loglike = make_loglike(cfg.model, data)
    rows: list[RunRow] = []
    runs: list[NestedRun] = []
    wall0 = time.perf_counter()
    cpu0 = time.process_time()
    for i in range(repeats):
        seed = seed0 + i
        t_wall = time.perf_counter()
        t_cpu = time.process_time()
        try:
            run = run_nested(
                loglike, cfg.space, sampler, cluster_config, seed=seed
            )
            error = None
        except NestshiftError as exc:
            run = None
            error = str(exc)
        wall_s = time.perf_counter() - t_wall
        cpu_s = time.process_time() - t_cpu
        if run is not None and np.isfinite(run.log_evidence):
            runs.append(run)
            rows.append(
                RunRow(
                    index=i,
                    seed=seed,
                    log_evidence=run.log_evidence,
                    information=run.information,
                    complexity=run.complexity,
                    iterations=run.iterations,
                    n_terms=run.n_terms,
                    total_tries=run.total_tries,
                    strategy_evals=run.strategy_evals,
                    recenters=run.recenters,
                    syntheses=run.syntheses,
                    cluster_invocations=run.cluster_invocations,
                    stop_reason=run.stop_reason,
                    error=None,
                    wall_s=wall_s,
                    cpu_s=cpu_s,
                )
            )
        else:
            if error is None:
                error = "run produced non-finite evidence"
            rows.append(
                RunRow(
                    index=i,
                    seed=seed,
                    log_evidence=None,
                    information=None,
                    complexity=None,
                    iterations=None,
                    n_terms=None,
                    total_tries=None,
                    strategy_evals=None,
                    recenters=None,
                    syntheses=None,
                    cluster_invocations=None,
                    stop_reason="failed",
                    error=error,
                    wall_s=wall_s,
                    cpu_s=cpu_s,
                )
            )

    wall_s = time.perf_counter() - wall0
    cpu_s = time.process_time() - cpu0

    mean = delta = info_mean = comp_mean = sqrt_hk = None
    posterior = None
    summaries: dict[str, ParamSummary] = {}
    if runs:
        combined = combine_runs(runs)
        mean = combined.mean_log_evidence
        delta = combined.delta_log_evidence
        info_mean = float(np.mean([r.information for r in runs]))
        comp_mean = float(np.mean([r.complexity for r in runs]))
        sqrt_hk = float(np.sqrt(max(info_mean, 0.0) / sampler.n_live))
        posterior = combine_posteriors(runs)
        for j, name in enumerate(cfg.space.names):
            summaries[name] = summarize(posterior, j)

    return AnalysisReport(
        config=cfg,
        sampler_used=sampler,
        cluster_enabled=clustered,
        rows=rows,
        runs=runs,
        mean_log_evidence=mean,
        delta_log_evidence=delta,
        information_mean=info_mean,
        complexity_mean=comp_mean,
        sqrt_h_over_k=sqrt_hk,
        posterior=posterior,
        summaries=summaries,
        wall_s=wall_s,
        cpu_s=cpu_s,
    )


def _results_text(report: AnalysisReport) -> str:
    cfg = report.config
    s = report.sampler_used
    c = cfg.cluster
    model_value = cfg.model.family.value
    if cfg.model.n_peaks:
        model_value += f" {cfg.model.n_peaks}"
    lines = [
        f"model: {model_value}",
        f"parameters: {' '.join(cfg.space.names)}",
        f"data: {_fmt(cfg.data_path)}",
        f"data_kind: {cfg.data_kind.value}",
        f"K: {s.n_live}",
        f"N: {s.walk_steps}",
        f"f: {_fmt(s.step_scale)}",
        f"N_t: {s.walk_tries}",
        f"NN_t: {s.cluster_cycles}",
        f"quadrature: {s.quadrature.value}",
        f"term_eps: {_fmt(s.term_eps)}",
        f"cluster: {_fmt(report.cluster_enabled)}",
        f"kernel: {c.kernel.value}",
        f"D: {_fmt(c.radius)}",
        f"ell: {_fmt(c.bandwidth)}",
        f"n_runs: {len(report.rows)}",
        f"n_failed: {report.n_failed}",
        f"mean_lnE: {_fmt(report.mean_log_evidence)}",
        f"delta_lnE: {_fmt(report.delta_log_evidence)}",
        f"H_mean: {_fmt(report.information_mean)}",
        f"sqrt_H_over_K: {_fmt(report.sqrt_h_over_k)}",
        f"complexity_mean: {_fmt(report.complexity_mean)}",
        f"wall_s: {_fmt(report.wall_s)}",
        f"cpu_s: {_fmt(report.cpu_s)}",
    ]
    for row in report.rows:
        p = f"run_{row.index:02d}"
        lines += [
            f"{p}_seed: {row.seed}",
            f"{p}_lnE: {_fmt(row.log_evidence)}",
            f"{p}_H: {_fmt(row.information)}",
            f"{p}_complexity: {_fmt(row.complexity)}",
            f"{p}_iterations: {_fmt(row.iterations)}",
            f"{p}_terms: {_fmt(row.n_terms)}",
            f"{p}_tries: {_fmt(row.total_tries)}",
            f"{p}_strategy_evals: {_fmt(row.strategy_evals)}",
            f"{p}_recenters: {_fmt(row.recenters)}",
            f"{p}_syntheses: {_fmt(row.syntheses)}",
            f"{p}_cluster_invocations: {_fmt(row.cluster_invocations)}",
            f"{p}_stop: {row.stop_reason}",
            f"{p}_error: {_fmt(row.error)}",
            f"{p}_wall_s: {_fmt(row.wall_s)}",
            f"{p}_cpu_s: {_fmt(row.cpu_s)}",
        ]
    return "\n".join(lines) + "\n"


def write_outputs(
    report: AnalysisReport, out_dir=None, plots: bool | None = None
) -> list[Path]:
    """Write the full report bundle; returns the created paths."""
    cfg = report.config
    out = Path(out_dir if out_dir is not None else cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    render = cfg.plots if plots is None else plots
    written: list[Path] = []

    results = out / "results.txt"
    results.write_text(_results_text(report), encoding="utf-8")
    written.append(results)

    names = cfg.space.names
    post = report.posterior
    if post is not None:
        lines = ["# columns: weight logL " + " ".join(names)]
        for i in range(post.n_samples):
            row = [repr(float(post.weights[i])), repr(float(post.logl[i]))]
            row += [repr(float(v)) for v in post.params[i]]
            lines.append(" ".join(row))
        samples_path = out / "posterior_samples.dat"
        samples_path.write_text("\n".join(lines) + "\n", encoding="utf-8")
        written.append(samples_path)

        header = (
            "parameter,mean,std,median,ci68_low,ci68_high,"
            "ci95_low,ci95_high,ci99_low,ci99_high,ml_value"
        )
        rows = [header]
        for name in names:
            t = report.summaries[name]
            rows.append(
                ",".join(
                    [name]
                    + [
                        repr(float(v))
                        for v in (
                            t.mean,
                            t.std,
                            t.median,
                            *t.ci68,
                            *t.ci95,
                            *t.ci99,
                            t.ml_value,
                        )
                    ]
                )
            )
        summary_path = out / "summary.csv"
        summary_path.write_text("\n".join(rows) + "\n", encoding="utf-8")
        written.append(summary_path)

        bounds = {
            name: (float(cfg.space.lower[j]), float(cfg.space.upper[j]))
            for j, name in enumerate(names)
        }
        hists = {}
        for j, name in enumerate(names):
            hist = marginal_hist(post, j, cfg.hist_bins, bounds[name])
            hists[name] = hist
            lines = [
                f"# out_of_range_mass = {hist.out_of_range!r}",
                "bin_low,bin_high,mass",
            ]
            for b in range(hist.mass.size):
                lines.append(
                    ",".join(
                        repr(float(v))
                        for v in (hist.edges[b], hist.edges[b + 1], hist.mass[b])
                    )
                )
            hist_path = out / f"hist_{name}.csv"
            hist_path.write_text("\n".join(lines) + "\n", encoding="utf-8")
            written.append(hist_path)

        joints = {}
        for a, b in cfg.joints:
            ja, jb = cfg.space.index_of(a), cfg.space.index_of(b)
            joint = joint_hist(post, ja, jb, cfg.hist_bins, (bounds[a], bounds[b]))
            joints[(a, b)] = joint
            lines = [
                f"# out_of_range_mass = {joint.out_of_range!r}",
                "x_low,x_high,y_low,y_high,mass",
            ]
            for bx in range(joint.mass.shape[0]):
                for by in range(joint.mass.shape[1]):
                    lines.append(
                        ",".join(
                            repr(float(v))
                            for v in (
                                joint.x_edges[bx],
                                joint.x_edges[bx + 1],
                                joint.y_edges[by],
                                joint.y_edges[by + 1],
                                joint.mass[bx, by],
                            )
                        )
                    )
            joint_path = out / f"joint_{a}_{b}.csv"
            joint_path.write_text("\n".join(lines) + "\n", encoding="utf-8")
            written.append(joint_path)

        trace_lines = ["run,m,logweight," + ",".join(names)]
        for row, run in zip([r for r in report.rows if r.ok], report.runs):
            for i in range(run.n_terms):
                trace_lines.append(
                    f"{row.index},{i + 1},"
                    + repr(float(run.logweights[i]))
                    + ","
                    + ",".join(repr(float(v)) for v in run.params[i])
                )
        trace_path = out / "trace.csv"
        trace_path.write_text("\n".join(trace_lines) + "\n", encoding="utf-8")
        written.append(trace_path)

        if render:
            fig_dir = out / "figures"
            fig_dir.mkdir(exist_ok=True)
            trace_name = cfg.trace_param or names[0]
            jt = cfg.space.index_of(trace_name)
            runs_data = [
                (
                    np.arange(1, run.n_terms + 1),
                    run.params[:, jt],
                    run.logweights,
                )
                for run in report.runs
            ]
            written.append(
                figures.save_trace(fig_dir / "trace.png", runs_data, trace_name)
            )
            for name in names:
                written.append(
                    figures.save_marginal(
                        fig_dir / f"marginal_{name}.png", hists[name], name
                    )
                )
            for (a, b), joint in joints.items():
                written.append(
                    figures.save_joint(fig_dir / f"joint_{a}_{b}.png", joint, a, b)
                )

    return written


def fit_power_law(x: np.ndarray, y: np.ndarray) -> tuple[float, float] | None:
    """Least-squares exponent for y ~ amp * x**exponent; None if degenerate.

    Returns (exponent, ln_amplitude). Points with non-positive y are dropped.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    keep = np.isfinite(y) & (y > 0)
    if keep.sum() < 2:
        return None
    slope, intercept = np.polyfit(np.log(x[keep]), np.log(y[keep]), 1)
    return float(slope), float(intercept)


@dataclass
class KscanRow:
    n_live: int
    mean_log_evidence: float | None
    delta_log_evidence: float | None
    information_mean: float | None
    sqrt_h_over_k: float | None
    wall_s: float
    cpu_s: float
    n_ok: int
    n_failed: int


@dataclass
class KscanReport:
    rows: list[KscanRow]
    delta_fit: tuple[float, float] | None
    cpu_fit: tuple[float, float] | None
    excluded_delta: tuple[int, ...]
    excluded_cpu: tuple[int, ...]


def run_kscan(
    cfg: RunConfig,
    k_values: list[int],
    data: Dataset | None = None,
    *,
    base_seed: int | None = None,
    n_runs: int | None = None,
    cluster_enabled: bool | None = None,
    quadrature: Quadrature | None = None,
    exclude_delta: tuple[int, ...] = (),
    exclude_cpu: tuple[int, ...] = (),
) -> KscanReport:
    """Repeat the analysis across live-point counts and fit the scalings.

    Exclusions drop user-flagged K values from the power-law fits only; their
    rows still appear in the table.
    """
    if not k_values:
        raise ValueError("kscan needs at least one K value")
    if data is None:
        if cfg.data_path is None:
            raise NestshiftError("no dataset: config has no data path")
        data = read_data(cfg.data_path, cfg.data_kind)
    rows: list[KscanRow] = []
    for k in k_values:
        scan_cfg = replace(cfg, sampler=replace(cfg.sampler, n_live=k))
        report = run_analysis(
            scan_cfg,
            data,
            base_seed=base_seed,
            n_runs=n_runs,
            cluster_enabled=cluster_enabled,
            quadrature=quadrature,
        )
        rows.append(
            KscanRow(
                n_live=k,
                mean_log_evidence=report.mean_log_evidence,
                delta_log_evidence=report.delta_log_evidence,
                information_mean=report.information_mean,
                sqrt_h_over_k=report.sqrt_h_over_k,
                wall_s=report.wall_s,
                cpu_s=report.cpu_s,
                n_ok=len(report.runs),
                n_failed=report.n_failed,
            )
        )

    ks = np.array([r.n_live for r in rows], dtype=float)
    deltas = np.array(
        [r.delta_log_evidence if r.delta_log_evidence is not None else np.nan for r in rows]
    )
    cpus = np.array([r.cpu_s for r in rows])
    keep_d = ~np.isin([r.n_live for r in rows], exclude_delta)
    keep_c = ~np.isin([r.n_live for r in rows], exclude_cpu)
    delta_fit = fit_power_law(ks[keep_d], deltas[keep_d])
    cpu_fit = fit_power_law(ks[keep_c], cpus[keep_c])
    return KscanReport(
        rows=rows,
        delta_fit=delta_fit,
        cpu_fit=cpu_fit,
        excluded_delta=tuple(exclude_delta),
        excluded_cpu=tuple(exclude_cpu),
    )


def write_kscan_outputs(
    report: KscanReport, out_dir, plots: bool = True
) -> list[Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []

    lines = ["K,mean_lnE,delta_lnE,H_mean,sqrt_H_over_K,wall_s,cpu_s,n_ok,n_failed"]
    for r in report.rows:
        lines.append(
            ",".join(
                [
                    str(r.n_live),
                    _fmt(r.mean_log_evidence),
                    _fmt(r.delta_log_evidence),
                    _fmt(r.information_mean),
                    _fmt(r.sqrt_h_over_k),
                    _fmt(r.wall_s),
                    _fmt(r.cpu_s),
                    str(r.n_ok),
                    str(r.n_failed),
                ]
            )
        )
    table = out / "kscan.csv"
    table.write_text("\n".join(lines) + "\n", encoding="utf-8")
    written.append(table)

    def fmt_fit(fit):
        if fit is None:
            return "null", "null"
        return repr(fit[0]), repr(fit[1])

    d_exp, d_amp = fmt_fit(report.delta_fit)
    c_exp, c_amp = fmt_fit(report.cpu_fit)
    fit_lines = [
        f"delta_exponent: {d_exp}",
        f"delta_ln_amplitude: {d_amp}",
        f"delta_excluded: {' '.join(map(str, report.excluded_delta)) or 'none'}",
        f"cpu_exponent: {c_exp}",
        f"cpu_ln_amplitude: {c_amp}",
        f"cpu_excluded: {' '.join(map(str, report.excluded_cpu)) or 'none'}",
    ]
    fit_path = out / "kscan_fit.txt"
    fit_path.write_text("\n".join(fit_lines) + "\n", encoding="utf-8")
    written.append(fit_path)

    if plots:
        fig_dir = out / "figures"
        fig_dir.mkdir(exist_ok=True)
        ks = [r.n_live for r in report.rows]
        deltas = [r.delta_log_evidence for r in report.rows]
        cpus = [r.cpu_s for r in report.rows]
        written.append(
            figures.save_kscan(
                fig_dir / "kscan.png", ks, deltas, cpus, report.delta_fit, report.cpu_fit
            )
        )
    return written
