"""Line-oriented run configuration.

Grammar: ``key = value`` assignments plus two directive forms,
``param <name> <min> <max>`` (one per model parameter, in layout order) and
``joint <name> <name>`` (repeatable, requests a 2-d histogram). ``#`` starts
a comment anywhere. Unknown keys, duplicate scalars and malformed values are
all collected and reported together with their line numbers.

``serialize_config`` emits a canonical form: fixed key order, shortest
round-trip float formatting. parse(serialize(cfg)) reproduces cfg exactly,
so serializing twice is byte-identical.
"""
from __future__ import annotations

from dataclasses import dataclass, replace

from .engine import Quadrature, SamplerConfig
from .errors import ConfigError
from .meanshift import ClusterConfig, Kernel
from .models import DataKind, ModelFamily, ModelSpec, ParameterSpace

__all__ = ["RunConfig", "SimulateSpec", "load_config", "parse_config", "serialize_config"]


@dataclass(frozen=True)
class SimulateSpec:
    """Ground truth for synthetic data: parameter vector and x grid."""

    true_params: tuple[float, ...]
    grid: tuple[float, float, int]
    yerr: float | None = None


@dataclass(frozen=True)
class RunConfig:
    model: ModelSpec
    space: ParameterSpace
    sampler: SamplerConfig
    cluster: ClusterConfig
    cluster_enabled: bool = True
    data_path: str | None = None
    data_kind: DataKind = DataKind.COUNTS
    output_dir: str = "out"
    hist_bins: int = 60
    joints: tuple[tuple[str, str], ...] = ()
    trace_param: str | None = None
    plots: bool = True
    sim: SimulateSpec | None = None


_SCALAR_KEYS = {
    "model",
    "data",
    "data_kind",
    "output_dir",
    "K",
    "N",
    "f",
    "N_t",
    "NN_t",
    "quadrature",
    "term_eps",
    "max_iter",
    "n_runs",
    "seed",
    "try_budget_factor",
    "cluster",
    "kernel",
    "D",
    "ell",
    "shift_tol",
    "max_steps",
    "merge_tol",
    "squared_kernel",
    "hist_bins",
    "trace_param",
    "plots",
    "sim_true",
    "sim_grid",
    "sim_yerr",
}


def _parse_bool(token: str) -> bool:
    if token == "on":
        return True
    if token == "off":
        return False
    raise ValueError(f"expected on/off, got {token!r}")


def parse_config(text: str) -> RunConfig:
    problems: list[str] = []
    seen: dict[str, str] = {}
    params: list[tuple[str, float, float]] = []
    joints: list[tuple[str, str]] = []

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" in line:
            key, _, value = line.partition("=")
            key = key.strip()
            value = value.strip()
            if key not in _SCALAR_KEYS:
                problems.append(f"line {lineno}: unknown key {key!r}")
                continue
            if key in seen:
                problems.append(f"line {lineno}: duplicate key {key!r}")
                continue
            if not value:
                problems.append(f"line {lineno}: empty value for {key!r}")
                continue
            seen[key] = value
            continue
        fields = line.split()
        if fields[0] == "param":
            if len(fields) != 4:
                problems.append(f"line {lineno}: param needs <name> <min> <max>")
                continue
            try:
                params.append((fields[1], float(fields[2]), float(fields[3])))
            except ValueError:
                problems.append(f"line {lineno}: param bounds must be numbers")
            continue
        if fields[0] == "joint":
            if len(fields) != 3:
                problems.append(f"line {lineno}: joint needs two parameter names")
                continue
            joints.append((fields[1], fields[2]))
            continue
        problems.append(f"line {lineno}: cannot parse {line!r}")

    def take(key: str, conv, default):
        if key not in seen:
            return default
        try:
            return conv(seen[key])
        except ValueError as exc:
            problems.append(f"key {key!r}: {exc}")
            return default

    model: ModelSpec | None = None
    if "model" not in seen:
        problems.append("missing required key 'model'")
    else:
        fields = seen["model"].split()
        try:
            family = ModelFamily(fields[0])
            if family is ModelFamily.GAUSS_PEAKS_FLAT_BG:
                if len(fields) != 2:
                    raise ValueError("gauss_peaks_flat_bg needs a peak count")
                model = ModelSpec(family, int(fields[1]))
            else:
                if len(fields) != 1:
                    raise ValueError("modulated_exp_decay takes no extra fields")
                model = ModelSpec(family)
        except ValueError as exc:
            problems.append(f"key 'model': {exc}")

    data_kind = take("data_kind", DataKind, DataKind.COUNTS)
    quadrature = take("quadrature", Quadrature, Quadrature.TRAPEZOID)
    kernel = take("kernel", Kernel, Kernel.GAUSSIAN)

    def parse_max_iter(token: str) -> int | None:
        if token == "auto":
            return None
        return int(token)

    sampler_kwargs = dict(
        n_live=take("K", int, 500),
        walk_steps=take("N", int, 20),
        step_scale=take("f", float, 0.2),
        walk_tries=take("N_t", int, 200),
        cluster_cycles=take("NN_t", int, 2),
        quadrature=quadrature,
        term_eps=take("term_eps", float, 1e-5),
        max_iter=take("max_iter", parse_max_iter, None),
        n_runs=take("n_runs", int, 16),
        seed=take("seed", int, 1),
        try_budget_factor=take("try_budget_factor", int, 100),
    )
    cluster_kwargs = dict(
        kernel=kernel,
        radius=take("D", float, 0.6),
        bandwidth=take("ell", float, 0.2),
        shift_tol=take("shift_tol", float, 1e-4),
        max_steps=take("max_steps", int, 500),
        merge_tol=take("merge_tol", float, 1e-2),
        squared_kernel=take("squared_kernel", _parse_bool, False),
    )

    sampler = None
    cluster = None
    try:
        sampler = SamplerConfig(**sampler_kwargs)
    except ValueError as exc:
        problems.append(f"sampler settings: {exc}")
    try:
        cluster = ClusterConfig(**cluster_kwargs)
    except ValueError as exc:
        problems.append(f"cluster settings: {exc}")

    space: ParameterSpace | None = None
    if model is not None:
        if len(params) != model.n_params:
            problems.append(
                f"model {model.family.value} needs {model.n_params} param lines, got {len(params)}"
            )
        else:
            try:
                space = ParameterSpace(
                    names=tuple(name for name, _, _ in params),
                    lower=[lo for _, lo, _ in params],
                    upper=[hi for _, _, hi in params],
                )
            except ValueError as exc:
                problems.append(f"param lines: {exc}")

    hist_bins = take("hist_bins", int, 60)
    if hist_bins < 1:
        problems.append("key 'hist_bins': must be at least 1")
    trace_param = take("trace_param", str, None)

    sim: SimulateSpec | None = None
    if "sim_true" in seen or "sim_grid" in seen:
        if "sim_true" not in seen or "sim_grid" not in seen:
            problems.append("simulation needs both sim_true and sim_grid")
        else:
            try:
                true_params = tuple(float(t) for t in seen["sim_true"].split())
                grid_fields = seen["sim_grid"].split()
                if len(grid_fields) != 3:
                    raise ValueError("sim_grid needs <start> <stop> <count>")
                grid = (float(grid_fields[0]), float(grid_fields[1]), int(grid_fields[2]))
                yerr = take("sim_yerr", float, None)
                if grid[2] < 1:
                    raise ValueError("sim_grid count must be at least 1")
                if model is not None and len(true_params) != model.n_params:
                    raise ValueError(
                        f"sim_true needs {model.n_params} values, got {len(true_params)}"
                    )
                sim = SimulateSpec(true_params=true_params, grid=grid, yerr=yerr)
            except ValueError as exc:
                problems.append(f"simulation settings: {exc}")
    elif "sim_yerr" in seen:
        problems.append("sim_yerr given without sim_true/sim_grid")

    if space is not None:
        for a, b in joints:
            for name in (a, b):
                if name not in space.names:
                    problems.append(f"joint references unknown parameter {name!r}")
        if trace_param is not None and trace_param not in space.names:
            problems.append(f"trace_param references unknown parameter {trace_param!r}")

    cluster_enabled = take("cluster", _parse_bool, True)
    data_path = take("data", str, None)
    output_dir = take("output_dir", str, "out")
    plots = take("plots", _parse_bool, True)

    if problems:
        raise ConfigError(problems)
    assert model is not None and space is not None
    assert sampler is not None and cluster is not None

    return RunConfig(
        model=model,
        space=space,
        sampler=sampler,
        cluster=cluster,
        cluster_enabled=cluster_enabled,
        data_path=data_path,
        data_kind=data_kind,
        output_dir=output_dir,
        hist_bins=hist_bins,
        joints=tuple(joints),
        trace_param=trace_param,
        plots=plots,
        sim=sim,
    )


def load_config(path) -> RunConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config(fh.read())


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "on" if value else "off"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def serialize_config(cfg: RunConfig) -> str:
    """Canonical text form; stable byte-for-byte under reparsing."""
    model_value = cfg.model.family.value
    if cfg.model.family is ModelFamily.GAUSS_PEAKS_FLAT_BG:
        model_value += f" {cfg.model.n_peaks}"
    s = cfg.sampler
    c = cfg.cluster
    lines = [f"model = {model_value}"]
    if cfg.data_path is not None:
        lines.append(f"data = {cfg.data_path}")
    lines.append(f"data_kind = {cfg.data_kind.value}")
    lines.append(f"output_dir = {cfg.output_dir}")
    lines += [
        f"K = {s.n_live}",
        f"N = {s.walk_steps}",
        f"f = {_fmt(s.step_scale)}",
        f"N_t = {s.walk_tries}",
        f"NN_t = {s.cluster_cycles}",
        f"quadrature = {s.quadrature.value}",
        f"term_eps = {_fmt(s.term_eps)}",
        f"max_iter = {'auto' if s.max_iter is None else s.max_iter}",
        f"n_runs = {s.n_runs}",
        f"seed = {s.seed}",
        f"try_budget_factor = {s.try_budget_factor}",
        f"cluster = {_fmt(cfg.cluster_enabled)}",
        f"kernel = {c.kernel.value}",
        f"D = {_fmt(c.radius)}",
        f"ell = {_fmt(c.bandwidth)}",
        f"shift_tol = {_fmt(c.shift_tol)}",
        f"max_steps = {c.max_steps}",
        f"merge_tol = {_fmt(c.merge_tol)}",
        f"squared_kernel = {_fmt(c.squared_kernel)}",
        f"hist_bins = {cfg.hist_bins}",
        f"plots = {_fmt(cfg.plots)}",
    ]
    if cfg.trace_param is not None:
        lines.append(f"trace_param = {cfg.trace_param}")
    if cfg.sim is not None:
        lines.append("sim_true = " + " ".join(_fmt(v) for v in cfg.sim.true_params))
        start, stop, count = cfg.sim.grid
        lines.append(f"sim_grid = {_fmt(start)} {_fmt(stop)} {count}")
        if cfg.sim.yerr is not None:
            lines.append(f"sim_yerr = {_fmt(cfg.sim.yerr)}")
    for name, lo, hi in zip(cfg.space.names, cfg.space.lower, cfg.space.upper):
        lines.append(f"param {name} {_fmt(float(lo))} {_fmt(float(hi))}")
    for a, b in cfg.joints:
        lines.append(f"joint {a} {b}")
    return "\n".join(lines) + "\n"
