"""Nested-sampling engine.

Prior volume shrinks deterministically, X_m = exp(-m/K) for K live points.
Each iteration discards the worst live point into the sample chain, credits
it a volume shell under the configured quadrature rule, and replaces it with
a constrained draw from the search module. The final live population enters
the chain as K pseudo-samples sharing the leftover volume equally, which is
exactly the X_M * mean(live L) remainder.

Everything runs in log space; widths use log1p/expm1 forms so deep shrinkage
does not underflow.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from scipy.special import logsumexp

from .errors import NestshiftError, SearchBudgetExhausted
from .meanshift import ClusterConfig, cluster_live_points
from .models import ParameterSpace, sample_prior
from .walker import LivePointSet, find_new_point

__all__ = [
    "CombinedResult",
    "DiscardedSample",
    "NestedRun",
    "Quadrature",
    "SamplerConfig",
    "accumulate_evidence",
    "bayesian_complexity",
    "combine_runs",
    "information_gain",
    "run_nested",
    "shrinkage_log_volume",
]

_LN2 = math.log(2.0)


class Quadrature(Enum):
    RECTANGLE = "rectangle"
    TRAPEZOID = "trapezoid"


@dataclass(frozen=True)
class SamplerConfig:
    """Run controls.

    ``n_live`` is K; ``walk_steps`` (N) and ``step_scale`` (f) shape the
    lawn-mower walk; ``walk_tries`` (N_t) is the per-cycle try budget and
    ``cluster_cycles`` (NN_t) the number of failed cycles before the
    clustering hook fires. The global search budget is
    try_budget_factor * N_t * NN_t tries per replacement.
    """

    n_live: int = 500
    walk_steps: int = 20
    step_scale: float = 0.2
    walk_tries: int = 200
    cluster_cycles: int = 2
    quadrature: Quadrature = Quadrature.TRAPEZOID
    term_eps: float = 1e-5
    max_iter: int | None = None
    n_runs: int = 16
    seed: int = 1
    try_budget_factor: int = 100

    def __post_init__(self):
        if self.n_live < 2:
            raise ValueError("n_live must be at least 2")
        if self.walk_steps < 1:
            raise ValueError("walk_steps must be at least 1")
        if not self.step_scale > 0:
            raise ValueError("step_scale must be positive")
        if self.walk_tries < 1:
            raise ValueError("walk_tries must be at least 1")
        if self.cluster_cycles < 1:
            raise ValueError("cluster_cycles must be at least 1")
        if not 0 < self.term_eps < 1:
            raise ValueError("term_eps must lie in (0, 1)")
        if self.max_iter is not None and self.max_iter < 1:
            raise ValueError("max_iter must be at least 1 when given")
        if self.n_runs < 1:
            raise ValueError("n_runs must be at least 1")
        if self.try_budget_factor < 1:
            raise ValueError("try_budget_factor must be at least 1")
        if self.step_scale * self.walk_steps < 1.0:
            warnings.warn(
                f"f*N = {self.step_scale * self.walk_steps:.3g} < 1: walk steps are "
                "too short to decorrelate; raise walk_steps or step_scale",
                UserWarning,
                stacklevel=2,
            )

    @property
    def effective_max_iter(self) -> int:
        return self.max_iter if self.max_iter is not None else 100 * self.n_live

    @property
    def try_budget(self) -> int:
        return self.try_budget_factor * self.walk_tries * self.cluster_cycles


def shrinkage_log_volume(m: int, n_live: int) -> float:
    """log X_m = -m / K for the deterministic shrinkage schedule."""
    if m < 0:
        raise ValueError("iteration index must be non-negative")
    if n_live < 1:
        raise ValueError("n_live must be positive")
    return -m / n_live


def _log_diff(log_a: np.ndarray, log_b: np.ndarray) -> np.ndarray:
    """log(exp(a) - exp(b)) assuming a >= b elementwise."""
    with np.errstate(divide="ignore"):
        return log_a + np.log1p(-np.exp(log_b - log_a))


def _chain_log_widths(logx: np.ndarray, rule: Quadrature) -> np.ndarray:
    """Shell widths for the discard chain; the trapezoid boundary closes the
    last cell at X_M (the remainder keeps its own full volume)."""
    m = logx.size
    if m == 0:
        return logx.copy()
    prev = np.concatenate(([0.0], logx[:-1]))
    if rule is Quadrature.RECTANGLE:
        return _log_diff(prev, logx)
    nxt = np.concatenate((logx[1:], logx[-1:]))
    return _log_diff(prev, nxt) - _LN2


def accumulate_evidence(
    logl: np.ndarray,
    logx: np.ndarray,
    rule: Quadrature,
    live_logl: np.ndarray | None = None,
) -> tuple[float, np.ndarray]:
    """Evidence and per-sample log shell widths for a sample chain.

    ``logl``/``logx`` describe the discard chain (logx strictly decreasing,
    negative, finite). ``live_logl`` is the final live population; each live
    point is credited logdX = logX_M - ln(K_live) regardless of the rule,
    which reproduces the X_M * mean(live L) remainder exactly. Returns
    (logE, logdX) with the live widths appended after the chain's.
    """
    logl = np.asarray(logl, dtype=float)
    logx = np.asarray(logx, dtype=float)
    if logl.shape != logx.shape or logl.ndim != 1:
        raise ValueError("logl and logx must be 1-d arrays of equal length")
    if logx.size:
        if not np.isfinite(logx).all():
            raise ValueError("chain logx must be finite")
        if not (logx[0] < 0 and (np.diff(logx) < 0).all()):
            raise ValueError("chain logx must be strictly decreasing and negative")
    if live_logl is None and logl.size == 0:
        raise ValueError("nothing to accumulate")

    logdx = _chain_log_widths(logx, rule)
    if live_logl is not None:
        live_logl = np.asarray(live_logl, dtype=float)
        logx_final = logx[-1] if logx.size else 0.0
        live_logdx = np.full(live_logl.size, logx_final - math.log(live_logl.size))
        logdx = np.concatenate((logdx, live_logdx))
        logl = np.concatenate((logl, live_logl))
    log_evidence = float(logsumexp(logl + logdx))
    return log_evidence, logdx


def _posterior_fractions(logweights: np.ndarray, log_evidence: float) -> np.ndarray:
    if not math.isfinite(log_evidence):
        raise ValueError("log evidence must be finite for posterior weights")
    return np.exp(logweights - log_evidence)


def information_gain(logweights: np.ndarray, logl: np.ndarray, log_evidence: float) -> float:
    """H = sum p_m (logL_m - logE) with p_m the normalized posterior weights.

    Zero-weight samples contribute nothing even at logL = -inf. Tiny negative
    round-off (within 1e-9) clips to zero.
    """
    p = _posterior_fractions(np.asarray(logweights, dtype=float), log_evidence)
    safe_logl = np.where(np.isfinite(logl), logl, 0.0)
    h = float(np.where(p > 0, p * (safe_logl - log_evidence), 0.0).sum())
    if -1e-9 < h < 0:
        return 0.0
    return h


def bayesian_complexity(logweights: np.ndarray, logl: np.ndarray, log_evidence: float) -> float:
    """C = -2 (<logL>_posterior - logL_max) over the sample chain."""
    logl = np.asarray(logl, dtype=float)
    p = _posterior_fractions(np.asarray(logweights, dtype=float), log_evidence)
    safe_logl = np.where(np.isfinite(logl), logl, 0.0)
    mean_logl = float(np.where(p > 0, p * safe_logl, 0.0).sum())
    return -2.0 * (mean_logl - float(logl.max()))


@dataclass(frozen=True)
class DiscardedSample:
    """One chain entry: parameters, likelihood and its volume credit."""

    params: np.ndarray
    logl: float
    logx: float
    logdx: float
    logweight: float


@dataclass
class NestedRun:
    """Everything a single nested-sampling run produced.

    The chain arrays hold the ``iterations`` discarded points followed by the
    ``n_live`` remainder pseudo-samples (sorted by logl). ``aborted`` marks a
    run that stopped because the replacement search exhausted its budget; its
    evidence is still finalized from the last consistent state.
    """

    log_evidence: float
    information: float
    complexity: float
    iterations: int
    n_live: int
    seed: int
    stop_reason: str
    params: np.ndarray
    logl: np.ndarray
    logx: np.ndarray
    logdx: np.ndarray
    logweights: np.ndarray
    total_tries: int
    strategy_evals: int
    recenters: int
    syntheses: int
    cluster_invocations: int

    @property
    def aborted(self) -> bool:
        return self.stop_reason == "search_exhausted"

    @property
    def n_terms(self) -> int:
        return int(self.logl.size)

    @property
    def logl_max(self) -> float:
        return float(self.logl.max())

    @property
    def samples(self) -> list[DiscardedSample]:
        return [
            DiscardedSample(
                params=self.params[i],
                logl=float(self.logl[i]),
                logx=float(self.logx[i]),
                logdx=float(self.logdx[i]),
                logweight=float(self.logweights[i]),
            )
            for i in range(self.n_terms)
        ]


def run_nested(
    loglike,
    space: ParameterSpace,
    config: SamplerConfig,
    cluster_config: ClusterConfig | None = None,
    *,
    seed: int | None = None,
    find_point=find_new_point,
) -> NestedRun:
    """One full nested-sampling run; bit-reproducible for a fixed seed.

    ``cluster_config=None`` disables the clustering hook entirely (the rescue
    strategies still run). Termination: the live contribution bound drops
    below term_eps of the accumulated evidence, max_iter is hit, or the
    search gives up (the run is then finalized as-is and flagged).
    """
    run_seed = config.seed if seed is None else seed
    rng = np.random.default_rng(run_seed)
    n_live = config.n_live

    points = sample_prior(space, rng, size=n_live)
    logl_live = np.array([loglike(p) for p in points], dtype=float)
    if not np.isfinite(logl_live).any():
        raise NestshiftError(
            "initialization failure: every prior draw has zero likelihood"
        )
    live = LivePointSet(points, logl_live)

    hook = None
    if cluster_config is not None:
        hook = lambda pts: cluster_live_points(pts, cluster_config)

    inv_k = 1.0 / n_live
    log_shrink_cell = math.log1p(-math.exp(-inv_k))
    ln_eps = math.log(config.term_eps)
    max_iter = config.effective_max_iter

    chain_params: list[np.ndarray] = []
    chain_logl: list[float] = []
    running_log_evidence = -math.inf
    total_tries = strategy_evals = recenters = syntheses = cluster_invocations = 0
    m = 0
    stop_reason = "max_iter"

    while m < max_iter:
        worst = int(np.argmin(live.logl))
        threshold = float(live.logl[worst])
        try:
            outcome = find_point(
                live, threshold, config, space, loglike, rng, cluster_hook=hook
            )
        except SearchBudgetExhausted as exc:
            total_tries += exc.tries
            stop_reason = "search_exhausted"
            break
        m += 1
        chain_params.append(live.points[worst].copy())
        chain_logl.append(threshold)
        # rectangle running sum is enough for the termination check
        running_log_evidence = np.logaddexp(
            running_log_evidence, threshold - (m - 1) * inv_k + log_shrink_cell
        )
        live.replace(worst, outcome.point, outcome.logl, outcome.start_label)
        total_tries += outcome.tries
        strategy_evals += outcome.strategy_evals
        recenters += outcome.recenters
        syntheses += outcome.syntheses
        cluster_invocations += outcome.cluster_invocations
        if float(live.logl.max()) - m * inv_k - running_log_evidence < ln_eps:
            stop_reason = "termination"
            break

    chain_logl_arr = np.asarray(chain_logl, dtype=float)
    chain_logx = -inv_k * np.arange(1, m + 1, dtype=float)
    order = np.argsort(live.logl, kind="stable")
    live_logl_sorted = live.logl[order]
    live_params_sorted = live.points[order]

    log_evidence, logdx = accumulate_evidence(
        chain_logl_arr, chain_logx, config.quadrature, live_logl=live_logl_sorted
    )
    logx_final = chain_logx[-1] if m else 0.0
    with np.errstate(divide="ignore"):
        live_logx = logx_final + np.log(
            (n_live - np.arange(1, n_live + 1, dtype=float)) / n_live
        )
    logx_all = np.concatenate((chain_logx, live_logx))
    logl_all = np.concatenate((chain_logl_arr, live_logl_sorted))
    if chain_params:
        params_all = np.vstack((np.asarray(chain_params), live_params_sorted))
    else:
        params_all = live_params_sorted.copy()
    logweights = logl_all + logdx

    information = information_gain(logweights, logl_all, log_evidence)
    complexity = bayesian_complexity(logweights, logl_all, log_evidence)

    return NestedRun(
        log_evidence=log_evidence,
        information=information,
        complexity=complexity,
        iterations=m,
        n_live=n_live,
        seed=run_seed,
        stop_reason=stop_reason,
        params=params_all,
        logl=logl_all,
        logx=logx_all,
        logdx=logdx,
        logweights=logweights,
        total_tries=total_tries,
        strategy_evals=strategy_evals,
        recenters=recenters,
        syntheses=syntheses,
        cluster_invocations=cluster_invocations,
    )


@dataclass(frozen=True)
class CombinedResult:
    """Aggregate over repeated runs: mean lnE and its run-to-run scatter.

    ``delta_log_evidence`` is the sample standard deviation (ddof=1), None
    when fewer than two runs are available.
    """

    mean_log_evidence: float
    delta_log_evidence: float | None
    runs: tuple[NestedRun, ...] = field(repr=False)

    @property
    def n_runs(self) -> int:
        return len(self.runs)


def combine_runs(runs: list[NestedRun]) -> CombinedResult:
    if not runs:
        raise ValueError("combine_runs needs at least one run")
    values = np.array([r.log_evidence for r in runs], dtype=float)
    mean = float(values.mean())
    delta = float(values.std(ddof=1)) if values.size > 1 else None
    return CombinedResult(mean, delta, tuple(runs))
