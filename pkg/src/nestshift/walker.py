"""Constrained replacement search over the live-point population.

The sampler needs a fresh point with log-likelihood strictly above a moving
threshold. The workhorse is a short random walk ("lawn-mower" schedule: a
fixed number of accepted steps, each a uniform kick per dimension scaled by
f and the live-point spread). When a walk burns its try budget without
finishing, one of two rescue strategies reseeds it; after enough failed
cycles the caller-supplied clustering hook refines the step scales.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import SearchBudgetExhausted
from .meanshift import ClusterResult

__all__ = [
    "LivePointSet",
    "WalkOutcome",
    "WalkResult",
    "find_new_point",
    "lawn_mower_walk",
    "propose_step",
    "strategy_recenter",
    "strategy_synthesize",
]


class LivePointSet:
    """Mutable live population: points, log-likelihoods, cluster labels.

    Spread statistics are refreshed from the current points before every
    search, so sigma always reflects the population after the last
    replacement.
    """

    def __init__(self, points: np.ndarray, logl: np.ndarray):
        points = np.asarray(points, dtype=float)
        logl = np.asarray(logl, dtype=float)
        if points.ndim != 2 or points.shape[0] < 2:
            raise ValueError("need at least two live points")
        if logl.shape != (points.shape[0],):
            raise ValueError("logl must have one entry per live point")
        self.points = points.copy()
        self.logl = logl.copy()
        self.labels: np.ndarray | None = None
        self.sigma = np.zeros(points.shape[1])
        self.barycenter = np.zeros(points.shape[1])
        self.refresh()

    @property
    def size(self) -> int:
        return self.points.shape[0]

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    def refresh(self) -> None:
        """Recompute the global per-dimension spread and the barycenter."""
        self.sigma = self.points.std(axis=0)
        self.barycenter = self.points.mean(axis=0)

    def set_clusters(self, result: ClusterResult) -> None:
        if result.labels.shape != (self.size,):
            raise ValueError("cluster labels must cover every live point")
        self.labels = result.labels.copy()

    def label_of(self, idx: int) -> int | None:
        if self.labels is None:
            return None
        return int(self.labels[idx])

    def sigma_for(self, idx: int) -> np.ndarray:
        """Walk scale for a start point: its cluster's spread when labels
        exist, the global spread otherwise (or when the cluster is fully
        degenerate)."""
        if self.labels is None:
            return self.sigma
        members = self.points[self.labels == self.labels[idx]]
        sigma = members.std(axis=0)
        if not sigma.any():
            return self.sigma
        return sigma

    def replace(self, idx: int, point: np.ndarray, logl: float, label: int | None) -> None:
        self.points[idx] = point
        self.logl[idx] = logl
        if self.labels is not None:
            self.labels[idx] = self.labels[idx] if label is None else label


@dataclass(frozen=True)
class WalkResult:
    """Outcome of a single walk cycle."""

    finished: bool
    point: np.ndarray
    logl: float
    tries: int
    last_reject: np.ndarray | None


@dataclass(frozen=True)
class WalkOutcome:
    """Accepted replacement plus the search's bookkeeping counters.

    ``tries`` counts walk proposals only; strategy-candidate evaluations are
    tallied separately so the clustering trigger stays an exact function of
    the walk try counter.
    """

    point: np.ndarray
    logl: float
    tries: int
    strategy_evals: int
    recenters: int
    syntheses: int
    cluster_invocations: int
    start_label: int | None


def propose_step(point: np.ndarray, f: float, sigma: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """One kick: point + f * u * sigma with u ~ U[-1, 1] per dimension."""
    u = rng.uniform(-1.0, 1.0, point.shape[0])
    return point + f * u * sigma


def lawn_mower_walk(
    start: np.ndarray,
    start_logl: float,
    threshold: float,
    *,
    n_steps: int,
    f: float,
    sigma: np.ndarray,
    lower: np.ndarray,
    upper: np.ndarray,
    loglike,
    rng: np.random.Generator,
    try_budget: int,
) -> WalkResult:
    """Walk until ``n_steps`` proposals have been accepted or the budget dies.

    Every proposal costs one try; candidates outside the prior box are failed
    tries that never reach the likelihood. Acceptance is strict:
    logL(candidate) > threshold.
    """
    if not start_logl >= threshold:
        raise ValueError("walk must start at or above the threshold")
    dim = start.shape[0]
    cur = np.array(start, dtype=float)
    cur_logl = float(start_logl)
    tries = 0
    accepted = 0
    last_reject: np.ndarray | None = None
    while accepted < n_steps and tries < try_budget:
        cand = cur + f * rng.uniform(-1.0, 1.0, dim) * sigma
        tries += 1
        if (cand >= lower).all() and (cand <= upper).all():
            cand_logl = loglike(cand)
            if cand_logl > threshold:
                cur = cand
                cur_logl = float(cand_logl)
                accepted += 1
                continue
        last_reject = cand
    return WalkResult(accepted == n_steps, cur, cur_logl, tries, last_reject)


def strategy_recenter(
    failed: np.ndarray, barycenter: np.ndarray, rng: np.random.Generator
) -> np.ndarray:
    """Candidate on the segment from the barycenter to the failed point."""
    u = rng.random()
    return barycenter + u * (failed - barycenter)


def strategy_synthesize(points: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Candidate whose each coordinate comes from an independently chosen live point."""
    idx = rng.integers(0, points.shape[0], size=points.shape[1])
    return points[idx, np.arange(points.shape[1])]


def find_new_point(
    live: LivePointSet,
    threshold: float,
    config,
    space,
    loglike,
    rng: np.random.Generator,
    cluster_hook=None,
) -> WalkOutcome:
    """Search the constrained prior for a point with logL > threshold.

    Walk cycles of ``config.walk_tries`` proposals run until one finishes its
    ``config.walk_steps`` accepted steps. A failed cycle triggers either the
    clustering hook (every ``config.cluster_cycles``-th failure, i.e. after
    exactly walk_tries * cluster_cycles cumulative tries) or one of the two
    rescue strategies with equal probability. A successful rescue candidate
    reseeds the next walk from itself; anything else reseeds from a random
    live point with its cluster sigma. Exhausting the global budget raises
    :class:`SearchBudgetExhausted`.
    """
    live.refresh()
    lower, upper = space.lower, space.upper
    budget = config.try_budget_factor * config.walk_tries * config.cluster_cycles
    tries = 0
    strategy_evals = 0
    recenters = 0
    syntheses = 0
    cluster_invocations = 0
    cycles_since_cluster = 0

    idx = int(rng.integers(live.size))
    cur = live.points[idx]
    cur_logl = float(live.logl[idx])
    sigma = live.sigma_for(idx)
    label = live.label_of(idx)

    while tries < budget:
        result = lawn_mower_walk(
            cur,
            cur_logl,
            threshold,
            n_steps=config.walk_steps,
            f=config.step_scale,
            sigma=sigma,
            lower=lower,
            upper=upper,
            loglike=loglike,
            rng=rng,
            try_budget=min(config.walk_tries, budget - tries),
        )
        tries += result.tries
        if result.finished:
            point = result.point
            # hard-constraint instrumentation: these can only fire on a bug
            if not (result.logl > threshold):
                raise RuntimeError("accepted replacement at or below the threshold")
            if not ((point >= lower).all() and (point <= upper).all()):
                raise RuntimeError("accepted replacement outside the prior box")
            return WalkOutcome(
                point=point,
                logl=result.logl,
                tries=tries,
                strategy_evals=strategy_evals,
                recenters=recenters,
                syntheses=syntheses,
                cluster_invocations=cluster_invocations,
                start_label=label,
            )

        cycles_since_cluster += 1
        if cluster_hook is not None and cycles_since_cluster >= config.cluster_cycles:
            live.set_clusters(cluster_hook(live.points))
            cluster_invocations += 1
            cycles_since_cluster = 0
            idx = int(rng.integers(live.size))
            cur = live.points[idx]
            cur_logl = float(live.logl[idx])
            sigma = live.sigma_for(idx)
            label = live.label_of(idx)
            continue

        if result.last_reject is not None and rng.random() < 0.5:
            cand = strategy_recenter(result.last_reject, live.barycenter, rng)
            recenters += 1
        else:
            cand = strategy_synthesize(live.points, rng)
            syntheses += 1
        strategy_evals += 1
        if (cand >= lower).all() and (cand <= upper).all():
            cand_logl = float(loglike(cand))
        else:
            cand_logl = -math.inf
        if cand_logl > threshold:
            cur = cand
            cur_logl = cand_logl
        else:
            idx = int(rng.integers(live.size))
            cur = live.points[idx]
            cur_logl = float(live.logl[idx])
            sigma = live.sigma_for(idx)
            label = live.label_of(idx)

    raise SearchBudgetExhausted(threshold, tries)
