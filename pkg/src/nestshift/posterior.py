"""Weighted posterior summaries from nested-sampling output.

Each chain sample carries the posterior mass exp(logweight - logE); the
helpers here turn those into moments, quantile-based credible intervals and
(possibly joint) histograms with explicit out-of-range accounting.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .engine import NestedRun

__all__ = [
    "HistResult",
    "JointHistResult",
    "ParamSummary",
    "WeightedPosterior",
    "combine_posteriors",
    "joint_hist",
    "marginal_hist",
    "summarize",
    "to_posterior",
    "weighted_quantile",
]


@dataclass(frozen=True)
class WeightedPosterior:
    """Posterior samples: a params matrix with normalized weights."""

    params: np.ndarray
    weights: np.ndarray
    logl: np.ndarray

    def __post_init__(self):
        if self.params.ndim != 2 or self.params.shape[0] < 1:
            raise ValueError("params must be a non-empty (M, J) matrix")
        if self.weights.shape != (self.params.shape[0],):
            raise ValueError("weights must match the sample count")
        if self.logl.shape != self.weights.shape:
            raise ValueError("logl must match the sample count")
        if np.any(self.weights < 0):
            raise ValueError("weights must be non-negative")

    @property
    def n_samples(self) -> int:
        return self.params.shape[0]

    @property
    def dim(self) -> int:
        return self.params.shape[1]


def to_posterior(run: NestedRun) -> WeightedPosterior:
    """Posterior view of one run; weights are exp(logweight - logE)."""
    weights = np.exp(run.logweights - run.log_evidence)
    return WeightedPosterior(params=run.params, weights=weights, logl=run.logl.copy())


def combine_posteriors(runs: list[NestedRun]) -> WeightedPosterior:
    """Pool several runs, each contributing equal total mass."""
    if not runs:
        raise ValueError("need at least one run")
    params = np.vstack([r.params for r in runs])
    weights = np.concatenate(
        [np.exp(r.logweights - r.log_evidence) / len(runs) for r in runs]
    )
    logl = np.concatenate([r.logl for r in runs])
    return WeightedPosterior(params=params, weights=weights, logl=logl)


def weighted_quantile(values: np.ndarray, weights: np.ndarray, q) -> np.ndarray | float:
    """Smallest sample value whose cumulative weight exceeds q.

    At an exact cumulative-weight boundary the upper sample is taken (so the
    median of two equal-weight values is the larger one); elsewhere this is
    the usual >=-rule inverse CDF. Weights need not be pre-normalized.
    """
    values = np.asarray(values, dtype=float)
    weights = np.asarray(weights, dtype=float)
    if values.shape != weights.shape or values.ndim != 1 or values.size == 0:
        raise ValueError("values and weights must be equal-length non-empty 1-d arrays")
    total = weights.sum()
    if not total > 0:
        raise ValueError("weights must have positive total mass")
    order = np.argsort(values, kind="stable")
    sorted_values = values[order]
    cumw = np.cumsum(weights[order]) / total
    q_arr = np.atleast_1d(np.asarray(q, dtype=float))
    if np.any((q_arr < 0) | (q_arr > 1)):
        raise ValueError("quantiles must lie in [0, 1]")
    idx = np.searchsorted(cumw, q_arr, side="right")
    idx = np.minimum(idx, values.size - 1)
    out = sorted_values[idx]
    return float(out[0]) if np.isscalar(q) or np.ndim(q) == 0 else out


@dataclass(frozen=True)
class ParamSummary:
    """Moments, central credible intervals and the max-likelihood value."""

    mean: float
    std: float
    median: float
    ci68: tuple[float, float]
    ci95: tuple[float, float]
    ci99: tuple[float, float]
    ml_value: float


def summarize(post: WeightedPosterior, j: int) -> ParamSummary:
    """Weighted summary of parameter ``j``."""
    if not 0 <= j < post.dim:
        raise ValueError(f"parameter index {j} out of range")
    x = post.params[:, j]
    w = post.weights
    total = w.sum()
    mean = float((w @ x) / total)
    var = float((w @ (x - mean) ** 2) / total)
    std = math.sqrt(max(var, 0.0))
    qs = weighted_quantile(
        x, w, [0.5, 0.16, 0.84, 0.025, 0.975, 0.005, 0.995]
    )
    ml_value = float(x[int(np.argmax(post.logl))])
    return ParamSummary(
        mean=mean,
        std=std,
        median=float(qs[0]),
        ci68=(float(qs[1]), float(qs[2])),
        ci95=(float(qs[3]), float(qs[4])),
        ci99=(float(qs[5]), float(qs[6])),
        ml_value=ml_value,
    )


@dataclass(frozen=True)
class HistResult:
    """Weighted 1-d histogram; ``mass`` sums to the in-range posterior mass."""

    edges: np.ndarray
    mass: np.ndarray
    out_of_range: float


@dataclass(frozen=True)
class JointHistResult:
    """Weighted 2-d histogram over a pair of parameters."""

    x_edges: np.ndarray
    y_edges: np.ndarray
    mass: np.ndarray
    out_of_range: float


def _check_range(value_range: tuple[float, float]) -> tuple[float, float]:
    lo, hi = float(value_range[0]), float(value_range[1])
    if not hi > lo:
        raise ValueError("histogram range must have positive width")
    return lo, hi


def _bin_index(x: np.ndarray, edges: np.ndarray) -> np.ndarray:
    """Bin assignment for in-range values; the top edge joins the last bin.

    Shared between the 1-d and 2-d histograms so marginalizing a joint
    histogram reproduces the 1-d result bin-for-bin.
    """
    idx = np.searchsorted(edges, x, side="right") - 1
    return np.minimum(idx, edges.size - 2)


def marginal_hist(
    post: WeightedPosterior, j: int, bins: int, value_range: tuple[float, float]
) -> HistResult:
    """Weighted histogram of parameter ``j``; mass outside the range is
    reported separately, so mass.sum() + out_of_range is the total weight."""
    if not 0 <= j < post.dim:
        raise ValueError(f"parameter index {j} out of range")
    if bins < 1:
        raise ValueError("bins must be at least 1")
    lo, hi = _check_range(value_range)
    edges = np.linspace(lo, hi, bins + 1)
    x = post.params[:, j]
    inside = (x >= lo) & (x <= hi)
    idx = _bin_index(x[inside], edges)
    mass = np.bincount(idx, weights=post.weights[inside], minlength=bins)
    out = float(post.weights[~inside].sum())
    return HistResult(edges=edges, mass=mass, out_of_range=out)


def joint_hist(
    post: WeightedPosterior,
    j1: int,
    j2: int,
    bins: int | tuple[int, int],
    ranges: tuple[tuple[float, float], tuple[float, float]],
) -> JointHistResult:
    """Weighted 2-d histogram of parameters (j1, j2).

    With ranges covering every sample, summing the mass over either axis
    reproduces the matching 1-d marginal bin-for-bin.
    """
    for j in (j1, j2):
        if not 0 <= j < post.dim:
            raise ValueError(f"parameter index {j} out of range")
    bx, by = (bins, bins) if isinstance(bins, int) else (int(bins[0]), int(bins[1]))
    if bx < 1 or by < 1:
        raise ValueError("bins must be at least 1")
    (xlo, xhi) = _check_range(ranges[0])
    (ylo, yhi) = _check_range(ranges[1])
    x_edges = np.linspace(xlo, xhi, bx + 1)
    y_edges = np.linspace(ylo, yhi, by + 1)
    x = post.params[:, j1]
    y = post.params[:, j2]
    inside = (x >= xlo) & (x <= xhi) & (y >= ylo) & (y <= yhi)
    ix = _bin_index(x[inside], x_edges)
    iy = _bin_index(y[inside], y_edges)
    flat = np.bincount(ix * by + iy, weights=post.weights[inside], minlength=bx * by)
    mass = flat.reshape(bx, by)
    out = float(post.weights[~inside].sum())
    return JointHistResult(x_edges=x_edges, y_edges=y_edges, mass=mass, out_of_range=out)
