"""Mean-shift clustering of live points.

Coordinates are min-max normalized to the unit cube so one neighborhood
radius works across dimensions of wildly different physical scales. Each
point iterates toward a density mode by taking kernel-weighted means of the
original (static) point set restricted to a fixed Euclidean neighborhood;
modes closer than a merge tolerance are then linked into one cluster.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.spatial.distance import cdist

__all__ = [
    "ClusterConfig",
    "ClusterResult",
    "Kernel",
    "assign_labels",
    "cluster_live_points",
    "cluster_sigmas",
    "denormalize_points",
    "mean_shift",
    "normalize_points",
]


class Kernel(Enum):
    FLAT = "flat"
    GAUSSIAN = "gaussian"


@dataclass(frozen=True)
class ClusterConfig:
    """Mean-shift controls.

    ``radius`` is the neighborhood cut D and ``bandwidth`` the kernel length
    scale, both in normalized coordinates. The Gaussian kernel defaults to
    exp(-d/bandwidth); ``squared_kernel`` switches to the conventional
    exp(-d^2/(2 bandwidth^2)) form.
    """

    kernel: Kernel = Kernel.GAUSSIAN
    radius: float = 0.6
    bandwidth: float = 0.2
    shift_tol: float = 1e-4
    max_steps: int = 500
    merge_tol: float = 1e-2
    squared_kernel: bool = False

    def __post_init__(self):
        if not self.radius > 0:
            raise ValueError("radius must be positive")
        if not self.bandwidth > 0:
            raise ValueError("bandwidth must be positive")
        if not self.shift_tol > 0:
            raise ValueError("shift_tol must be positive")
        if self.max_steps < 1:
            raise ValueError("max_steps must be at least 1")
        if self.merge_tol < 0:
            raise ValueError("merge_tol must be non-negative")


@dataclass(frozen=True)
class ClusterResult:
    """Cluster assignment of a point set.

    ``labels`` are dense ints ordered by first occurrence; ``modes`` holds one
    representative mode per cluster (mean of the member modes) in physical
    coordinates; ``sigma`` is the per-cluster per-dimension population std of
    the member points, zero rows for singletons.
    """

    labels: np.ndarray
    modes: np.ndarray
    sizes: np.ndarray
    sigma: np.ndarray

    @property
    def n_clusters(self) -> int:
        return int(self.sizes.size)


def normalize_points(points: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Min-max map onto the unit cube; returns (unit, offset, span).

    Zero-span (degenerate) dimensions map to the constant 0.5 and keep
    span = 0 so the inverse map collapses them back onto the shared value.
    """
    points = np.asarray(points, dtype=float)
    if points.ndim != 2 or points.shape[0] < 1:
        raise ValueError("points must be a non-empty (K, J) matrix")
    offset = points.min(axis=0)
    span = points.max(axis=0) - offset
    degenerate = span == 0
    safe = np.where(degenerate, 1.0, span)
    unit = (points - offset) / safe
    unit[:, degenerate] = 0.5
    return unit, offset, span


def denormalize_points(unit: np.ndarray, offset: np.ndarray, span: np.ndarray) -> np.ndarray:
    """Inverse of :func:`normalize_points`; degenerate dims return the offset."""
    return offset + np.asarray(unit, dtype=float) * span


def _kernel_weights(dist: np.ndarray, config: ClusterConfig) -> np.ndarray:
    inside = dist < config.radius
    if config.kernel is Kernel.FLAT:
        return inside.astype(float)
    if config.squared_kernel:
        w = np.exp(-0.5 * (dist / config.bandwidth) ** 2)
    else:
        w = np.exp(-dist / config.bandwidth)
    return np.where(inside, w, 0.0)


def mean_shift(unit_points: np.ndarray, config: ClusterConfig) -> np.ndarray:
    """Converged mode for every point, in normalized coordinates.

    Neighborhoods and kernel weights are always evaluated against the static
    original point set; all points shift simultaneously. A point whose
    neighborhood empties out is its own converged mode.
    """
    pts = np.asarray(unit_points, dtype=float)
    if pts.ndim != 2 or pts.shape[0] < 1:
        raise ValueError("points must be a non-empty (K, J) matrix")
    modes = pts.copy()
    active = np.ones(pts.shape[0], dtype=bool)
    for _ in range(config.max_steps):
        idx = np.flatnonzero(active)
        if idx.size == 0:
            break
        dist = cdist(modes[idx], pts)
        w = _kernel_weights(dist, config)
        wsum = w.sum(axis=1)
        populated = wsum > 0
        new = modes[idx].copy()
        new[populated] = (w[populated] @ pts) / wsum[populated, None]
        shift = np.linalg.norm(new - modes[idx], axis=1)
        modes[idx] = new
        active[idx] = populated & (shift >= config.shift_tol)
    return modes


def assign_labels(modes: np.ndarray, merge_tol: float) -> np.ndarray:
    """Single-linkage merge: modes at Euclidean distance <= merge_tol connect.

    Labels are dense 0..C-1 in order of first occurrence.
    """
    modes = np.asarray(modes, dtype=float)
    n = modes.shape[0]
    adjacency = cdist(modes, modes) <= merge_tol
    labels = np.full(n, -1, dtype=int)
    current = 0
    for seed in range(n):
        if labels[seed] >= 0:
            continue
        member = np.zeros(n, dtype=bool)
        member[seed] = True
        frontier = member.copy()
        while frontier.any():
            reached = adjacency[frontier].any(axis=0)
            frontier = reached & ~member
            member |= frontier
        labels[member] = current
        current += 1
    return labels


def cluster_sigmas(points: np.ndarray, labels: np.ndarray) -> np.ndarray:
    """Per-cluster per-dimension population std in the coordinates given."""
    points = np.asarray(points, dtype=float)
    labels = np.asarray(labels, dtype=int)
    n_clusters = int(labels.max()) + 1 if labels.size else 0
    out = np.zeros((n_clusters, points.shape[1]))
    for c in range(n_clusters):
        out[c] = points[labels == c].std(axis=0)
    return out


def cluster_live_points(points: np.ndarray, config: ClusterConfig) -> ClusterResult:
    """Normalize, shift, merge and measure: the full pipeline on physical points."""
    points = np.asarray(points, dtype=float)
    if points.ndim != 2 or points.shape[0] < 1:
        raise ValueError("points must be a non-empty (K, J) matrix")
    limit = math.sqrt(points.shape[1])
    if config.radius > limit:
        raise ValueError(
            f"radius {config.radius} exceeds the normalized-cube diameter {limit:.3g}"
        )
    unit, offset, span = normalize_points(points)
    modes_unit = mean_shift(unit, config)
    labels = assign_labels(modes_unit, config.merge_tol)
    n_clusters = int(labels.max()) + 1
    modes = np.zeros((n_clusters, points.shape[1]))
    sizes = np.zeros(n_clusters, dtype=int)
    for c in range(n_clusters):
        member = labels == c
        sizes[c] = int(member.sum())
        modes[c] = denormalize_points(modes_unit[member].mean(axis=0), offset, span)
    sigma = cluster_sigmas(points, labels)
    return ClusterResult(labels=labels, modes=modes, sizes=sizes, sigma=sigma)
