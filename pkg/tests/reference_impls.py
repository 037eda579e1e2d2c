"""Slow, loop-based reference implementations used to cross-check the library.

Everything here is written with plain Python loops and ``math`` so that it
shares no code path with the vectorized implementations under test.
"""
import math


def ref_normalize(points):
    points = [[float(v) for v in p] for p in points]
    n = len(points)
    dim = len(points[0])
    out = [[0.0] * dim for _ in range(n)]
    for j in range(dim):
        col = [points[i][j] for i in range(n)]
        lo, hi = min(col), max(col)
        for i in range(n):
            out[i][j] = (points[i][j] - lo) / (hi - lo) if hi > lo else 0.5
    return out


def _dist(a, b):
    return math.sqrt(sum((x - y) ** 2 for x, y in zip(a, b)))


def ref_mean_shift(unit_points, *, radius, bandwidth, kernel="gaussian",
                   shift_tol=1e-4, max_steps=500, squared_kernel=False):
    """Converged mode per point; every point iterates against the static set."""
    pts = [[float(v) for v in p] for p in unit_points]
    dim = len(pts[0])
    modes = []
    for start in pts:
        mode = list(start)
        for _ in range(max_steps):
            wsum = 0.0
            acc = [0.0] * dim
            for p in pts:
                d = _dist(mode, p)
                if d >= radius:
                    continue
                if kernel == "flat":
                    w = 1.0
                elif squared_kernel:
                    w = math.exp(-(d * d) / (2.0 * bandwidth * bandwidth))
                else:
                    w = math.exp(-d / bandwidth)
                wsum += w
                for j in range(dim):
                    acc[j] += w * p[j]
            if wsum == 0.0:
                break
            new = [a / wsum for a in acc]
            shift = _dist(new, mode)
            mode = new
            if shift < shift_tol:
                break
        modes.append(mode)
    return modes


def ref_labels(modes, merge_tol):
    """Single-linkage components of the merge graph, labeled by first occurrence."""
    n = len(modes)
    labels = [-1] * n
    next_label = 0
    for i in range(n):
        if labels[i] >= 0:
            continue
        labels[i] = next_label
        queue = [i]
        while queue:
            k = queue.pop()
            for j in range(n):
                if labels[j] < 0 and _dist(modes[k], modes[j]) <= merge_tol:
                    labels[j] = next_label
                    queue.append(j)
        next_label += 1
    return labels


def ref_cluster(points, *, radius, bandwidth, kernel="gaussian", shift_tol=1e-4,
                max_steps=500, merge_tol=1e-2, squared_kernel=False):
    unit = ref_normalize(points)
    modes = ref_mean_shift(
        unit, radius=radius, bandwidth=bandwidth, kernel=kernel,
        shift_tol=shift_tol, max_steps=max_steps, squared_kernel=squared_kernel,
    )
    return ref_labels(modes, merge_tol)


def ref_cluster_rowwise(points, *, radius, bandwidth, kernel="gaussian",
                        shift_tol=1e-4, max_steps=500, merge_tol=1e-2,
                        squared_kernel=False):
    """Same brute-force algorithm as :func:`ref_cluster`, one point at a time,
    with numpy row arithmetic instead of scalar loops so large randomized
    sweeps stay fast. No shared code with the library implementation."""
    import numpy as np

    pts = np.asarray(points, dtype=float)
    lo = pts.min(axis=0)
    span = pts.max(axis=0) - lo
    unit = np.where(span > 0, (pts - lo) / np.where(span > 0, span, 1.0), 0.5)

    modes = []
    for start in unit:
        mode = start.copy()
        for _ in range(max_steps):
            d = np.sqrt(((unit - mode) ** 2).sum(axis=1))
            near = d < radius
            if kernel == "flat":
                w = near.astype(float)
            elif squared_kernel:
                w = np.where(near, np.exp(-(d * d) / (2.0 * bandwidth * bandwidth)), 0.0)
            else:
                w = np.where(near, np.exp(-d / bandwidth), 0.0)
            wsum = w.sum()
            if wsum == 0.0:
                break
            new = (w[:, None] * unit).sum(axis=0) / wsum
            shift = math.sqrt(((new - mode) ** 2).sum())
            mode = new
            if shift < shift_tol:
                break
        modes.append(mode)

    labels = [-1] * len(modes)
    next_label = 0
    for i in range(len(modes)):
        if labels[i] >= 0:
            continue
        labels[i] = next_label
        queue = [i]
        while queue:
            k = queue.pop()
            dk = np.sqrt(((np.asarray(modes) - modes[k]) ** 2).sum(axis=1))
            for j in np.flatnonzero(dk <= merge_tol):
                if labels[j] < 0:
                    labels[j] = next_label
                    queue.append(int(j))
        next_label += 1
    return labels


def ref_weighted_quantile(values, weights, q):
    """Smallest value whose cumulative weight fraction exceeds q."""
    order = sorted(range(len(values)), key=lambda i: values[i])
    total = sum(weights)
    cum = 0.0
    for i in order:
        cum += weights[i]
        if cum / total > q:
            return values[i]
    return values[order[-1]]


def ref_log_evidence(logl, logx, rule, log_live=None, n_live=None, logx_last=None):
    """Quadrature over the shrinking prior volume, done with plain floats.

    ``logl``/``logx`` are the discard chain; the optional live remainder adds
    K equal slabs of width X_M/K carrying the sorted live likelihoods.
    """
    xs = [math.exp(v) for v in logx]
    terms = []
    m = len(xs)
    for i in range(m):
        prev = 1.0 if i == 0 else xs[i - 1]
        if rule == "rectangle":
            dx = prev - xs[i]
        else:
            nxt = xs[i + 1] if i + 1 < m else xs[-1]
            dx = (prev - nxt) / 2.0
        terms.append(math.log(dx) + logl[i])
    if log_live is not None:
        x_last = math.exp(logx_last if logx_last is not None else logx[-1])
        for v in sorted(log_live):
            terms.append(math.log(x_last / n_live) + v)
    top = max(terms)
    return top + math.log(sum(math.exp(t - top) for t in terms))
