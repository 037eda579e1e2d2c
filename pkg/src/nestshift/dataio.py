"""Dataset files and synthetic spectrum generation.

Data files are whitespace-delimited columns, ``x y`` for counts and
``x y yerr`` for Gaussian-error channels, with ``#`` comments. Values are
written with enough digits that write/read round-trips are exact.
"""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .errors import DataError
from .models import DataKind, Dataset, ModelSpec, model_eval

__all__ = ["read_data", "simulate_dataset", "write_data", "write_meta"]


def read_data(path, kind: DataKind) -> Dataset:
    """Parse a dataset file, reporting every malformed line at once."""
    text = Path(path).read_text(encoding="utf-8")
    n_cols = 2 if kind is DataKind.COUNTS else 3
    problems: list[str] = []
    rows: list[list[float]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.split()
        if len(fields) != n_cols:
            problems.append(f"line {lineno}: expected {n_cols} columns, got {len(fields)}")
            continue
        try:
            values = [float(f) for f in fields]
        except ValueError:
            problems.append(f"line {lineno}: non-numeric value")
            continue
        if not all(np.isfinite(values)):
            problems.append(f"line {lineno}: non-finite value")
            continue
        if kind is DataKind.COUNTS and (values[1] < 0 or values[1] != int(values[1])):
            problems.append(f"line {lineno}: counts must be non-negative integers")
            continue
        if kind is DataKind.GAUSSIAN_ERRORS and values[2] <= 0:
            problems.append(f"line {lineno}: yerr must be positive")
            continue
        rows.append(values)
    if not rows and not problems:
        problems.append("no data rows")
    if problems:
        raise DataError(problems)
    arr = np.asarray(rows, dtype=float)
    try:
        if kind is DataKind.COUNTS:
            return Dataset(kind=kind, x=arr[:, 0], y=arr[:, 1])
        return Dataset(kind=kind, x=arr[:, 0], y=arr[:, 1], yerr=arr[:, 2])
    except ValueError as exc:
        raise DataError([str(exc)]) from exc


def write_data(dataset: Dataset, path) -> None:
    """Write a dataset in the column format read_data expects."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = []
    if dataset.kind is DataKind.COUNTS:
        lines.append("# columns: x y")
        for x, y in zip(dataset.x, dataset.y):
            lines.append(f"{float(x)!r} {int(y)}")
    else:
        lines.append("# columns: x y yerr")
        for x, y, e in zip(dataset.x, dataset.y, dataset.yerr):
            lines.append(f"{float(x)!r} {float(y)!r} {float(e)!r}")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def simulate_dataset(
    spec: ModelSpec,
    true_params,
    x: np.ndarray,
    kind: DataKind,
    rng: np.random.Generator,
    yerr: float | np.ndarray | None = None,
) -> Dataset:
    """Draw synthetic measurements from the model at ``true_params``.

    Counts are Poisson draws (the model intensity must be non-negative
    everywhere); Gaussian channels need a positive ``yerr``.
    """
    x = np.asarray(x, dtype=float)
    predicted = model_eval(spec, np.asarray(true_params, dtype=float), x)
    if kind is DataKind.COUNTS:
        if np.any(predicted < 0):
            raise ValueError("model intensity is negative; cannot draw counts")
        y = rng.poisson(predicted).astype(float)
        return Dataset(kind=kind, x=x, y=y)
    if yerr is None:
        raise ValueError("gaussian_errors simulation needs yerr")
    err = np.broadcast_to(np.asarray(yerr, dtype=float), x.shape).copy()
    if np.any(err <= 0):
        raise ValueError("yerr must be positive")
    y = predicted + rng.normal(0.0, err)
    return Dataset(kind=kind, x=x, y=y, yerr=err)


def write_meta(path, meta: dict) -> None:
    """Sidecar JSON with the ground truth of a simulated dataset."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n", encoding="utf-8")
