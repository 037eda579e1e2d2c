"""Parameter spaces, synthetic spectrum models and their likelihoods.

Two model families cover the benchmark menu:

* ``GAUSS_PEAKS_FLAT_BG``: n Gaussian peaks of common width on a flat
  background, parameter layout ``[bg, width, pos_1..pos_n, amp_1..amp_n]``.
* ``MODULATED_EXP_DECAY``: an exponential decay with a cosine modulation,
  layout ``[norm, lifetime, rel_amplitude, pulsation, phase]``.

Likelihoods come in two flavours keyed by the dataset kind: Poisson counts
and Gaussian-error channels.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.special import gammaln, xlogy

__all__ = [
    "DataKind",
    "Dataset",
    "ModelFamily",
    "ModelSpec",
    "ParameterSpace",
    "gaussian_log_likelihood",
    "log_likelihood",
    "make_loglike",
    "model_eval",
    "poisson_log_likelihood",
    "sample_prior",
]

_LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)


class DataKind(Enum):
    """How measured values are distributed around the model prediction."""

    COUNTS = "counts"
    GAUSSIAN_ERRORS = "gaussian_errors"


class ModelFamily(Enum):
    GAUSS_PEAKS_FLAT_BG = "gauss_peaks_flat_bg"
    MODULATED_EXP_DECAY = "modulated_exp_decay"


@dataclass(frozen=True, eq=False)
class ParameterSpace:
    """A J-dimensional box with independent uniform priors.

    ``lower[j] < upper[j]`` strictly and both finite; the prior mass is
    uniform over the box, so prior volume fractions map directly onto the
    sampler's shrinkage variable.
    """

    names: tuple[str, ...]
    lower: np.ndarray
    upper: np.ndarray

    def __eq__(self, other):
        if not isinstance(other, ParameterSpace):
            return NotImplemented
        return (
            self.names == other.names
            and np.array_equal(self.lower, other.lower)
            and np.array_equal(self.upper, other.upper)
        )

    def __post_init__(self):
        lower = np.asarray(self.lower, dtype=float)
        upper = np.asarray(self.upper, dtype=float)
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)
        if len(self.names) < 1:
            raise ValueError("parameter space needs at least one dimension")
        if lower.shape != (len(self.names),) or upper.shape != (len(self.names),):
            raise ValueError("bounds must match the number of parameter names")
        if not (np.isfinite(lower).all() and np.isfinite(upper).all()):
            raise ValueError("prior bounds must be finite")
        if not (lower < upper).all():
            raise ValueError("each lower bound must be strictly below its upper bound")
        if len(set(self.names)) != len(self.names):
            raise ValueError("parameter names must be unique")

    @property
    def dim(self) -> int:
        return len(self.names)

    def contains(self, point: np.ndarray) -> bool:
        """True when ``point`` lies inside the closed box."""
        p = np.asarray(point, dtype=float)
        return bool(np.all(p >= self.lower) and np.all(p <= self.upper))

    def index_of(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise KeyError(f"unknown parameter {name!r}") from None


def sample_prior(space: ParameterSpace, rng: np.random.Generator, size: int | None = None) -> np.ndarray:
    """Uniform draws from the prior box; deterministic given the rng state."""
    if size is None:
        u = rng.random(space.dim)
    else:
        u = rng.random((size, space.dim))
    return space.lower + u * (space.upper - space.lower)


@dataclass(frozen=True)
class Dataset:
    """Channels ``x`` with measured values ``y``.

    ``COUNTS`` requires non-negative integer-valued y; ``GAUSSIAN_ERRORS``
    requires strictly positive per-channel ``yerr``.
    """

    kind: DataKind
    x: np.ndarray
    y: np.ndarray
    yerr: np.ndarray | None = None

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float)
        y = np.asarray(self.y, dtype=float)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)
        if x.ndim != 1 or x.size < 1:
            raise ValueError("x must be a non-empty 1-d array")
        if y.shape != x.shape:
            raise ValueError("y must match x in length")
        if not np.isfinite(x).all() or not np.isfinite(y).all():
            raise ValueError("x and y must be finite")
        if self.kind is DataKind.COUNTS:
            if self.yerr is not None:
                raise ValueError("counts data carries no yerr column")
            if np.any(y < 0) or np.any(y != np.floor(y)):
                raise ValueError("counts must be non-negative integer values")
        else:
            if self.yerr is None:
                raise ValueError("gaussian_errors data requires yerr")
            yerr = np.asarray(self.yerr, dtype=float)
            object.__setattr__(self, "yerr", yerr)
            if yerr.shape != x.shape:
                raise ValueError("yerr must match x in length")
            if not np.isfinite(yerr).all() or np.any(yerr <= 0):
                raise ValueError("yerr must be finite and positive")

    @property
    def n_channels(self) -> int:
        return self.x.size


@dataclass(frozen=True)
class ModelSpec:
    """A model family plus its shape parameters (peak count)."""

    family: ModelFamily
    n_peaks: int = 0

    def __post_init__(self):
        if self.family is ModelFamily.GAUSS_PEAKS_FLAT_BG:
            if self.n_peaks < 1:
                raise ValueError("gauss_peaks_flat_bg needs n_peaks >= 1")
        elif self.n_peaks != 0:
            raise ValueError("n_peaks only applies to gauss_peaks_flat_bg")

    @property
    def n_params(self) -> int:
        if self.family is ModelFamily.GAUSS_PEAKS_FLAT_BG:
            return 2 + 2 * self.n_peaks
        return 5

    def param_names(self) -> tuple[str, ...]:
        """Canonical layout names, in parameter-vector order."""
        if self.family is ModelFamily.GAUSS_PEAKS_FLAT_BG:
            n = self.n_peaks
            return (
                "bg",
                "width",
                *(f"pos{k}" for k in range(1, n + 1)),
                *(f"amp{k}" for k in range(1, n + 1)),
            )
        return ("norm", "lifetime", "rel_amplitude", "pulsation", "phase")


def _check_layout(spec: ModelSpec, params: np.ndarray) -> np.ndarray:
    params = np.asarray(params, dtype=float)
    if params.shape != (spec.n_params,):
        raise ValueError(
            f"{spec.family.value} expects {spec.n_params} parameters, got shape {params.shape}"
        )
    return params


def model_eval(spec: ModelSpec, params: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Predicted intensity on the grid ``x``.

    Width (and lifetime) are assumed positive; enforce that through the prior
    bounds. A mismatched parameter vector raises immediately.
    """
    params = _check_layout(spec, params)
    x = np.asarray(x, dtype=float)
    if spec.family is ModelFamily.GAUSS_PEAKS_FLAT_BG:
        n = spec.n_peaks
        bg, width = params[0], params[1]
        pos = params[2 : 2 + n]
        amp = params[2 + n :]
        z = (x[:, None] - pos[None, :]) / width
        return bg + np.exp(-0.5 * z * z) @ amp
    norm, lifetime, rel_amplitude, pulsation, phase = params
    return norm * np.exp(-x / lifetime) * (1.0 + rel_amplitude * np.cos(pulsation * x + phase))


def poisson_log_likelihood(y: np.ndarray, lam: np.ndarray) -> float:
    """Sum of Poisson log-pmf terms ``y ln lam - lam - ln Gamma(y+1)``.

    An intensity lam <= 0 facing y > 0 (or any negative lam) yields the -inf
    sentinel; lam = 0 with y = 0 contributes exactly 0.
    """
    y = np.asarray(y, dtype=float)
    lam = np.asarray(lam, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        total = float(xlogy(y, lam).sum() - lam.sum() - gammaln(y + 1.0).sum())
    if math.isnan(total) or np.any(lam < 0):
        return -math.inf
    return total


def gaussian_log_likelihood(y: np.ndarray, mu: np.ndarray, yerr: np.ndarray) -> float:
    """Independent-Gaussian log-likelihood with per-channel sigma."""
    y = np.asarray(y, dtype=float)
    mu = np.asarray(mu, dtype=float)
    yerr = np.asarray(yerr, dtype=float)
    r = (y - mu) / yerr
    return float(-0.5 * (r * r).sum() - np.log(yerr).sum() - y.size * _LOG_SQRT_2PI)


def log_likelihood(spec: ModelSpec, params: np.ndarray, data: Dataset) -> float:
    """Log-likelihood of ``params`` for ``data`` under the model family.

    Non-finite parameter values are an input error, distinct from the -inf
    sentinel reserved for zero-probability (but well-formed) parameters.
    """
    params = _check_layout(spec, params)
    if not np.isfinite(params).all():
        raise ValueError("parameters must be finite")
    predicted = model_eval(spec, params, data.x)
    if data.kind is DataKind.COUNTS:
        return poisson_log_likelihood(data.y, predicted)
    return gaussian_log_likelihood(data.y, predicted, data.yerr)


def make_loglike(spec: ModelSpec, data: Dataset):
    """Bind model and data into a fast ``params -> float`` closure.

    The closure skips per-call layout checks (validated once here) and
    precomputes the data-only terms; it is the hot path of the sampler.
    """
    _check_layout(spec, np.zeros(spec.n_params))
    x = data.x.copy()
    y = data.y.copy()

    if spec.family is ModelFamily.GAUSS_PEAKS_FLAT_BG:
        n = spec.n_peaks
        xcol = x[:, None]

        def predict(params: np.ndarray) -> np.ndarray:
            z = (xcol - params[2 : 2 + n]) / params[1]
            return params[0] + np.exp(-0.5 * z * z) @ params[2 + n :]

    else:

        def predict(params: np.ndarray) -> np.ndarray:
            return params[0] * np.exp(-x / params[1]) * (
                1.0 + params[2] * np.cos(params[3] * x + params[4])
            )

    if data.kind is DataKind.COUNTS:
        lgamma_y1 = float(gammaln(y + 1.0).sum())

        def loglike(params: np.ndarray) -> float:
            lam = predict(params)
            with np.errstate(divide="ignore", invalid="ignore"):
                total = xlogy(y, lam).sum() - lam.sum() - lgamma_y1
            if math.isnan(total) or np.any(lam < 0):
                return -math.inf
            return float(total)

    else:
        yerr = data.yerr.copy()
        norm_const = float(-np.log(yerr).sum() - y.size * _LOG_SQRT_2PI)

        def loglike(params: np.ndarray) -> float:
            r = (y - predict(params)) / yerr
            return norm_const - 0.5 * float(r @ r)

    return loglike
