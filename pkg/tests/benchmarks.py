"""Shared synthetic benchmark constructions for the test suite."""
import math

import numpy as np

from nestshift import (
    DataKind,
    ModelFamily,
    ModelSpec,
    ParameterSpace,
    make_loglike,
    model_eval,
    simulate_dataset,
)

PEAK3_TRUTH = np.array([1.0, 2.0, 12.0, 30.0, 48.0, 7.0, 7.0, 7.0])
PEAK3_SEED = 424242


def make_peak3():
    """Three equal Poisson peaks on a flat background: 3! permutation modes."""
    spec = ModelSpec(ModelFamily.GAUSS_PEAKS_FLAT_BG, 3)
    x = np.linspace(0.0, 60.0, 61)
    rng = np.random.default_rng(PEAK3_SEED)
    data = simulate_dataset(spec, PEAK3_TRUTH, x, DataKind.COUNTS, rng)
    space = ParameterSpace(
        spec.param_names(),
        [0.1, 0.5, 0.0, 0.0, 0.0, 0.5, 0.5, 0.5],
        [5.0, 6.0, 60.0, 60.0, 60.0, 15.0, 15.0, 15.0],
    )
    return spec, space, data


def peak3_loglike():
    spec, space, data = make_peak3()
    return make_loglike(spec, data), space


def peak_position_masses(run, window=4.0):
    """Posterior mass of the first peak position near each true peak."""
    p = np.exp(run.logweights - run.log_evidence)
    pos1 = run.params[:, 2]
    return np.array(
        [p[np.abs(pos1 - true) <= window].sum() for true in PEAK3_TRUTH[2:5]]
    )


def gaussian_box_problem(dim, sigma=1.0, half_width_sigmas=10.0):
    """Unit-amplitude isotropic Gaussian likelihood in a uniform box.

    Returns (loglike, space, quadrature_oracle_lnZ). The oracle integrates the
    likelihood over the box numerically and divides by the box volume.
    """
    from scipy.integrate import quad

    half = half_width_sigmas * sigma
    space = ParameterSpace(
        tuple(f"x{i + 1}" for i in range(dim)),
        [-half] * dim,
        [half] * dim,
    )
    norm = -0.5 * math.log(2.0 * math.pi * sigma * sigma)

    def loglike(theta):
        return dim * norm - 0.5 * float(theta @ theta) / (sigma * sigma)

    one_dim, _ = quad(
        lambda t: math.exp(norm - 0.5 * (t / sigma) ** 2), -half, half,
        epsabs=1e-14, epsrel=1e-13,
    )
    oracle = dim * (math.log(one_dim) - math.log(2.0 * half))
    return loglike, space, oracle
