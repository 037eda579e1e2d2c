import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nestshift import (
    ParameterSpace,
    SamplerConfig,
    WeightedPosterior,
    combine_posteriors,
    joint_hist,
    marginal_hist,
    run_nested,
    summarize,
    to_posterior,
    weighted_quantile,
)
from reference_impls import ref_weighted_quantile


def make_post(params, weights, logl=None):
    params = np.asarray(params, dtype=float)
    if params.ndim == 1:
        params = params[:, None]
    weights = np.asarray(weights, dtype=float)
    logl = np.zeros(params.shape[0]) if logl is None else np.asarray(logl, float)
    return WeightedPosterior(params=params, weights=weights, logl=logl)


class TestWeightedQuantile:
    def test_two_point_median_takes_upper(self):
        # at an exact cumulative boundary the upper sample wins
        assert weighted_quantile(np.array([0.0, 1.0]), np.array([0.5, 0.5]), 0.5) == 1.0

    def test_extremes(self):
        v = np.array([3.0, 1.0, 2.0])
        w = np.array([0.2, 0.5, 0.3])
        assert weighted_quantile(v, w, 0.0) == 1.0
        assert weighted_quantile(v, w, 1.0) == 3.0

    def test_unnormalized_weights(self):
        v = np.array([0.0, 1.0, 2.0])
        w = np.array([1.0, 1.0, 2.0])
        for q in (0.1, 0.25, 0.5, 0.9):
            assert weighted_quantile(v, w, q) == weighted_quantile(v, w * 7.5, q)

    def test_vector_q_monotone(self):
        rng = np.random.default_rng(0)
        v = rng.normal(size=50)
        w = rng.uniform(0.1, 1.0, 50)
        qs = np.linspace(0.0, 1.0, 21)
        out = weighted_quantile(v, w, qs)
        assert out.shape == (21,)
        assert (np.diff(out) >= 0).all()

    def test_single_sample(self):
        for q in (0.0, 0.5, 1.0):
            assert weighted_quantile(np.array([4.2]), np.array([2.0]), q) == 4.2

    @settings(max_examples=50, deadline=None)
    @given(st.integers(0, 2**31 - 1))
    def test_matches_loop_reference(self, seed):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(1, 40))
        v = rng.normal(size=n)
        w = rng.uniform(0.05, 1.0, n)
        q = float(rng.uniform(0.0, 0.999))
        assert weighted_quantile(v, w, q) == ref_weighted_quantile(
            v.tolist(), w.tolist(), q
        )

    def test_validation(self):
        with pytest.raises(ValueError):
            weighted_quantile(np.array([]), np.array([]), 0.5)
        with pytest.raises(ValueError):
            weighted_quantile(np.array([1.0]), np.array([1.0, 2.0]), 0.5)
        with pytest.raises(ValueError):
            weighted_quantile(np.array([1.0]), np.array([0.0]), 0.5)
        with pytest.raises(ValueError):
            weighted_quantile(np.array([1.0]), np.array([1.0]), 1.5)


class TestPosteriorConstruction:
    def run_small(self, seed=1):
        space = ParameterSpace(("x",), [-5.0], [5.0])
        loglike = lambda p: -0.5 * float(p[0] ** 2) / 0.25
        cfg = SamplerConfig(n_live=40, n_runs=1, seed=seed)
        return run_nested(loglike, space, cfg)

    def test_to_posterior_normalized(self):
        run = self.run_small()
        post = to_posterior(run)
        assert post.n_samples == run.n_terms
        assert post.dim == 1
        assert post.weights.sum() == pytest.approx(1.0, abs=1e-12)
        assert (post.weights >= 0).all()

    def test_combine_posteriors_equal_mass_per_run(self):
        runs = [self.run_small(seed=s) for s in (1, 2, 3)]
        post = combine_posteriors(runs)
        assert post.n_samples == sum(r.n_terms for r in runs)
        assert post.weights.sum() == pytest.approx(1.0, abs=1e-12)
        first = runs[0].n_terms
        assert post.weights[:first].sum() == pytest.approx(1.0 / 3.0, abs=1e-12)

    def test_combine_empty_rejected(self):
        with pytest.raises(ValueError):
            combine_posteriors([])

    def test_validation(self):
        with pytest.raises(ValueError):
            make_post([[1.0]], [-0.5])
        with pytest.raises(ValueError):
            make_post([[1.0], [2.0]], [0.5])
        with pytest.raises(ValueError):
            WeightedPosterior(
                params=np.zeros((2, 1)),
                weights=np.full(2, 0.5),
                logl=np.zeros(3),
            )


class TestSummarize:
    def test_hand_case(self):
        post = make_post([0.0, 1.0], [0.25, 0.75], logl=[0.0, 1.0])
        s = summarize(post, 0)
        assert s.mean == pytest.approx(0.75)
        assert s.std == pytest.approx(math.sqrt(0.1875), rel=1e-12)
        assert s.median == 1.0
        assert s.ci68 == (0.0, 1.0)
        assert s.ci95 == (0.0, 1.0)
        assert s.ci99 == (0.0, 1.0)
        assert s.ml_value == 1.0

    def test_intervals_nest(self):
        rng = np.random.default_rng(5)
        post = make_post(rng.normal(size=400), rng.uniform(0.1, 1.0, 400))
        s = summarize(post, 0)
        assert s.ci99[0] <= s.ci95[0] <= s.ci68[0] <= s.median
        assert s.median <= s.ci68[1] <= s.ci95[1] <= s.ci99[1]

    def test_degenerate_point_mass(self):
        post = make_post([2.0, 2.0, 2.0], [1.0, 2.0, 3.0])
        s = summarize(post, 0)
        assert s.mean == 2.0
        assert s.std == 0.0
        assert s.ci99 == (2.0, 2.0)

    def test_index_out_of_range(self):
        post = make_post([1.0], [1.0])
        with pytest.raises(ValueError):
            summarize(post, 1)


class TestMarginalHist:
    def test_hand_binning(self):
        post = make_post([0.5, 1.5, 2.5], [1.0, 2.0, 3.0])
        h = marginal_hist(post, 0, 3, (0.0, 3.0))
        np.testing.assert_allclose(h.mass, [1.0, 2.0, 3.0])
        np.testing.assert_allclose(h.edges, [0.0, 1.0, 2.0, 3.0])
        assert h.out_of_range == 0.0

    def test_edge_conventions(self):
        # interior edges belong to the right bin, the top edge to the last
        post = make_post([0.0, 1.0, 3.0], [1.0, 1.0, 1.0])
        h = marginal_hist(post, 0, 3, (0.0, 3.0))
        np.testing.assert_allclose(h.mass, [1.0, 1.0, 1.0])

    def test_out_of_range_accounting(self):
        post = make_post([-1.0, 0.5, 9.0], [0.25, 0.5, 0.25])
        h = marginal_hist(post, 0, 4, (0.0, 1.0))
        assert h.out_of_range == pytest.approx(0.5)
        assert h.mass.sum() + h.out_of_range == pytest.approx(post.weights.sum())

    def test_validation(self):
        post = make_post([0.5], [1.0])
        with pytest.raises(ValueError):
            marginal_hist(post, 0, 0, (0.0, 1.0))
        with pytest.raises(ValueError):
            marginal_hist(post, 0, 3, (1.0, 1.0))
        with pytest.raises(ValueError):
            marginal_hist(post, 2, 3, (0.0, 1.0))


class TestJointHist:
    def test_marginalization_identity_exact(self):
        # dyadic weights make the bincount sums exact, so collapsing the
        # joint table must reproduce the 1-d histograms bit for bit
        rng = np.random.default_rng(7)
        params = rng.uniform(0.0, 1.0, size=(256, 2))
        post = make_post(params, np.full(256, 0.25))
        ranges = ((0.0, 1.0), (0.0, 1.0))
        joint = joint_hist(post, 0, 1, (8, 5), ranges)
        mx = marginal_hist(post, 0, 8, ranges[0])
        my = marginal_hist(post, 1, 5, ranges[1])
        np.testing.assert_array_equal(joint.mass.sum(axis=1), mx.mass)
        np.testing.assert_array_equal(joint.mass.sum(axis=0), my.mass)
        assert joint.out_of_range == 0.0

    def test_one_axis_out_means_sample_out(self):
        post = make_post(np.array([[0.5, 5.0], [0.5, 0.5]]), [0.3, 0.7])
        joint = joint_hist(post, 0, 1, 2, ((0.0, 1.0), (0.0, 1.0)))
        assert joint.out_of_range == pytest.approx(0.3)
        assert joint.mass.sum() == pytest.approx(0.7)

    def test_asymmetric_bins_shape(self):
        rng = np.random.default_rng(9)
        post = make_post(rng.uniform(size=(50, 3)), rng.uniform(0.1, 1.0, 50))
        joint = joint_hist(post, 0, 2, (4, 7), ((0.0, 1.0), (0.0, 1.0)))
        assert joint.mass.shape == (4, 7)
        assert joint.x_edges.size == 5
        assert joint.y_edges.size == 8
        total = joint.mass.sum() + joint.out_of_range
        assert total == pytest.approx(post.weights.sum(), rel=1e-12)
