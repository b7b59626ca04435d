"""Decision rules: plain k-NN voting and the per-class nearest-neighbour
scorer in both its squared-distance and Gaussian-likelihood modes."""

import numpy as np
import pytest

from ccml import (
    ccknn_classify,
    ccknn_posterior,
    knn_classify,
    uniform_priors,
)
from ccml.errors import ConfigError, FeasibilityError

from _oracles import naive_eq15_predict, naive_knn_classify


def _grid_instance(n_ref, n_query, d, classes, seed):
    # integer coordinates keep every squared distance exact, so tie-breaking
    # is deterministic and oracle comparisons can demand equality
    rng = np.random.default_rng(seed)
    zr = rng.integers(-6, 7, size=(n_ref, d)).astype(np.float64)
    zq = rng.integers(-6, 7, size=(n_query, d)).astype(np.float64)
    labels = np.repeat(np.arange(classes), n_ref // classes)
    labels = np.concatenate([labels, np.zeros(n_ref - labels.size, dtype=np.int64)])
    return zq, zr, rng.permutation(labels)


# ---------------------------------------------------------------- knn_classify


def test_vote_k1_takes_nearest_label():
    zr = np.array([[0.0], [10.0]])
    zq = np.array([[1.0], [9.0]])
    got = knn_classify(zq, zr, [0, 1], 1)
    assert np.array_equal(got, [0, 1])


def test_vote_majority_wins():
    zr = np.array([[0.0], [0.1], [5.0]])
    got = knn_classify(np.array([[0.0]]), zr, [0, 0, 1], 3)
    assert np.array_equal(got, [0])


def test_vote_tie_broken_by_summed_distance():
    # one vote each; class 1 sits closer so it wins the 1-1 tie
    zr = np.array([[3.0], [-1.0]])
    got = knn_classify(np.array([[0.0]]), zr, [0, 1], 2)
    assert np.array_equal(got, [1])


def test_vote_full_tie_broken_by_lower_class_id():
    zr = np.array([[1.0], [-1.0]])
    got = knn_classify(np.array([[0.0]]), zr, [1, 0], 2)
    assert np.array_equal(got, [0])


def test_vote_exclude_self_uses_other_points():
    z = np.array([[0.0], [0.2], [10.0]])
    labels = [0, 1, 1]
    got = knn_classify(z, z, labels, 1, exclude_self=True)
    assert np.array_equal(got, [1, 0, 1])


def test_vote_exclude_self_requires_square():
    with pytest.raises(ConfigError, match="queries == references"):
        knn_classify(np.zeros((2, 1)), np.zeros((3, 1)), [0, 1, 0], 1, exclude_self=True)


def test_vote_k_larger_than_reference_set():
    with pytest.raises(FeasibilityError, match="k=3.*only 2"):
        knn_classify(np.zeros((1, 1)), np.zeros((2, 1)), [0, 1], 3)
    with pytest.raises(FeasibilityError, match="only 1"):
        knn_classify(np.zeros((2, 1)), np.zeros((2, 1)), [0, 1], 2, exclude_self=True)


def test_vote_matches_slow_oracle():
    for seed in range(5):
        zq, zr, labels = _grid_instance(42, 25, 4, 3, seed)
        got = knn_classify(zq, zr, labels, 5)
        want = naive_knn_classify(zq, zr, labels, 5)
        assert np.array_equal(got, want)


# -------------------------------------------------------------- ccknn_classify


def test_ccknn_k1_uniform_equals_nearest_neighbour_rule():
    # continuous coordinates: an exact cross-class distance tie would be
    # broken by reference index in one rule and class id in the other
    for seed in range(5):
        rng = np.random.default_rng(seed)
        zr = rng.standard_normal((30, 3))
        zq = rng.standard_normal((20, 3))
        labels = rng.integers(0, 3, size=30)
        labels[:3] = [0, 1, 2]
        pred, _ = ccknn_classify(zq, zr, labels, 1, priors=uniform_priors(3))
        assert np.array_equal(pred, knn_classify(zq, zr, labels, 1))


def test_ccknn_priors_break_equidistant_tie():
    zr = np.array([[1.0], [-1.0]])
    zq = np.array([[0.0]])
    pred_a, _ = ccknn_classify(zq, zr, [0, 1], 1, priors=np.array([0.9, 0.1]))
    pred_b, _ = ccknn_classify(zq, zr, [0, 1], 1, priors=np.array([0.1, 0.9]))
    assert np.array_equal(pred_a, [0])
    assert np.array_equal(pred_b, [1])


def test_ccknn_default_priors_are_reference_frequencies():
    # nearest member of each class is equally far; the larger class wins by
    # its higher frequency prior, and loses the tie under uniform priors
    zr = np.array([[1.0], [-1.0], [5.0], [6.0]])
    labels = [0, 1, 1, 1]
    zq = np.array([[0.0]])
    by_freq, _ = ccknn_classify(zq, zr, labels, 1)
    by_unif, _ = ccknn_classify(zq, zr, labels, 1, priors=uniform_priors(2))
    assert np.array_equal(by_freq, [1])
    assert np.array_equal(by_unif, [0])


def test_ccknn_matches_slow_oracle():
    for seed in range(5):
        zq, zr, labels = _grid_instance(60, 25, 4, 3, seed)
        pred, scores = ccknn_classify(zq, zr, labels, 3, priors=uniform_priors(3))
        want = naive_eq15_predict(zq, zr, labels, 3)
        assert np.array_equal(pred, want)
        assert np.array_equal(scores.predicted, pred)


def test_ccknn_keeps_noncontiguous_label_ids():
    zr = np.array([[0.0], [0.5], [9.0], [9.5]])
    labels = [0, 0, 2, 2]
    pred, scores = ccknn_classify(np.array([[9.2]]), zr, labels, 2)
    assert np.array_equal(pred, [2])
    assert np.array_equal(scores.class_ids, [0, 2])


def test_ccknn_scale_invariant_under_uniform_priors():
    zq, zr, labels = _grid_instance(40, 15, 3, 3, 7)
    for mode in ("eq15", "alg2_gaussian"):
        base, _ = ccknn_classify(zq, zr, labels, 2, priors=uniform_priors(3), mode=mode)
        scaled, _ = ccknn_classify(
            3.7 * zq, 3.7 * zr, labels, 2, priors=uniform_priors(3), mode=mode
        )
        assert np.array_equal(base, scaled)


def test_ccknn_single_class_always_predicts_it():
    zr = np.array([[0.0], [1.0], [2.0]])
    pred, _ = ccknn_classify(np.array([[5.0], [-3.0]]), zr, [0, 0, 0], 2)
    assert np.array_equal(pred, [0, 0])
    post = ccknn_posterior(np.array([[5.0]]), zr, [0, 0, 0], 2)
    assert np.array_equal(post.scores, [[1.0]])


def test_ccknn_class_smaller_than_k():
    zr = np.array([[0.0], [1.0], [2.0]])
    with pytest.raises(FeasibilityError, match="class 1 has 1"):
        ccknn_classify(np.array([[0.0]]), zr, [0, 0, 1], 2)


def test_ccknn_priors_validation():
    zr = np.array([[0.0], [1.0]])
    zq = np.array([[0.5]])
    with pytest.raises(ConfigError, match="one entry per reference class"):
        ccknn_classify(zq, zr, [0, 1], 1, priors=np.array([0.5, 0.3, 0.2]))
    with pytest.raises(ConfigError, match="strictly positive"):
        ccknn_classify(zq, zr, [0, 1], 1, priors=np.array([1.0, 0.0]))
    with pytest.raises(ConfigError, match="sum to 1"):
        ccknn_classify(zq, zr, [0, 1], 1, priors=np.array([0.6, 0.6]))
    with pytest.raises(ConfigError, match="mode must be one of"):
        ccknn_classify(zq, zr, [0, 1], 1, mode="mahalanobis")


# -------------------------------------------------------------- ccknn_posterior


def test_posterior_equidistant_classes_split_evenly():
    zr = np.eye(4)
    post = ccknn_posterior(np.zeros((1, 4)), zr, [0, 1, 2, 3], 1)
    assert np.max(np.abs(post.scores - 0.25)) < 1e-12


def test_posterior_rows_sum_to_one_and_argmax_matches_classify():
    for seed in range(4):
        zq, zr, labels = _grid_instance(45, 20, 3, 3, seed)
        for mode in ("eq15", "alg2_gaussian"):
            pred, _ = ccknn_classify(zq, zr, labels, 3, mode=mode)
            post = ccknn_posterior(zq, zr, labels, 3, mode=mode)
            assert np.max(np.abs(post.scores.sum(axis=1) - 1.0)) < 1e-12
            assert np.array_equal(post.predicted, pred)
            assert np.array_equal(post.class_ids[np.argmax(post.scores, axis=1)], pred)


def test_posterior_stable_under_huge_distance_gaps():
    # score gaps of ~1e4 would overflow a naive softmax
    zr = np.array([[0.0], [100.0], [0.5], [100.5]])
    labels = [0, 0, 1, 1]
    post = ccknn_posterior(np.array([[0.1]]), zr, labels, 2, priors=uniform_priors(2))
    assert np.all(np.isfinite(post.scores))
    assert abs(post.scores.sum() - 1.0) < 1e-12
    assert post.scores[0, 0] > 0.999


# --------------------------------------------------------------- gaussian mode


def test_gaussian_mode_agrees_with_eq15_under_uniform_priors():
    for seed in range(5):
        zq, zr, labels = _grid_instance(60, 30, 4, 3, seed)
        zq = zq + 0.01  # keep queries off the reference grid
        a, _ = ccknn_classify(zq, zr, labels, 3, priors=uniform_priors(3), mode="eq15")
        b, _ = ccknn_classify(
            zq, zr, labels, 3, priors=uniform_priors(3), mode="alg2_gaussian"
        )
        assert np.array_equal(a, b)


def test_gaussian_mode_zero_variance_falls_back():
    # the first query coincides with every reference, pooling zero variance
    zq = np.array([[0.0, 0.0], [5.0, 0.0]])
    zr = np.zeros((2, 2))
    labels = [0, 1]
    with pytest.warns(UserWarning, match="pooled distance variance is zero"):
        pred, _ = ccknn_classify(zq, zr, labels, 1, mode="alg2_gaussian")
    with pytest.warns(UserWarning):
        post = ccknn_posterior(zq, zr, labels, 1, mode="alg2_gaussian")
    want, _ = ccknn_classify(zq, zr, labels, 1, mode="eq15")
    assert np.array_equal(pred, want)
    assert np.array_equal(post.predicted, want)
    assert np.all(np.isfinite(post.scores))
