"""Error rates, ranked-retrieval gain, and retrieval curves."""

import csv
import math

import numpy as np
import pytest

from ccml import (
    LabeledDataset,
    RetrievalCurve,
    error_rate,
    identity_metric,
    loo_knn_error,
    ndcg_at_k,
    retrieval_curve,
)
from ccml.errors import ConfigError, ShapeError

from _oracles import naive_ndcg


def _blobs(per_class, classes, spread, seed):
    # tight well-separated clusters: every same-class point ranks before any
    # other-class point
    rng = np.random.default_rng(seed)
    centers = np.arange(classes)[:, None] * 100.0
    feats = np.vstack(
        [c + spread * rng.standard_normal((per_class, 2)) for c in centers]
    )
    labels = np.repeat(np.arange(classes), per_class)
    return LabeledDataset(feats, labels)


# ------------------------------------------------------------------ error_rate


def test_error_rate_basics():
    assert error_rate([0, 1, 2], [0, 1, 2]) == 0.0
    assert error_rate([1, 2, 0], [0, 1, 2]) == 1.0
    assert error_rate([0, 1, 1, 0], [0, 1, 0, 1]) == 0.5


def test_error_rate_invariant_under_joint_permutation():
    rng = np.random.default_rng(0)
    pred = rng.integers(0, 3, size=50)
    truth = rng.integers(0, 3, size=50)
    perm = rng.permutation(50)
    assert error_rate(pred, truth) == error_rate(pred[perm], truth[perm])


def test_error_rate_shape_errors():
    with pytest.raises(ShapeError):
        error_rate([0, 1], [0, 1, 2])
    with pytest.raises(ShapeError):
        error_rate([], [])
    with pytest.raises(ShapeError):
        error_rate([[0, 1]], [[0, 1]])


# ------------------------------------------------------------------- ndcg_at_k


def test_ndcg_all_relevant_is_one():
    assert ndcg_at_k([1, 1, 1], 3) == 1.0


def test_ndcg_nothing_relevant_is_zero():
    assert ndcg_at_k([0, 0, 0], 3) == 0.0


def test_ndcg_hand_computed_value():
    # DCG = 1 + 0.5, ideal packs both hits at the top: 1 + 1/log2(3)
    want = (1.0 + 1.0 / math.log2(4)) / (1.0 + 1.0 / math.log2(3))
    got = ndcg_at_k([1, 0, 1], 3)
    assert abs(got - want) < 1e-15
    assert abs(got - 0.9197207891481876) < 1e-15
    assert abs(naive_ndcg([1, 0, 1], 3) - got) < 1e-15


def test_ndcg_matches_slow_oracle():
    rng = np.random.default_rng(1)
    for _ in range(40):
        n = int(rng.integers(1, 12))
        rel = rng.integers(0, 2, size=n)
        k = int(rng.integers(1, n + 1))
        assert abs(ndcg_at_k(rel, k) - naive_ndcg(rel, k)) < 1e-12


def test_ndcg_relevant_items_below_k_count_toward_ideal():
    # one hit ranked last of 4 with k=2: DCG_2 = 0 but the ideal still
    # places that hit first, so the score is 0, not 0/0
    assert ndcg_at_k([0, 0, 0, 1], 2) == 0.0
    # two hits, one inside k: ideal uses min(k, total hits) = 2 slots
    want = (1.0 / math.log2(3)) / (1.0 + 1.0 / math.log2(3))
    assert abs(ndcg_at_k([0, 1, 0, 1], 2) - want) < 1e-15


def test_ndcg_unchanged_by_appending_irrelevant_items():
    rng = np.random.default_rng(2)
    for _ in range(20):
        rel = list(rng.integers(0, 2, size=6))
        k = int(rng.integers(1, 7))
        assert ndcg_at_k(rel + [0, 0, 0], k) == ndcg_at_k(rel, k)


def test_ndcg_improves_when_a_hit_moves_earlier():
    rng = np.random.default_rng(3)
    done = 0
    while done < 20:
        rel = list(rng.integers(0, 2, size=8))
        zeros = [i for i, r in enumerate(rel) if r == 0]
        ones = [j for j, r in enumerate(rel) if r == 1]
        pairs = [(i, j) for i in zeros for j in ones if i < j]
        if not pairs:
            continue
        i, j = pairs[int(rng.integers(0, len(pairs)))]
        swapped = list(rel)
        swapped[i], swapped[j] = 1, 0
        before = ndcg_at_k(rel, 8)
        after = ndcg_at_k(swapped, 8)
        assert after > before
        done += 1


def test_ndcg_validation():
    with pytest.raises(ConfigError, match="k must be >= 1"):
        ndcg_at_k([1, 0], 0)
    with pytest.raises(ConfigError, match="has 2 entries, need >= k=3"):
        ndcg_at_k([1, 0], 3)


# ------------------------------------------------------------- retrieval_curve


def test_curve_perfect_on_separated_blobs():
    ds = _blobs(12, 3, 0.1, seed=0)
    curve = retrieval_curve(identity_metric(2), ds, ds, range(1, 11))
    assert np.array_equal(curve.ks, np.arange(1, 11))
    assert np.array_equal(curve.mean_ndcg, np.ones(10))
    assert curve.per_query is None


def test_curve_single_query_matches_scalar_ndcg():
    refs = LabeledDataset([[1.0], [2.0], [3.0], [4.0]], [0, 1, 0, 1])
    query = LabeledDataset([[0.0]], [0])
    curve = retrieval_curve(identity_metric(1), query, refs, [1, 2, 3, 4], True)
    # ranked by distance the relevance reads [1, 0, 1, 0]
    for col, k in enumerate([1, 2, 3, 4]):
        want = naive_ndcg([1, 0, 1, 0], k)
        assert abs(curve.per_query[0, col] - want) < 1e-12
        assert abs(curve.mean_ndcg[col] - want) < 1e-12


def test_curve_distance_ties_resolve_to_lower_reference_index():
    refs = LabeledDataset([[1.0], [-1.0]], [1, 0])
    query = LabeledDataset([[0.0]], [0])
    curve = retrieval_curve(identity_metric(1), query, refs, [2])
    assert abs(curve.mean_ndcg[0] - 1.0 / math.log2(3)) < 1e-12


def test_curve_structure_beats_shuffled_labels():
    ds = _blobs(15, 3, 0.5, seed=4)
    shuffled = LabeledDataset(
        ds.features, np.random.default_rng(5).permutation(ds.labels)
    )
    m = identity_metric(2)
    # k=1 retrieves the query itself, always relevant, for both label sets
    good = retrieval_curve(m, ds, ds, [5, 10]).mean_ndcg
    bad = retrieval_curve(m, shuffled, shuffled, [5, 10]).mean_ndcg
    assert np.all(good > bad)


def test_curve_per_query_shape_and_grid_sorting():
    ds = _blobs(5, 2, 0.2, seed=6)
    curve = retrieval_curve(identity_metric(2), ds, ds, [7, 1, 3], True)
    assert np.array_equal(curve.ks, [1, 3, 7])
    assert curve.per_query.shape == (10, 3)
    assert np.all((curve.per_query >= 0.0) & (curve.per_query <= 1.0))


def test_curve_validation():
    ds = _blobs(4, 2, 0.2, seed=7)
    m = identity_metric(2)
    with pytest.raises(ConfigError, match="positive integers"):
        retrieval_curve(m, ds, ds, [])
    with pytest.raises(ConfigError, match="positive integers"):
        retrieval_curve(m, ds, ds, [0, 2])
    with pytest.raises(ConfigError, match="k=9 exceeds the 8 reference points"):
        retrieval_curve(m, ds, ds, [1, 9])


def test_curve_csv_round_trip(tmp_path):
    curve = RetrievalCurve(
        ks=np.array([1, 2]), mean_ndcg=np.array([1.0, 2.0 / 3.0])
    )
    path = tmp_path / "curve.csv"
    curve.to_csv(path)
    with open(path, encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["k", "mean_ndcg"]
    assert [int(r[0]) for r in rows[1:]] == [1, 2]
    assert [float(r[1]) for r in rows[1:]] == [1.0, 2.0 / 3.0]


# --------------------------------------------------------------- loo_knn_error


def test_loo_error_zero_on_separated_blobs():
    ds = _blobs(10, 2, 0.1, seed=8)
    assert loo_knn_error(ds.features, ds.labels, 1) == 0.0


def test_loo_error_hand_computed():
    # nearest neighbours: 0.0->0.1 (ok), 0.1->0.0 (ok, tie to lower index),
    # 0.2->0.1 (wrong class), 5.0->0.2 (ok)
    z = np.array([[0.0], [0.1], [0.2], [5.0]])
    assert loo_knn_error(z, np.array([0, 0, 1, 1]), 1) == 0.25
