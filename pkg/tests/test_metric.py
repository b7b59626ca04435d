"""Linear metric: embedding, squared distance, initialization."""

import math

import numpy as np
import pytest

from ccml import (
    ConfigError,
    DataError,
    InitSpec,
    LinearMetric,
    ShapeError,
    apply_pca,
    embed,
    fit_pca,
    identity_metric,
    init_metric,
    sq_distance,
)


def test_metric_matrix_validation():
    with pytest.raises(DataError):
        LinearMetric(np.array([1.0, 2.0]))
    with pytest.raises(DataError):
        LinearMetric(np.array([[np.inf, 0.0]]))
    m = LinearMetric([[1, 2], [3, 4]])
    assert m.a.dtype == np.float64
    assert (m.output_dim, m.input_dim) == (2, 2)


def test_embed_identity_echoes_input():
    rng = np.random.default_rng(0)
    x = rng.standard_normal((7, 4))
    assert np.array_equal(embed(identity_metric(4), x), x)


def test_embed_scaling_and_zero_row():
    m = LinearMetric(2.0 * np.eye(2))
    assert embed(m, np.array([[1.0, 1.0]])).tolist() == [[2.0, 2.0]]
    m0 = LinearMetric(np.array([[1.0, 0.0], [0.0, 0.0]]))
    out = embed(m0, np.random.default_rng(1).standard_normal((5, 2)))
    assert np.all(out[:, 1] == 0.0)


def test_embed_shape_errors():
    m = identity_metric(3)
    with pytest.raises(ShapeError):
        embed(m, np.zeros((4, 2)))
    with pytest.raises(ShapeError):
        embed(m, np.zeros(3))


def test_sq_distance_trivial_cases():
    m = identity_metric(2)
    assert sq_distance(m, [1.0, 2.0], [1.0, 2.0]) == 0.0
    assert sq_distance(m, [0.0, 0.0], [3.0, 4.0]) == 25.0


def test_sq_distance_matches_quadratic_form():
    rng = np.random.default_rng(2)
    for _ in range(20):
        a = rng.standard_normal((3, 5))
        x = rng.standard_normal(5)
        y = rng.standard_normal(5)
        direct = float((x - y) @ a.T @ a @ (x - y))
        assert abs(sq_distance(LinearMetric(a), x, y) - direct) < 1e-10


def test_sq_distance_shape_error():
    with pytest.raises(ShapeError):
        sq_distance(identity_metric(3), [1.0, 2.0], [1.0, 2.0, 3.0])


def test_pseudo_metric_axioms():
    rng = np.random.default_rng(3)
    for trial in range(30):
        a = rng.standard_normal((rng.integers(1, 4), 4))
        m = LinearMetric(a)
        x, y, w = rng.standard_normal((3, 4))
        dxy = sq_distance(m, x, y)
        assert dxy >= 0.0
        assert abs(dxy - sq_distance(m, y, x)) < 1e-12
        assert sq_distance(m, x, x) == 0.0
        # triangle inequality on the square roots
        assert math.sqrt(sq_distance(m, x, w)) <= (
            math.sqrt(dxy) + math.sqrt(sq_distance(m, y, w)) + 1e-12
        )


def test_rotation_leaves_distances_unchanged():
    rng = np.random.default_rng(4)
    for _ in range(10):
        a = rng.standard_normal((3, 6))
        q = np.linalg.qr(rng.standard_normal((3, 3)))[0]
        m, mq = LinearMetric(a), LinearMetric(q @ a)
        x, y = rng.standard_normal((2, 6))
        assert abs(sq_distance(m, x, y) - sq_distance(mq, x, y)) < 1e-8


def test_init_identity_truncated():
    m = init_metric(3, 2, InitSpec(kind="identity_truncated"))
    assert m.a.tolist() == [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]]
    with pytest.raises(ConfigError):
        init_metric(2, 3, InitSpec(kind="identity_truncated"))


def test_init_gaussian_deterministic_and_scaled():
    a = init_metric(5, 3, InitSpec(kind="scaled_gaussian", sd=0.3, seed=11))
    b = init_metric(5, 3, InitSpec(kind="scaled_gaussian", sd=0.3, seed=11))
    c = init_metric(5, 3, InitSpec(kind="scaled_gaussian", sd=0.3, seed=12))
    assert np.array_equal(a.a, b.a)
    assert not np.array_equal(a.a, c.a)
    wide = init_metric(400, 50, InitSpec(kind="scaled_gaussian", sd=0.3, seed=0))
    assert abs(float(wide.a.std()) - 0.3) < 0.01


def test_init_gaussian_default_sd_is_inverse_sqrt_dim():
    a = init_metric(16, 2, InitSpec(kind="scaled_gaussian", seed=3))
    b = init_metric(16, 2, InitSpec(kind="scaled_gaussian", sd=0.25, seed=3))
    assert np.array_equal(a.a, b.a)
    with pytest.raises(ConfigError):
        init_metric(4, 2, InitSpec(kind="scaled_gaussian", sd=0.0))


def test_init_pca_seeded_reproduces_projection():
    rng = np.random.default_rng(5)
    basis = rng.standard_normal((2, 6))
    x = rng.standard_normal((50, 2)) @ basis
    pca = fit_pca(x, n_components=2)
    m = init_metric(6, 2, InitSpec(kind="pca_seeded"), pca=pca)
    centred = x - pca.mean
    assert np.allclose(embed(m, centred), apply_pca(pca, x), atol=1e-8)


def test_init_pca_seeded_validation():
    x = np.random.default_rng(6).standard_normal((20, 4))
    pca = fit_pca(x, n_components=2)
    with pytest.raises(ConfigError):
        init_metric(4, 2, InitSpec(kind="pca_seeded"))  # pca missing
    with pytest.raises(ConfigError):
        init_metric(4, 2, InitSpec(kind="scaled_gaussian"), pca=pca)  # pca unused
    with pytest.raises(ConfigError):
        init_metric(4, 3, InitSpec(kind="pca_seeded"), pca=pca)  # too few components
    with pytest.raises(ShapeError):
        init_metric(5, 2, InitSpec(kind="pca_seeded"), pca=pca)  # dim mismatch


def test_init_rejects_unknown_kind_and_bad_dims():
    with pytest.raises(ConfigError):
        init_metric(3, 2, InitSpec(kind="orthogonal"))
    with pytest.raises(ConfigError):
        init_metric(0, 2, InitSpec())
    with pytest.raises(ConfigError):
        init_metric(3, 0, InitSpec())
