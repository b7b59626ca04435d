"""PCA preprocessing: fit on training data, apply anywhere.

Components come from the SVD of the centred data matrix. No whitening is
performed; the projection only rotates and truncates.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DataError, DegenerateDataError, ShapeError

# singular values at or below this fraction of the largest count as rank-deficient
_RANK_RTOL = 1e-10


@dataclass(frozen=True)
class PcaModel:
    """Fitted PCA: feature means, orthonormal components (rows), and the
    per-component sample variances (ddof=1) of the training projection."""

    mean: np.ndarray
    components: np.ndarray
    explained_variance: np.ndarray
    variance_fraction_retained: float


def fit_pca(data, retain_variance: float | None = None, n_components: int | None = None) -> PcaModel:
    """Fit PCA on ``data`` (a LabeledDataset or an n x D matrix).

    Exactly one of ``retain_variance`` (smallest component count whose
    cumulative explained-variance ratio reaches the fraction) and
    ``n_components`` (fixed count) must be given. Component signs are
    canonicalized: the entry of largest magnitude in each component is made
    positive, so the fit is deterministic.
    """
    if (retain_variance is None) == (n_components is None):
        raise ConfigError("give exactly one of retain_variance and n_components")
    x = np.asarray(getattr(data, "features", data), dtype=np.float64)
    if x.ndim != 2:
        raise ShapeError("fit_pca expects a 2-D data matrix")
    n, d = x.shape
    if n < 2:
        raise DataError("fit_pca needs at least 2 rows")

    mean = x.mean(axis=0)
    centred = x - mean
    _, s, vt = np.linalg.svd(centred, full_matrices=False)
    if s.size == 0 or s[0] <= 0.0:
        raise DegenerateDataError("data has zero variance; PCA is undefined")
    rank = int(np.count_nonzero(s > _RANK_RTOL * s[0]))
    ev_all = (s * s) / (n - 1)
    total = float(ev_all.sum())
    ratios = np.cumsum(ev_all) / total

    if retain_variance is not None:
        f = float(retain_variance)
        if not 0.0 < f <= 1.0:
            raise ConfigError("retain_variance must lie in (0, 1]")
        # 1e-12 slack so retain_variance=1.0 resolves to the numerical rank
        p = int(np.searchsorted(ratios, f - 1e-12) + 1)
        p = min(p, rank)
    else:
        p = int(n_components)
        if not 1 <= p <= min(n - 1, d):
            raise ConfigError(
                f"n_components must lie in [1, min(n-1, D)] = "
                f"[1, {min(n - 1, d)}], got {p}"
            )

    components = vt[:p].copy()
    for row in components:
        j = int(np.argmax(np.abs(row)))
        if row[j] < 0:
            row *= -1.0
    return PcaModel(
        mean=mean,
        components=components,
        explained_variance=ev_all[:p].copy(),
        variance_fraction_retained=min(1.0, float(ratios[p - 1])),
    )


def apply_pca(model: PcaModel, x: np.ndarray) -> np.ndarray:
    """Project rows of ``x`` onto the fitted components: (x - mean) @ components.T."""
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 2 or x.shape[1] != model.mean.shape[0]:
        raise ShapeError(
            f"apply_pca expects rows of length {model.mean.shape[0]}, "
            f"got shape {x.shape}"
        )
    return (x - model.mean) @ model.components.T
