"""Linear metrics: a P x D projection defining squared distance ||Ax - Ay||^2."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DataError, ShapeError


@dataclass(frozen=True)
class LinearMetric:
    """A linear map A with rows = output dimensions, columns = input features."""

    a: np.ndarray

    def __post_init__(self):
        a = np.ascontiguousarray(np.asarray(self.a, dtype=np.float64))
        if a.ndim != 2 or a.shape[0] < 1 or a.shape[1] < 1:
            raise DataError("metric matrix must be 2-D and non-empty")
        if not np.all(np.isfinite(a)):
            raise DataError("metric matrix contains NaN or Inf")
        object.__setattr__(self, "a", a)

    @property
    def output_dim(self) -> int:
        return self.a.shape[0]

    @property
    def input_dim(self) -> int:
        return self.a.shape[1]


@dataclass(frozen=True)
class InitSpec:
    """Initialization recipe for the metric matrix.

    kind is one of ``identity_truncated`` (first P rows of the identity),
    ``scaled_gaussian`` (iid N(0, sd^2) entries; sd defaults to 1/sqrt(D)),
    or ``pca_seeded`` (top P principal components of a fitted PCA).
    """

    kind: str = "scaled_gaussian"
    sd: float | None = None
    seed: int = 0


_KINDS = ("identity_truncated", "scaled_gaussian", "pca_seeded")


def init_metric(input_dim: int, output_dim: int, spec: InitSpec, pca=None) -> LinearMetric:
    """Build the initial P x D metric matrix per ``spec``."""
    if input_dim < 1 or output_dim < 1:
        raise ConfigError("dimensions must be >= 1")
    if spec.kind not in _KINDS:
        raise ConfigError(f"unknown init kind {spec.kind!r}; expected one of {_KINDS}")
    if (pca is not None) != (spec.kind == "pca_seeded"):
        raise ConfigError("a PCA model must be supplied exactly when kind='pca_seeded'")
    if spec.kind == "identity_truncated":
        if output_dim > input_dim:
            raise ConfigError(
                f"identity_truncated needs output_dim <= input_dim "
                f"({output_dim} > {input_dim})"
            )
        a = np.eye(output_dim, input_dim)
    elif spec.kind == "scaled_gaussian":
        sd = spec.sd if spec.sd is not None else 1.0 / math.sqrt(input_dim)
        if sd <= 0:
            raise ConfigError("scaled_gaussian sd must be positive")
        rng = np.random.default_rng(spec.seed)
        a = rng.normal(0.0, sd, size=(output_dim, input_dim))
    else:  # pca_seeded
        if pca.components.shape[1] != input_dim:
            raise ShapeError(
                f"PCA was fit on {pca.components.shape[1]}-dim data, "
                f"metric needs input_dim={input_dim}"
            )
        if output_dim > pca.components.shape[0]:
            raise ConfigError(
                f"PCA model retains {pca.components.shape[0]} components, "
                f"cannot seed output_dim={output_dim}"
            )
        a = pca.components[:output_dim].copy()
    return LinearMetric(a)


def embed(m: LinearMetric, x: np.ndarray) -> np.ndarray:
    """Project rows of ``x`` (n x D) into the metric's output space (n x P)."""
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 2:
        raise ShapeError("embed expects a 2-D matrix of row vectors")
    if x.shape[1] != m.input_dim:
        raise ShapeError(
            f"data has {x.shape[1]} features, metric expects {m.input_dim}"
        )
    return x @ m.a.T


def sq_distance(m: LinearMetric, x: np.ndarray, y: np.ndarray) -> float:
    """Squared distance ||Ax - Ay||^2 between two input-space vectors."""
    x = np.asarray(x, dtype=np.float64).ravel()
    y = np.asarray(y, dtype=np.float64).ravel()
    if x.shape != (m.input_dim,) or y.shape != (m.input_dim,):
        raise ShapeError(
            f"sq_distance expects two vectors of length {m.input_dim}, "
            f"got {x.shape} and {y.shape}"
        )
    d = m.a @ (x - y)
    return float(d @ d)


def identity_metric(dim: int) -> LinearMetric:
    """The D x D identity map; embedding equals the input (Euclidean baseline)."""
    return LinearMetric(np.eye(dim))
