"""Error rates, nDCG retrieval quality, and retrieval curves over a k grid."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .classify import knn_classify
from .dataset import LabeledDataset
from .errors import ConfigError, ShapeError
from .knn import pairwise_sqdist
from .metric import LinearMetric, embed


def error_rate(predicted: np.ndarray, truth: np.ndarray) -> float:
    """Fraction of mismatched labels."""
    predicted = np.asarray(predicted)
    truth = np.asarray(truth)
    if predicted.shape != truth.shape or predicted.ndim != 1 or predicted.size == 0:
        raise ShapeError("predicted and truth must be equal-length non-empty vectors")
    return float(np.mean(predicted != truth))


def ndcg_at_k(relevances, k: int) -> float:
    """Normalized discounted cumulative gain of a ranked binary relevance list.

    DCG_k = sum_{i=1..k} (2^rel_i - 1) / log2(i + 1). The ideal DCG places the
    available relevant items (counted over the whole list, capped at k) at the
    top. Returns 0 when nothing relevant is available.
    """
    rel = np.asarray(relevances, dtype=np.float64).ravel()
    if k < 1:
        raise ConfigError("k must be >= 1")
    if rel.size < k:
        raise ConfigError(f"relevance list has {rel.size} entries, need >= k={k}")
    dcg = 0.0
    for i in range(k):
        dcg += (2.0 ** rel[i] - 1.0) / math.log2(i + 2)
    n_relevant = int(np.count_nonzero(rel))
    if n_relevant == 0:
        return 0.0
    idcg = 0.0
    for i in range(min(k, n_relevant)):
        idcg += 1.0 / math.log2(i + 2)
    return dcg / idcg


@dataclass(frozen=True)
class RetrievalCurve:
    """Mean nDCG at each k of a grid; optionally the per-query values."""

    ks: np.ndarray
    mean_ndcg: np.ndarray
    per_query: np.ndarray | None = None

    def to_csv(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("k,mean_ndcg\n")
            for k, v in zip(self.ks, self.mean_ndcg):
                fh.write(f"{int(k)},{float(v)!r}\n")


def retrieval_curve(
    m: LinearMetric,
    query_ds: LabeledDataset,
    ref_ds: LabeledDataset,
    k_grid,
    keep_per_query: bool = False,
) -> RetrievalCurve:
    """Mean nDCG over queries for each k, ranking references by embedded
    distance (ties toward the smaller reference index); an item is relevant
    when its class matches the query's."""
    ks = np.asarray(sorted(int(k) for k in k_grid), dtype=np.int64)
    if ks.size == 0 or ks[0] < 1:
        raise ConfigError("k_grid must contain positive integers")
    if ks[-1] > ref_ds.num_points:
        raise ConfigError(
            f"k={int(ks[-1])} exceeds the {ref_ds.num_points} reference points"
        )
    zq = embed(m, query_ds.features)
    zr = embed(m, ref_ds.features)
    order = np.argsort(pairwise_sqdist(zq, zr), axis=1, kind="stable")
    rel = (ref_ds.labels[order] == query_ds.labels[:, None]).astype(np.float64)

    # vectorized transcription of ndcg_at_k for binary relevance
    discounts = 1.0 / np.log2(np.arange(2, rel.shape[1] + 2))
    dcg_cum = np.cumsum(rel * discounts[None, :], axis=1)
    ideal_cum = np.cumsum(discounts)
    n_rel = rel.sum(axis=1).astype(np.int64)
    per_query = np.zeros((rel.shape[0], ks.size))
    for col, k in enumerate(ks):
        cap = np.minimum(n_rel, int(k))
        has = cap > 0
        per_query[has, col] = dcg_cum[has, k - 1] / ideal_cum[cap[has] - 1]
    return RetrievalCurve(
        ks=ks,
        mean_ndcg=per_query.mean(axis=0),
        per_query=per_query if keep_per_query else None,
    )


def loo_knn_error(z: np.ndarray, labels: np.ndarray, k: int = 1) -> float:
    """Leave-one-out k-NN error within one embedded set."""
    return error_rate(knn_classify(z, z, labels, k, exclude_self=True), labels)
