"""Exhaustive k-nearest-neighbour search, per class and per class complement.

All ties are broken toward the smaller reference index: candidate columns are
laid out in ascending index order and sorted with a stable sort, so equal
distances keep that order.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import FeasibilityError, ShapeError


@dataclass(frozen=True)
class NeighborSet:
    """Per-query, per-class k nearest neighbours in the embedding space.

    ``indices[q, c, j]`` is the reference row of the j-th nearest member of
    class ``class_ids[c]``; ``sq_distances`` are the matching squared
    distances, ascending along j; ``mean_sq`` is their mean over j.
    """

    class_ids: np.ndarray
    indices: np.ndarray
    sq_distances: np.ndarray
    mean_sq: np.ndarray

    @property
    def k(self) -> int:
        return self.indices.shape[2]


def pairwise_sqdist(z_query: np.ndarray, z_ref: np.ndarray) -> np.ndarray:
    """All squared Euclidean distances between query rows and reference rows.

    Uses ||q||^2 + ||r||^2 - 2 q.r; cancellation can produce tiny negative
    values, which are clamped to zero.
    """
    z_query = np.asarray(z_query, dtype=np.float64)
    z_ref = np.asarray(z_ref, dtype=np.float64)
    if z_query.ndim != 2 or z_ref.ndim != 2:
        raise ShapeError("pairwise_sqdist expects 2-D matrices")
    if z_query.shape[1] != z_ref.shape[1]:
        raise ShapeError(
            f"dimension mismatch: queries are {z_query.shape[1]}-d, "
            f"references {z_ref.shape[1]}-d"
        )
    q_sq = np.einsum("ij,ij->i", z_query, z_query)
    r_sq = np.einsum("ij,ij->i", z_ref, z_ref)
    d = q_sq[:, None] + r_sq[None, :] - 2.0 * (z_query @ z_ref.T)
    np.maximum(d, 0.0, out=d)
    if z_query is z_ref:
        np.fill_diagonal(d, 0.0)  # self-distance is exactly 0, not cancellation residue
    return d


def _masked_distances(z_query, z_ref, self_index):
    d = pairwise_sqdist(z_query, z_ref)
    if self_index is not None:
        self_index = np.asarray(self_index, dtype=np.int64)
        if self_index.shape != (d.shape[0],):
            raise ShapeError("self_index must map every query row to a reference row")
        rows = np.flatnonzero(self_index >= 0)
        d[rows, self_index[rows]] = np.inf
    return d


def _check_class_capacity(labels_ref, class_id, available, k, excluding_self):
    need = k + 1 if excluding_self else k
    if available < need:
        raise FeasibilityError(
            f"class {int(class_id)} has {available} reference members, "
            f"but k={k} neighbours are required"
            + (" after excluding the query itself" if excluding_self else "")
        )


def knn_per_class(
    z_query: np.ndarray,
    z_ref: np.ndarray,
    labels_ref: np.ndarray,
    k: int,
    self_index: np.ndarray | None = None,
) -> NeighborSet:
    """The k nearest reference points of every class, for every query.

    ``self_index`` optionally maps query rows to reference rows to exclude
    (training queries never count themselves among their own class's
    neighbours); entries < 0 exclude nothing.
    """
    labels_ref = np.asarray(labels_ref, dtype=np.int64)
    d = _masked_distances(z_query, z_ref, self_index)
    n_query = d.shape[0]
    classes = np.unique(labels_ref)
    if self_index is not None:
        excl_labels = set(
            labels_ref[i] for i in np.asarray(self_index, dtype=np.int64) if i >= 0
        )
    else:
        excl_labels = set()

    indices = np.empty((n_query, classes.size, k), dtype=np.int64)
    sq = np.empty((n_query, classes.size, k), dtype=np.float64)
    for ci, c in enumerate(classes):
        cols = np.flatnonzero(labels_ref == c)
        _check_class_capacity(labels_ref, c, cols.size, k, int(c) in excl_labels)
        sub = d[:, cols]
        order = np.argsort(sub, axis=1, kind="stable")[:, :k]
        indices[:, ci, :] = cols[order]
        sq[:, ci, :] = np.take_along_axis(sub, order, axis=1)
    return NeighborSet(
        class_ids=classes, indices=indices, sq_distances=sq, mean_sq=sq.mean(axis=2)
    )


def knn_excluding_class(
    z_query: np.ndarray,
    z_ref: np.ndarray,
    labels_ref: np.ndarray,
    excluded_class: int,
    k: int,
):
    """The k nearest reference points drawn from every class except one.

    Returns (indices, squared distances), each of shape (n_query, k) with
    distances ascending.
    """
    labels_ref = np.asarray(labels_ref, dtype=np.int64)
    cols = np.flatnonzero(labels_ref != excluded_class)
    if cols.size < k:
        raise FeasibilityError(
            f"only {cols.size} reference points outside class "
            f"{int(excluded_class)}, but k={k} neighbours are required"
        )
    d = pairwise_sqdist(z_query, z_ref)[:, cols]
    order = np.argsort(d, axis=1, kind="stable")[:, :k]
    return cols[order], np.take_along_axis(d, order, axis=1)


def knn_own_and_rest(
    z_query: np.ndarray,
    z_ref: np.ndarray,
    labels_ref: np.ndarray,
    query_labels: np.ndarray,
    k: int,
    self_index: np.ndarray | None = None,
):
    """Own-class and complement k-NN in one pass over a single sorted order.

    Equivalent to ``knn_per_class`` restricted to each query's own class plus
    ``knn_excluding_class`` of that class, but each query row is sorted once
    and scanned, instead of once per class. Returns
    (own_indices, own_sq, rest_indices, rest_sq), each (n_query, k).
    """
    labels_ref = np.asarray(labels_ref, dtype=np.int64)
    query_labels = np.asarray(query_labels, dtype=np.int64)
    d = _masked_distances(z_query, z_ref, self_index)
    if query_labels.shape != (d.shape[0],):
        raise ShapeError("query_labels must have one entry per query row")

    counts = np.bincount(labels_ref, minlength=int(query_labels.max()) + 1)
    if self_index is not None:
        excl = set(
            labels_ref[i] for i in np.asarray(self_index, dtype=np.int64) if i >= 0
        )
    else:
        excl = set()
    for c in np.unique(query_labels):
        _check_class_capacity(labels_ref, c, int(counts[c]), k, int(c) in excl)
        if labels_ref.size - int(counts[c]) < k:
            raise FeasibilityError(
                f"only {labels_ref.size - int(counts[c])} reference points outside "
                f"class {int(c)}, but k={k} neighbours are required"
            )

    order = np.argsort(d, axis=1, kind="stable")
    d_sorted = np.take_along_axis(d, order, axis=1)
    own_mask = labels_ref[order] == query_labels[:, None]
    keep_own = own_mask & (np.cumsum(own_mask, axis=1) <= k)
    rest_mask = ~own_mask
    keep_rest = rest_mask & (np.cumsum(rest_mask, axis=1) <= k)
    n_query = d.shape[0]
    own_idx = order[keep_own].reshape(n_query, k)
    own_sq = d_sorted[keep_own].reshape(n_query, k)
    rest_idx = order[keep_rest].reshape(n_query, k)
    rest_sq = d_sorted[keep_rest].reshape(n_query, k)
    return own_idx, own_sq, rest_idx, rest_sq
