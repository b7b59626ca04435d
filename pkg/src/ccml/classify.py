"""Decision rules on embedded data: plain k-NN voting and the class-conditional
rule that scores every class by its own k nearest neighbours.

The class-conditional rule has two scoring modes. ``eq15`` (the default)
scores class c by the negated sum of the k squared distances plus the log
prior, so with uniform priors the prediction is the class whose k-NN set is
closest overall. ``alg2_gaussian`` converts to plain distances, pools their
variance across classes (second moment about zero), scores each class by the
Gaussian log-likelihood of its k distances plus the log prior, and agrees
with ``eq15`` under uniform priors; a zero pooled variance falls back to the
``eq15`` ranking with a warning.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from ._numeric import softmax_rows
from .errors import ConfigError, FeasibilityError
from .knn import knn_per_class, pairwise_sqdist

CCKNN_MODES = ("eq15", "alg2_gaussian")


@dataclass(frozen=True)
class ClassScores:
    """Per-query, per-class scores and the argmax labels derived from them.
    Ties go to the lowest class id."""

    class_ids: np.ndarray
    scores: np.ndarray
    predicted: np.ndarray


def _priors_vector(priors, labels_ref, classes):
    counts = np.bincount(labels_ref, minlength=int(classes[-1]) + 1)[classes]
    if priors is None:
        return counts / counts.sum()
    p = np.asarray(priors, dtype=np.float64)
    if p.shape != (classes.size,):
        raise ConfigError(
            f"priors must have one entry per reference class ({classes.size}), "
            f"got shape {p.shape}"
        )
    if np.any(p <= 0):
        raise ConfigError("priors must be strictly positive")
    if abs(float(p.sum()) - 1.0) > 1e-8:
        raise ConfigError("priors must sum to 1")
    return p


def uniform_priors(num_classes: int) -> np.ndarray:
    return np.full(num_classes, 1.0 / num_classes)


def knn_classify(
    z_query: np.ndarray,
    z_ref: np.ndarray,
    labels_ref: np.ndarray,
    k: int,
    exclude_self: bool = False,
) -> np.ndarray:
    """Majority vote among the k globally nearest reference points.

    Vote ties are broken by the smaller summed squared distance among the tied
    classes, then by the lower class id. ``exclude_self`` treats query row i
    and reference row i as the same point (for leave-one-out evaluation).
    """
    labels_ref = np.asarray(labels_ref, dtype=np.int64)
    d = pairwise_sqdist(z_query, z_ref)
    if exclude_self:
        if d.shape[0] != d.shape[1]:
            raise ConfigError("exclude_self requires queries == references")
        np.fill_diagonal(d, np.inf)
    available = d.shape[1] - (1 if exclude_self else 0)
    if available < k:
        raise FeasibilityError(
            f"k={k} neighbours requested but only {available} references available"
        )
    order = np.argsort(d, axis=1, kind="stable")[:, :k]
    nbr_labels = labels_ref[order]
    nbr_sq = np.take_along_axis(d, order, axis=1)

    n_classes = int(labels_ref.max()) + 1
    out = np.empty(d.shape[0], dtype=np.int64)
    for i in range(d.shape[0]):
        votes = np.bincount(nbr_labels[i], minlength=n_classes)
        top = votes.max()
        tied = np.flatnonzero(votes == top)
        if tied.size == 1:
            out[i] = tied[0]
            continue
        totals = np.array(
            [nbr_sq[i][nbr_labels[i] == c].sum() for c in tied]
        )
        # smallest summed distance wins; argmin resolves leftover ties to the lower id
        out[i] = tied[int(np.argmin(totals))]
    return out


def _ccknn_scores(z_query, z_ref, labels_ref, k, priors, mode):
    if mode not in CCKNN_MODES:
        raise ConfigError(f"mode must be one of {CCKNN_MODES}, got {mode!r}")
    labels_ref = np.asarray(labels_ref, dtype=np.int64)
    ns = knn_per_class(z_query, z_ref, labels_ref, k)
    classes = ns.class_ids
    p = _priors_vector(priors, labels_ref, classes)
    log_prior = np.log(p)
    sum_sq = ns.sq_distances.sum(axis=2)

    if mode == "eq15":
        scores = -sum_sq + log_prior[None, :]
    else:
        # plain distances; pooled per-query variance = mean squared distance
        # over all C*k collected values (densities centred at zero)
        sigma_sq = sum_sq.sum(axis=1) / (classes.size * k)
        degenerate = sigma_sq <= 0.0
        safe = np.where(degenerate, 1.0, sigma_sq)
        loglik = -0.5 * k * np.log(2.0 * math.pi * safe)[:, None] - sum_sq / (
            2.0 * safe[:, None]
        )
        scores = loglik + log_prior[None, :]
        if np.any(degenerate):
            warnings.warn(
                "pooled distance variance is zero for some queries; "
                "falling back to the squared-distance ranking",
                UserWarning,
                stacklevel=3,
            )
            scores[degenerate] = -sum_sq[degenerate]
    return classes, scores


def ccknn_classify(
    z_query: np.ndarray,
    z_ref: np.ndarray,
    labels_ref: np.ndarray,
    k: int,
    priors: np.ndarray | None = None,
    mode: str = "eq15",
):
    """Class-conditional k-NN prediction.

    ``priors`` defaults to the reference class frequencies; pass
    ``uniform_priors(C)`` for the pure distance rule. Returns
    (predicted labels, ClassScores).
    """
    classes, scores = _ccknn_scores(z_query, z_ref, labels_ref, k, priors, mode)
    predicted = classes[np.argmax(scores, axis=1)]
    return predicted, ClassScores(class_ids=classes, scores=scores, predicted=predicted)


def ccknn_posterior(
    z_query: np.ndarray,
    z_ref: np.ndarray,
    labels_ref: np.ndarray,
    k: int,
    priors: np.ndarray | None = None,
    mode: str = "eq15",
) -> ClassScores:
    """Per-class posterior probabilities: the softmax of the score vector.

    The argmax always equals the ``ccknn_classify`` prediction.
    """
    classes, scores = _ccknn_scores(z_query, z_ref, labels_ref, k, priors, mode)
    probs = softmax_rows(scores)
    predicted = classes[np.argmax(probs, axis=1)]
    return ClassScores(class_ids=classes, scores=probs, predicted=predicted)
