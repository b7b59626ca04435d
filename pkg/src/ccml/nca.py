"""Neighbourhood components analysis baseline.

Selection probabilities over all batch pairs,

    p_i(j) = exp(-||Ax_i - Ax_j||^2) / sum_{l != i} exp(-||Ax_i - Ax_l||^2),
    p_i(i) = 0,

and the objective is the summed same-class selection mass
L(A) = sum_i sum_{j in class(i)} p_i(j). The analytic gradient differentiates
through both points of every pair. Training reuses the CCML mini-batch loop
(configured by the same TrainConfig; ``k``, ``variant`` and ``gradient_mode``
do not enter the objective and only shape the stratified sampler).
"""

from __future__ import annotations

import numpy as np

from .dataset import LabeledDataset, MiniBatch
from .knn import pairwise_sqdist
from .metric import LinearMetric
from .ccml import TrainConfig, run_minibatch_ascent


def _select_probs(a: np.ndarray, batch: MiniBatch) -> np.ndarray:
    z = batch.features @ a.T
    e = -pairwise_sqdist(z, z)
    np.fill_diagonal(e, -np.inf)
    e -= e.max(axis=1, keepdims=True)  # stabilize; rows have >= 1 finite entry
    p = np.exp(e)
    p /= p.sum(axis=1, keepdims=True)
    return p


def nca_select_probs(m: LinearMetric, batch: MiniBatch) -> np.ndarray:
    """The (batch, batch) matrix of selection probabilities; zero diagonal,
    rows sum to 1."""
    return _select_probs(m.a, batch)


def nca_objective(m: LinearMetric, batch: MiniBatch) -> float:
    """Summed probability of selecting a same-class neighbour."""
    p = _select_probs(m.a, batch)
    same = batch.labels[:, None] == batch.labels[None, :]
    np.fill_diagonal(same, False)
    return float(p[same].sum())


def _nca_terms(a: np.ndarray, batch: MiniBatch):
    p = _select_probs(a, batch)
    same = batch.labels[:, None] == batch.labels[None, :]
    np.fill_diagonal(same, False)
    p_true = (p * same).sum(axis=1)
    return p, same, p_true


def nca_gradient(m: LinearMetric, batch: MiniBatch, weight_decay: float = 0.0) -> np.ndarray:
    """dL/dA. With w_ij = p_ij (p_i - [same class]) and M_ij the outer product
    of x_i - x_j, dL/dA = 2 A sum_ij w_ij M_ij, contracted via the
    symmetrized-Laplacian identity."""
    p, same, p_true = _nca_terms(m.a, batch)
    g = _assemble_gradient(m.a, batch.features, p, same, p_true, weight_decay)
    return g


def _assemble_gradient(a, x, p, same, p_true, weight_decay):
    w = p * p_true[:, None] - p * same
    s = w + w.T
    quad = (x * s.sum(axis=1)[:, None]).T @ x - x.T @ (s @ x)
    g = 2.0 * (a @ quad)
    if weight_decay:
        g = g - 2.0 * weight_decay * a
    return g


def _nca_step(a: np.ndarray, batch: MiniBatch, cfg: TrainConfig):
    p, same, p_true = _nca_terms(a, batch)
    g = _assemble_gradient(a, batch.features, p, same, p_true, cfg.weight_decay)
    obj = float(p_true.sum() - cfg.weight_decay * np.sum(a * a))
    return obj, float(p_true.mean()), g


def nca_train(ds: LabeledDataset, cfg: TrainConfig, pca=None):
    """Learn a linear metric by mini-batch ascent on the NCA objective.
    Returns (LinearMetric, TrainTrace)."""
    return run_minibatch_ascent(ds, cfg, _nca_step, pca=pca)
