"""Class-conditional metric learning.

For a query x_i with class c_i, embed the batch with the linear map A and
collect, for every class c, the mean squared distance s_i^c from A x_i to its
k nearest embedded neighbours of class c (the query never counts itself). The
class-conditional probability is the softmax over classes of the negated
means,

    p_i^c = exp(-s_i^c) / sum_c' exp(-s_i^c'),

and training ascends the summed true-class probability

    E(A) = sum_i p_i^{c_i}  -  weight_decay * ||A||_F^2

by mini-batch gradient steps. Neighbour assignments are recomputed every step
and held fixed within it.

Two gradient modes are provided. ``full`` differentiates s_i^c through both
the query and the neighbour embeddings (pair terms (Az_i - Az_n)(x_i - x_n)^T),
which is the exact gradient of the objective for frozen assignments. The
``query_only`` mode keeps only the query-side factor, replacing
(x_i - x_n)^T by x_i^T; it is cheaper and translation-sensitive, and is kept
for comparison.

The ``correct_class`` variant replaces the softmax over all classes by a
two-way softmax between the query's own class and the pooled complement (its
k nearest neighbours among all other classes together).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from ._numeric import softmax_rows
from .dataset import LabeledDataset, MiniBatch, eligible_classes, sample_minibatch
from .errors import ConfigError, DataError, TrainingDivergedError
from .knn import knn_own_and_rest, knn_per_class
from .metric import InitSpec, LinearMetric, init_metric

VARIANTS = ("all_classes", "correct_class")
GRADIENT_MODES = ("full", "query_only")


@dataclass(frozen=True)
class TrainConfig:
    """Hyperparameters for mini-batch ascent (shared by the NCA baseline)."""

    k: int = 3
    variant: str = "all_classes"
    gradient_mode: str = "full"
    learning_rate: float = 0.005
    epochs: int = 200
    batch_size: int = 64
    weight_decay: float = 0.0
    output_dim: int | None = None  # None: keep the input dimension
    init: InitSpec | None = None  # None: scaled_gaussian, sd = 1/sqrt(D)
    seed: int = 0
    log_every: int = 10


@dataclass(frozen=True)
class TraceRecord:
    step: int
    epoch: int
    objective: float
    mean_prob: float
    grad_norm: float


@dataclass
class TrainTrace:
    """Objective / probability / gradient-norm history at logged steps."""

    records: list[TraceRecord] = field(default_factory=list)

    def to_csv(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("step,epoch,objective,mean_prob,grad_norm\n")
            for r in self.records:
                fh.write(
                    f"{r.step},{r.epoch},{r.objective!r},{r.mean_prob!r},{r.grad_norm!r}\n"
                )


def _validate_config(cfg: TrainConfig) -> None:
    if cfg.k < 1:
        raise ConfigError("k must be >= 1")
    if cfg.variant not in VARIANTS:
        raise ConfigError(f"variant must be one of {VARIANTS}, got {cfg.variant!r}")
    if cfg.gradient_mode not in GRADIENT_MODES:
        raise ConfigError(
            f"gradient_mode must be one of {GRADIENT_MODES}, got {cfg.gradient_mode!r}"
        )
    if cfg.learning_rate <= 0:
        raise ConfigError("learning_rate must be positive")
    if cfg.epochs < 0:
        raise ConfigError("epochs must be >= 0")
    if cfg.weight_decay < 0:
        raise ConfigError("weight_decay must be >= 0")
    if cfg.output_dim is not None and cfg.output_dim < 1:
        raise ConfigError("output_dim must be >= 1")
    if cfg.log_every < 1:
        raise ConfigError("log_every must be >= 1")


def resolve_init(cfg: TrainConfig, input_dim: int) -> InitSpec:
    """The initialization actually used: explicit spec, or the default
    scaled Gaussian with sd = 1/sqrt(D) seeded from the training seed."""
    if cfg.init is not None:
        spec = cfg.init
        if spec.kind == "scaled_gaussian" and spec.sd is None:
            spec = replace(spec, sd=1.0 / math.sqrt(input_dim))
        return spec
    return InitSpec(kind="scaled_gaussian", sd=1.0 / math.sqrt(input_dim), seed=cfg.seed)


# ---------------------------------------------------------------------------
# probabilities


def _all_classes_terms(a: np.ndarray, batch: MiniBatch, k: int):
    """Neighbour set, per-class probabilities over classes present in the
    batch, and each query's true-class probability."""
    z = batch.features @ a.T
    ns = knn_per_class(z, z, batch.labels, k, self_index=np.arange(batch.size))
    probs = softmax_rows(-ns.mean_sq)
    true_col = np.searchsorted(ns.class_ids, batch.labels)
    p_true = probs[np.arange(batch.size), true_col]
    return z, ns, probs, true_col, p_true


def _correct_class_terms(a: np.ndarray, batch: MiniBatch, k: int):
    """Own-class and pooled-complement neighbours plus the two-way softmax."""
    z = batch.features @ a.T
    own_idx, own_sq, rest_idx, rest_sq = knn_own_and_rest(
        z, z, batch.labels, batch.labels, k, self_index=np.arange(batch.size)
    )
    exponents = np.column_stack([-own_sq.mean(axis=1), -rest_sq.mean(axis=1)])
    p_true = softmax_rows(exponents)[:, 0]
    return z, own_idx, rest_idx, p_true


def class_probs(m: LinearMetric, batch: MiniBatch, k: int) -> np.ndarray:
    """Class-conditional probabilities p_i^c for every batch point.

    Returns a (batch, num_classes) matrix; columns of classes absent from the
    batch are zero, and each row sums to 1.
    """
    _, ns, probs, _, _ = _all_classes_terms(m.a, batch, k)
    full = np.zeros((batch.size, batch.num_classes))
    full[:, ns.class_ids] = probs
    return full


def correct_class_prob(m: LinearMetric, batch: MiniBatch, k: int) -> np.ndarray:
    """True-class probability under the two-way own-vs-rest softmax."""
    _, _, _, p_true = _correct_class_terms(m.a, batch, k)
    return p_true


def _true_class_probs(a: np.ndarray, batch: MiniBatch, cfg: TrainConfig) -> np.ndarray:
    if cfg.variant == "all_classes":
        return _all_classes_terms(a, batch, cfg.k)[4]
    return _correct_class_terms(a, batch, cfg.k)[3]


def objective(m: LinearMetric, batch: MiniBatch, cfg: TrainConfig) -> float:
    """Summed true-class probability minus the weight-decay penalty."""
    _validate_config(cfg)
    p_true = _true_class_probs(m.a, batch, cfg)
    return float(p_true.sum() - cfg.weight_decay * np.sum(m.a * m.a))


# ---------------------------------------------------------------------------
# gradient

def _pair_weight_matrix(a: np.ndarray, batch: MiniBatch, cfg: TrainConfig):
    """Accumulate the coefficient of every (query, neighbour) pair.

    For the softmax objective, d p_i^{c_i} / d s_i^c = p_i^{c_i} (p_i^c - [c = c_i]),
    so pair (i, n) with n among the k class-c neighbours of i carries that
    coefficient. The correct_class variant reduces to the same with classes
    {own, rest}: -p(1-p) on own-class pairs, +p(1-p) on complement pairs.
    Returns (weights, p_true).
    """
    w = np.zeros((batch.size, batch.size))
    rows = np.arange(batch.size)
    if cfg.variant == "all_classes":
        _, ns, probs, true_col, p_true = _all_classes_terms(a, batch, cfg.k)
        alpha = p_true[:, None] * probs
        alpha[rows, true_col] -= p_true
        np.add.at(
            w,
            (np.repeat(rows, ns.class_ids.size * cfg.k), ns.indices.reshape(-1)),
            np.repeat(alpha.reshape(-1), cfg.k),
        )
    else:
        _, own_idx, rest_idx, p_true = _correct_class_terms(a, batch, cfg.k)
        coeff = p_true * (1.0 - p_true)
        np.add.at(
            w,
            (np.repeat(rows, cfg.k), own_idx.reshape(-1)),
            np.repeat(-coeff, cfg.k),
        )
        np.add.at(
            w,
            (np.repeat(rows, cfg.k), rest_idx.reshape(-1)),
            np.repeat(coeff, cfg.k),
        )
    return w, p_true


def _contract_pairs(w, z, x, k, gradient_mode):
    """Sum_{i,n} w_in (z_i - z_n) g_n^T with g_n = (x_i - x_n) (full mode)
    or g_n = x_i (query_only), via the symmetrized-Laplacian identity."""
    if gradient_mode == "full":
        s = w + w.T
        return (2.0 / k) * ((z * s.sum(axis=1)[:, None]).T @ x - z.T @ (s @ x))
    row = w.sum(axis=1)
    v = row[:, None] * z - w @ z
    return (2.0 / k) * (v.T @ x)


def gradient(m: LinearMetric, batch: MiniBatch, cfg: TrainConfig) -> np.ndarray:
    """d objective / dA at the current metric, neighbour assignments frozen."""
    _validate_config(cfg)
    w, _ = _pair_weight_matrix(m.a, batch, cfg)
    z = batch.features @ m.a.T
    g = _contract_pairs(w, z, batch.features, cfg.k, cfg.gradient_mode)
    if cfg.weight_decay:
        g = g - 2.0 * cfg.weight_decay * m.a
    return g


def _ccml_step(a: np.ndarray, batch: MiniBatch, cfg: TrainConfig):
    w, p_true = _pair_weight_matrix(a, batch, cfg)
    z = batch.features @ a.T
    g = _contract_pairs(w, z, batch.features, cfg.k, cfg.gradient_mode)
    if cfg.weight_decay:
        g = g - 2.0 * cfg.weight_decay * a
    obj = float(p_true.sum() - cfg.weight_decay * np.sum(a * a))
    return obj, float(p_true.mean()), g


# ---------------------------------------------------------------------------
# training loop


def run_minibatch_ascent(ds: LabeledDataset, cfg: TrainConfig, step_fn, pca=None):
    """Shared SGD-ascent loop: stratified batches, trace logging, divergence check.

    ``step_fn(a, batch, cfg) -> (objective, mean_prob, gradient)`` evaluates one
    batch at the current matrix. Deterministic given ``cfg.seed``.
    """
    _validate_config(cfg)
    if ds.num_classes < 2:
        raise DataError("training needs at least 2 classes")
    input_dim = ds.num_features
    output_dim = cfg.output_dim if cfg.output_dim is not None else input_dim
    init_spec = resolve_init(cfg, input_dim)
    a = init_metric(input_dim, output_dim, init_spec, pca=pca).a.copy()

    usable = int(ds.class_counts()[eligible_classes(ds, cfg.k)].sum())
    batch_size = min(cfg.batch_size, usable)
    if batch_size < 2 * (cfg.k + 1):
        raise ConfigError(
            f"batch_size {batch_size} cannot host two classes with "
            f"k+1={cfg.k + 1} members each"
        )
    steps_per_epoch = max(1, math.ceil(usable / batch_size))

    rng = np.random.default_rng(cfg.seed)
    trace = TrainTrace()
    step = 0
    last_logged = -1
    final = (float("nan"), float("nan"), np.zeros_like(a))
    for epoch in range(cfg.epochs):
        for _ in range(steps_per_epoch):
            batch = sample_minibatch(ds, batch_size, cfg.k, rng)
            obj, mean_prob, g = step_fn(a, batch, cfg)
            if not math.isfinite(obj):
                raise TrainingDivergedError(step=step, learning_rate=cfg.learning_rate)
            if step % cfg.log_every == 0:
                trace.records.append(
                    TraceRecord(step, epoch, obj, mean_prob, float(np.linalg.norm(g)))
                )
                last_logged = step
            final = (obj, mean_prob, g)
            a = a + cfg.learning_rate * g
            step += 1
    if step > 0 and last_logged != step - 1:
        obj, mean_prob, g = final
        trace.records.append(
            TraceRecord(step - 1, cfg.epochs - 1, obj, mean_prob, float(np.linalg.norm(g)))
        )
    return LinearMetric(a), trace


def train(ds: LabeledDataset, cfg: TrainConfig, pca=None):
    """Learn a linear metric by mini-batch ascent on the class-conditional
    objective. Returns (LinearMetric, TrainTrace). ``epochs=0`` returns the
    initialization unchanged."""
    return run_minibatch_ascent(ds, cfg, _ccml_step, pca=pca)
