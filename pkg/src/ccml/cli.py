"""Command-line interface.

Subcommands: synth (generate the Sandwich set), train, eval, retrieve, embed,
sweep. Every command is deterministic given its flags; exit codes are 0 on
success, 2 for usage/config problems, 3 for data problems, 4 when training
diverges.
"""

from __future__ import annotations

import argparse
import csv
import itertools
import json
import math
import os
import sys

import numpy as np

from . import ccml as learner_ccml
from . import nca as learner_nca
from .classify import ccknn_classify, knn_classify, uniform_priors
from .dataset import (
    LabeledDataset,
    SplitSpec,
    generate_sandwich,
    load_csv,
    relabel,
    save_csv,
    split,
)
from .errors import (
    CcmlError,
    ConfigError,
    DataError,
    ShapeError,
    TrainingDivergedError,
)
from .evaluate import error_rate, retrieval_curve
from .knn import pairwise_sqdist
from .metric import InitSpec, LinearMetric, embed, identity_metric
from .modelfile import ModelFile, fingerprint_file, load_model, save_model
from .preprocess import apply_pca, fit_pca

LEARNERS = ("ccml", "ccml-local", "nca")


def _parse_label_column(text: str):
    """Digit strings select a 0-based column index, anything else a header name."""
    stripped = text.strip()
    if stripped.lstrip("-").isdigit():
        return int(stripped)
    return stripped


def _parse_grid(text: str) -> list[int]:
    """Either 'a:b' (inclusive range) or a comma list of integers."""
    if ":" in text:
        lo, hi = text.split(":", 1)
        lo, hi = int(lo), int(hi)
        if hi < lo:
            raise ConfigError(f"empty grid {text!r}")
        return list(range(lo, hi + 1))
    return [int(tok) for tok in text.split(",") if tok.strip()]


def _parse_float_list(text: str) -> list[float]:
    return [float(tok) for tok in text.split(",") if tok.strip()]


def _load_aligned(path, label_column, class_names):
    ds = load_csv(path, label_column)
    if class_names is not None:
        ds = relabel(ds, class_names)
    return ds


def _model_features(model: ModelFile, ds: LabeledDataset) -> np.ndarray:
    """Apply the model's stored PCA (if any) and check dimensions."""
    x = ds.features
    if model.pca is not None:
        expected = model.pca.mean.shape[0]
        if ds.num_features != expected:
            raise ShapeError(
                f"data has {ds.num_features} features but the model's PCA "
                f"expects {expected}"
            )
        x = apply_pca(model.pca, x)
    if x.shape[1] != model.metric.input_dim:
        raise ShapeError(
            f"data maps to {x.shape[1]} features but the metric expects "
            f"{model.metric.input_dim}"
        )
    return x


# ---------------------------------------------------------------------------
# synth


def cmd_synth(args) -> int:
    ds = generate_sandwich(
        n_per_class=args.per_strip * args.strips,
        classes=args.classes,
        strips_per_class=args.strips,
        noise_sd=args.noise,
        seed=args.seed,
        x_width=args.width,
    )
    save_csv(ds, args.output)
    print(
        f"wrote {args.output}: n={ds.num_points} classes={ds.num_classes} "
        f"features={ds.num_features}"
    )
    return 0


# ---------------------------------------------------------------------------
# train


_CONFIG_KEYS = (
    "learner",
    "k",
    "variant",
    "gradient_mode",
    "learning_rate",
    "epochs",
    "batch_size",
    "weight_decay",
    "output_dim",
    "init",
    "init_sd",
    "init_seed",
    "seed",
    "log_every",
    "pca",
    "pca_components",
)


def _merge_config(args) -> dict:
    """Defaults < config file < explicit flags."""
    merged: dict = {}
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as fh:
                loaded = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config file {args.config}: {exc}") from None
        if not isinstance(loaded, dict):
            raise ConfigError(f"config file {args.config} must hold a JSON object")
        unknown = sorted(set(loaded) - set(_CONFIG_KEYS))
        if unknown:
            raise ConfigError(f"unknown config keys {unknown}; known: {sorted(_CONFIG_KEYS)}")
        merged.update(loaded)
    for key in _CONFIG_KEYS:
        value = getattr(args, key, None)
        if value is not None:
            merged[key] = value
    return merged


_INIT_KINDS = {
    "identity": "identity_truncated",
    "gaussian": "scaled_gaussian",
    "pca": "pca_seeded",
}


def _resolve_training(merged: dict, ds: LabeledDataset):
    """Build (learner name, TrainConfig, fitted PCA or None, transformed dataset)."""
    learner = merged.get("learner", "ccml")
    if learner not in LEARNERS:
        raise ConfigError(f"learner must be one of {LEARNERS}, got {learner!r}")
    variant = merged.get("variant")
    if learner == "ccml-local":
        if variant not in (None, "correct_class"):
            raise ConfigError("ccml-local implies variant=correct_class")
        variant = "correct_class"
    if variant is None:
        variant = "all_classes"

    pca = None
    features = ds.features
    if merged.get("pca") is not None and merged.get("pca_components") is not None:
        raise ConfigError("give at most one of --pca and --pca-components")
    if merged.get("pca") is not None:
        pca = fit_pca(ds, retain_variance=float(merged["pca"]))
    elif merged.get("pca_components") is not None:
        pca = fit_pca(ds, n_components=int(merged["pca_components"]))
    if pca is not None:
        features = apply_pca(pca, ds.features)
    train_ds = LabeledDataset(
        features, ds.labels, class_names=ds.class_names, declared_classes=ds.num_classes
    )

    seed = int(merged.get("seed", 0))
    init_kind = merged.get("init")
    init_spec = None
    init_pca = None
    if init_kind is not None:
        if init_kind not in _INIT_KINDS:
            raise ConfigError(
                f"init must be one of {sorted(_INIT_KINDS)}, got {init_kind!r}"
            )
        kind = _INIT_KINDS[init_kind]
        if kind == "pca_seeded":
            if pca is not None:
                raise ConfigError(
                    "pca-seeded init applies to raw-feature training; "
                    "it cannot be combined with --pca/--pca-components"
                )
            dim = merged.get("output_dim") or train_ds.num_features
            init_pca = fit_pca(train_ds, n_components=int(dim))
        init_spec = InitSpec(
            kind=kind,
            sd=merged.get("init_sd"),
            seed=int(merged.get("init_seed", seed)),
        )

    defaults = learner_ccml.TrainConfig()
    cfg = learner_ccml.TrainConfig(
        k=int(merged.get("k", defaults.k)),
        variant=variant,
        gradient_mode=merged.get("gradient_mode", defaults.gradient_mode),
        learning_rate=float(merged.get("learning_rate", defaults.learning_rate)),
        epochs=int(merged.get("epochs", defaults.epochs)),
        batch_size=int(merged.get("batch_size", defaults.batch_size)),
        weight_decay=float(merged.get("weight_decay", defaults.weight_decay)),
        output_dim=(
            int(merged["output_dim"]) if merged.get("output_dim") is not None else None
        ),
        init=init_spec,
        seed=seed,
        log_every=int(merged.get("log_every", defaults.log_every)),
    )
    return learner, cfg, pca, train_ds, init_pca


def _config_echo(learner: str, cfg, ds: LabeledDataset, merged: dict) -> dict:
    init = learner_ccml.resolve_init(cfg, ds.num_features)
    return {
        "learner": learner,
        "k": cfg.k,
        "k_used_by_learner": learner != "nca",
        "variant": cfg.variant,
        "gradient_mode": cfg.gradient_mode,
        "learning_rate": cfg.learning_rate,
        "epochs": cfg.epochs,
        "batch_size": cfg.batch_size,
        "weight_decay": cfg.weight_decay,
        "output_dim": cfg.output_dim if cfg.output_dim is not None else ds.num_features,
        "init": {"kind": init.kind, "sd": init.sd, "seed": init.seed},
        "seed": cfg.seed,
        "log_every": cfg.log_every,
        "pca_retain_variance": merged.get("pca"),
        "pca_components": merged.get("pca_components"),
    }


def cmd_train(args) -> int:
    ds = load_csv(args.data, args.label_column)
    merged = _merge_config(args)
    learner, cfg, pca, train_ds, init_pca = _resolve_training(merged, ds)
    if learner == "nca":
        metric, trace = learner_nca.nca_train(train_ds, cfg, pca=init_pca)
    else:
        metric, trace = learner_ccml.train(train_ds, cfg, pca=init_pca)
    model = ModelFile(
        metric=metric,
        pca=pca,
        train_config=_config_echo(learner, cfg, train_ds, merged),
        dataset_fingerprint=fingerprint_file(args.data),
        class_names=ds.class_names,
    )
    save_model(model, args.output)
    trace_path = args.trace or os.path.splitext(args.output)[0] + ".trace.csv"
    trace.to_csv(trace_path)
    last = trace.records[-1] if trace.records else None
    summary = (
        f"objective={last.objective:.6g} mean_prob={last.mean_prob:.6g}"
        if last
        else "no steps taken"
    )
    print(
        f"wrote {args.output} (metric {metric.output_dim}x{metric.input_dim}, "
        f"{learner}); {summary}; trace: {trace_path}"
    )
    return 0


# ---------------------------------------------------------------------------
# eval


def _eval_errors(metric, ref_x, ref_y, test_x, test_y, k, mode, priors_kind):
    z_ref = embed(metric, ref_x)
    z_test = embed(metric, test_x)
    classes = np.unique(ref_y)
    priors = uniform_priors(classes.size) if priors_kind == "uniform" else None
    knn_err = error_rate(knn_classify(z_test, z_ref, ref_y, k), test_y)
    ccknn_pred, _ = ccknn_classify(z_test, z_ref, ref_y, k, priors=priors, mode=mode)
    ccknn_err = error_rate(ccknn_pred, test_y)
    return knn_err, ccknn_err


def _write_predictions(path, metric, ref_x, ref_y, test_x, k, mode, priors_kind):
    """Per-query ccknn predictions and class scores for the stored metric."""
    z_ref = embed(metric, ref_x)
    z_test = embed(metric, test_x)
    priors = uniform_priors(np.unique(ref_y).size) if priors_kind == "uniform" else None
    predicted, scores = ccknn_classify(z_test, z_ref, ref_y, k, priors=priors, mode=mode)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["query_index", "predicted"]
            + [f"score_{int(c)}" for c in scores.class_ids]
        )
        for i, pred in enumerate(predicted):
            writer.writerow(
                [i, int(pred)] + [repr(float(v)) for v in scores.scores[i]]
            )
    print(f"wrote {path}")


def cmd_eval(args) -> int:
    model = load_model(args.model)
    if (args.refs is None) == (args.cv is None):
        raise ConfigError("give exactly one of --refs and --cv")
    k = args.k if args.k is not None else int(model.train_config.get("k", 1))
    metrics = [("model", model.metric)]
    if args.baseline == "euclidean":
        metrics.append(("euclidean", identity_metric(model.metric.input_dim)))

    rows = []
    if args.refs is not None:
        ref_ds = _load_aligned(args.refs, args.label_column, model.class_names)
        test_ds = _load_aligned(args.data, args.label_column, model.class_names)
        ref_x = _model_features(model, ref_ds)
        test_x = _model_features(model, test_ds)
        for name, metric in metrics:
            knn_err, ccknn_err = _eval_errors(
                metric, ref_x, ref_ds.labels, test_x, test_ds.labels,
                k, args.ccknn_mode, args.priors,
            )
            rows.append((name, "knn", k, "", knn_err))
            rows.append((name, "ccknn", k, "", ccknn_err))
            print(f"metric={name} rule=knn k={k} error={knn_err:.4f}")
            print(f"metric={name} rule=ccknn k={k} error={ccknn_err:.4f}")
        if args.predictions:
            _write_predictions(
                args.predictions, model.metric, ref_x, ref_ds.labels,
                test_x, k, args.ccknn_mode, args.priors,
            )
    elif args.predictions:
        raise ConfigError("--predictions needs --refs (per-query output)")
    else:
        full = _load_aligned(args.data, args.label_column, model.class_names)
        folds = split(full, SplitSpec(folds=args.cv, seed=args.seed, stratified=True))
        per_metric: dict[str, dict[str, list[float]]] = {
            name: {"knn": [], "ccknn": []} for name, _ in metrics
        }
        for fold_id, (train_part, test_part) in enumerate(folds):
            ref_x = _model_features(model, train_part)
            test_x = _model_features(model, test_part)
            for name, metric in metrics:
                knn_err, ccknn_err = _eval_errors(
                    metric, ref_x, train_part.labels, test_x,
                    test_part.labels, k, args.ccknn_mode, args.priors,
                )
                per_metric[name]["knn"].append(knn_err)
                per_metric[name]["ccknn"].append(ccknn_err)
                rows.append((name, "knn", k, fold_id, knn_err))
                rows.append((name, "ccknn", k, fold_id, ccknn_err))
        for name, _ in metrics:
            for rule in ("knn", "ccknn"):
                errs = np.asarray(per_metric[name][rule])
                rows.append((name, rule, k, "mean", float(errs.mean())))
                rows.append((name, rule, k, "sd", float(errs.std(ddof=1))))
                print(
                    f"metric={name} rule={rule} k={k} folds={args.cv} "
                    f"error={errs.mean():.4f} +- {errs.std(ddof=1):.4f}"
                )

    if args.output:
        with open(args.output, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["metric", "rule", "k", "fold", "error"])
            for row in rows:
                writer.writerow([row[0], row[1], row[2], row[3], repr(float(row[4]))])
    return 0


# ---------------------------------------------------------------------------
# retrieve


def cmd_retrieve(args) -> int:
    model = load_model(args.model)
    ref_ds = _load_aligned(args.refs, args.label_column, model.class_names)
    query_ds = _load_aligned(args.data, args.label_column, model.class_names)
    ref_x = _model_features(model, ref_ds)
    query_x = _model_features(model, query_ds)
    k_grid = _parse_grid(args.k_grid)
    names = model.class_names or [str(c) for c in range(ref_ds.num_classes)]

    ref_embedded = LabeledDataset(
        ref_x, ref_ds.labels, class_names=ref_ds.class_names,
        declared_classes=ref_ds.num_classes,
    )
    query_embedded = LabeledDataset(
        query_x, query_ds.labels, class_names=query_ds.class_names,
        declared_classes=query_ds.num_classes,
    )
    curve = retrieval_curve(model.metric, query_embedded, ref_embedded, k_grid)
    curve.to_csv(args.output_prefix + ".curve.csv")

    top = args.top
    if top < 1 or top > ref_ds.num_points:
        raise ConfigError(f"--top must lie in [1, {ref_ds.num_points}]")
    zq = embed(model.metric, query_x)
    zr = embed(model.metric, ref_x)
    d = pairwise_sqdist(zq, zr)
    order = np.argsort(d, axis=1, kind="stable")[:, :top]
    sq = np.take_along_axis(d, order, axis=1)
    path = args.output_prefix + ".neighbors.csv"
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        header = (
            ["query_index", "query_label"]
            + [f"n{j + 1}" for j in range(top)]
            + [f"label{j + 1}" for j in range(top)]
            + [f"sqdist{j + 1}" for j in range(top)]
        )
        writer.writerow(header)
        for i in range(zq.shape[0]):
            writer.writerow(
                [i, names[query_ds.labels[i]]]
                + [int(j) for j in order[i]]
                + [names[ref_ds.labels[j]] for j in order[i]]
                + [repr(float(v)) for v in sq[i]]
            )
    print(
        f"wrote {path} and {args.output_prefix}.curve.csv; "
        f"mean nDCG@{int(curve.ks[-1])}={curve.mean_ndcg[-1]:.4f}"
    )
    return 0


# ---------------------------------------------------------------------------
# embed


def cmd_embed(args) -> int:
    model = load_model(args.model)
    ds = _load_aligned(args.data, args.label_column, model.class_names)
    x = _model_features(model, ds)
    z = embed(model.metric, x)
    names = model.class_names or [str(c) for c in range(ds.num_classes)]
    with open(args.output, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow([f"z{j}" for j in range(z.shape[1])] + ["label"])
        for row, y in zip(z, ds.labels):
            writer.writerow([repr(float(v)) for v in row] + [names[y]])
    print(f"wrote {args.output}: n={z.shape[0]} dims={z.shape[1]}")
    return 0


# ---------------------------------------------------------------------------
# sweep


def cmd_sweep(args) -> int:
    ds = load_csv(args.data, args.label_column)
    os.makedirs(args.output_dir, exist_ok=True)
    train_part, val_part = split(
        ds, SplitSpec(train_fraction=1.0 - args.val_fraction, stratified=True, seed=args.seed)
    )
    ks = _parse_grid(args.k_grid)
    lrs = _parse_float_list(args.lr_grid)
    dims = _parse_grid(args.dim_grid) if args.dim_grid else [None]
    wds = _parse_float_list(args.wd_grid) if args.wd_grid else [0.0]

    pca = None
    if args.pca is not None:
        pca = fit_pca(train_part, retain_variance=args.pca)
    elif args.pca_components is not None:
        pca = fit_pca(train_part, n_components=args.pca_components)

    def transformed(part):
        x = apply_pca(pca, part.features) if pca is not None else part.features
        return LabeledDataset(
            x, part.labels, class_names=part.class_names,
            declared_classes=part.num_classes,
        )

    train_t, val_t = transformed(train_part), transformed(val_part)
    summary_path = os.path.join(args.output_dir, "summary.csv")
    rows = []
    for index, (k, lr, dim, wd) in enumerate(itertools.product(ks, lrs, dims, wds)):
        cfg = learner_ccml.TrainConfig(
            k=k,
            variant="correct_class" if args.learner == "ccml-local" else "all_classes",
            learning_rate=lr,
            epochs=args.epochs,
            batch_size=args.batch_size,
            weight_decay=wd,
            output_dim=dim,
            seed=args.seed,
        )
        if args.learner == "nca":
            metric, _ = learner_nca.nca_train(train_t, cfg)
        else:
            metric, _ = learner_ccml.train(train_t, cfg)
        z_ref = embed(metric, train_t.features)
        z_val = embed(metric, val_t.features)
        knn_err = error_rate(knn_classify(z_val, z_ref, train_t.labels, k), val_t.labels)
        pred, _ = ccknn_classify(z_val, z_ref, train_t.labels, k)
        ccknn_err = error_rate(pred, val_t.labels)
        model_path = os.path.join(args.output_dir, f"model_{index:03d}.json")
        save_model(
            ModelFile(
                metric=metric,
                pca=pca,
                train_config=_config_echo(
                    args.learner, cfg, train_t,
                    {"pca": args.pca, "pca_components": args.pca_components},
                ),
                dataset_fingerprint=fingerprint_file(args.data),
                class_names=ds.class_names,
            ),
            model_path,
        )
        rows.append((index, args.learner, k, lr, metric.output_dim, wd, knn_err, ccknn_err, model_path))
        print(
            f"[{index:03d}] k={k} lr={lr:g} dim={metric.output_dim} wd={wd:g} "
            f"val_knn={knn_err:.4f} val_ccknn={ccknn_err:.4f}"
        )
    with open(summary_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["index", "learner", "k", "learning_rate", "output_dim",
             "weight_decay", "val_error_knn", "val_error_ccknn", "model_path"]
        )
        for row in rows:
            writer.writerow(
                [row[0], row[1], row[2], repr(float(row[3])), row[4],
                 repr(float(row[5])), repr(float(row[6])), repr(float(row[7])), row[8]]
            )
    best = min(rows, key=lambda r: (r[7], r[0]))
    print(f"best: model_{best[0]:03d} val_ccknn={best[7]:.4f} -> {summary_path}")
    return 0


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ccml",
        description="Class-conditional metric learning and k-NN evaluation toolkit",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate the synthetic Sandwich dataset")
    p.add_argument("--classes", type=int, default=3)
    p.add_argument("--strips", type=int, default=3, help="strips per class")
    p.add_argument("--per-strip", type=int, default=50, help="points per strip")
    p.add_argument("--noise", type=float, default=0.05, help="strip thickness (sd)")
    p.add_argument("--width", type=float, default=80.0, help="extent of x")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("train", help="learn a metric from a labelled CSV")
    p.add_argument("data")
    p.add_argument("-o", "--output", required=True, help="model file path")
    p.add_argument("--label-column", type=_parse_label_column, default="label")
    p.add_argument("--config", help="JSON file with training options")
    p.add_argument("--learner", choices=LEARNERS, default=None)
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--variant", choices=learner_ccml.VARIANTS, default=None)
    p.add_argument("--gradient-mode", dest="gradient_mode",
                   choices=learner_ccml.GRADIENT_MODES, default=None)
    p.add_argument("--lr", dest="learning_rate", type=float, default=None)
    p.add_argument("--epochs", type=int, default=None)
    p.add_argument("--batch-size", dest="batch_size", type=int, default=None)
    p.add_argument("--weight-decay", dest="weight_decay", type=float, default=None)
    p.add_argument("--dim", dest="output_dim", type=int, default=None,
                   help="output dimension of the learned map")
    p.add_argument("--init", choices=sorted(_INIT_KINDS), default=None)
    p.add_argument("--init-sd", dest="init_sd", type=float, default=None)
    p.add_argument("--init-seed", dest="init_seed", type=int, default=None)
    p.add_argument("--pca", type=float, default=None,
                   help="fit PCA retaining this variance fraction before training")
    p.add_argument("--pca-components", dest="pca_components", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--log-every", dest="log_every", type=int, default=None)
    p.add_argument("--trace", help="trace CSV path (default: alongside the model)")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("eval", help="error rates of a trained model")
    p.add_argument("data", help="test CSV")
    p.add_argument("--model", required=True)
    p.add_argument("--refs", help="reference (training) CSV")
    p.add_argument("--cv", type=int, default=None,
                   help="evaluate across stratified folds of DATA instead of --refs")
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--ccknn-mode", dest="ccknn_mode",
                   choices=("eq15", "alg2_gaussian"), default="eq15")
    p.add_argument("--priors", choices=("frequency", "uniform"), default="frequency")
    p.add_argument("--baseline", choices=("euclidean",), default=None)
    p.add_argument("--label-column", type=_parse_label_column, default="label")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--output", help="write per-row errors as CSV")
    p.add_argument("--predictions",
                   help="write per-query ccknn predictions and scores (needs --refs)")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("retrieve", help="nearest neighbours and nDCG curve")
    p.add_argument("data", help="query CSV")
    p.add_argument("--model", required=True)
    p.add_argument("--refs", required=True)
    p.add_argument("--top", type=int, default=5)
    p.add_argument("--k-grid", dest="k_grid", default="1:10")
    p.add_argument("--label-column", type=_parse_label_column, default="label")
    p.add_argument("-o", "--output-prefix", dest="output_prefix", required=True)
    p.set_defaults(func=cmd_retrieve)

    p = sub.add_parser("embed", help="project a CSV through a trained model")
    p.add_argument("data")
    p.add_argument("--model", required=True)
    p.add_argument("--label-column", type=_parse_label_column, default="label")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_embed)

    p = sub.add_parser("sweep", help="grid search over training hyperparameters")
    p.add_argument("data")
    p.add_argument("-o", "--output-dir", dest="output_dir", required=True)
    p.add_argument("--learner", choices=LEARNERS, default="ccml")
    p.add_argument("--k-grid", dest="k_grid", default="1,3")
    p.add_argument("--lr-grid", dest="lr_grid", default="0.005")
    p.add_argument("--dim-grid", dest="dim_grid", default=None)
    p.add_argument("--wd-grid", dest="wd_grid", default=None)
    p.add_argument("--epochs", type=int, default=100)
    p.add_argument("--batch-size", dest="batch_size", type=int, default=64)
    p.add_argument("--pca", type=float, default=None)
    p.add_argument("--pca-components", dest="pca_components", type=int, default=None)
    p.add_argument("--val-fraction", dest="val_fraction", type=float, default=0.3)
    p.add_argument("--label-column", type=_parse_label_column, default="label")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except TrainingDivergedError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    except (DataError, ShapeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except CcmlError as exc:  # any remaining package error
        print(f"error: {exc}", file=sys.stderr)
        return 2


def run() -> None:
    sys.exit(main())
