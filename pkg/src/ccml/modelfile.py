"""Model persistence: a human-readable JSON file with canonical layout.

Keys are written in sorted order, floats with 17 significant digits (enough
to round-trip float64 exactly), so loading a file and saving it again
reproduces the bytes. ``format_version`` guards against schema drift.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ModelFormatError
from .metric import LinearMetric
from .preprocess import PcaModel

FORMAT_VERSION = 1


@dataclass
class ModelFile:
    """Everything needed to re-run an experiment: the metric, the optional
    PCA, the resolved training configuration, and the training-data hash."""

    metric: LinearMetric
    pca: PcaModel | None = None
    train_config: dict = field(default_factory=dict)
    dataset_fingerprint: str = ""
    class_names: list[str] | None = None
    format_version: int = FORMAT_VERSION


def _fmt_float(v: float) -> str:
    if not math.isfinite(v):
        raise ModelFormatError("model files cannot contain NaN or Inf")
    text = format(float(v), ".17g")
    if "." not in text and "e" not in text and "n" not in text:
        text += ".0"
    return text


def _write(value, indent: int, out: list) -> None:
    pad = "  " * indent
    if value is None:
        out.append("null")
    elif isinstance(value, bool):
        out.append("true" if value else "false")
    elif isinstance(value, (int, np.integer)):
        out.append(str(int(value)))
    elif isinstance(value, (float, np.floating)):
        out.append(_fmt_float(value))
    elif isinstance(value, str):
        out.append(json.dumps(value))
    elif isinstance(value, dict):
        if not value:
            out.append("{}")
            return
        out.append("{\n")
        keys = sorted(value)
        for i, key in enumerate(keys):
            if not isinstance(key, str):
                raise ModelFormatError("model file keys must be strings")
            out.append(f"{pad}  {json.dumps(key)}: ")
            _write(value[key], indent + 1, out)
            out.append(",\n" if i < len(keys) - 1 else "\n")
        out.append(pad + "}")
    elif isinstance(value, (list, tuple, np.ndarray)):
        items = list(np.asarray(value).tolist()) if isinstance(value, np.ndarray) else list(value)
        if not items:
            out.append("[]")
            return
        out.append("[\n")
        for i, item in enumerate(items):
            out.append(pad + "  ")
            _write(item, indent + 1, out)
            out.append(",\n" if i < len(items) - 1 else "\n")
        out.append(pad + "]")
    else:
        raise ModelFormatError(f"cannot serialize {type(value).__name__} into a model file")


def canonical_dumps(value) -> str:
    """Serialize to the canonical text format (sorted keys, 17-digit floats)."""
    out: list = []
    _write(value, 0, out)
    out.append("\n")
    return "".join(out)


def _to_payload(model: ModelFile) -> dict:
    payload = {
        "format_version": model.format_version,
        "class_names": model.class_names,
        "dataset_fingerprint": model.dataset_fingerprint,
        "metric": {"a": model.metric.a},
        "train_config": model.train_config,
    }
    if model.pca is None:
        payload["pca"] = None
    else:
        payload["pca"] = {
            "mean": model.pca.mean,
            "components": model.pca.components,
            "explained_variance": model.pca.explained_variance,
            "variance_fraction_retained": model.pca.variance_fraction_retained,
        }
    return payload


def save_model(model: ModelFile, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(canonical_dumps(_to_payload(model)))


def load_model(path) -> ModelFile:
    with open(path, encoding="utf-8") as fh:
        try:
            payload = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ModelFormatError(f"{path}: not a valid model file ({exc})") from None
    if not isinstance(payload, dict) or "format_version" not in payload:
        raise ModelFormatError(f"{path}: missing format_version")
    version = payload["format_version"]
    if version != FORMAT_VERSION:
        raise ModelFormatError(
            f"{path}: format_version {version} is not supported "
            f"(this build reads version {FORMAT_VERSION})"
        )
    try:
        metric = LinearMetric(np.asarray(payload["metric"]["a"], dtype=np.float64))
        pca_raw = payload.get("pca")
        pca = None
        if pca_raw is not None:
            pca = PcaModel(
                mean=np.asarray(pca_raw["mean"], dtype=np.float64),
                components=np.asarray(pca_raw["components"], dtype=np.float64),
                explained_variance=np.asarray(
                    pca_raw["explained_variance"], dtype=np.float64
                ),
                variance_fraction_retained=float(
                    pca_raw["variance_fraction_retained"]
                ),
            )
    except (KeyError, TypeError, ValueError) as exc:
        raise ModelFormatError(f"{path}: malformed model payload ({exc})") from None
    return ModelFile(
        metric=metric,
        pca=pca,
        train_config=payload.get("train_config") or {},
        dataset_fingerprint=payload.get("dataset_fingerprint", ""),
        class_names=payload.get("class_names"),
        format_version=int(version),
    )


def fingerprint_file(path) -> str:
    """Content hash of a data file, recorded alongside trained models."""
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            digest.update(chunk)
    return "sha256:" + digest.hexdigest()
