"""Labelled datasets: CSV ingestion, the synthetic Sandwich set, splits, mini-batches."""

from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DataError, FeasibilityError, ParseError


@dataclass(frozen=True)
class LabeledDataset:
    """A feature matrix with one dense integer class label per row.

    Labels take values in [0, num_classes); ``class_names[i]`` is the original
    label token for class id ``i``. When ``declared_classes`` is None the class
    count is derived from the labels and every id must occur at least once
    (subsets produced by splitting may legitimately miss a class and carry the
    parent's count instead).
    """

    features: np.ndarray
    labels: np.ndarray
    class_names: list[str] | None = None
    declared_classes: int | None = None

    def __post_init__(self):
        features = np.ascontiguousarray(np.asarray(self.features, dtype=np.float64))
        labels = np.ascontiguousarray(np.asarray(self.labels, dtype=np.int64))
        if features.ndim != 2 or features.shape[0] < 1 or features.shape[1] < 1:
            raise DataError("features must be a non-empty 2-D matrix")
        if labels.shape != (features.shape[0],):
            raise DataError(
                f"labels must be a vector of length {features.shape[0]}, "
                f"got shape {labels.shape}"
            )
        if not np.all(np.isfinite(features)):
            raise DataError("features contain NaN or Inf")
        if int(labels.min()) < 0:
            raise DataError("labels must be nonnegative integers")
        derived = int(labels.max()) + 1
        if self.declared_classes is None:
            counts = np.bincount(labels, minlength=derived)
            if np.any(counts == 0):
                gap = int(np.flatnonzero(counts == 0)[0])
                raise DataError(f"class id {gap} has no members; label ids must be dense")
            num_classes = derived
        else:
            num_classes = int(self.declared_classes)
            if derived > num_classes:
                raise DataError(
                    f"label {derived - 1} outside declared class range [0, {num_classes})"
                )
        if self.class_names is not None and len(self.class_names) != num_classes:
            raise DataError(
                f"class_names has {len(self.class_names)} entries for "
                f"{num_classes} classes"
            )
        object.__setattr__(self, "features", features)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "declared_classes", num_classes)

    @property
    def num_points(self) -> int:
        return self.features.shape[0]

    @property
    def num_features(self) -> int:
        return self.features.shape[1]

    @property
    def num_classes(self) -> int:
        return self.declared_classes

    def class_counts(self) -> np.ndarray:
        return np.bincount(self.labels, minlength=self.num_classes)

    def subset(self, indices) -> "LabeledDataset":
        idx = np.asarray(indices, dtype=np.int64)
        return LabeledDataset(
            self.features[idx],
            self.labels[idx],
            class_names=self.class_names,
            declared_classes=self.num_classes,
        )


@dataclass(frozen=True)
class SplitSpec:
    """How to split a dataset: holdout when ``folds`` is None, else CV folds."""

    train_fraction: float = 0.7
    stratified: bool = True
    seed: int = 0
    folds: int | None = None


@dataclass(frozen=True)
class MiniBatch:
    """A class-stratified sample of dataset rows, in sampling order."""

    indices: np.ndarray
    features: np.ndarray
    labels: np.ndarray
    num_classes: int

    def __post_init__(self):
        if len(np.unique(self.indices)) != len(self.indices):
            raise DataError("mini-batch indices must be unique")

    @property
    def size(self) -> int:
        return len(self.indices)


def _parses_as_float(token: str) -> bool:
    try:
        float(token)
    except ValueError:
        return False
    return True


def load_csv(path, label_column) -> LabeledDataset:
    """Load a labelled dataset from CSV.

    ``label_column`` selects the label field either by header name (the file
    must then start with a header row) or by 0-based column index. With an
    index, a header row is auto-detected: the first row is skipped when any of
    its non-label cells does not parse as a number. Label tokens are mapped to
    dense class ids in order of first appearance; the original tokens are kept
    in ``class_names``.
    """
    with open(path, newline="", encoding="utf-8") as fh:
        rows = [
            (lineno, row)
            for lineno, row in enumerate(csv.reader(fh), start=1)
            if any(cell.strip() for cell in row)
        ]
    if not rows:
        raise DataError(f"{path}: file contains no data rows")

    if isinstance(label_column, str):
        header = [cell.strip() for cell in rows[0][1]]
        if label_column not in header:
            raise ConfigError(
                f"label column {label_column!r} not found in header {header}"
            )
        label_idx = header.index(label_column)
        rows = rows[1:]
    else:
        label_idx = int(label_column)
        first = rows[0][1]
        if not 0 <= label_idx < len(first):
            raise ConfigError(
                f"label column index {label_idx} out of range for "
                f"{len(first)}-field rows"
            )
        feature_cells = [c for j, c in enumerate(first) if j != label_idx]
        if not all(_parses_as_float(c) for c in feature_cells):
            rows = rows[1:]  # header row
    if not rows:
        raise DataError(f"{path}: file contains no data rows")

    arity = len(rows[0][1])
    if not 0 <= label_idx < arity:
        raise ConfigError(
            f"label column index {label_idx} out of range for {arity}-field rows"
        )
    features = np.empty((len(rows), arity - 1), dtype=np.float64)
    labels = np.empty(len(rows), dtype=np.int64)
    name_to_id: dict[str, int] = {}
    names: list[str] = []
    for i, (lineno, row) in enumerate(rows):
        if len(row) != arity:
            raise ParseError(
                f"{path}: row {lineno} has {len(row)} fields, expected {arity}"
            )
        col = 0
        for j, cell in enumerate(row):
            if j == label_idx:
                continue
            token = cell.strip()
            try:
                value = float(token)
            except ValueError:
                raise ParseError(
                    f"{path}: row {lineno}, column {j}: {cell!r} is not a number"
                ) from None
            if not math.isfinite(value):
                raise ParseError(
                    f"{path}: row {lineno}, column {j}: {cell!r} is not finite"
                )
            features[i, col] = value
            col += 1
        token = row[label_idx].strip()
        if token not in name_to_id:
            name_to_id[token] = len(names)
            names.append(token)
        labels[i] = name_to_id[token]
    return LabeledDataset(features, labels, class_names=names)


def save_csv(ds: LabeledDataset, path) -> None:
    """Write ``ds`` as CSV with header f0..f{D-1},label; floats round-trip exactly."""
    names = ds.class_names or [str(c) for c in range(ds.num_classes)]
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow([f"f{j}" for j in range(ds.num_features)] + ["label"])
        for x, y in zip(ds.features, ds.labels):
            writer.writerow([repr(float(v)) for v in x] + [names[y]])


def relabel(ds: LabeledDataset, class_names: list[str]) -> LabeledDataset:
    """Re-map ``ds`` labels onto the class-id scheme given by ``class_names``."""
    if ds.class_names is None:
        raise DataError("dataset has no class names to align")
    mapping = {}
    for name in ds.class_names:
        if name not in class_names:
            raise DataError(f"class {name!r} not present in the reference class set")
        mapping[ds.class_names.index(name)] = class_names.index(name)
    labels = np.array([mapping[y] for y in ds.labels], dtype=np.int64)
    return LabeledDataset(
        ds.features,
        labels,
        class_names=list(class_names),
        declared_classes=len(class_names),
    )


def generate_sandwich(
    n_per_class: int = 150,
    classes: int = 3,
    strips_per_class: int = 3,
    noise_sd: float = 0.05,
    seed: int = 0,
    x_width: float = 80.0,
) -> LabeledDataset:
    """Generate the 2-D Sandwich set: interleaved horizontal strips.

    Strip s (s = 0, 1, ...) is assigned class ``s mod classes``; its points get
    y ~ s + Gaussian(0, noise_sd) and x ~ uniform on [0, x_width]. Each class's
    points are spread as evenly as possible over its strips. Strip centres sit
    one unit apart, so with the default width the along-strip point spacing
    exceeds the strip spacing and a large share of Euclidean nearest neighbours
    land in an adjacent strip, which belongs to a different class.
    """
    if classes < 2:
        raise ConfigError("classes must be >= 2")
    if strips_per_class < 2:
        raise ConfigError("strips_per_class must be >= 2")
    if n_per_class < strips_per_class:
        raise ConfigError("n_per_class must be >= strips_per_class")
    if noise_sd < 0:
        raise ConfigError("noise_sd must be nonnegative")
    if x_width <= 0:
        raise ConfigError("x_width must be positive")
    rng = np.random.default_rng(seed)
    base, rem = divmod(n_per_class, strips_per_class)
    xs, ys, labs = [], [], []
    for s in range(classes * strips_per_class):
        count = base + (1 if (s // classes) < rem else 0)
        xs.append(rng.uniform(0.0, x_width, count))
        ys.append(s + noise_sd * rng.standard_normal(count))
        labs.append(np.full(count, s % classes, dtype=np.int64))
    features = np.column_stack([np.concatenate(xs), np.concatenate(ys)])
    labels = np.concatenate(labs)
    return LabeledDataset(features, labels, class_names=[str(c) for c in range(classes)])


def _holdout(ds: LabeledDataset, spec: SplitSpec):
    if not 0.0 < spec.train_fraction < 1.0:
        raise ConfigError("train_fraction must lie strictly between 0 and 1")
    counts = ds.class_counts()
    small = np.flatnonzero(counts < 2)
    if small.size:
        raise DataError(
            f"class {int(small[0])} has {int(counts[small[0]])} members; "
            "holdout split needs at least 2 per class"
        )
    rng = np.random.default_rng(spec.seed)
    if spec.stratified:
        train_parts, test_parts = [], []
        for c in range(ds.num_classes):
            members = rng.permutation(np.flatnonzero(ds.labels == c))
            # round half up, then keep both sides non-empty
            n_train = int(math.floor(spec.train_fraction * len(members) + 0.5))
            n_train = min(max(n_train, 1), len(members) - 1)
            train_parts.append(members[:n_train])
            test_parts.append(members[n_train:])
        train_idx = np.concatenate(train_parts)
        test_idx = np.concatenate(test_parts)
    else:
        order = rng.permutation(ds.num_points)
        n_train = int(math.floor(spec.train_fraction * ds.num_points + 0.5))
        n_train = min(max(n_train, 1), ds.num_points - 1)
        train_idx, test_idx = order[:n_train], order[n_train:]
    return ds.subset(train_idx), ds.subset(test_idx)


def _folds(ds: LabeledDataset, spec: SplitSpec):
    folds = int(spec.folds)
    if folds < 2:
        raise ConfigError("folds must be >= 2")
    counts = ds.class_counts()
    small = np.flatnonzero(counts < folds)
    if spec.stratified and small.size:
        raise DataError(
            f"class {int(small[0])} has {int(counts[small[0]])} members; "
            f"{folds}-fold stratified split needs at least {folds} per class"
        )
    rng = np.random.default_rng(spec.seed)
    if spec.stratified:
        # concatenate per-class shuffles, then deal positions round-robin:
        # fold sizes differ by at most one, per-class counts likewise
        order = np.concatenate(
            [rng.permutation(np.flatnonzero(ds.labels == c)) for c in range(ds.num_classes)]
        )
    else:
        order = rng.permutation(ds.num_points)
    fold_of = np.arange(len(order)) % folds
    out = []
    for f in range(folds):
        test_idx = order[fold_of == f]
        train_idx = order[fold_of != f]
        out.append((ds.subset(train_idx), ds.subset(test_idx)))
    return out


def split(ds: LabeledDataset, spec: SplitSpec):
    """Split ``ds`` per ``spec``: a (train, test) pair, or a list of such pairs
    (one per fold) when ``spec.folds`` is set. Deterministic given the seed."""
    if spec.folds is not None:
        return _folds(ds, spec)
    return _holdout(ds, spec)


def eligible_classes(ds: LabeledDataset, k: int) -> np.ndarray:
    """Class ids with at least k+1 members (usable for training with self-exclusion)."""
    return np.flatnonzero(ds.class_counts() >= k + 1)


def sample_minibatch(
    ds: LabeledDataset, batch_size: int, k: int, rng: np.random.Generator
) -> MiniBatch:
    """Draw a class-stratified mini-batch without replacement.

    Every class included in the batch contributes at least k+1 members, so any
    batch point finds k same-class neighbours after excluding itself. Classes
    with fewer than k+1 members in ``ds`` are never sampled (warned once).
    ``batch_size == num_points`` returns the whole dataset in permuted order.
    """
    if k < 1:
        raise ConfigError("k must be >= 1")
    if batch_size > ds.num_points:
        raise ConfigError(
            f"batch_size {batch_size} exceeds dataset size {ds.num_points}"
        )
    floor = k + 1
    if batch_size < 2 * floor:
        raise ConfigError(
            f"batch_size {batch_size} cannot host two classes with "
            f"k+1={floor} members each"
        )
    counts = ds.class_counts()
    eligible = np.flatnonzero(counts >= floor)
    excluded = np.flatnonzero((counts > 0) & (counts < floor))
    if excluded.size:
        warnings.warn(
            f"classes {excluded.tolist()} have fewer than k+1={floor} members "
            "and are excluded from training batches",
            UserWarning,
            stacklevel=2,
        )
    if eligible.size < 2:
        raise FeasibilityError(
            f"need at least two classes with >= k+1={floor} members, "
            f"found {eligible.size}"
        )
    usable = int(counts[eligible].sum())
    if batch_size > usable:
        raise FeasibilityError(
            f"batch_size {batch_size} exceeds the {usable} points available "
            f"in classes with >= k+1={floor} members"
        )

    m_use = min(eligible.size, batch_size // floor)
    if m_use < eligible.size:
        chosen = np.sort(rng.choice(eligible, size=m_use, replace=False))
        # the random subset may lack capacity; swap in larger classes until it fits
        while int(counts[chosen].sum()) < batch_size:
            unchosen = np.setdiff1d(eligible, chosen)
            drop = chosen[np.argmin(counts[chosen])]
            add = unchosen[np.argmax(counts[unchosen])]
            if counts[add] <= counts[drop]:
                raise FeasibilityError(
                    f"batch_size {batch_size} cannot be met by any {m_use} classes "
                    f"while giving each k+1={floor} members"
                )
            chosen = np.sort(np.append(chosen[chosen != drop], add))
    else:
        chosen = eligible.copy()

    quota = {int(c): floor for c in chosen}
    remaining = batch_size - floor * len(chosen)
    wheel = rng.permutation(chosen)
    pos = 0
    while remaining > 0:
        c = int(wheel[pos % len(wheel)])
        if quota[c] < counts[c]:
            quota[c] += 1
            remaining -= 1
        pos += 1

    parts = [
        rng.choice(np.flatnonzero(ds.labels == c), size=quota[int(c)], replace=False)
        for c in chosen
    ]
    indices = np.concatenate(parts)
    rng.shuffle(indices)
    return MiniBatch(
        indices=indices,
        features=ds.features[indices],
        labels=ds.labels[indices],
        num_classes=ds.num_classes,
    )
