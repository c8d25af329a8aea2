"""Loading, cleaning, standardization and CV splitting of tabular data.

Raw files are headerless comma-separated UCI exports; a JSON schema sidecar
names the columns, marks feature kinds, and defines the positive-label rule.
Rows containing any missing token are dropped (listwise deletion).
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, DataError, SchemaError

NUMERIC = "numeric"
CATEGORICAL = "categorical-ordinal"


@dataclass(frozen=True)
class FeatureSpec:
    name: str
    kind: str  # NUMERIC or CATEGORICAL
    missing: str = "?"


@dataclass(frozen=True)
class Schema:
    """Column layout of a raw file plus the label mapping.

    `columns` lists every column in file order; columns that are neither a
    feature nor the label (e.g. record ids) are ignored on load.
    """

    columns: tuple[str, ...]
    features: tuple[FeatureSpec, ...]
    label_name: str
    positive_op: str  # one of "==", ">", ">="
    positive_value: str | float

    def __post_init__(self):
        names = [f.name for f in self.features]
        if len(set(names)) != len(names):
            raise SchemaError("duplicate feature names")
        if self.label_name in names:
            raise SchemaError("label column listed among features")
        missing = [n for n in names + [self.label_name] if n not in self.columns]
        if missing:
            raise SchemaError(f"columns not in layout: {missing}")
        if self.positive_op not in ("==", ">", ">="):
            raise SchemaError(f"unsupported label predicate op {self.positive_op!r}")
        for f in self.features:
            if f.kind not in (NUMERIC, CATEGORICAL):
                raise SchemaError(f"unknown feature kind {f.kind!r}")

    @property
    def feature_names(self) -> list[str]:
        return [f.name for f in self.features]

    def label_of(self, raw: str) -> int:
        if self.positive_op == "==":
            if isinstance(self.positive_value, str):
                return int(raw.strip() == self.positive_value)
            return int(float(raw) == float(self.positive_value))
        v = float(raw)
        if self.positive_op == ">":
            return int(v > float(self.positive_value))
        return int(v >= float(self.positive_value))

    @classmethod
    def from_json(cls, path: str) -> "Schema":
        try:
            with open(path) as fh:
                doc = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise SchemaError(f"cannot read schema {path}: {exc}") from exc
        try:
            features = tuple(
                FeatureSpec(f["name"], f["kind"], f.get("missing", "?"))
                for f in doc["features"]
            )
            label = doc["label"]
            pred = label["positive_when"]
            columns = doc.get("columns")
            if columns is None:
                columns = [f.name for f in features] + [label["name"]]
            return cls(
                columns=tuple(columns),
                features=features,
                label_name=label["name"],
                positive_op=pred["op"],
                positive_value=pred["value"],
            )
        except (KeyError, TypeError) as exc:
            raise SchemaError(f"schema {path} missing field: {exc}") from exc


@dataclass(frozen=True)
class Dataset:
    """Clean numeric design matrix with binary labels."""

    X: np.ndarray  # N x D, float64, finite
    y: np.ndarray  # N, int, values in {0, 1}
    feature_names: tuple[str, ...]

    def __post_init__(self):
        self.X.setflags(write=False)
        self.y.setflags(write=False)

    @property
    def n_samples(self) -> int:
        return self.X.shape[0]

    @property
    def n_features(self) -> int:
        return self.X.shape[1]

    def subset(self, indices: np.ndarray) -> "Dataset":
        return Dataset(self.X[indices].copy(), self.y[indices].copy(), self.feature_names)

    def validate(self):
        if self.X.ndim != 2 or len(self.y) != self.X.shape[0]:
            raise DataError("X/y shape mismatch")
        if not np.all(np.isfinite(self.X)):
            raise DataError("non-finite feature values after cleaning")
        classes = set(np.unique(self.y).tolist())
        if not classes <= {0, 1}:
            raise DataError(f"labels outside {{0,1}}: {classes}")
        if classes != {0, 1}:
            raise DataError("both classes must be present")
        return self


def load_csv(path: str, schema: Schema) -> Dataset:
    """Parse a headerless UCI-style CSV into a clean Dataset.

    Rows with any missing token in a used column are dropped; the label is
    mapped through the schema's positive-label predicate.
    """
    col_index = {name: i for i, name in enumerate(schema.columns)}
    feat_cols = [col_index[f.name] for f in schema.features]
    label_col = col_index[schema.label_name]
    missing_tokens = {f.name: f.missing for f in schema.features}

    rows: list[list[float]] = []
    labels: list[int] = []
    try:
        with open(path, newline="") as fh:
            for lineno, rec in enumerate(csv.reader(fh), start=1):
                if not rec or (len(rec) == 1 and rec[0].strip() == ""):
                    continue
                if len(rec) != len(schema.columns):
                    raise DataError(
                        f"{path}:{lineno}: expected {len(schema.columns)} "
                        f"columns, found {len(rec)}"
                    )
                raw_label = rec[label_col].strip()
                if raw_label == "" or raw_label == "?":
                    continue
                vals = []
                dropped = False
                for f, c in zip(schema.features, feat_cols):
                    token = rec[c].strip()
                    if token == missing_tokens[f.name] or token == "":
                        dropped = True
                        break
                    try:
                        vals.append(float(token))
                    except ValueError as exc:
                        raise DataError(
                            f"{path}:{lineno}: column {f.name!r}: "
                            f"cannot parse {token!r}"
                        ) from exc
                if dropped:
                    continue
                rows.append(vals)
                labels.append(schema.label_of(raw_label))
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc

    if not rows:
        raise DataError(f"{path}: no usable rows after cleaning")
    X = np.asarray(rows, dtype=np.float64)
    y = np.asarray(labels, dtype=np.int64)
    return Dataset(X, y, tuple(schema.feature_names)).validate()


@dataclass(frozen=True)
class Scaler:
    """Per-feature (mean, scale) fit on a training fold.

    Constant features keep scale 1 so they pass through unchanged.
    """

    mean: np.ndarray
    scale: np.ndarray

    def transform(self, X: np.ndarray) -> np.ndarray:
        return (np.asarray(X, dtype=np.float64) - self.mean) / self.scale


def standardize(train: Dataset) -> tuple[Scaler, Dataset]:
    """Fit a population-std scaler on `train` and return the scaled copy."""
    if train.n_samples == 0:
        raise DataError("cannot standardize an empty dataset")
    mean = train.X.mean(axis=0)
    std = train.X.std(axis=0)  # population std
    scale = np.where(std > 0, std, 1.0)
    mean = np.where(std > 0, mean, 0.0)  # std=0 columns pass through untouched
    scaler = Scaler(mean, scale)
    return scaler, Dataset(scaler.transform(train.X), train.y.copy(), train.feature_names)


@dataclass(frozen=True)
class SplitPlan:
    """Stratified repeated k-fold assignments, fully seed-determined."""

    repeats: int
    folds: int
    seed: int
    assignments: tuple  # [repeat][fold] -> (train_idx, test_idx)

    def __iter__(self):
        for r, folds in enumerate(self.assignments):
            for f, (train_idx, test_idx) in enumerate(folds):
                yield r, f, train_idx, test_idx


def make_split_plan(dataset: Dataset, repeats: int, folds: int, seed: int) -> SplitPlan:
    """Stratified repeated k-fold: per class, shuffled indices are dealt into
    folds in near-equal chunks, so per-fold positive counts differ from the
    ideal by at most one sample."""
    if folds < 2:
        raise ConfigError("folds must be >= 2")
    if repeats < 1:
        raise ConfigError("repeats must be >= 1")
    y = dataset.y
    n = dataset.n_samples
    for cls in (0, 1):
        if int(np.sum(y == cls)) < folds:
            raise ConfigError(
                f"class {cls} has fewer samples than folds={folds}; "
                "cannot stratify"
            )

    all_assignments = []
    for rep in range(repeats):
        rng = np.random.default_rng(np.random.SeedSequence([seed, rep]))
        fold_members: list[list[int]] = [[] for _ in range(folds)]
        for cls in (0, 1):
            idx = np.flatnonzero(y == cls)
            rng.shuffle(idx)
            # chunk sizes differ by at most 1 across folds
            sizes = np.full(folds, len(idx) // folds)
            sizes[: len(idx) % folds] += 1
            pos = 0
            for f in range(folds):
                fold_members[f].extend(idx[pos : pos + sizes[f]].tolist())
                pos += sizes[f]
        rep_folds = []
        for f in range(folds):
            test_idx = np.array(sorted(fold_members[f]), dtype=np.int64)
            mask = np.ones(n, dtype=bool)
            mask[test_idx] = False
            train_idx = np.flatnonzero(mask)
            rep_folds.append((train_idx, test_idx))
        all_assignments.append(tuple(rep_folds))
    return SplitPlan(repeats, folds, seed, tuple(all_assignments))
