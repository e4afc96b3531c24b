"""Tabular dataset ingestion, feature metadata, and histograms.

A :class:`Dataset` is an immutable columnar table: categorical columns are
stored as integer codes against an ordered category list, numeric columns as
float64 arrays. Ground-truth labels and model predictions are binary arrays
kept alongside the feature columns.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import (
    InvalidEdges,
    MissingColumn,
    NonBinaryLabel,
    NotNumeric,
    RaggedRow,
    UnknownFeature,
    UnknownValue,
    UnparseableNumeric,
)

MISSING_CATEGORY = "?"

# Bin count used when a numeric feature is viewed before explicit binning.
# Neither of the systems this design follows documents a default, so this is
# a deliberate, configurable choice.
DEFAULT_DISTRIBUTION_BINS = 10

CATEGORICAL = "categorical"
NUMERIC = "numeric"


@dataclass(frozen=True)
class FeatureSpec:
    """Schema entry for one feature column.

    Categorical specs carry `categories` ordered by descending frequency then
    lexicographically; numeric specs carry `bin_edges` once binned
    (left-closed, right-open intervals, last interval closed).
    """

    name: str
    kind: str
    categories: tuple[str, ...] = ()
    bin_edges: tuple[float, ...] | None = None

    def __post_init__(self):
        if self.kind not in (CATEGORICAL, NUMERIC):
            raise ValueError(f"unknown feature kind {self.kind!r}")

    @property
    def is_binned(self) -> bool:
        return self.kind == NUMERIC and self.bin_edges is not None

    @property
    def n_bins(self) -> int:
        if not self.is_binned:
            return 0
        return len(self.bin_edges) - 1

    def category_index(self, value: str) -> int:
        try:
            return self.categories.index(value)
        except ValueError:
            raise UnknownValue(
                f"value {value!r} is not a category of feature {self.name!r}"
            ) from None

    def bin_index_of(self, value: float) -> int:
        """Index of the bin containing `value`, or -1 when outside all bins."""
        if not self.is_binned:
            raise NotNumeric(f"feature {self.name!r} has no bin edges")
        edges = self.bin_edges
        if value < edges[0] or value > edges[-1]:
            return -1
        if value == edges[-1]:
            return len(edges) - 2
        lo, hi = 0, len(edges) - 2
        while lo < hi:
            mid = (lo + hi + 1) // 2
            if value >= edges[mid]:
                lo = mid
            else:
                hi = mid - 1
        return lo

    def bin_label(self, index: int) -> str:
        """Human-readable label for a bin.

        Unit-width integer bins render as the single value they contain
        ("40" for [40, 41)), matching how auditors talk about discrete
        numeric values.
        """
        edges = self.bin_edges
        if edges is None or not 0 <= index < self.n_bins:
            raise InvalidEdges(f"bin index {index} out of range for {self.name!r}")
        lo, hi = edges[index], edges[index + 1]
        if hi - lo == 1 and float(lo).is_integer():
            return f"{lo:g}"
        closer = "]" if index == self.n_bins - 1 else ")"
        return f"[{lo:g}, {hi:g}{closer}"


@dataclass(frozen=True)
class Histogram:
    feature: str
    bins: tuple[tuple[str, int], ...]
    total: int


@dataclass(frozen=True)
class IngestConfig:
    """How to interpret a delimiter-separated source.

    `class_aliases` maps raw label/prediction strings to 0 or 1 (for example
    income brackets onto the classifier's positive/negative classes); "0" and
    "1" are always accepted. Columns not named in `numeric_columns` are
    treated as categorical, and `missing_token` values in categorical columns
    become the distinct category "?".
    """

    label_column: str
    prediction_column: str
    score_column: str | None = None
    numeric_columns: tuple[str, ...] = ()
    missing_token: str = "?"
    class_aliases: dict[str, int] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "label_column": self.label_column,
            "prediction_column": self.prediction_column,
            "score_column": self.score_column,
            "numeric_columns": list(self.numeric_columns),
            "missing_token": self.missing_token,
            "class_aliases": dict(self.class_aliases),
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "IngestConfig":
        return cls(
            label_column=doc["label_column"],
            prediction_column=doc["prediction_column"],
            score_column=doc.get("score_column"),
            numeric_columns=tuple(doc.get("numeric_columns") or ()),
            missing_token=doc.get("missing_token", "?"),
            class_aliases=dict(doc.get("class_aliases") or {}),
        )


class Dataset:
    """Immutable columnar table with binary label and prediction columns.

    Categorical columns hold int32 codes into their FeatureSpec's category
    list; numeric columns hold float64 values. Instances are safe for
    unlimited concurrent readers.
    """

    def __init__(
        self,
        id: str,
        features: tuple[FeatureSpec, ...],
        columns: dict[str, np.ndarray],
        label: np.ndarray,
        prediction: np.ndarray,
        score: np.ndarray | None,
        label_name: str,
        prediction_name: str,
        score_name: str | None = None,
    ):
        self.id = id
        self.features = features
        self.columns = columns
        self.label = label
        self.prediction = prediction
        self.score = score
        self.label_name = label_name
        self.prediction_name = prediction_name
        self.score_name = score_name
        self.row_count = int(label.shape[0])
        self._by_name = {f.name: f for f in features}
        self._validate()

    def _validate(self):
        names = [f.name for f in self.features]
        if len(set(names)) != len(names):
            raise ValueError("feature names must be unique")
        for reserved in (self.label_name, self.prediction_name, self.score_name):
            if reserved is not None and reserved in self._by_name:
                raise ValueError(f"column {reserved!r} collides with a feature name")
        for name, col in self.columns.items():
            if col.shape[0] != self.row_count:
                raise ValueError(f"column {name!r} has wrong length")
        if self.prediction.shape[0] != self.row_count:
            raise ValueError("prediction length mismatch")
        if self.score is not None and self.score.shape[0] != self.row_count:
            raise ValueError("score length mismatch")
        for arr, what in ((self.label, "label"), (self.prediction, "prediction")):
            if arr.size and not np.isin(arr, (0, 1)).all():
                raise ValueError(f"{what} contains values outside {{0, 1}}")

    def feature(self, name: str) -> FeatureSpec:
        spec = self._by_name.get(name)
        if spec is None:
            raise UnknownFeature(f"unknown feature {name!r}")
        return spec

    def feature_names(self) -> list[str]:
        return [f.name for f in self.features]

    def column(self, name: str) -> np.ndarray:
        self.feature(name)
        return self.columns[name]

    def with_feature(self, spec: FeatureSpec) -> "Dataset":
        """Copy of this dataset with one FeatureSpec replaced (same rows, same id)."""
        self.feature(spec.name)
        features = tuple(spec if f.name == spec.name else f for f in self.features)
        return Dataset(
            id=self.id,
            features=features,
            columns=self.columns,
            label=self.label,
            prediction=self.prediction,
            score=self.score,
            label_name=self.label_name,
            prediction_name=self.prediction_name,
            score_name=self.score_name,
        )

    def summary(self) -> dict:
        return {
            "id": self.id,
            "row_count": self.row_count,
            "features": [
                {
                    "name": f.name,
                    "kind": f.kind,
                    "categories": list(f.categories) if f.kind == CATEGORICAL else None,
                    "bin_edges": list(f.bin_edges) if f.bin_edges is not None else None,
                }
                for f in self.features
            ],
            "label_column": self.label_name,
            "prediction_column": self.prediction_name,
            "score_column": self.score_name,
        }

    def __eq__(self, other):
        if not isinstance(other, Dataset):
            return NotImplemented
        return (
            self.id == other.id
            and self.features == other.features
            and self.label_name == other.label_name
            and self.prediction_name == other.prediction_name
            and self.score_name == other.score_name
            and np.array_equal(self.label, other.label)
            and np.array_equal(self.prediction, other.prediction)
            and (
                (self.score is None and other.score is None)
                or (
                    self.score is not None
                    and other.score is not None
                    and np.array_equal(self.score, other.score)
                )
            )
            and self.columns.keys() == other.columns.keys()
            and all(np.array_equal(self.columns[k], other.columns[k]) for k in self.columns)
        )

    def __repr__(self):
        return f"Dataset(id={self.id[:12]!r}, rows={self.row_count}, features={len(self.features)})"


def _parse_binary(raw: str, aliases: dict[str, int], row: int, column: str) -> int:
    if raw in aliases:
        return int(aliases[raw])
    if raw == "0":
        return 0
    if raw == "1":
        return 1
    raise NonBinaryLabel(
        f"column {column!r} has non-binary value {raw!r} at row {row}",
        row=row,
        column=column,
    )


def load_dataset(source, config: IngestConfig) -> Dataset:
    """Parse a comma-delimited text source into a validated Dataset.

    `source` may be bytes, a str, or a readable text/binary file object. The
    first row must be a header. Row numbers in errors are 1-based and count
    data rows only.
    """
    text = _as_text(source)
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise MissingColumn("source is empty: no header row") from None

    positions = {name: i for i, name in enumerate(header)}
    if len(positions) != len(header):
        raise MissingColumn("header contains duplicate column names")
    for required in (config.label_column, config.prediction_column):
        if required not in positions:
            raise MissingColumn(f"column {required!r} not found in header", column=required)
    if config.score_column is not None and config.score_column not in positions:
        raise MissingColumn(f"column {config.score_column!r} not found in header", column=config.score_column)
    for name in config.numeric_columns:
        if name not in positions:
            raise MissingColumn(f"numeric column {name!r} not found in header", column=name)

    reserved = {config.label_column, config.prediction_column}
    if config.score_column:
        reserved.add(config.score_column)
    feature_names = [name for name in header if name not in reserved]
    numeric = set(config.numeric_columns)

    raw_columns: dict[str, list] = {name: [] for name in feature_names}
    labels: list[int] = []
    predictions: list[int] = []
    scores: list[float] = []

    for i, row in enumerate(reader, start=1):
        if len(row) != len(header):
            raise RaggedRow(
                f"row {i} has {len(row)} fields, header has {len(header)}", row=i
            )
        labels.append(
            _parse_binary(row[positions[config.label_column]], config.class_aliases, i, config.label_column)
        )
        predictions.append(
            _parse_binary(row[positions[config.prediction_column]], config.class_aliases, i, config.prediction_column)
        )
        if config.score_column is not None:
            raw = row[positions[config.score_column]]
            try:
                value = float(raw)
            except ValueError:
                raise UnparseableNumeric(
                    f"score {raw!r} at row {i} is not a number", row=i, column=config.score_column
                ) from None
            if not 0.0 <= value <= 1.0:
                raise UnparseableNumeric(
                    f"score {value} at row {i} is outside [0, 1]", row=i, column=config.score_column
                )
            scores.append(value)
        for name in feature_names:
            raw = row[positions[name]]
            if name in numeric:
                try:
                    raw_columns[name].append(float(raw))
                except ValueError:
                    raise UnparseableNumeric(
                        f"value {raw!r} at row {i} in column {name!r} is not a number",
                        row=i,
                        column=name,
                    ) from None
            else:
                raw_columns[name].append(
                    MISSING_CATEGORY if raw == config.missing_token else raw
                )

    features: list[FeatureSpec] = []
    columns: dict[str, np.ndarray] = {}
    for name in feature_names:
        if name in numeric:
            features.append(FeatureSpec(name=name, kind=NUMERIC))
            columns[name] = np.asarray(raw_columns[name], dtype=np.float64)
        else:
            values = raw_columns[name]
            counts: dict[str, int] = {}
            for v in values:
                counts[v] = counts.get(v, 0) + 1
            categories = tuple(sorted(counts, key=lambda c: (-counts[c], c)))
            index = {c: k for k, c in enumerate(categories)}
            codes = np.fromiter((index[v] for v in values), dtype=np.int32, count=len(values))
            features.append(FeatureSpec(name=name, kind=CATEGORICAL, categories=categories))
            columns[name] = codes

    dataset_id = _content_id(text, config)
    return Dataset(
        id=dataset_id,
        features=tuple(features),
        columns=columns,
        label=np.asarray(labels, dtype=np.int8),
        prediction=np.asarray(predictions, dtype=np.int8),
        score=np.asarray(scores, dtype=np.float64) if config.score_column else None,
        label_name=config.label_column,
        prediction_name=config.prediction_column,
        score_name=config.score_column,
    )


def _as_text(source) -> str:
    if isinstance(source, bytes):
        return source.decode("utf-8")
    if isinstance(source, str):
        return source
    data = source.read()
    if isinstance(data, bytes):
        return data.decode("utf-8")
    return data


def _content_id(text: str, config: IngestConfig) -> str:
    digest = hashlib.sha256()
    digest.update(text.encode("utf-8"))
    digest.update(json.dumps(config.to_dict(), sort_keys=True).encode("utf-8"))
    return digest.hexdigest()


def feature_distribution(dataset: Dataset, feature: str) -> Histogram:
    """Histogram of one feature over all rows.

    Categorical features get one bin per category (the "?" missing-value
    category included); numeric features get one bin per interval, using a
    transient equal-width split when the feature has not been binned yet.
    """
    spec = dataset.feature(feature)
    if spec.kind == CATEGORICAL:
        codes = dataset.columns[feature]
        counts = np.bincount(codes, minlength=len(spec.categories))
        bins = tuple(
            (category, int(counts[i])) for i, category in enumerate(spec.categories)
        )
        return Histogram(feature=feature, bins=bins, total=dataset.row_count)

    if dataset.row_count == 0:
        return Histogram(feature=feature, bins=(), total=0)
    if not spec.is_binned:
        spec = bin_numeric(dataset, feature, EqualWidth(DEFAULT_DISTRIBUTION_BINS))
    values = dataset.columns[feature]
    edges = np.asarray(spec.bin_edges)
    idx = np.searchsorted(edges, values, side="right") - 1
    idx = np.clip(idx, 0, len(edges) - 2)
    counts = np.bincount(idx, minlength=len(edges) - 1)
    bins = tuple((spec.bin_label(i), int(counts[i])) for i in range(len(edges) - 1))
    return Histogram(feature=feature, bins=bins, total=dataset.row_count)


@dataclass(frozen=True)
class EqualWidth:
    k: int


@dataclass(frozen=True)
class ExplicitEdges:
    edges: tuple[float, ...]

    def __init__(self, edges):
        object.__setattr__(self, "edges", tuple(float(e) for e in edges))


def bin_numeric(dataset: Dataset, feature: str, strategy) -> FeatureSpec:
    """Compute bin edges for a numeric feature.

    Returns a new FeatureSpec; attach it with `dataset.with_feature`. Pure
    and idempotent for identical inputs.
    """
    spec = dataset.feature(feature)
    if spec.kind != NUMERIC:
        raise NotNumeric(f"feature {feature!r} is categorical")
    values = dataset.columns[feature]

    if isinstance(strategy, EqualWidth):
        if strategy.k < 1:
            raise InvalidEdges(f"equal-width bin count must be >= 1, got {strategy.k}")
        if values.size == 0:
            raise InvalidEdges(f"feature {feature!r} has no observed values to bin")
        lo, hi = float(values.min()), float(values.max())
        if lo == hi:
            # Degenerate range: one unit-width bin holding the constant value.
            edges = (lo, lo + 1.0)
        else:
            edges = tuple(float(e) for e in np.linspace(lo, hi, strategy.k + 1))
        return replace(spec, bin_edges=edges)

    if isinstance(strategy, ExplicitEdges):
        edges = strategy.edges
        if len(edges) < 2 or any(a >= b for a, b in zip(edges, edges[1:])):
            raise InvalidEdges("explicit edges must be a strictly increasing list of >= 2 numbers")
        if values.size:
            lo, hi = float(values.min()), float(values.max())
            if lo < edges[0] or hi > edges[-1]:
                raise InvalidEdges(
                    f"edges [{edges[0]:g}, {edges[-1]:g}] do not cover observed range "
                    f"[{lo:g}, {hi:g}] of feature {feature!r}"
                )
        return replace(spec, bin_edges=edges)

    raise InvalidEdges(f"unknown binning strategy {strategy!r}")


def export_csv(dataset: Dataset) -> str:
    """Serialize a Dataset back to comma-delimited text (RFC 4180 quoting).

    Reloading the output with a matching IngestConfig yields identical
    columns, label, and prediction arrays.
    """
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    header = dataset.feature_names() + [dataset.label_name, dataset.prediction_name]
    if dataset.score_name:
        header.append(dataset.score_name)
    writer.writerow(header)
    decoded = {}
    for spec in dataset.features:
        col = dataset.columns[spec.name]
        if spec.kind == CATEGORICAL:
            decoded[spec.name] = [spec.categories[c] for c in col]
        else:
            decoded[spec.name] = [repr(float(v)) for v in col]
    for i in range(dataset.row_count):
        row = [decoded[name][i] for name in dataset.feature_names()]
        row.append(str(int(dataset.label[i])))
        row.append(str(int(dataset.prediction[i])))
        if dataset.score_name:
            row.append(repr(float(dataset.score[i])))
        writer.writerow(row)
    return out.getvalue()


def export_config(dataset: Dataset) -> IngestConfig:
    """IngestConfig that reloads the output of :func:`export_csv`."""
    return IngestConfig(
        label_column=dataset.label_name,
        prediction_column=dataset.prediction_name,
        score_column=dataset.score_name,
        numeric_columns=tuple(f.name for f in dataset.features if f.kind == NUMERIC),
    )


def attach_predictions(data_text: str, predictions_text: str, prediction_column: str = "prediction") -> str:
    """Merge a row-aligned single-column predictions file into a data CSV.

    Used when a dataset and its model predictions ship as two files.
    """
    data_rows = list(csv.reader(io.StringIO(data_text)))
    pred_rows = list(csv.reader(io.StringIO(predictions_text)))
    if not data_rows or not pred_rows:
        raise MissingColumn("cannot merge: one of the sources is empty")
    pred_header = pred_rows[0]
    if prediction_column not in pred_header:
        raise MissingColumn(
            f"predictions file has no {prediction_column!r} column", column=prediction_column
        )
    pos = pred_header.index(prediction_column)
    if len(pred_rows) != len(data_rows):
        raise RaggedRow(
            f"predictions file has {len(pred_rows) - 1} rows, data file has {len(data_rows) - 1}"
        )
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(data_rows[0] + [prediction_column])
    for data_row, pred_row in zip(data_rows[1:], pred_rows[1:]):
        writer.writerow(data_row + [pred_row[pos]])
    return out.getvalue()
