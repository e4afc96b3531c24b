"""Confusion-matrix metrics per subgroup and parity checks across subgroups.

Rates are plain Python floats; a rate is None exactly when its denominator
is zero. Complementary rates (tnr, fnr, negative_rate) are derived by
subtraction from their partner so the complement identities hold exactly.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .data import CATEGORICAL, Dataset
from .errors import (
    NoQualifyingStrata,
    NotBinned,
    OverlappingAttributes,
    TooFewGroups,
    UndefinedRate,
)
from .subgroups import Predicate, Subgroup, membership_mask, predicate_mask

DEFAULT_THRESHOLD = 0.1
DEFAULT_MIN_STRATUM_SIZE = 20

# Rate kinds accepted by parity checks and deviation ranking.
RATE_KINDS = ("positive_rate", "negative_rate", "tpr", "fpr", "fnr", "precision", "accuracy")


class DegenerateStratumWarning(UserWarning):
    """A stratum was skipped because fewer than two groups had defined rates."""


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int
    fp: int
    tn: int
    fn: int

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn

    def __add__(self, other: "ConfusionCounts") -> "ConfusionCounts":
        return ConfusionCounts(
            tp=self.tp + other.tp,
            fp=self.fp + other.fp,
            tn=self.tn + other.tn,
            fn=self.fn + other.fn,
        )


@dataclass(frozen=True)
class MetricVector:
    size: int
    accuracy: float | None
    precision: float | None
    recall: float | None
    tnr: float | None
    fpr: float | None
    fnr: float | None
    positive_rate: float | None
    negative_rate: float | None
    base_rate: float | None

    def rate(self, kind: str) -> float | None:
        if kind == "tpr":
            return self.recall
        if kind not in RATE_KINDS:
            raise ValueError(f"unknown rate kind {kind!r}")
        return getattr(self, kind)

    def to_dict(self) -> dict:
        return {
            "size": self.size,
            "accuracy": self.accuracy,
            "precision": self.precision,
            "recall": self.recall,
            "tnr": self.tnr,
            "fpr": self.fpr,
            "fnr": self.fnr,
            "positive_rate": self.positive_rate,
            "negative_rate": self.negative_rate,
            "base_rate": self.base_rate,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "MetricVector":
        return cls(**doc)


@dataclass(frozen=True)
class ParityAssessment:
    """Result of comparing one rate across a set of groups.

    Satisfaction uses the max pairwise absolute difference against the
    threshold; min_ratio (smallest/largest rate) is reported for reference
    only. Groups with undefined rates appear in per_group but are excluded
    from the difference and ratio.
    """

    rate_kind: str
    favourable_class: int | None
    per_group: tuple[tuple[str, float | None], ...]
    max_abs_difference: float
    min_ratio: float | None
    satisfied: bool
    threshold: float

    def to_dict(self) -> dict:
        return {
            "kind": "parity",
            "rate_kind": self.rate_kind,
            "favourable_class": self.favourable_class,
            "per_group": [[gid, rate] for gid, rate in self.per_group],
            "max_abs_difference": self.max_abs_difference,
            "min_ratio": self.min_ratio,
            "satisfied": self.satisfied,
            "threshold": self.threshold,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "ParityAssessment":
        return cls(
            rate_kind=doc["rate_kind"],
            favourable_class=doc["favourable_class"],
            per_group=tuple((gid, rate) for gid, rate in doc["per_group"]),
            max_abs_difference=doc["max_abs_difference"],
            min_ratio=doc["min_ratio"],
            satisfied=doc["satisfied"],
            threshold=doc["threshold"],
        )


@dataclass(frozen=True)
class StratifiedParity:
    """Parity evaluated within each stratum of legitimate attributes."""

    legitimate_attributes: tuple[str, ...]
    strata: tuple[tuple[tuple[Predicate, ...], ParityAssessment], ...]
    satisfied: bool
    warnings: tuple[str, ...] = field(default=())

    def to_dict(self) -> dict:
        return {
            "kind": "stratified_parity",
            "legitimate_attributes": list(self.legitimate_attributes),
            "strata": [
                {
                    "predicates": [p.to_dict() for p in predicates],
                    "assessment": assessment.to_dict(),
                }
                for predicates, assessment in self.strata
            ],
            "satisfied": self.satisfied,
            "warnings": list(self.warnings),
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "StratifiedParity":
        return cls(
            legitimate_attributes=tuple(doc["legitimate_attributes"]),
            strata=tuple(
                (
                    tuple(Predicate.from_dict(p) for p in entry["predicates"]),
                    ParityAssessment.from_dict(entry["assessment"]),
                )
                for entry in doc["strata"]
            ),
            satisfied=doc["satisfied"],
            warnings=tuple(doc.get("warnings") or ()),
        )


@dataclass(frozen=True)
class CompositeParity:
    """Conjunction of rate-parity checks (e.g. TPR parity AND FPR parity)."""

    parts: tuple[ParityAssessment, ...]
    satisfied: bool

    def to_dict(self) -> dict:
        return {
            "kind": "composite_parity",
            "parts": [p.to_dict() for p in self.parts],
            "satisfied": self.satisfied,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "CompositeParity":
        return cls(
            parts=tuple(ParityAssessment.from_dict(p) for p in doc["parts"]),
            satisfied=doc["satisfied"],
        )


def result_from_dict(doc: dict):
    kind = doc.get("kind")
    if kind == "parity":
        return ParityAssessment.from_dict(doc)
    if kind == "stratified_parity":
        return StratifiedParity.from_dict(doc)
    if kind == "composite_parity":
        return CompositeParity.from_dict(doc)
    raise ValueError(f"unknown result kind {kind!r}")


def confusion(dataset: Dataset, mask: np.ndarray) -> ConfusionCounts:
    """Confusion counts over the rows selected by `mask`."""
    if mask.shape[0] != dataset.row_count:
        raise ValueError(
            f"mask length {mask.shape[0]} != row count {dataset.row_count}"
        )
    label = dataset.label[mask]
    pred = dataset.prediction[mask]
    pos = label == 1
    predicted_pos = pred == 1
    return ConfusionCounts(
        tp=int(np.count_nonzero(pos & predicted_pos)),
        fp=int(np.count_nonzero(~pos & predicted_pos)),
        tn=int(np.count_nonzero(~pos & ~predicted_pos)),
        fn=int(np.count_nonzero(pos & ~predicted_pos)),
    )


def metrics(counts: ConfusionCounts) -> MetricVector:
    tp, fp, tn, fn = counts.tp, counts.fp, counts.tn, counts.fn
    n = tp + fp + tn + fn
    accuracy = (tp + tn) / n if n else None
    precision = tp / (tp + fp) if tp + fp else None
    recall = tp / (tp + fn) if tp + fn else None
    fnr = 1.0 - recall if recall is not None else None
    fpr = fp / (fp + tn) if fp + tn else None
    tnr = 1.0 - fpr if fpr is not None else None
    positive_rate = (tp + fp) / n if n else None
    negative_rate = 1.0 - positive_rate if positive_rate is not None else None
    base_rate = (tp + fn) / n if n else None
    return MetricVector(
        size=n,
        accuracy=accuracy,
        precision=precision,
        recall=recall,
        tnr=tnr,
        fpr=fpr,
        fnr=fnr,
        positive_rate=positive_rate,
        negative_rate=negative_rate,
        base_rate=base_rate,
    )


def subgroup_metrics(dataset: Dataset, subgroup: Subgroup) -> MetricVector:
    return metrics(confusion(dataset, membership_mask(dataset, subgroup)))


def overall_metrics(dataset: Dataset) -> MetricVector:
    return metrics(confusion(dataset, np.ones(dataset.row_count, dtype=bool)))


def rate_for_class(vector: MetricVector, favourable_class: int) -> float:
    """The fraction of the group predicted into the favourable class."""
    if favourable_class not in (0, 1):
        raise ValueError(f"favourable_class must be 0 or 1, got {favourable_class!r}")
    rate = vector.positive_rate if favourable_class == 1 else vector.negative_rate
    if rate is None:
        raise UndefinedRate("group is empty; favourable-outcome rate is undefined")
    return rate


def _favourable_rate_or_none(vector: MetricVector, favourable_class: int) -> float | None:
    return vector.positive_rate if favourable_class == 1 else vector.negative_rate


def _assess(per_group, rate_kind: str, favourable_class: int | None, threshold: float) -> ParityAssessment:
    defined = [rate for _, rate in per_group if rate is not None]
    spread = max(defined) - min(defined)
    min_ratio = min(defined) / max(defined) if max(defined) > 0 else None
    return ParityAssessment(
        rate_kind=rate_kind,
        favourable_class=favourable_class,
        per_group=tuple(per_group),
        max_abs_difference=spread,
        min_ratio=min_ratio,
        satisfied=spread <= threshold,
        threshold=threshold,
    )


def demographic_parity(
    dataset: Dataset,
    subgroups,
    favourable_class: int,
    threshold: float = DEFAULT_THRESHOLD,
) -> ParityAssessment:
    """Equal favourable-outcome proportions across subgroups.

    Satisfied when the largest pairwise absolute rate difference is at or
    under the threshold.
    """
    if favourable_class not in (0, 1):
        raise ValueError(f"favourable_class must be 0 or 1, got {favourable_class!r}")
    per_group = [
        (g.id, _favourable_rate_or_none(subgroup_metrics(dataset, g), favourable_class))
        for g in subgroups
    ]
    if sum(1 for _, rate in per_group if rate is not None) < 2:
        raise TooFewGroups("demographic parity needs at least two subgroups with defined rates")
    rate_kind = "positive_rate" if favourable_class == 1 else "negative_rate"
    return _assess(per_group, rate_kind, favourable_class, threshold)


def parity_by_rate(
    dataset: Dataset,
    subgroups,
    rate_kind: str,
    threshold: float = DEFAULT_THRESHOLD,
) -> ParityAssessment:
    """Parity of an arbitrary confusion-matrix rate across subgroups."""
    subgroups = list(subgroups)
    if len(subgroups) < 2:
        raise TooFewGroups("rate parity needs at least two subgroups")
    per_group = [
        (g.id, subgroup_metrics(dataset, g).rate(rate_kind)) for g in subgroups
    ]
    if sum(1 for _, rate in per_group if rate is not None) < 2:
        raise UndefinedRate(
            f"fewer than two subgroups have a defined {rate_kind}; nothing to compare"
        )
    return _assess(per_group, rate_kind, None, threshold)


def metric_deviation(
    subgroup_vector: MetricVector, overall_vector: MetricVector, rate_kind: str
) -> float:
    """Signed difference between a subgroup's rate and the dataset-wide rate."""
    sub = subgroup_vector.rate(rate_kind)
    whole = overall_vector.rate(rate_kind)
    if sub is None or whole is None:
        raise UndefinedRate(f"{rate_kind} is undefined for the subgroup or the dataset")
    return sub - whole


def _feature_value_masks(dataset: Dataset, feature: str):
    """(predicate, mask) per observed value of a feature; numeric must be binned."""
    spec = dataset.feature(feature)
    if spec.kind == CATEGORICAL:
        predicates = [Predicate(feature=feature, category=c) for c in spec.categories]
    else:
        if not spec.is_binned:
            raise NotBinned(
                f"numeric feature {feature!r} must be binned before stratification"
            )
        predicates = [Predicate(feature=feature, bin_index=i) for i in range(spec.n_bins)]
    out = []
    for p in predicates:
        mask = predicate_mask(dataset, p)
        if mask.any():
            out.append((p, mask))
    return out


def _masked_counts(dataset: Dataset, mask: np.ndarray) -> MetricVector:
    return metrics(confusion(dataset, mask))


def conditional_statistical_parity(
    dataset: Dataset,
    sensitive_attribute: str,
    legitimate_attributes,
    favourable_class: int,
    threshold: float = DEFAULT_THRESHOLD,
    min_stratum_size: int = DEFAULT_MIN_STRATUM_SIZE,
) -> StratifiedParity:
    """Demographic parity within every stratum of the legitimate attributes.

    Strata are the observed combinations of legitimate-attribute values with
    at least `min_stratum_size` members. A stratum where fewer than two
    sensitive groups have defined rates is excluded with a warning.
    Satisfied only if every included stratum is satisfied.
    """
    legitimate_attributes = tuple(legitimate_attributes)
    if not legitimate_attributes:
        raise NoQualifyingStrata("at least one legitimate attribute is required")
    if sensitive_attribute in legitimate_attributes:
        raise OverlappingAttributes(
            f"sensitive attribute {sensitive_attribute!r} cannot also be a legitimate attribute"
        )
    sensitive_groups = _feature_value_masks(dataset, sensitive_attribute)
    legit_axes = [_feature_value_masks(dataset, f) for f in legitimate_attributes]

    strata = []
    notes = []
    rate_kind = "positive_rate" if favourable_class == 1 else "negative_rate"

    def stratum_combos(axes):
        if not axes:
            yield (), np.ones(dataset.row_count, dtype=bool)
            return
        for predicate, mask in axes[0]:
            for rest_preds, rest_mask in stratum_combos(axes[1:]):
                yield (predicate, *rest_preds), mask & rest_mask

    for predicates, stratum_mask in stratum_combos(legit_axes):
        members = int(stratum_mask.sum())
        if members < min_stratum_size:
            continue
        per_group = []
        for sens_pred, sens_mask in sensitive_groups:
            group_mask = stratum_mask & sens_mask
            if not group_mask.any():
                continue
            vector = _masked_counts(dataset, group_mask)
            rate = _favourable_rate_or_none(vector, favourable_class)
            label = f"{sensitive_attribute}={sens_pred.display_value(dataset.feature(sensitive_attribute))}"
            per_group.append((label, rate))
        defined = sum(1 for _, rate in per_group if rate is not None)
        if defined < 2:
            stratum_label = ", ".join(
                f"{p.feature}={p.display_value(dataset.feature(p.feature))}" for p in predicates
            )
            message = (
                f"stratum ({stratum_label}) excluded: fewer than two sensitive groups present"
            )
            notes.append(message)
            warnings.warn(message, DegenerateStratumWarning, stacklevel=2)
            continue
        strata.append((predicates, _assess(per_group, rate_kind, favourable_class, threshold)))

    if not strata:
        raise NoQualifyingStrata(
            f"no stratum of {legitimate_attributes} has {min_stratum_size}+ members "
            "and two comparable sensitive groups"
        )
    return StratifiedParity(
        legitimate_attributes=legitimate_attributes,
        strata=tuple(strata),
        satisfied=all(assessment.satisfied for _, assessment in strata),
        warnings=tuple(notes),
    )
