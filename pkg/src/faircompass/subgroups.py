"""Intersectional subgroups: conjunctions of feature predicates.

A subgroup is a conjunction of at most one predicate per feature; its
membership count is materialized at construction so stale references are
detectable later.
"""

from __future__ import annotations

import hashlib
import itertools
from dataclasses import dataclass

import numpy as np

from .data import CATEGORICAL, Dataset, FeatureSpec
from .errors import (
    EmptySet,
    NotBinned,
    ProductTooLarge,
    StaleSubgroup,
    UnknownValue,
)

DEFAULT_PRODUCT_CAP = 1000


@dataclass(frozen=True)
class Predicate:
    """Single-feature membership test: category equality or bin membership.

    Exactly one of `category` / `bin_index` is set.
    """

    feature: str
    category: str | None = None
    bin_index: int | None = None

    def __post_init__(self):
        if (self.category is None) == (self.bin_index is None):
            raise ValueError("predicate needs exactly one of category or bin_index")

    def display_value(self, spec: FeatureSpec) -> str:
        if self.category is not None:
            return self.category
        return spec.bin_label(self.bin_index)

    def to_dict(self) -> dict:
        return {"feature": self.feature, "category": self.category, "bin_index": self.bin_index}

    @classmethod
    def from_dict(cls, doc: dict) -> "Predicate":
        return cls(
            feature=doc["feature"],
            category=doc.get("category"),
            bin_index=doc.get("bin_index"),
        )


@dataclass(frozen=True)
class Subgroup:
    id: str
    dataset_id: str
    predicates: tuple[Predicate, ...]
    display_name: str
    size: int

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "dataset_id": self.dataset_id,
            "predicates": [p.to_dict() for p in self.predicates],
            "display_name": self.display_name,
            "size": self.size,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "Subgroup":
        return cls(
            id=doc["id"],
            dataset_id=doc["dataset_id"],
            predicates=tuple(Predicate.from_dict(p) for p in doc["predicates"]),
            display_name=doc["display_name"],
            size=doc["size"],
        )


@dataclass(frozen=True)
class GroupSet:
    id: str
    name: str
    subgroup_ids: tuple[str, ...]
    created_at: str

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "name": self.name,
            "subgroup_ids": list(self.subgroup_ids),
            "created_at": self.created_at,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "GroupSet":
        return cls(
            id=doc["id"],
            name=doc["name"],
            subgroup_ids=tuple(doc["subgroup_ids"]),
            created_at=doc["created_at"],
        )


def _subgroup_id(dataset_id: str, predicates: tuple[Predicate, ...]) -> str:
    canonical = "|".join(
        f"{p.feature}={p.category}" if p.category is not None else f"{p.feature}#[{p.bin_index}]"
        for p in sorted(predicates, key=lambda p: p.feature)
    )
    digest = hashlib.sha1(f"{dataset_id}::{canonical}".encode("utf-8")).hexdigest()
    return f"g-{digest[:10]}"


def predicate_mask(dataset: Dataset, predicate: Predicate) -> np.ndarray:
    spec = dataset.feature(predicate.feature)
    column = dataset.columns[predicate.feature]
    if predicate.category is not None:
        if spec.kind != CATEGORICAL:
            raise UnknownValue(
                f"feature {predicate.feature!r} is numeric; use a bin predicate"
            )
        code = spec.category_index(predicate.category)
        return column == code
    if not spec.is_binned:
        raise NotBinned(
            f"numeric feature {predicate.feature!r} must be binned before use in predicates"
        )
    if not 0 <= predicate.bin_index < spec.n_bins:
        raise UnknownValue(
            f"bin index {predicate.bin_index} out of range for feature {predicate.feature!r}"
        )
    edges = spec.bin_edges
    lo, hi = edges[predicate.bin_index], edges[predicate.bin_index + 1]
    if predicate.bin_index == spec.n_bins - 1:
        return (column >= lo) & (column <= hi)
    return (column >= lo) & (column < hi)


def make_subgroup(dataset: Dataset, predicates, display_name: str | None = None) -> Subgroup:
    """Build a subgroup from predicates, validating them and counting members."""
    predicates = tuple(predicates)
    if not predicates:
        raise EmptySet("a subgroup needs at least one predicate")
    features = [p.feature for p in predicates]
    if len(set(features)) != len(features):
        raise ValueError("at most one predicate per feature (conjunctions are intersectional)")
    mask = np.ones(dataset.row_count, dtype=bool)
    for p in predicates:
        mask &= predicate_mask(dataset, p)
    if display_name is None:
        display_name = ", ".join(p.display_value(dataset.feature(p.feature)) for p in predicates)
    return Subgroup(
        id=_subgroup_id(dataset.id, predicates),
        dataset_id=dataset.id,
        predicates=predicates,
        display_name=display_name,
        size=int(mask.sum()),
    )


def membership_mask(dataset: Dataset, subgroup: Subgroup) -> np.ndarray:
    """Boolean row mask of the subgroup's members; popcount equals its size."""
    if subgroup.dataset_id != dataset.id:
        raise StaleSubgroup(
            f"subgroup {subgroup.id} belongs to dataset {subgroup.dataset_id[:12]}, "
            f"not {dataset.id[:12]}"
        )
    mask = np.ones(dataset.row_count, dtype=bool)
    for p in subgroup.predicates:
        mask &= predicate_mask(dataset, p)
    return mask


def _selection_values(dataset: Dataset, feature: str, whitelist) -> list[Predicate]:
    spec = dataset.feature(feature)
    if spec.kind == CATEGORICAL:
        if whitelist is None:
            return [Predicate(feature=feature, category=c) for c in spec.categories]
        for value in whitelist:
            spec.category_index(value)
        return [Predicate(feature=feature, category=v) for v in whitelist]
    if not spec.is_binned:
        raise NotBinned(
            f"numeric feature {feature!r} must be binned before subgroup generation"
        )
    if whitelist is None:
        indices = range(spec.n_bins)
    else:
        indices = list(whitelist)
        for i in indices:
            if not isinstance(i, int) or not 0 <= i < spec.n_bins:
                raise UnknownValue(f"bin index {i!r} out of range for feature {feature!r}")
    return [Predicate(feature=feature, bin_index=i) for i in indices]


def generate_subgroups(dataset: Dataset, selections, cap: int = DEFAULT_PRODUCT_CAP) -> list[Subgroup]:
    """Cartesian product of selected feature values, one subgroup per combination.

    `selections` is a list of (feature, values-or-None) pairs; None selects
    every category (or every bin). Combinations with no members are dropped.
    Output order is deterministic: first selection varies slowest, values in
    whitelist (or spec) order.
    """
    if not selections:
        raise EmptySet("at least one feature must be selected")
    per_feature: list[list[Predicate]] = []
    seen: set[str] = set()
    for feature, whitelist in selections:
        if feature in seen:
            raise ValueError(f"feature {feature!r} selected twice")
        seen.add(feature)
        per_feature.append(_selection_values(dataset, feature, whitelist))

    combos = 1
    for values in per_feature:
        combos *= len(values)
    if combos > cap:
        raise ProductTooLarge(
            f"selection spans {combos} combinations, above the cap of {cap}"
        )

    masks = [
        [predicate_mask(dataset, p) for p in values] for values in per_feature
    ]
    out: list[Subgroup] = []
    for picks in itertools.product(*(range(len(v)) for v in per_feature)):
        mask = masks[0][picks[0]].copy()
        for axis in range(1, len(picks)):
            mask &= masks[axis][picks[axis]]
        size = int(mask.sum())
        if size == 0:
            continue
        predicates = tuple(per_feature[axis][i] for axis, i in enumerate(picks))
        display = ", ".join(
            p.display_value(dataset.feature(p.feature)) for p in predicates
        )
        out.append(
            Subgroup(
                id=_subgroup_id(dataset.id, predicates),
                dataset_id=dataset.id,
                predicates=predicates,
                display_name=display,
                size=size,
            )
        )
    return out
