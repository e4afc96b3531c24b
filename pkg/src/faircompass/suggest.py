"""Subgroup suggestions via clustering, and similarity ranking between subgroups.

Rows are encoded as one-hot categorical values plus min-max-scaled numerics,
clustered with seeded Lloyd's iterations, and each cluster is summarized as
the conjunction of its dominant categorical values.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data import CATEGORICAL, Dataset
from .errors import EmptyDataset, KTooLarge
from .metrics import metric_deviation, overall_metrics, subgroup_metrics
from .subgroups import Predicate, Subgroup, make_subgroup, membership_mask

DEFAULT_K = 10
DEFAULT_SEED = 42
DEFAULT_DOMINANCE = 0.8
DEFAULT_MAX_ITER = 50


def encode_instances(dataset: Dataset) -> np.ndarray:
    """(rows, dims) float64 matrix: one-hot categoricals, scaled numerics.

    Numeric columns are min-max scaled to [0, 1]; a constant numeric column
    encodes as all zeros. Dimension order follows feature order, categorical
    values in their FeatureSpec order.
    """
    if dataset.row_count == 0:
        raise EmptyDataset("cannot encode an empty dataset")
    blocks = []
    for spec in dataset.features:
        column = dataset.columns[spec.name]
        if spec.kind == CATEGORICAL:
            block = np.zeros((dataset.row_count, len(spec.categories)))
            block[np.arange(dataset.row_count), column] = 1.0
        else:
            lo, hi = float(column.min()), float(column.max())
            if hi > lo:
                block = ((column - lo) / (hi - lo)).reshape(-1, 1)
            else:
                block = np.zeros((dataset.row_count, 1))
        blocks.append(block)
    return np.hstack(blocks)


@dataclass(frozen=True)
class KMeansResult:
    assignments: np.ndarray
    centroids: np.ndarray
    inertia_per_iter: tuple[float, ...]
    n_iter: int


def _seed_centroids(vectors: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    """k-means++ style seeding: spread initial centroids by squared distance."""
    n = vectors.shape[0]
    centroids = np.empty((k, vectors.shape[1]))
    centroids[0] = vectors[rng.integers(n)]
    closest = np.sum((vectors - centroids[0]) ** 2, axis=1)
    for i in range(1, k):
        total = closest.sum()
        if total <= 0.0:
            pick = rng.integers(n)
        else:
            pick = rng.choice(n, p=closest / total)
        centroids[i] = vectors[pick]
        closest = np.minimum(closest, np.sum((vectors - centroids[i]) ** 2, axis=1))
    return centroids


def _squared_distances(vectors: np.ndarray, centroids: np.ndarray) -> np.ndarray:
    diff = vectors[:, None, :] - centroids[None, :, :]
    return np.sum(diff * diff, axis=2)


def kmeans(
    vectors: np.ndarray,
    k: int,
    seed: int = DEFAULT_SEED,
    max_iter: int = DEFAULT_MAX_ITER,
) -> KMeansResult:
    """Lloyd's algorithm with deterministic seeded initialization.

    Within-cluster sum of squares is recorded after every update step and is
    non-increasing. Stops at assignment convergence or `max_iter`.
    """
    n = vectors.shape[0]
    if not 1 <= k <= n:
        raise KTooLarge(f"k={k} must be between 1 and the number of rows ({n})")
    if max_iter < 1:
        raise ValueError("max_iter must be >= 1")
    rng = np.random.default_rng(seed)
    centroids = _seed_centroids(vectors, k, rng)
    assignments = np.zeros(n, dtype=np.int64)
    inertia_history: list[float] = []

    for iteration in range(max_iter):
        distances = _squared_distances(vectors, centroids)
        new_assignments = np.argmin(distances, axis=1)
        inertia = float(distances[np.arange(n), new_assignments].sum())
        inertia_history.append(inertia)
        converged = iteration > 0 and np.array_equal(new_assignments, assignments)
        assignments = new_assignments
        if converged:
            break
        for c in range(k):
            members = vectors[assignments == c]
            if members.shape[0]:
                centroids[c] = members.mean(axis=0)
            # empty cluster keeps its previous centroid

    return KMeansResult(
        assignments=assignments,
        centroids=centroids,
        inertia_per_iter=tuple(inertia_history),
        n_iter=len(inertia_history),
    )


def describe_cluster(
    dataset: Dataset,
    member_rows: np.ndarray,
    dominance_threshold: float = DEFAULT_DOMINANCE,
) -> tuple[Subgroup, dict[str, float]] | None:
    """Summarize a cluster as the conjunction of its dominant categorical values.

    For each categorical feature, a predicate is emitted when one value's
    within-cluster frequency reaches the threshold. Returns the subgroup and
    per-feature dominance fractions, or None when nothing dominates.
    """
    member_rows = np.asarray(member_rows)
    if member_rows.size == 0:
        raise EmptyDataset("cluster has no members")
    predicates = []
    dominance: dict[str, float] = {}
    for spec in dataset.features:
        if spec.kind != CATEGORICAL:
            continue
        codes = dataset.columns[spec.name][member_rows]
        counts = np.bincount(codes, minlength=len(spec.categories))
        top = int(np.argmax(counts))
        fraction = counts[top] / member_rows.size
        if fraction >= dominance_threshold:
            predicates.append(Predicate(feature=spec.name, category=spec.categories[top]))
            dominance[spec.name] = float(fraction)
    if not predicates:
        return None
    return make_subgroup(dataset, predicates), dominance


@dataclass(frozen=True)
class SuggestedSubgroup:
    subgroup: Subgroup
    source_cluster: int
    dominance: dict[str, float]
    notability: float

    def to_dict(self) -> dict:
        return {
            "subgroup": self.subgroup.to_dict(),
            "source_cluster": self.source_cluster,
            "dominance": dict(self.dominance),
            "notability": self.notability,
        }


def suggest_subgroups(
    dataset: Dataset,
    ranking_rate: str,
    k: int = DEFAULT_K,
    seed: int = DEFAULT_SEED,
    dominance_threshold: float = DEFAULT_DOMINANCE,
    max_iter: int = DEFAULT_MAX_ITER,
) -> list[SuggestedSubgroup]:
    """Cluster the dataset and rank describable clusters by metric deviation.

    Notability is the absolute deviation of the subgroup's `ranking_rate`
    from the dataset-wide value; ties fall back to size (descending) then
    display name, so the output is a pure function of (dataset, ranking_rate,
    k, seed). Clusters whose description duplicates an earlier predicate set
    keep only the more notable instance. Subgroups with an undefined ranking
    rate are dropped.
    """
    if dataset.row_count == 0:
        raise EmptyDataset("cannot suggest subgroups for an empty dataset")
    k = min(k, dataset.row_count)
    vectors = encode_instances(dataset)
    result = kmeans(vectors, k=k, seed=seed, max_iter=max_iter)
    overall = overall_metrics(dataset)

    by_predicates: dict[tuple, SuggestedSubgroup] = {}
    for cluster in range(k):
        members = np.flatnonzero(result.assignments == cluster)
        if members.size == 0:
            continue
        described = describe_cluster(dataset, members, dominance_threshold)
        if described is None:
            continue
        subgroup, dominance = described
        vector = subgroup_metrics(dataset, subgroup)
        if vector.rate(ranking_rate) is None or overall.rate(ranking_rate) is None:
            continue
        notability = abs(metric_deviation(vector, overall, ranking_rate))
        key = tuple(sorted((p.feature, p.category, p.bin_index) for p in subgroup.predicates))
        existing = by_predicates.get(key)
        if existing is None or notability > existing.notability:
            by_predicates[key] = SuggestedSubgroup(
                subgroup=subgroup,
                source_cluster=cluster,
                dominance=dominance,
                notability=notability,
            )

    return sorted(
        by_predicates.values(),
        key=lambda s: (-s.notability, -s.subgroup.size, s.subgroup.display_name),
    )


def similar_subgroups(
    target: Subgroup, candidates, dataset: Dataset
) -> list[tuple[Subgroup, float]]:
    """Candidates ranked by Euclidean distance between group centroids.

    The distance compares the mean encoded instance vectors of the groups.
    The target itself and empty candidates are excluded.
    """
    if dataset.row_count == 0:
        raise EmptyDataset("cannot rank similarity on an empty dataset")
    vectors = encode_instances(dataset)
    target_mask = membership_mask(dataset, target)
    if not target_mask.any():
        raise EmptyDataset(f"target subgroup {target.display_name!r} has no members")
    target_centroid = vectors[target_mask].mean(axis=0)
    ranked = []
    for candidate in candidates:
        if candidate is target:
            continue
        mask = membership_mask(dataset, candidate)
        if not mask.any():
            continue
        centroid = vectors[mask].mean(axis=0)
        distance = float(np.linalg.norm(centroid - target_centroid))
        ranked.append((candidate, distance))
    ranked.sort(key=lambda pair: (pair[1], pair[0].display_name))
    return ranked
