"""Independent brute-force oracle: plain-Python row scans and pair loops.

Everything here is deliberately written against raw row data (lists of
dicts), with no imports from the package under test, so it stays an
independent check of the engine's vectorized implementations.
"""

from __future__ import annotations


def confusion_counts(rows, mask=None):
    """Row-scan confusion counts over rows = [{'label': .., 'prediction': ..}, ...]."""
    tp = fp = tn = fn = 0
    for i, row in enumerate(rows):
        if mask is not None and not mask[i]:
            continue
        if row["label"] == 1 and row["prediction"] == 1:
            tp += 1
        elif row["label"] == 0 and row["prediction"] == 1:
            fp += 1
        elif row["label"] == 0 and row["prediction"] == 0:
            tn += 1
        else:
            fn += 1
    return {"tp": tp, "fp": fp, "tn": tn, "fn": fn}


def rates(counts):
    """Each rate computed directly from its own counts (no complements)."""
    tp, fp, tn, fn = counts["tp"], counts["fp"], counts["tn"], counts["fn"]
    n = tp + fp + tn + fn

    def div(a, b):
        return a / b if b else None

    return {
        "size": n,
        "accuracy": div(tp + tn, n),
        "precision": div(tp, tp + fp),
        "recall": div(tp, tp + fn),
        "tpr": div(tp, tp + fn),
        "tnr": div(tn, tn + fp),
        "fpr": div(fp, fp + tn),
        "fnr": div(fn, fn + tp),
        "positive_rate": div(tp + fp, n),
        "negative_rate": div(tn + fn, n),
        "base_rate": div(tp + fn, n),
    }


def group_rate(rows, member_mask, rate_kind):
    return rates(confusion_counts(rows, member_mask))[rate_kind]


def favourable_rate_kind(favourable_class):
    return "positive_rate" if favourable_class == 1 else "negative_rate"


def max_pairwise_difference(values):
    """Exhaustive pair loop over defined values."""
    defined = [v for v in values if v is not None]
    best = 0.0
    for i in range(len(defined)):
        for j in range(i + 1, len(defined)):
            diff = abs(defined[i] - defined[j])
            if diff > best:
                best = diff
    return best


def min_ratio(values):
    defined = [v for v in values if v is not None]
    if not defined or max(defined) <= 0:
        return None
    return min(defined) / max(defined)


def parity(rows, group_masks, rate_kind, threshold):
    """group_masks: list of (group_id, boolean list). Mirrors a parity check."""
    per_group = [(gid, group_rate(rows, mask, rate_kind)) for gid, mask in group_masks]
    values = [rate for _, rate in per_group]
    spread = max_pairwise_difference(values)
    return {
        "per_group": per_group,
        "max_abs_difference": spread,
        "min_ratio": min_ratio(values),
        "satisfied": spread <= threshold,
    }


def conditional_parity(rows, sensitive, legitimate, favourable_class, threshold,
                       min_stratum_size):
    """Nested-loop stratified parity over raw feature values.

    Returns {stratum_key: parity dict} for qualifying strata plus the
    combined verdict; strata with fewer than two populated sensitive groups
    are listed under 'skipped'.
    """
    combos = {}
    for row in rows:
        key = tuple(row[attr] for attr in legitimate)
        combos.setdefault(key, []).append(row)
    rate_kind = favourable_rate_kind(favourable_class)
    strata = {}
    skipped = []
    for key in sorted(combos, key=repr):
        members = combos[key]
        if len(members) < min_stratum_size:
            continue
        groups = {}
        for row in members:
            groups.setdefault(row[sensitive], []).append(row)
        per_group = []
        for value in sorted(groups, key=repr):
            counts = confusion_counts(groups[value])
            per_group.append((value, rates(counts)[rate_kind]))
        if sum(1 for _, r in per_group if r is not None) < 2:
            skipped.append(key)
            continue
        values = [r for _, r in per_group]
        spread = max_pairwise_difference(values)
        strata[key] = {
            "per_group": per_group,
            "max_abs_difference": spread,
            "satisfied": spread <= threshold,
        }
    return {
        "strata": strata,
        "skipped": skipped,
        "satisfied": all(s["satisfied"] for s in strata.values()) if strata else None,
    }


def deviation(rows, member_mask, rate_kind):
    sub = group_rate(rows, member_mask, rate_kind)
    whole = group_rate(rows, [True] * len(rows), rate_kind)
    if sub is None or whole is None:
        return None
    return sub - whole


def best_subgroup_deviation(rows, features, rate_kind, max_predicates=2):
    """Exhaustive search over all 1- and 2-predicate subgroups.

    Returns (best_absolute_deviation, best_predicates). Only non-empty
    subgroups with a defined rate participate.
    """
    values_by_feature = {
        f: sorted({row[f] for row in rows}, key=repr) for f in features
    }
    candidates = []
    feats = list(features)
    for i, f in enumerate(feats):
        for value in values_by_feature[f]:
            candidates.append(((f, value),))
            if max_predicates >= 2:
                for g in feats[i + 1:]:
                    for other in values_by_feature[g]:
                        candidates.append(((f, value), (g, other)))
    best = (0.0, None)
    for predicates in candidates:
        mask = [all(row[f] == v for f, v in predicates) for row in rows]
        if not any(mask):
            continue
        dev = deviation(rows, mask, rate_kind)
        if dev is None:
            continue
        if abs(dev) > best[0]:
            best = (abs(dev), predicates)
    return best
