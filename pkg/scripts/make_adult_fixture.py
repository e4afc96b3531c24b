#!/usr/bin/env python3
"""Generate the bundled income-prediction fixture (data + predictions).

This build environment has no network egress, so the UCI Adult training
split cannot be downloaded. This script synthesizes a stand-in calibrated to
that split's published statistics: the row count and the category counts of
sex, income, occupation, workclass, education, marital-status, relationship,
and race are the exact public values, as is the count of 40-hour rows. Joint
structure (who holds which occupation, income by occupation and sex) is
stylized from documented parameters below, not reconstructed microdata.

Predictions simulate a classifier biased against women. They are assigned by
deterministic quotas inside each (sex, income, occupation, hours-class)
cell: the target rate of predicting "high income" is rounded up for male
cells and down for female cells, which guarantees, stratum by stratum, that
women receive the high-income prediction less often than men. See
fixtures/README.md for the full recipe and the invariants asserted below.

Usage: python3 scripts/make_adult_fixture.py [--out-dir fixtures]
"""

from __future__ import annotations

import argparse
import csv
import math
from pathlib import Path

import numpy as np

SEED = 20240214

# Exact category counts of the public training split (32,561 rows).
OCCUPATION = [
    ("Prof-specialty", 4140), ("Craft-repair", 4099), ("Exec-managerial", 4066),
    ("Adm-clerical", 3770), ("Sales", 3650), ("Other-service", 3295),
    ("Machine-op-inspct", 2002), ("?", 1843), ("Transport-moving", 1597),
    ("Handlers-cleaners", 1370), ("Farming-fishing", 994), ("Tech-support", 928),
    ("Protective-serv", 649), ("Priv-house-serv", 149), ("Armed-Forces", 9),
]
WORKCLASS = [
    ("Private", 22696), ("Self-emp-not-inc", 2541), ("Local-gov", 2093),
    ("?", 1836), ("State-gov", 1298), ("Self-emp-inc", 1116),
    ("Federal-gov", 960), ("Without-pay", 14), ("Never-worked", 7),
]
EDUCATION = [
    ("HS-grad", 10501), ("Some-college", 7291), ("Bachelors", 5355),
    ("Masters", 1723), ("Assoc-voc", 1382), ("11th", 1175), ("Assoc-acdm", 1067),
    ("10th", 933), ("7th-8th", 646), ("Prof-school", 576), ("9th", 514),
    ("12th", 433), ("Doctorate", 413), ("5th-6th", 333), ("1st-4th", 168),
    ("Preschool", 51),
]
EDUCATION_NUM = {
    "Preschool": 1, "1st-4th": 2, "5th-6th": 3, "7th-8th": 4, "9th": 5,
    "10th": 6, "11th": 7, "12th": 8, "HS-grad": 9, "Some-college": 10,
    "Assoc-voc": 11, "Assoc-acdm": 12, "Bachelors": 13, "Masters": 14,
    "Prof-school": 15, "Doctorate": 16,
}
MARITAL = [
    ("Married-civ-spouse", 14976), ("Never-married", 10683), ("Divorced", 4443),
    ("Separated", 1025), ("Widowed", 993), ("Married-spouse-absent", 418),
    ("Married-AF-spouse", 23),
]
RELATIONSHIP = [
    ("Husband", 13193), ("Not-in-family", 8305), ("Own-child", 5068),
    ("Unmarried", 3446), ("Wife", 1568), ("Other-relative", 981),
]
RACE = [
    ("White", 27816), ("Black", 3124), ("Asian-Pac-Islander", 1039),
    ("Amer-Indian-Eskimo", 311), ("Other", 271),
]
# United-States, Mexico, and "?" are the exact public counts; the remainder
# is a plausible allocation over the remaining countries.
NATIVE_COUNTRY = [
    ("United-States", 29170), ("Mexico", 643), ("?", 583), ("Philippines", 198),
    ("Germany", 137), ("Canada", 121), ("Puerto-Rico", 114), ("El-Salvador", 106),
    ("India", 100), ("Cuba", 95), ("England", 90), ("Jamaica", 81), ("South", 80),
    ("China", 75), ("Italy", 73), ("Dominican-Republic", 70), ("Vietnam", 67),
    ("Guatemala", 64), ("Japan", 62), ("Poland", 60), ("Columbia", 59),
    ("Taiwan", 51), ("Haiti", 44), ("Iran", 43), ("Portugal", 37),
    ("Nicaragua", 34), ("Peru", 31), ("France", 29), ("Greece", 29),
    ("Ecuador", 28), ("Ireland", 24), ("Hong", 20), ("Cambodia", 19),
    ("Trinadad&Tobago", 19), ("Laos", 18), ("Thailand", 18), ("Yugoslavia", 16),
    ("Outlying-US(Guam-USVI-etc)", 14), ("Honduras", 13), ("Hungary", 13),
    ("Scotland", 12), ("Holand-Netherlands", 1),
]

N_ROWS = 32561
MALE_TOTAL = 21790          # exact public count
FEMALE_TOTAL = 10771        # exact public count
HIGH_INCOME_TOTAL = 7841    # exact public count of ">50K"
HIGH_INCOME_MALE = 6662     # exact public count
HIGH_INCOME_FEMALE = 1179   # exact public count
HOURS_40 = 15217            # exact public count
HOURS_45 = 1824             # near the public count; treated as synthetic
HOURS_50 = 2819             # near the public count; treated as synthetic

# Stylized male share per occupation (joint structure is synthetic).
MALE_SHARE = {
    "Prof-specialty": 0.62, "Craft-repair": 0.95, "Exec-managerial": 0.71,
    "Adm-clerical": 0.33, "Sales": 0.73, "Other-service": 0.45,
    "Machine-op-inspct": 0.72, "?": 0.64, "Transport-moving": 0.94,
    "Handlers-cleaners": 0.88, "Farming-fishing": 0.92, "Tech-support": 0.67,
    "Protective-serv": 0.89, "Priv-house-serv": 0.05, "Armed-Forces": 0.89,
}

# Stylized probability of truly earning >50K by occupation; scaled by sex so
# the sex totals above are met exactly after integer allocation.
HIGH_INCOME_BY_OCC = {
    "Exec-managerial": 0.48, "Prof-specialty": 0.45, "Protective-serv": 0.32,
    "Tech-support": 0.30, "Sales": 0.27, "Craft-repair": 0.23,
    "Transport-moving": 0.20, "Adm-clerical": 0.13, "Machine-op-inspct": 0.12,
    "Farming-fishing": 0.12, "?": 0.10, "Armed-Forces": 0.11,
    "Handlers-cleaners": 0.06, "Other-service": 0.04, "Priv-house-serv": 0.01,
}
HIGH_INCOME_SEX_FACTOR = {"Male": 1.25, "Female": 0.45}

# Prediction recipe: target rate of predicting ">50K", per cell.
#   among true <=50K rows this rate is the false negative rate;
#   among true  >50K rows it is the true negative rate.
# Male cells sit above the base by the offset, female cells below it, so the
# high-income prediction is systematically rarer for women. The smaller
# Exec-managerial offsets pin that occupation's FNR gap at 0.25 and FPR gap
# at 0.20.
PRED_HIGH_BASE = {"low": 0.22, "high": 0.75}
PRED_SEX_OFFSET = {"low": 0.15, "high": 0.15}
PRED_SEX_OFFSET_EXEC = {"low": 0.125, "high": 0.10}

HOURS_OTHER_WEIGHTS = {
    60: 1475, 35: 1297, 20: 1224, 30: 1149, 55: 694, 25: 674, 48: 517,
    38: 476, 15: 404, 32: 296, 70: 291, 10: 278, 16: 277, 24: 252, 65: 244,
    36: 220, 44: 212, 42: 219, 12: 173, 43: 151, 37: 149, 8: 145, 52: 138,
    80: 133, 28: 130, 99: 85, 46: 82, 18: 75, 75: 66, 6: 64, 5: 60, 90: 30,
    58: 28, 4: 25, 3: 20, 84: 9, 96: 5, 2: 18, 1: 15, 7: 12, 9: 10, 14: 30,
    22: 40, 26: 28, 27: 22, 33: 25, 34: 30, 39: 25, 41: 20, 47: 15, 49: 10,
    54: 25, 56: 15, 62: 10, 66: 5, 72: 10, 77: 5, 85: 8, 88: 5, 95: 5, 98: 8,
}

CAPITAL_GAIN_VALUES = [
    (99999, 159), (15024, 337), (7688, 270), (7298, 240), (3103, 94),
    (5178, 97), (4386, 67), (5013, 110), (2174, 300), (8614, 55), (3325, 52),
    (10520, 40), (4064, 54), (2829, 35), (13550, 25), (6849, 30), (2597, 30),
    (3411, 25), (4650, 40), (2407, 25), (20051, 35), (27828, 30), (1506, 20),
    (2354, 20), (2885, 30), (3137, 25), (4787, 20), (3464, 20), (2963, 15),
    (1055, 25), (594, 30), (914, 25), (991, 25), (1409, 20), (2050, 20),
    (2176, 25), (2202, 20), (2290, 15), (2414, 10), (2538, 10), (2653, 10),
    (2907, 10), (2961, 10), (2977, 10), (2993, 10), (3418, 10), (3432, 10),
    (3818, 10), (3887, 10), (3908, 15), (3942, 10), (4101, 10), (4416, 10),
    (4508, 10), (4865, 10), (4934, 10), (5060, 5), (5455, 10), (5556, 10),
    (5721, 10), (6360, 5), (6418, 10), (6497, 5), (6514, 5), (6723, 5),
    (6767, 5), (7430, 5), (7443, 5), (7896, 5), (9386, 15), (9562, 5),
    (10566, 10), (10605, 10), (11678, 5), (14084, 10), (14344, 10),
    (18481, 5), (22040, 1), (25124, 4), (25236, 11), (34095, 5), (41310, 2),
]
CAPITAL_LOSS_VALUES = [
    (1902, 202), (1977, 168), (1887, 159), (1485, 51), (1848, 51), (1590, 40),
    (1602, 47), (1876, 43), (1740, 42), (1672, 42), (1564, 25), (1408, 21),
    (1719, 22), (1980, 20), (2415, 20), (1579, 18), (1669, 17), (1628, 15),
    (1504, 15), (2051, 15), (2001, 14), (1762, 14), (1741, 13), (1258, 12),
    (2339, 12), (2179, 12), (1340, 12), (2002, 12), (1579, 10), (1974, 10),
    (2042, 10), (2258, 10), (2377, 10), (2392, 10), (2444, 10), (2457, 10),
    (2467, 5), (2547, 5), (2559, 5), (2603, 5), (2754, 5), (2824, 5),
    (3004, 5), (3683, 5), (3770, 5), (3900, 5), (4356, 5), (1138, 10),
    (1092, 10), (1211, 10), (1380, 10), (1429, 10), (1510, 10), (155, 10),
    (213, 5), (323, 5), (419, 4), (625, 10), (653, 5), (810, 5), (880, 10),
    (974, 5), (1062, 5),
]


def allocate_integers(targets: list[float], total: int, caps: list[int]) -> list[int]:
    """Round fractional targets to integers summing to `total`, within caps.

    Targets are first rescaled so they sum to `total` (keeping proportions),
    then floored, with the remainder spread by largest fractional part.
    """
    if total > sum(caps):
        raise RuntimeError("caps too tight to reach requested total")
    weight = sum(targets)
    if weight <= 0:
        scaled = [total / len(targets)] * len(targets)
    else:
        scaled = [t * total / weight for t in targets]
    counts = [max(min(int(math.floor(x)), cap), 0) for x, cap in zip(scaled, caps)]
    remainder = total - sum(counts)
    order = sorted(range(len(targets)), key=lambda i: -(scaled[i] - math.floor(scaled[i])))
    while remainder > 0:
        progressed = False
        for i in order:
            if remainder == 0:
                break
            if counts[i] < caps[i]:
                counts[i] += 1
                remainder -= 1
                progressed = True
        if not progressed:
            raise RuntimeError("allocation did not converge")
    assert sum(counts) == total
    assert all(0 <= c <= cap for c, cap in zip(counts, caps))
    return counts


def pool_from_counts(pairs, total=None) -> list:
    pool = []
    for value, count in pairs:
        pool.extend([value] * count)
    if total is not None:
        assert len(pool) == total, (len(pool), total)
    return pool


def build_hours_pool() -> list[int]:
    fixed = [(40, HOURS_40), (45, HOURS_45), (50, HOURS_50)]
    remaining = N_ROWS - sum(c for _, c in fixed)
    values = sorted(HOURS_OTHER_WEIGHTS)
    weights = [HOURS_OTHER_WEIGHTS[v] for v in values]
    scale = remaining / sum(weights)
    counts = allocate_integers([w * scale for w in weights], remaining,
                               [remaining] * len(values))
    return pool_from_counts(fixed) + pool_from_counts(list(zip(values, counts)))


def build_age_pool(rng: np.random.Generator) -> list[int]:
    ages = np.arange(17, 91)
    weights = 0.75 * np.exp(-0.5 * ((ages - 37) / 13.5) ** 2) \
        + 0.25 * np.exp(-0.5 * ((ages - 24) / 4.5) ** 2)
    counts = allocate_integers(list(weights / weights.sum() * N_ROWS), N_ROWS,
                               [N_ROWS] * len(ages))
    return pool_from_counts(list(zip(ages.tolist(), counts)))


def build_capital_pool(pairs, nonzero_total: int) -> list[int]:
    values = [v for v, _ in pairs]
    weights = [c for _, c in pairs]
    scale = nonzero_total / sum(weights)
    counts = allocate_integers([w * scale for w in weights], nonzero_total,
                               [nonzero_total] * len(values))
    pool = pool_from_counts(list(zip(values, counts)))
    return [0] * (N_ROWS - nonzero_total) + pool


def hours_class(h: int) -> int:
    if h == 40:
        return 0
    if h == 45:
        return 1
    if h == 50:
        return 2
    return 3


def generate() -> dict[str, np.ndarray]:
    rng = np.random.default_rng(SEED)
    occ_names = [name for name, _ in OCCUPATION]
    occ_counts = [count for _, count in OCCUPATION]

    occupation = np.repeat(np.array(occ_names, dtype=object), occ_counts)

    # Sex within occupation: stylized shares, corrected to the exact male total.
    male_counts = allocate_integers(
        [MALE_SHARE[name] * count for name, count in OCCUPATION],
        MALE_TOTAL, occ_counts,
    )
    sex = np.empty(N_ROWS, dtype=object)
    offset = 0
    for (name, count), males in zip(OCCUPATION, male_counts):
        sex[offset:offset + males] = "Male"
        sex[offset + males:offset + count] = "Female"
        offset += count

    # Income within (occupation, sex): stylized rates, corrected per sex.
    income_high = np.zeros(N_ROWS, dtype=bool)
    for which, factor, total in (
        ("Male", HIGH_INCOME_SEX_FACTOR["Male"], HIGH_INCOME_MALE),
        ("Female", HIGH_INCOME_SEX_FACTOR["Female"], HIGH_INCOME_FEMALE),
    ):
        cells = []
        for name, _ in OCCUPATION:
            idx = np.flatnonzero((occupation == name) & (sex == which))
            cells.append(idx)
        targets = [
            min(HIGH_INCOME_BY_OCC[name] * factor, 0.9) * len(idx)
            for (name, _), idx in zip(OCCUPATION, cells)
        ]
        counts = allocate_integers(targets, total, [len(idx) for idx in cells])
        for idx, k in zip(cells, counts):
            income_high[idx[:k]] = True

    hours = np.array(build_hours_pool())
    rng.shuffle(hours)

    # Predictions: quota per (sex, income, occupation, hours-class) cell.
    predicted_high = np.zeros(N_ROWS, dtype=bool)
    hclasses = np.array([hours_class(h) for h in hours])
    for name, _ in OCCUPATION:
        offsets = PRED_SEX_OFFSET_EXEC if name == "Exec-managerial" else PRED_SEX_OFFSET
        for which in ("Male", "Female"):
            sign = 1.0 if which == "Male" else -1.0
            for high in (False, True):
                band = "high" if high else "low"
                rate = PRED_HIGH_BASE[band] + sign * offsets[band]
                for hclass in range(4):
                    idx = np.flatnonzero(
                        (occupation == name) & (sex == which)
                        & (income_high == high)
                        & (hclasses == hclass)
                    )
                    if idx.size == 0:
                        continue
                    want = rate * idx.size
                    k = math.ceil(want) if which == "Male" else math.floor(want)
                    k = min(k, idx.size)
                    rng.shuffle(idx)
                    predicted_high[idx[:k]] = True

    # Workclass: "?" and Never-worked rows coincide with occupation "?".
    workclass = np.empty(N_ROWS, dtype=object)
    unknown_occ = np.flatnonzero(occupation == "?")
    assert unknown_occ.size == 1843
    workclass[unknown_occ[:1836]] = "?"
    workclass[unknown_occ[1836:]] = "Never-worked"
    rest_pool = pool_from_counts([(n, c) for n, c in WORKCLASS if n not in ("?", "Never-worked")])
    rest_pool = np.array(rest_pool, dtype=object)
    rng.shuffle(rest_pool)
    workclass[occupation != "?"] = rest_pool

    # Relationship respects sex (Husband male-only, Wife female-only).
    relationship = np.empty(N_ROWS, dtype=object)
    male_idx = np.flatnonzero(sex == "Male")
    female_idx = np.flatnonzero(sex == "Female")
    rng.shuffle(male_idx)
    rng.shuffle(female_idx)
    other_rel = [(n, c) for n, c in RELATIONSHIP if n not in ("Husband", "Wife")]
    male_rest = len(male_idx) - 13193
    shares = [c for _, c in other_rel]
    male_other = allocate_integers(
        [c / sum(shares) * male_rest for c in shares], male_rest, shares)
    relationship[male_idx[:13193]] = "Husband"
    cursor = 13193
    female_pool = []
    for (name, count), males in zip(other_rel, male_other):
        relationship[male_idx[cursor:cursor + males]] = name
        cursor += males
        female_pool.extend([name] * (count - males))
    relationship[female_idx[:1568]] = "Wife"
    female_pool = np.array(female_pool, dtype=object)
    rng.shuffle(female_pool)
    relationship[female_idx[1568:]] = female_pool

    # Marital status: spouses are married; the rest is a shuffled pool.
    marital = np.empty(N_ROWS, dtype=object)
    spouse = (relationship == "Husband") | (relationship == "Wife")
    non_spouse_idx = np.flatnonzero(~spouse)
    rng.shuffle(non_spouse_idx)
    marital[spouse] = "Married-civ-spouse"
    extra_married = 14976 - int(spouse.sum())
    marital[non_spouse_idx[:extra_married]] = "Married-civ-spouse"
    rest = non_spouse_idx[extra_married:]
    pool = pool_from_counts([(n, c) for n, c in MARITAL if n != "Married-civ-spouse"])
    pool = np.array(pool, dtype=object)
    rng.shuffle(pool)
    marital[rest] = pool[:rest.size]

    def shuffled_pool(pairs, total=N_ROWS):
        pool = np.array(pool_from_counts(pairs, total), dtype=object)
        rng.shuffle(pool)
        return pool

    education = shuffled_pool(EDUCATION)
    education_num = np.array([EDUCATION_NUM[e] for e in education])
    race = shuffled_pool(RACE)
    native_country = shuffled_pool(NATIVE_COUNTRY)
    age = np.array(build_age_pool(rng))
    rng.shuffle(age)
    fnlwgt = np.clip(np.exp(rng.normal(12.05, 0.46, N_ROWS)), 13000, 1400000).astype(int)
    capital_gain = np.array(build_capital_pool(CAPITAL_GAIN_VALUES, 2712))
    rng.shuffle(capital_gain)
    capital_loss = np.array(build_capital_pool(CAPITAL_LOSS_VALUES, 1519))
    rng.shuffle(capital_loss)

    order = rng.permutation(N_ROWS)
    columns = {
        "age": age, "workclass": workclass, "fnlwgt": fnlwgt,
        "education": education, "education-num": education_num,
        "marital-status": marital, "occupation": occupation,
        "relationship": relationship, "race": race, "sex": sex,
        "capital-gain": capital_gain, "capital-loss": capital_loss,
        "hours-per-week": hours, "native-country": native_country,
    }
    columns = {name: col[order] for name, col in columns.items()}
    columns["income"] = np.where(income_high[order], ">50K", "<=50K")
    # Label convention of the audit walkthrough: 1 = earns <=50K.
    columns["prediction"] = np.where(predicted_high[order], 0, 1)
    return columns


def verify(columns: dict[str, np.ndarray]) -> list[str]:
    """Assert the invariants the audit walkthrough depends on."""
    sex = columns["sex"]
    occupation = columns["occupation"]
    hours = columns["hours-per-week"]
    income_high = columns["income"] == ">50K"
    predicted_high = columns["prediction"] == 0
    report = []

    assert len(sex) == N_ROWS
    assert int((sex == "Male").sum()) == MALE_TOTAL
    assert int(income_high.sum()) == HIGH_INCOME_TOTAL
    assert int((hours == 40).sum()) == HOURS_40

    def high_rate(mask):
        return predicted_high[mask].mean()

    male = sex == "Male"
    female = sex == "Female"
    overall_gap = high_rate(male) - high_rate(female)
    assert overall_gap > 0.1, overall_gap
    report.append(f"overall high-income prediction rate gap (M-F): {overall_gap:.3f}")

    for name, count in OCCUPATION:
        stratum = occupation == name
        if int(stratum.sum()) < 20:
            continue
        gap = high_rate(stratum & male) - high_rate(stratum & female)
        assert gap > 0.1, (name, gap)
        report.append(f"occupation {name}: gap {gap:.3f} (n={int(stratum.sum())})")

    for h in (40, 45, 50):
        stratum = hours == h
        gap = high_rate(stratum & male) - high_rate(stratum & female)
        assert gap > 0.15, (h, gap)
        report.append(f"hours {h}: gap {gap:.3f} (n={int(stratum.sum())})")

    exec_mask = occupation == "Exec-managerial"
    low = ~income_high
    fnr_m = predicted_high[exec_mask & male & low].mean()
    fnr_f = predicted_high[exec_mask & female & low].mean()
    fpr_m = 1.0 - predicted_high[exec_mask & male & income_high].mean()
    fpr_f = 1.0 - predicted_high[exec_mask & female & income_high].mean()
    assert abs((fnr_f - fnr_m) + 0.25) < 0.02, (fnr_f, fnr_m)
    assert abs((fpr_f - fpr_m) - 0.20) < 0.02, (fpr_f, fpr_m)
    report.append(f"Exec-managerial FNR M/F: {fnr_m:.3f}/{fnr_f:.3f}  FPR M/F: {fpr_m:.3f}/{fpr_f:.3f}")

    # Ground truth keeps the realistic income ordering inside every stratum
    # large enough for the share to be meaningful per sex.
    for name, _ in OCCUPATION:
        stratum = occupation == name
        if int((stratum & male).sum()) < 30 or int((stratum & female).sum()) < 30:
            continue
        assert income_high[stratum & male].mean() >= income_high[stratum & female].mean(), name
    return report


def write_files(columns: dict[str, np.ndarray], out_dir: Path) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    data_columns = [
        "age", "workclass", "fnlwgt", "education", "education-num",
        "marital-status", "occupation", "relationship", "race", "sex",
        "capital-gain", "capital-loss", "hours-per-week", "native-country",
        "income",
    ]
    with open(out_dir / "adult.csv", "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(data_columns)
        for i in range(N_ROWS):
            writer.writerow([columns[name][i] for name in data_columns])
    with open(out_dir / "adult_predictions.csv", "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["prediction"])
        for i in range(N_ROWS):
            writer.writerow([columns["prediction"][i]])


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out-dir", default="fixtures", type=Path)
    args = parser.parse_args()
    columns = generate()
    for line in verify(columns):
        print(line)
    write_files(columns, args.out_dir)
    print(f"wrote {args.out_dir}/adult.csv and {args.out_dir}/adult_predictions.csv")


if __name__ == "__main__":
    main()
