import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from faircompass.data import ExplicitEdges, IngestConfig, bin_numeric, load_dataset
from faircompass.errors import (
    EmptySet,
    NotBinned,
    ProductTooLarge,
    StaleSubgroup,
    UnknownValue,
)
from faircompass.subgroups import (
    Predicate,
    Subgroup,
    generate_subgroups,
    make_subgroup,
    membership_mask,
)

CFG = IngestConfig(label_column="y", prediction_column="yh")


def _dataset(text):
    return load_dataset(text, CFG)


SIX_ROW = (
    "sex,occ,y,yh\n"
    "M,A,1,1\n"
    "M,A,0,0\n"
    "F,B,1,0\n"
    "M,B,0,1\n"
    "F,A,1,1\n"
    "F,B,0,0\n"
)


def test_membership_mask_hand_enumeration():
    ds = _dataset(SIX_ROW)
    group = make_subgroup(ds, [Predicate(feature="sex", category="M")])
    mask = membership_mask(ds, group)
    assert mask.tolist() == [True, True, False, True, False, False]
    assert int(mask.sum()) == group.size == 3


def test_all_rows_predicate_matches_row_count():
    text = "sex,y,yh\nM,1,1\nM,0,0\nM,1,0\n"
    ds = _dataset(text)
    group = make_subgroup(ds, [Predicate(feature="sex", category="M")])
    assert group.size == ds.row_count
    assert membership_mask(ds, group).all()


def test_one_predicate_per_feature_enforced():
    ds = _dataset(SIX_ROW)
    with pytest.raises(ValueError):
        make_subgroup(ds, [Predicate(feature="sex", category="M"),
                           Predicate(feature="sex", category="F")])


def test_predicate_needs_exactly_one_matcher():
    with pytest.raises(ValueError):
        Predicate(feature="sex")
    with pytest.raises(ValueError):
        Predicate(feature="sex", category="M", bin_index=0)


def test_generate_cartesian_excludes_empty_combinations():
    text = "sex,occ,y,yh\nM,A,1,1\nM,B,0,0\nF,A,1,0\nM,A,0,1\n"
    ds = _dataset(text)
    groups = generate_subgroups(ds, [("sex", None), ("occ", None)])
    names = [g.display_name for g in groups]
    assert "F, B" not in names
    assert sorted(names) == ["F, A", "M, A", "M, B"]


def test_generate_respects_whitelist_order_and_display_names():
    ds = _dataset(SIX_ROW)
    groups = generate_subgroups(ds, [("sex", ["M", "F"]), ("occ", ["A", "B"])])
    assert [g.display_name for g in groups] == ["M, A", "M, B", "F, A", "F, B"]
    sizes = {g.display_name: g.size for g in groups}
    assert sizes == {"M, A": 2, "M, B": 1, "F, A": 1, "F, B": 2}


def test_generate_unknown_value_rejected():
    ds = _dataset(SIX_ROW)
    with pytest.raises(UnknownValue):
        generate_subgroups(ds, [("sex", ["M", "X"])])


def test_generate_cap():
    ds = _dataset(SIX_ROW)
    with pytest.raises(ProductTooLarge):
        generate_subgroups(ds, [("sex", None), ("occ", None)], cap=3)


def test_generate_requires_selection():
    ds = _dataset(SIX_ROW)
    with pytest.raises(EmptySet):
        generate_subgroups(ds, [])


def test_generate_is_pure():
    ds = _dataset(SIX_ROW)
    a = generate_subgroups(ds, [("sex", None), ("occ", None)])
    b = generate_subgroups(ds, [("sex", None), ("occ", None)])
    assert a == b


def test_stale_subgroup_detected():
    ds = _dataset(SIX_ROW)
    other = _dataset(SIX_ROW.replace("F,B,0,0", "F,B,1,1"))
    group = make_subgroup(ds, [Predicate(feature="sex", category="M")])
    with pytest.raises(StaleSubgroup):
        membership_mask(other, group)


def test_numeric_predicates_require_binning():
    text = "hours,y,yh\n40,1,1\n45,0,0\n50,1,0\n"
    ds = load_dataset(text, IngestConfig(label_column="y", prediction_column="yh",
                                         numeric_columns=("hours",)))
    with pytest.raises(NotBinned):
        generate_subgroups(ds, [("hours", None)])
    binned = ds.with_feature(bin_numeric(ds, "hours", ExplicitEdges([40, 41, 45, 46, 51])))
    groups = generate_subgroups(binned, [("hours", [0, 2])])
    assert [g.display_name for g in groups] == ["40", "45"]
    assert [g.size for g in groups] == [1, 1]


def test_manual_empty_subgroup_allowed():
    text = "sex,occ,y,yh\nM,A,1,1\nF,B,0,0\n"
    ds = _dataset(text)
    group = make_subgroup(ds, [Predicate(feature="sex", category="M"),
                               Predicate(feature="occ", category="B")])
    assert group.size == 0


@st.composite
def two_feature_rows(draw):
    n = draw(st.integers(min_value=1, max_value=30))
    return [
        (draw(st.sampled_from("MF")), draw(st.sampled_from("ABC")),
         draw(st.integers(0, 1)), draw(st.integers(0, 1)))
        for _ in range(n)
    ]


@given(two_feature_rows())
@settings(max_examples=50, deadline=None)
def test_partition_property(rows):
    body = "".join(f"{s},{o},{y},{yh}\n" for s, o, y, yh in rows)
    ds = _dataset("sex,occ,y,yh\n" + body)
    groups = generate_subgroups(ds, [("sex", None), ("occ", None)])
    # Full cartesian generation partitions the rows: sizes add up and each
    # row belongs to exactly one emitted combination.
    assert sum(g.size for g in groups) == ds.row_count
    membership = np.zeros(ds.row_count, dtype=int)
    for g in groups:
        membership += membership_mask(ds, g).astype(int)
    assert (membership == 1).all()


@given(two_feature_rows())
@settings(max_examples=50, deadline=None)
def test_mask_conjunction_property(rows):
    body = "".join(f"{s},{o},{y},{yh}\n" for s, o, y, yh in rows)
    ds = _dataset("sex,occ,y,yh\n" + body)
    sex_value = rows[0][0]
    occ_value = rows[0][1]
    g = make_subgroup(ds, [Predicate(feature="sex", category=sex_value)])
    h = make_subgroup(ds, [Predicate(feature="occ", category=occ_value)])
    gh = make_subgroup(ds, [Predicate(feature="sex", category=sex_value),
                            Predicate(feature="occ", category=occ_value)])
    combined = membership_mask(ds, g) & membership_mask(ds, h)
    assert np.array_equal(combined, membership_mask(ds, gh))


def test_subgroup_ids_deterministic_and_order_insensitive():
    ds = _dataset(SIX_ROW)
    a = make_subgroup(ds, [Predicate(feature="sex", category="M"),
                           Predicate(feature="occ", category="A")])
    b = make_subgroup(ds, [Predicate(feature="occ", category="A"),
                           Predicate(feature="sex", category="M")])
    assert a.id == b.id


def test_subgroup_serialization_round_trip():
    ds = _dataset(SIX_ROW)
    group = make_subgroup(ds, [Predicate(feature="sex", category="M")])
    assert Subgroup.from_dict(group.to_dict()) == group
