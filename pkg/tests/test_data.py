import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from faircompass.data import (
    EqualWidth,
    ExplicitEdges,
    IngestConfig,
    attach_predictions,
    bin_numeric,
    export_config,
    export_csv,
    feature_distribution,
    load_dataset,
)
from faircompass.errors import (
    InvalidEdges,
    MissingColumn,
    NonBinaryLabel,
    NotNumeric,
    RaggedRow,
    UnknownFeature,
    UnparseableNumeric,
)

CFG = IngestConfig(label_column="y", prediction_column="yh")


def test_load_basic_categories_ordered_by_frequency_then_name():
    text = "color,y,yh\nred,1,1\nblue,0,0\nred,1,0\ngreen,0,1\nblue,1,1\nred,0,0\n"
    ds = load_dataset(text, CFG)
    assert ds.row_count == 6
    assert ds.feature("color").categories == ("red", "blue", "green")


def test_load_missing_token_becomes_question_mark_category():
    text = "color,y,yh\nred,1,1\nNA,0,0\n"
    ds = load_dataset(text, IngestConfig(label_column="y", prediction_column="yh",
                                         missing_token="NA"))
    assert "?" in ds.feature("color").categories


def test_load_empty_body_valid_header():
    ds = load_dataset("color,y,yh\n", CFG)
    assert ds.row_count == 0
    hist = feature_distribution(ds, "color")
    assert hist.bins == () and hist.total == 0


def test_load_non_binary_label_names_row_and_column():
    text = "color,y,yh\nred,1,1\nblue,0,0\ngreen,2,1\nred,1,0\n"
    with pytest.raises(NonBinaryLabel) as excinfo:
        load_dataset(text, CFG)
    assert excinfo.value.row == 3
    assert excinfo.value.column == "y"


def test_load_missing_column():
    with pytest.raises(MissingColumn) as excinfo:
        load_dataset("color,y\nred,1\n", CFG)
    assert excinfo.value.column == "yh"


def test_load_ragged_row_names_row():
    text = "color,y,yh\nred,1,1\nblue,0\n"
    with pytest.raises(RaggedRow) as excinfo:
        load_dataset(text, CFG)
    assert excinfo.value.row == 2


def test_load_unparseable_numeric_names_row_and_column():
    text = "hours,y,yh\n40,1,1\nmany,0,0\n"
    cfg = IngestConfig(label_column="y", prediction_column="yh", numeric_columns=("hours",))
    with pytest.raises(UnparseableNumeric) as excinfo:
        load_dataset(text, cfg)
    assert excinfo.value.row == 2
    assert excinfo.value.column == "hours"


def test_load_class_aliases():
    text = "color,income,yh\nred,<=50K,1\nblue,>50K,0\n"
    cfg = IngestConfig(label_column="income", prediction_column="yh",
                       class_aliases={"<=50K": 1, ">50K": 0})
    ds = load_dataset(text, cfg)
    assert ds.label.tolist() == [1, 0]


def test_load_is_deterministic():
    text = "color,y,yh\nred,1,1\nblue,0,0\nred,0,1\n"
    a = load_dataset(text, CFG)
    b = load_dataset(text, CFG)
    assert a == b and a.id == b.id


def test_score_column_parsed_and_validated():
    text = "c,y,yh,s\nx,1,1,0.25\ny,0,0,0.75\n"
    cfg = IngestConfig(label_column="y", prediction_column="yh", score_column="s")
    ds = load_dataset(text, cfg)
    assert ds.score.tolist() == [0.25, 0.75]
    bad = "c,y,yh,s\nx,1,1,1.5\n"
    with pytest.raises(UnparseableNumeric):
        load_dataset(bad, cfg)


def test_distribution_hand_enumeration():
    text = "sex,y,yh\nM,1,1\nM,0,0\nM,1,0\nF,0,1\nF,1,1\n?,0,0\n"
    ds = load_dataset(text, CFG)
    hist = feature_distribution(ds, "sex")
    assert dict(hist.bins) == {"M": 3, "F": 2, "?": 1}
    assert hist.total == 6


def test_distribution_degenerate_single_value():
    text = "sex,y,yh\nM,1,1\nM,0,0\nM,1,0\n"
    ds = load_dataset(text, CFG)
    hist = feature_distribution(ds, "sex")
    assert hist.bins == (("M", 3),)


def test_distribution_unknown_feature():
    text = "sex,y,yh\nM,1,1\n"
    with pytest.raises(UnknownFeature):
        feature_distribution(load_dataset(text, CFG), "age")


def _numeric_dataset(values):
    body = "\n".join(f"{v},1,1" for v in values)
    return load_dataset(f"hours,y,yh\n{body}\n",
                        IngestConfig(label_column="y", prediction_column="yh",
                                     numeric_columns=("hours",)))


def test_equal_width_edges():
    ds = _numeric_dataset(range(101))
    spec = bin_numeric(ds, "hours", EqualWidth(4))
    assert spec.bin_edges == (0.0, 25.0, 50.0, 75.0, 100.0)


def test_equal_width_single_bin_covers_range():
    ds = _numeric_dataset([3, 9, 5])
    spec = bin_numeric(ds, "hours", EqualWidth(1))
    assert spec.bin_edges == (3.0, 9.0)


def test_equal_width_binning_idempotent():
    ds = _numeric_dataset(range(11))
    assert bin_numeric(ds, "hours", EqualWidth(5)) == bin_numeric(ds, "hours", EqualWidth(5))


def test_explicit_edges_assignment_and_coverage():
    values = [30, 32, 35, 39, 40, 44, 45, 50, 55, 59]
    ds = _numeric_dataset(values)
    spec = bin_numeric(ds, "hours", ExplicitEdges([30, 40, 50, 60]))
    assert spec.n_bins == 3
    expected_bins = {30: 0, 32: 0, 35: 0, 39: 0, 40: 1, 44: 1, 45: 1, 50: 2, 55: 2, 59: 2}
    for value, bin_index in expected_bins.items():
        assert spec.bin_index_of(value) == bin_index
    out_of_range = _numeric_dataset(values + [75])
    with pytest.raises(InvalidEdges):
        bin_numeric(out_of_range, "hours", ExplicitEdges([30, 40, 50, 60]))


def test_explicit_edges_must_increase():
    ds = _numeric_dataset([1, 2, 3])
    with pytest.raises(InvalidEdges):
        bin_numeric(ds, "hours", ExplicitEdges([1, 1, 3]))


def test_bin_numeric_rejects_categorical():
    text = "sex,y,yh\nM,1,1\n"
    with pytest.raises(NotNumeric):
        bin_numeric(load_dataset(text, CFG), "sex", EqualWidth(2))


def test_last_bin_is_closed():
    # edges [0, 5, 10]: 0 -> [0,5); 5 and 10 -> [5,10] (last interval closed)
    ds = _numeric_dataset([0, 5, 10])
    binned = ds.with_feature(bin_numeric(ds, "hours", EqualWidth(2)))
    hist = feature_distribution(binned, "hours")
    assert [count for _, count in hist.bins] == [1, 2]


def test_unit_width_integer_bin_label_is_the_value():
    ds = _numeric_dataset([1, 40, 99])
    spec = bin_numeric(ds, "hours", ExplicitEdges([1, 40, 41, 100]))
    assert spec.bin_label(1) == "40"
    assert spec.bin_label(0) == "[1, 40)"


@given(
    st.lists(
        st.tuples(st.sampled_from("abc"), st.integers(0, 1), st.integers(0, 1)),
        min_size=0, max_size=40,
    )
)
@settings(max_examples=60, deadline=None)
def test_histogram_conservation(rows):
    body = "".join(f"{c},{y},{yh}\n" for c, y, yh in rows)
    ds = load_dataset("color,y,yh\n" + body, CFG)
    hist = feature_distribution(ds, "color")
    assert sum(count for _, count in hist.bins) == hist.total == ds.row_count


def test_round_trip_export_reload():
    text = ("color,hours,y,yh,s\n"
            "red,40,1,1,0.5\n"
            "blue,35.5,0,0,0.25\n"
            "red,52,1,0,1.0\n")
    cfg = IngestConfig(label_column="y", prediction_column="yh", score_column="s",
                       numeric_columns=("hours",))
    ds = load_dataset(text, cfg)
    reloaded = load_dataset(export_csv(ds), export_config(ds))
    assert reloaded.feature("color").categories == ds.feature("color").categories
    assert np.array_equal(reloaded.columns["color"], ds.columns["color"])
    assert np.array_equal(reloaded.columns["hours"], ds.columns["hours"])
    assert np.array_equal(reloaded.label, ds.label)
    assert np.array_equal(reloaded.prediction, ds.prediction)
    assert np.array_equal(reloaded.score, ds.score)


def test_attach_predictions_merges_row_aligned():
    data = "c,y\nx,1\nz,0\n"
    preds = "prediction\n0\n1\n"
    merged = attach_predictions(data, preds)
    ds = load_dataset(merged, IngestConfig(label_column="y", prediction_column="prediction"))
    assert ds.prediction.tolist() == [0, 1]


def test_attach_predictions_rejects_misaligned():
    with pytest.raises(RaggedRow):
        attach_predictions("c,y\nx,1\n", "prediction\n0\n1\n")
    with pytest.raises(MissingColumn):
        attach_predictions("c,y\nx,1\n", "other\n0\n")
