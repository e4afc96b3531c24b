import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from faircompass.compass import load_default_tree
from faircompass.data import IngestConfig, load_dataset
from faircompass.errors import (
    EmptySet,
    MissingInput,
    NoDefinitionSelected,
    NotAQuestion,
    OffPath,
    UnknownAnswer,
    UnknownGroupSet,
)
from faircompass.metrics import CompositeParity
from faircompass.report import render_markdown
from faircompass.session import (
    EXPLORATION,
    GUIDANCE,
    INFORMED_ANALYSIS,
    AuditSession,
    count_loop_iterations,
)

CFG = IngestConfig(label_column="y", prediction_column="yh")

TEXT = (
    "sex,occ,y,yh\n"
    "M,A,1,1\nM,A,0,0\nM,B,1,0\nM,B,0,1\nM,A,1,1\n"
    "F,A,1,0\nF,A,0,1\nF,B,1,1\nF,B,0,0\nF,B,1,1\n"
)


def _counter_clock():
    counter = itertools.count()
    return lambda: f"2024-01-01T00:00:{next(counter):02d}+00:00"


@pytest.fixture()
def session():
    ds = load_dataset(TEXT, CFG)
    return AuditSession("t", ds, load_default_tree(), clock=_counter_clock())


def test_full_path_selects_conditional_parity(session):
    session.navigate("policy", "No")
    session.navigate("equal-base-rates", "No, but should be")
    node = session.navigate("explaining-variables", "Yes")
    assert node.kind == "leaf"
    assert session.selected_definition == "conditional_statistical_parity"
    assert session.tree_path == [("policy", "No"),
                                 ("equal-base-rates", "No, but should be"),
                                 ("explaining-variables", "Yes")]


def test_backtrack_then_same_answer_restores_state(session):
    session.navigate("policy", "No")
    session.navigate("equal-base-rates", "No, but should be")
    before = (list(session.tree_path), session.frontier(), session.selected_definition)
    session.backtrack(1)
    session.navigate("equal-base-rates", "No, but should be")
    after = (list(session.tree_path), session.frontier(), session.selected_definition)
    assert before == after


def test_unknown_answer_rejected(session):
    with pytest.raises(UnknownAnswer):
        session.navigate("policy", "Maybe")


def test_off_path_answer_requires_backtrack(session):
    session.navigate("policy", "No")
    with pytest.raises(OffPath):
        session.navigate("policy", "Yes")
    session.backtrack(1)
    assert session.navigate("policy", "Yes").kind == "leaf"


def test_leaf_takes_no_answer(session):
    session.navigate("policy", "Yes")
    with pytest.raises(NotAQuestion):
        session.navigate("leaf-demographic-parity", "whatever")


def test_backtrack_bounds(session):
    with pytest.raises(OffPath):
        session.backtrack(1)
    session.navigate("policy", "No")
    with pytest.raises(OffPath):
        session.backtrack(2)


@given(st.lists(st.integers(0, 10), min_size=1, max_size=12), st.data())
@settings(max_examples=40, deadline=None)
def test_navigate_backtrack_stack_property(choices, data):
    ds = load_dataset(TEXT, CFG)
    session = AuditSession("t", ds, load_default_tree(), clock=_counter_clock())
    paths = [list(session.tree_path)]
    for choice in choices:
        frontier = session.tree.node(session.frontier())
        if frontier.kind == "leaf":
            break
        label = frontier.answers[choice % len(frontier.answers)][0]
        session.navigate(frontier.id, label)
        paths.append(list(session.tree_path))
    if session.tree_path:
        steps = data.draw(st.integers(1, len(session.tree_path)))
        session.backtrack(steps)
        assert session.tree_path == paths[len(paths) - 1 - steps]
        # frontier is consistent with the truncated path
        assert session.frontier() == session.tree.node(session.frontier()).id


def test_save_restore_round_trip(session):
    generated = session.generate_groups([("sex", None)])
    saved = session.save_group_set("sexes")
    session.generate_groups([("occ", None)])
    assert [g.display_name for g in session.active_subgroups] == ["A", "B"]
    restored = session.restore_group_set(saved.id)
    assert restored == generated
    assert session.active_subgroups == generated


def test_two_saves_with_same_name_keep_distinct_ids(session):
    session.generate_groups([("sex", None)])
    a = session.save_group_set("mine")
    b = session.save_group_set("mine")
    assert a.id != b.id
    assert [gs.name for gs in session.saved_group_sets] == ["mine", "mine"]


def test_save_empty_set_rejected(session):
    with pytest.raises(EmptySet):
        session.save_group_set("empty", subgroups=[])


def test_restore_unknown_group_set(session):
    with pytest.raises(UnknownGroupSet):
        session.restore_group_set("gs-99")


def test_pin_requires_active_subgroup(session):
    groups = session.generate_groups([("sex", None)])
    session.pin(groups[0].id)
    assert session.pinned_subgroup == groups[0].id
    session.generate_groups([("occ", None)])
    assert session.pinned_subgroup is None  # replaced set drops the pin


def test_evaluate_requires_definition(session):
    session.generate_groups([("sex", None)])
    with pytest.raises(NoDefinitionSelected):
        session.evaluate({"favourable_class": 1})


def test_evaluate_missing_input(session):
    session.generate_groups([("sex", None)])
    session.select_definition("conditional_statistical_parity")
    with pytest.raises(MissingInput, match="sensitive_attribute"):
        session.evaluate({"favourable_class": 1, "legitimate_attributes": ["occ"]})


def test_evaluate_rate_parity_over_active_groups(session):
    session.generate_groups([("sex", None)])
    session.select_definition("equal_opportunity")
    result = session.evaluate({})
    assert result.rate_kind == "tpr"
    assert len(result.per_group) == 2


def test_evaluate_equalized_odds_is_a_conjunction(session):
    session.generate_groups([("sex", None)])
    session.select_definition("equalized_odds")
    result = session.evaluate({"threshold": 1.0})
    assert isinstance(result, CompositeParity)
    assert [p.rate_kind for p in result.parts] == ["tpr", "fpr"]
    assert result.satisfied == all(p.satisfied for p in result.parts)
    assert result.satisfied  # threshold 1.0 tolerates anything defined


def test_every_mutation_logs_exactly_one_entry(session):
    session.generate_groups([("sex", None)])
    session.save_group_set("s")
    session.restore_group_set("gs-1")
    session.pin(session.active_subgroups[0].id)
    session.navigate("policy", "Yes")
    session.backtrack(1)
    session.select_definition("demographic_parity")
    session.evaluate({"favourable_class": 1})
    session.log(EXPLORATION, "note-to-self", {}, note="hello")
    assert [e.action for e in session.stage_log] == [
        "generate_groups", "save_group_set", "restore_group_set", "pin_subgroup",
        "navigate", "backtrack", "select_definition", "evaluate", "note-to-self",
    ]


def test_log_rejects_unknown_stage(session):
    with pytest.raises(ValueError):
        session.log("Wandering", "x", {})


def test_export_empty_session_has_dataset_summary_only(session):
    markdown = render_markdown(session.export())
    assert "## Dataset" in markdown
    assert "- rows: 10" in markdown
    assert markdown.count("_none_") == 3      # subgroups, group sets, evaluations
    assert "_empty_" in markdown              # stage log
    assert "_no tree navigation recorded_" in markdown


def test_export_twice_is_byte_identical(session):
    session.generate_groups([("sex", None)])
    session.navigate("policy", "Yes")
    session.evaluate({"favourable_class": 1})
    first = render_markdown(session.export())
    second = render_markdown(session.export())
    assert first == second


def test_export_import_round_trip(session):
    session.generate_groups([("sex", None), ("occ", None)])
    session.save_group_set("both")
    session.navigate("policy", "No")
    session.navigate("equal-base-rates", "No, but should be")
    session.navigate("explaining-variables", "Yes")
    session.evaluate({"favourable_class": 0, "sensitive_attribute": "sex",
                      "legitimate_attributes": ["occ"], "min_stratum_size": 2})
    session.log(INFORMED_ANALYSIS, "wrap-up", {}, note="done")
    document = session.export()
    rebuilt = AuditSession.from_export(document, session.dataset, session.tree)
    assert rebuilt.state_dict() == session.state_dict()


def test_iteration_counting():
    entries = []

    class Entry:
        def __init__(self, stage):
            self.stage = stage

    assert count_loop_iterations([]) == 0
    seq = [Entry(s) for s in (EXPLORATION, GUIDANCE, INFORMED_ANALYSIS,
                              EXPLORATION, INFORMED_ANALYSIS)]
    assert count_loop_iterations(seq) == 2
    assert count_loop_iterations([Entry(GUIDANCE)]) == 1
    assert count_loop_iterations([Entry(EXPLORATION)] * 3) == 1
