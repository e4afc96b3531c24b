"""Audit sessions: active subgroups, saved sets, tree navigation, stage log.

A session is the unit of audit evidence. Every state change can carry a
stage tag (Exploration, Guidance, InformedAnalysis) and lands in the
chronological stage log, which the exported report replays verbatim.
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import datetime, timezone

from .compass import (
    COMPOSITE_RATE_PARITY,
    CONDITIONAL_STATISTICAL_PARITY,
    DEFINITIONS,
    DEMOGRAPHIC_PARITY,
    LEAF,
    QUESTION,
    RATE_PARITY,
    DecisionTree,
    FairnessDefinition,
)
from .data import Dataset, EqualWidth, ExplicitEdges, bin_numeric
from .errors import (
    EmptySet,
    MissingInput,
    NoDefinitionSelected,
    NotAQuestion,
    OffPath,
    UnknownAnswer,
    UnknownDefinition,
    UnknownGroupSet,
    UnknownSubgroup,
)
from .metrics import (
    CompositeParity,
    ParityAssessment,
    StratifiedParity,
    conditional_statistical_parity,
    demographic_parity,
    parity_by_rate,
    result_from_dict,
)
from .subgroups import GroupSet, Subgroup, generate_subgroups, make_subgroup

EXPLORATION = "Exploration"
GUIDANCE = "Guidance"
INFORMED_ANALYSIS = "InformedAnalysis"
STAGES = (EXPLORATION, GUIDANCE, INFORMED_ANALYSIS)

EXPORT_FORMAT_VERSION = "1"


def utc_now() -> str:
    return datetime.now(timezone.utc).isoformat()


@dataclass(frozen=True)
class StageLogEntry:
    timestamp: str
    stage: str
    action: str
    payload: dict
    note: str | None = None

    def to_dict(self) -> dict:
        return {
            "timestamp": self.timestamp,
            "stage": self.stage,
            "action": self.action,
            "payload": self.payload,
            "note": self.note,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "StageLogEntry":
        return cls(
            timestamp=doc["timestamp"],
            stage=doc["stage"],
            action=doc["action"],
            payload=doc.get("payload") or {},
            note=doc.get("note"),
        )


@dataclass(frozen=True)
class Evaluation:
    definition_id: str
    inputs: dict
    result: ParityAssessment | StratifiedParity | CompositeParity
    timestamp: str

    def to_dict(self) -> dict:
        return {
            "definition_id": self.definition_id,
            "inputs": self.inputs,
            "result": self.result.to_dict(),
            "timestamp": self.timestamp,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "Evaluation":
        return cls(
            definition_id=doc["definition_id"],
            inputs=doc["inputs"],
            result=result_from_dict(doc["result"]),
            timestamp=doc["timestamp"],
        )


class AuditSession:
    """Single-writer audit session over one dataset and one guidance tree."""

    def __init__(self, id: str, dataset: Dataset, tree: DecisionTree, clock=utc_now):
        self.id = id
        self.dataset = dataset
        self.tree = tree
        self.clock = clock
        self.active_subgroups: list[Subgroup] = []
        self.subgroup_registry: dict[str, Subgroup] = {}
        self.saved_group_sets: list[GroupSet] = []
        self.pinned_subgroup: str | None = None
        self.tree_path: list[tuple[str, str]] = []
        self.selected_definition: str | None = None
        self.stage_log: list[StageLogEntry] = []
        self.evaluations: list[Evaluation] = []
        self._group_set_counter = 0

    # -- stage log ---------------------------------------------------------

    def log(self, stage: str, action: str, payload: dict | None = None,
            note: str | None = None, ts: str | None = None) -> StageLogEntry:
        if stage not in STAGES:
            raise ValueError(f"unknown stage {stage!r}; expected one of {STAGES}")
        entry = StageLogEntry(
            timestamp=ts if ts is not None else self.clock(),
            stage=stage,
            action=action,
            payload=payload or {},
            note=note,
        )
        self.stage_log.append(entry)
        return entry

    # -- subgroups ---------------------------------------------------------

    def subgroup(self, subgroup_id: str) -> Subgroup:
        group = self.subgroup_registry.get(subgroup_id)
        if group is None:
            raise UnknownSubgroup(f"no subgroup with id {subgroup_id!r} in this session")
        return group

    def _register(self, subgroups) -> list[Subgroup]:
        for g in subgroups:
            self.subgroup_registry[g.id] = g
        return list(subgroups)

    def generate_groups(self, selections, stage: str = EXPLORATION,
                        note: str | None = None, ts: str | None = None,
                        cap: int = 1000) -> list[Subgroup]:
        """Generate subgroups and make them the active set (replacing it)."""
        groups = generate_subgroups(self.dataset, selections, cap=cap)
        self._register(groups)
        self.active_subgroups = list(groups)
        if self.pinned_subgroup not in {g.id for g in groups}:
            self.pinned_subgroup = None
        self.log(
            stage,
            "generate_groups",
            {
                "selections": [[feature, list(values) if values is not None else None]
                               for feature, values in selections],
                "subgroup_ids": [g.id for g in groups],
            },
            note=note,
            ts=ts,
        )
        return groups

    def add_manual_subgroup(self, predicates, stage: str = EXPLORATION,
                            ts: str | None = None) -> Subgroup:
        group = make_subgroup(self.dataset, predicates)
        self._register([group])
        if group.id not in {g.id for g in self.active_subgroups}:
            self.active_subgroups.append(group)
        self.log(stage, "add_subgroup", {"subgroup_id": group.id}, ts=ts)
        return group

    def pin(self, subgroup_id: str, stage: str = INFORMED_ANALYSIS,
            ts: str | None = None) -> Subgroup:
        group = self.subgroup(subgroup_id)
        if group.id not in {g.id for g in self.active_subgroups}:
            raise UnknownSubgroup(f"subgroup {subgroup_id!r} is not in the active set")
        self.pinned_subgroup = group.id
        self.log(stage, "pin_subgroup", {"subgroup_id": group.id}, ts=ts)
        return group

    def bin_feature(self, feature: str, strategy, stage: str = EXPLORATION,
                    ts: str | None = None) -> None:
        """Assign bin edges to a numeric feature of the session's dataset view."""
        spec = bin_numeric(self.dataset, feature, strategy)
        self.dataset = self.dataset.with_feature(spec)
        if isinstance(strategy, EqualWidth):
            payload = {"feature": feature, "strategy": "equal_width", "k": strategy.k}
        else:
            payload = {"feature": feature, "strategy": "explicit", "edges": list(strategy.edges)}
        self.log(stage, "bin_feature", payload, ts=ts)

    # -- saved group sets ----------------------------------------------------

    def save_group_set(self, name: str, subgroups=None, stage: str = EXPLORATION,
                       ts: str | None = None) -> GroupSet:
        """Persist a named set of subgroups (defaults to the active set)."""
        if subgroups is None:
            subgroups = list(self.active_subgroups)
        subgroups = list(subgroups)
        if not subgroups:
            raise EmptySet("cannot save an empty group set")
        self._register(subgroups)
        self._group_set_counter += 1
        when = ts if ts is not None else self.clock()
        group_set = GroupSet(
            id=f"gs-{self._group_set_counter}",
            name=name,
            subgroup_ids=tuple(g.id for g in subgroups),
            created_at=when,
        )
        self.saved_group_sets.append(group_set)
        self.log(stage, "save_group_set",
                 {"group_set_id": group_set.id, "name": name,
                  "subgroup_ids": list(group_set.subgroup_ids)},
                 ts=when)
        return group_set

    def group_set(self, group_set_id: str) -> GroupSet:
        for gs in self.saved_group_sets:
            if gs.id == group_set_id:
                return gs
        raise UnknownGroupSet(f"no saved group set with id {group_set_id!r}")

    def restore_group_set(self, group_set_id: str, stage: str = EXPLORATION,
                          ts: str | None = None) -> list[Subgroup]:
        """Replace the active subgroups with a saved set."""
        gs = self.group_set(group_set_id)
        groups = [self.subgroup(gid) for gid in gs.subgroup_ids]
        self.active_subgroups = groups
        if self.pinned_subgroup not in set(gs.subgroup_ids):
            self.pinned_subgroup = None
        self.log(stage, "restore_group_set",
                 {"group_set_id": gs.id, "subgroup_ids": list(gs.subgroup_ids)},
                 ts=ts)
        return groups

    # -- tree navigation --------------------------------------------------------

    def frontier(self) -> str:
        """Node id reached by following the recorded path from the root."""
        node_id = self.tree.root
        for answered_id, answer in self.tree_path:
            node = self.tree.node(answered_id)
            node_id = node.answer_target(answer)
        return node_id

    def navigate(self, node_id: str, answer_label: str, ts: str | None = None):
        """Answer the frontier question; extends the path, may select a leaf."""
        frontier = self.frontier()
        if node_id != frontier:
            raise OffPath(
                f"node {node_id!r} is not the current frontier ({frontier!r}); "
                "backtrack before answering it"
            )
        node = self.tree.node(node_id)
        if node.kind != QUESTION:
            raise NotAQuestion(f"node {node_id!r} is a leaf and takes no answer")
        target = node.answer_target(answer_label)
        if target is None:
            valid = [label for label, _ in node.answers]
            raise UnknownAnswer(
                f"{answer_label!r} is not an answer of node {node_id!r}; valid: {valid}"
            )
        self.tree_path.append((node_id, answer_label))
        next_node = self.tree.node(target)
        if next_node.kind == LEAF:
            self.selected_definition = next_node.definition_id
        self.log(GUIDANCE, "navigate",
                 {"node_id": node_id, "answer": answer_label, "target": target},
                 ts=ts)
        return next_node

    def backtrack(self, steps: int = 1, ts: str | None = None) -> str:
        """Pop `steps` answers off the path; returns the new frontier."""
        if steps < 1 or steps > len(self.tree_path):
            raise OffPath(
                f"cannot backtrack {steps} step(s); path has {len(self.tree_path)}"
            )
        removed = self.tree_path[-steps:]
        del self.tree_path[-steps:]
        frontier = self.frontier()
        if self.tree.node(frontier).kind != LEAF:
            self.selected_definition = None
        self.log(GUIDANCE, "backtrack",
                 {"steps": steps, "removed": [list(r) for r in removed],
                  "frontier": frontier},
                 ts=ts)
        return frontier

    def select_definition(self, definition_id: str, ts: str | None = None) -> FairnessDefinition:
        """Directly select a definition without walking the tree (scripted audits)."""
        definition = DEFINITIONS.get(definition_id)
        if definition is None:
            raise UnknownDefinition(f"no fairness definition with id {definition_id!r}")
        self.selected_definition = definition_id
        self.log(GUIDANCE, "select_definition", {"definition_id": definition_id}, ts=ts)
        return definition

    # -- evaluation -----------------------------------------------------------

    def evaluate(self, inputs: dict, ts: str | None = None):
        """Run the selected definition with the given inputs and store the result."""
        if self.selected_definition is None:
            raise NoDefinitionSelected("no fairness definition is selected")
        definition = DEFINITIONS[self.selected_definition]
        for key in sorted(definition.required_inputs):
            if inputs.get(key) is None:
                raise MissingInput(
                    f"definition {definition.id!r} requires input {key!r}"
                )
        threshold = inputs.get("threshold", 0.1)

        if definition.kind == DEMOGRAPHIC_PARITY:
            if not self.active_subgroups:
                raise EmptySet("no active subgroups to evaluate")
            result = demographic_parity(
                self.dataset, self.active_subgroups,
                favourable_class=int(inputs["favourable_class"]),
                threshold=threshold,
            )
        elif definition.kind == CONDITIONAL_STATISTICAL_PARITY:
            result = conditional_statistical_parity(
                self.dataset,
                sensitive_attribute=inputs["sensitive_attribute"],
                legitimate_attributes=tuple(inputs["legitimate_attributes"]),
                favourable_class=int(inputs["favourable_class"]),
                threshold=threshold,
                min_stratum_size=int(inputs.get("min_stratum_size", 20)),
            )
        elif definition.kind == RATE_PARITY:
            if not self.active_subgroups:
                raise EmptySet("no active subgroups to evaluate")
            result = parity_by_rate(
                self.dataset, self.active_subgroups,
                rate_kind=definition.rate_kinds[0], threshold=threshold,
            )
        elif definition.kind == COMPOSITE_RATE_PARITY:
            if not self.active_subgroups:
                raise EmptySet("no active subgroups to evaluate")
            parts = tuple(
                parity_by_rate(self.dataset, self.active_subgroups,
                               rate_kind=rate, threshold=threshold)
                for rate in definition.rate_kinds
            )
            result = CompositeParity(parts=parts, satisfied=all(p.satisfied for p in parts))
        else:
            raise UnknownDefinition(f"definition kind {definition.kind!r} has no evaluator")

        when = ts if ts is not None else self.clock()
        evaluation = Evaluation(
            definition_id=definition.id,
            inputs=dict(inputs),
            result=result,
            timestamp=when,
        )
        self.evaluations.append(evaluation)
        self.log(GUIDANCE, "evaluate",
                 {"definition_id": definition.id, "inputs": dict(inputs),
                  "satisfied": result.satisfied},
                 ts=when)
        return result

    # -- export / import --------------------------------------------------------

    def state_dict(self) -> dict:
        """Canonical JSON-serializable snapshot of the session state."""
        return {
            "id": self.id,
            "dataset": self.dataset.summary(),
            "active_subgroups": [g.to_dict() for g in self.active_subgroups],
            "subgroup_registry": {
                gid: g.to_dict() for gid, g in sorted(self.subgroup_registry.items())
            },
            "saved_group_sets": [gs.to_dict() for gs in self.saved_group_sets],
            "pinned_subgroup": self.pinned_subgroup,
            "tree_path": [list(step) for step in self.tree_path],
            "selected_definition": self.selected_definition,
            "stage_log": [entry.to_dict() for entry in self.stage_log],
            "evaluations": [e.to_dict() for e in self.evaluations],
        }

    def export(self) -> dict:
        """Deterministic report document; timestamps are echoed from the log."""
        path_details = []
        for node_id, answer in self.tree_path:
            node = self.tree.node(node_id)
            path_details.append({
                "node_id": node_id,
                "text": node.text,
                "answer": answer,
            })
        return {
            "format_version": EXPORT_FORMAT_VERSION,
            "session": self.state_dict(),
            "tree_version": self.tree.version,
            "tree_path_details": path_details,
            "iterations": count_loop_iterations(self.stage_log),
        }

    @classmethod
    def from_export(cls, document: dict, dataset: Dataset, tree: DecisionTree,
                    clock=utc_now) -> "AuditSession":
        """Rebuild a session from an exported document (lossless round-trip)."""
        state = document["session"]
        if state["dataset"]["id"] != dataset.id:
            raise ValueError("export belongs to a different dataset")
        session = cls(id=state["id"], dataset=dataset, tree=tree, clock=clock)
        # Reapply recorded bin edges so predicates resolve identically.
        for feature in state["dataset"]["features"]:
            if feature["kind"] == "numeric" and feature["bin_edges"]:
                session.dataset = session.dataset.with_feature(
                    bin_numeric(session.dataset, feature["name"],
                                ExplicitEdges(feature["bin_edges"]))
                )
        session.subgroup_registry = {
            gid: Subgroup.from_dict(doc) for gid, doc in state["subgroup_registry"].items()
        }
        session.active_subgroups = [Subgroup.from_dict(doc) for doc in state["active_subgroups"]]
        session.saved_group_sets = [GroupSet.from_dict(doc) for doc in state["saved_group_sets"]]
        session.pinned_subgroup = state["pinned_subgroup"]
        session.tree_path = [tuple(step) for step in state["tree_path"]]
        session.selected_definition = state["selected_definition"]
        session.stage_log = [StageLogEntry.from_dict(doc) for doc in state["stage_log"]]
        session.evaluations = [Evaluation.from_dict(doc) for doc in state["evaluations"]]
        session._group_set_counter = len(session.saved_group_sets)
        return session


def count_loop_iterations(stage_log) -> int:
    """Number of analysis-loop passes evidenced by the stage sequence.

    A new iteration starts when Exploration follows InformedAnalysis. An
    empty log counts zero iterations.
    """
    iterations = 0
    previous = None
    for entry in stage_log:
        if entry.stage == EXPLORATION and (previous is None or previous == INFORMED_ANALYSIS):
            iterations += 1
        if entry.stage in (EXPLORATION, INFORMED_ANALYSIS):
            previous = entry.stage
    if iterations == 0 and stage_log:
        iterations = 1
    return iterations
