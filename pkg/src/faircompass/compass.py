"""Guidance decision tree: loading, validation, and the definition catalogue.

The tree is a human-editable JSON document of question and leaf nodes. Every
leaf binds to an executable fairness definition from the catalogue below, so
navigation always ends in something the metric engine can evaluate.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources

from .errors import (
    CycleDetected,
    DanglingAnswer,
    InvalidTreeNode,
    MultipleRoots,
    TreeSchemaError,
    UnknownDefinition,
    UnknownNode,
    UnreachableNode,
)

QUESTION = "question"
LEAF = "leaf"

DEMOGRAPHIC_PARITY = "demographic_parity"
CONDITIONAL_STATISTICAL_PARITY = "conditional_statistical_parity"
RATE_PARITY = "rate_parity"
COMPOSITE_RATE_PARITY = "composite_rate_parity"


@dataclass(frozen=True)
class FairnessDefinition:
    """An executable fairness definition bound to a metric-engine check."""

    id: str
    name: str
    description: str
    required_inputs: frozenset[str]
    kind: str
    rate_kinds: tuple[str, ...] = ()


DEFINITIONS: dict[str, FairnessDefinition] = {
    d.id: d
    for d in (
        FairnessDefinition(
            id="demographic_parity",
            name="Demographic parity",
            description=(
                "Each group should receive the favourable predicted outcome in "
                "equal proportion. Pick which class counts as favourable for "
                "your application context; the check compares the fraction of "
                "each active subgroup predicted into that class. Note this "
                "ignores ground truth entirely, so it can be satisfied by a "
                "model that is wrong equally often for everyone."
            ),
            required_inputs=frozenset({"favourable_class"}),
            kind=DEMOGRAPHIC_PARITY,
        ),
        FairnessDefinition(
            id="conditional_statistical_parity",
            name="Conditional statistical parity",
            description=(
                "Demographic parity required separately inside each stratum of "
                "one or more legitimate attributes. A legitimate (explaining) "
                "attribute is a feature that is allowed to account for outcome "
                "differences, such as occupation or working hours for income. "
                "Within every stratum that has enough members, groups of the "
                "sensitive attribute must receive the favourable outcome in "
                "equal proportion."
            ),
            required_inputs=frozenset(
                {"favourable_class", "sensitive_attribute", "legitimate_attributes"}
            ),
            kind=CONDITIONAL_STATISTICAL_PARITY,
        ),
        FairnessDefinition(
            id="equal_opportunity",
            name="Equal opportunity",
            description=(
                "Groups should have equal true positive rates: among instances "
                "whose true label is positive, the model should find the same "
                "fraction in every active subgroup. Use when missing a truly "
                "deserving instance is the harm that matters most."
            ),
            required_inputs=frozenset(),
            kind=RATE_PARITY,
            rate_kinds=("tpr",),
        ),
        FairnessDefinition(
            id="predictive_equality",
            name="Predictive equality",
            description=(
                "Groups should have equal false positive rates: among instances "
                "whose true label is negative, the same fraction should be "
                "wrongly predicted positive in every active subgroup. Use when "
                "a wrong positive prediction is the costlier harm."
            ),
            required_inputs=frozenset(),
            kind=RATE_PARITY,
            rate_kinds=("fpr",),
        ),
        FairnessDefinition(
            id="equalized_odds",
            name="Equalized odds",
            description=(
                "Groups should have equal true positive rates and equal false "
                "positive rates simultaneously. This is the conjunction of "
                "equal opportunity and predictive equality, and is satisfied "
                "only when both hold."
            ),
            required_inputs=frozenset(),
            kind=COMPOSITE_RATE_PARITY,
            rate_kinds=("tpr", "fpr"),
        ),
        FairnessDefinition(
            id="predictive_parity",
            name="Predictive parity",
            description=(
                "Groups should have equal precision: when the model predicts "
                "the positive class, it should be right equally often for "
                "every active subgroup. Use when decisions are taken at face "
                "value from positive predictions."
            ),
            required_inputs=frozenset(),
            kind=RATE_PARITY,
            rate_kinds=("precision",),
        ),
        FairnessDefinition(
            id="overall_accuracy_equality",
            name="Overall accuracy equality",
            description=(
                "Groups should be classified correctly at the same overall "
                "rate. This weighs false positives and false negatives "
                "identically, which is only appropriate when both error "
                "directions carry similar cost."
            ),
            required_inputs=frozenset(),
            kind=RATE_PARITY,
            rate_kinds=("accuracy",),
        ),
    )
}


@dataclass(frozen=True)
class DecisionNode:
    id: str
    kind: str
    text: str
    answers: tuple[tuple[str, str], ...] = ()
    definition_id: str | None = None

    def answer_target(self, label: str) -> str | None:
        for answer_label, target in self.answers:
            if answer_label == label:
                return target
        return None


@dataclass(frozen=True)
class DecisionTree:
    root: str
    nodes: dict[str, DecisionNode]
    version: str

    def node(self, node_id: str) -> DecisionNode:
        node = self.nodes.get(node_id)
        if node is None:
            raise UnknownNode(f"no node with id {node_id!r}")
        return node

    def to_dict(self) -> dict:
        return {
            "version": self.version,
            "root": self.root,
            "nodes": [
                {
                    "id": n.id,
                    "kind": n.kind,
                    "text": n.text,
                    "answers": [{"label": label, "target": target} for label, target in n.answers],
                    **({"definition": n.definition_id} if n.definition_id else {}),
                }
                for n in self.nodes.values()
            ],
        }


def load_tree(document, definitions: dict[str, FairnessDefinition] | None = None) -> DecisionTree:
    """Parse and validate a decision-tree document (JSON text, bytes, or dict).

    Raises CycleDetected, DanglingAnswer, UnknownDefinition, MultipleRoots,
    UnreachableNode, or InvalidTreeNode, each naming the offending node.
    """
    if definitions is None:
        definitions = DEFINITIONS
    if isinstance(document, bytes):
        document = document.decode("utf-8")
    if isinstance(document, str):
        try:
            document = json.loads(document)
        except json.JSONDecodeError as exc:
            raise TreeSchemaError(f"document is not valid JSON: {exc}") from None
    if not isinstance(document, dict) or "nodes" not in document:
        raise TreeSchemaError("document must be an object with a 'nodes' list")

    nodes: dict[str, DecisionNode] = {}
    for raw in document["nodes"]:
        node_id = raw.get("id")
        if not node_id or not isinstance(node_id, str):
            raise InvalidTreeNode("every node needs a string id")
        if node_id in nodes:
            raise InvalidTreeNode(f"duplicate node id {node_id!r}")
        kind = raw.get("kind")
        if kind not in (QUESTION, LEAF):
            raise InvalidTreeNode(f"node {node_id!r} has unknown kind {kind!r}")
        answers = tuple(
            (a["label"], a["target"]) for a in raw.get("answers", [])
        )
        definition_id = raw.get("definition")
        if kind == QUESTION:
            if len(answers) < 2:
                raise InvalidTreeNode(f"question {node_id!r} needs at least two answers")
            if definition_id is not None:
                raise InvalidTreeNode(f"question {node_id!r} must not carry a definition")
            labels = [label for label, _ in answers]
            if len(set(labels)) != len(labels):
                raise InvalidTreeNode(f"question {node_id!r} has duplicate answer labels")
        else:
            if answers:
                raise InvalidTreeNode(f"leaf {node_id!r} must not have answers")
            if definition_id is None:
                raise InvalidTreeNode(f"leaf {node_id!r} has no definition binding")
            if definition_id not in definitions:
                raise UnknownDefinition(
                    f"leaf {node_id!r} binds to unknown definition {definition_id!r}"
                )
        nodes[node_id] = DecisionNode(
            id=node_id,
            kind=kind,
            text=raw.get("text", ""),
            answers=answers,
            definition_id=definition_id,
        )

    for node in nodes.values():
        for label, target in node.answers:
            if target not in nodes:
                raise DanglingAnswer(
                    f"answer {label!r} of node {node.id!r} points to missing node {target!r}"
                )

    root = document.get("root")
    if isinstance(root, list):
        raise MultipleRoots(f"document names multiple roots: {root}")
    if root is None:
        targets = {t for n in nodes.values() for _, t in n.answers}
        candidates = [node_id for node_id in nodes if node_id not in targets]
        if len(candidates) > 1:
            raise MultipleRoots(f"multiple root candidates: {sorted(candidates)}")
        if not candidates:
            raise CycleDetected("no root candidate: every node has an incoming answer")
        root = candidates[0]
    elif root not in nodes:
        raise DanglingAnswer(f"root {root!r} is not a node in the document")

    # Depth-first walk: detect cycles and collect reachability.
    WHITE, GREY, BLACK = 0, 1, 2
    colour = {node_id: WHITE for node_id in nodes}
    stack = [(root, iter([t for _, t in nodes[root].answers]))]
    colour[root] = GREY
    while stack:
        node_id, children = stack[-1]
        advanced = False
        for child in children:
            if colour[child] == GREY:
                raise CycleDetected(f"cycle through node {child!r}")
            if colour[child] == WHITE:
                colour[child] = GREY
                stack.append((child, iter([t for _, t in nodes[child].answers])))
                advanced = True
                break
        if not advanced:
            colour[node_id] = BLACK
            stack.pop()
    unreachable = sorted(node_id for node_id, c in colour.items() if c == WHITE)
    if unreachable:
        raise UnreachableNode(f"nodes unreachable from root: {unreachable}")

    return DecisionTree(
        root=root,
        nodes=nodes,
        version=str(document.get("version", "1")),
    )


def load_tree_file(path) -> DecisionTree:
    with open(path, "r", encoding="utf-8") as handle:
        return load_tree(handle.read())


def load_default_tree() -> DecisionTree:
    text = resources.files("faircompass").joinpath("assets/fairness_compass.json").read_text("utf-8")
    return load_tree(text)


@dataclass(frozen=True)
class NodeDescription:
    node_id: str
    kind: str
    text: str
    answers: tuple[str, ...]
    definition_id: str | None
    definition_name: str | None
    definition_description: str | None
    required_inputs: frozenset[str] | None


def describe_node(tree: DecisionTree, node_id: str) -> NodeDescription:
    """Authored description of a node; leaves also report their required inputs."""
    node = tree.node(node_id)
    definition = DEFINITIONS.get(node.definition_id) if node.definition_id else None
    return NodeDescription(
        node_id=node.id,
        kind=node.kind,
        text=node.text,
        answers=tuple(label for label, _ in node.answers),
        definition_id=node.definition_id,
        definition_name=definition.name if definition else None,
        definition_description=definition.description if definition else None,
        required_inputs=definition.required_inputs if definition else None,
    )
