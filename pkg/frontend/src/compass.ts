/** Fairness compass tab: the clickable decision tree with the taken path
 * highlighted, and the description pane with dropdowns and parity charts.
 */

import { renderParityBars, renderStratifiedBars } from "./charts.js";
import { esc } from "./format.js";
import type { ViewState } from "./state.js";
import type {
  DatasetSummary,
  EvaluationResult,
  NodeDescription,
  TreeDocument,
  TreeNode,
} from "./types.js";

export interface CompassData {
  tree: TreeDocument;
  description: NodeDescription | null;
  dataset: DatasetSummary;
  result: EvaluationResult | null;
}

function nodeById(tree: TreeDocument, id: string): TreeNode {
  const node = tree.nodes.find((n) => n.id === id);
  if (!node) throw new Error(`tree node ${id} missing`);
  return node;
}

function pathTargets(tree: TreeDocument, path: [string, string][]): Set<string> {
  const onPath = new Set<string>([tree.root]);
  for (const [nodeId, answer] of path) {
    const node = nodeById(tree, nodeId);
    const hit = node.answers.find((a) => a.label === answer);
    if (hit) onPath.add(hit.target);
  }
  return onPath;
}

function renderNode(
  tree: TreeDocument,
  node: TreeNode,
  state: ViewState,
  onPath: Set<string>,
  answered: Map<string, string>,
): string {
  const classes = ["node", node.kind];
  if (onPath.has(node.id)) classes.push("on-path");
  if (state.selectedNodeId === node.id) classes.push("selected");
  const header = `<button class="${classes.join(" ")}" data-action="select-node" ` +
    `data-node="${esc(node.id)}" title="Show this node's description">` +
    `${esc(node.id)}</button>`;
  if (node.kind === "leaf") return `<li>${header}</li>`;
  const chosen = answered.get(node.id);
  const children = node.answers
    .map((answer) => {
      const taken = chosen === answer.label;
      const child = nodeById(tree, answer.target);
      const answerButton = `<button class="answer${taken ? " taken" : ""}" ` +
        `data-action="answer" data-node="${esc(node.id)}" ` +
        `data-answer="${esc(answer.label)}" ` +
        `title="Answer ${esc(answer.label)}">${esc(answer.label)}</button>`;
      const subtree = onPath.has(child.id) || taken
        ? renderNode(tree, child, state, onPath, answered)
        : `<li class="pruned">${esc(child.id)}</li>`;
      return `<li>${answerButton}<ul>${subtree}</ul></li>`;
    })
    .join("");
  return `<li>${header}<ul class="answers">${children}</ul></li>`;
}

function renderTreePane(state: ViewState, tree: TreeDocument): string {
  const onPath = pathTargets(tree, state.treePath);
  const answered = new Map(state.treePath);
  const backtrack = state.treePath.length
    ? `<button data-action="backtrack" title="Undo the last answer">backtrack</button>`
    : "";
  return `<div class="tree-pane" style="flex-basis:${(state.paneDividers.compass * 100).toFixed(0)}%">` +
    `<h2>Decision tree</h2>${backtrack}` +
    `<ul class="tree">${renderNode(tree, nodeById(tree, tree.root), state, onPath, answered)}</ul>` +
    `</div>`;
}

function dropdowns(state: ViewState, dataset: DatasetSummary,
                   description: NodeDescription): string {
  const required = new Set(description.required_inputs ?? []);
  if (!required.has("favourable_class") && !required.has("sensitive_attribute")) {
    return "";
  }
  const favourable = `<label title="Which predicted class counts as favourable">` +
    `favourable outcome <select data-action="set-favourable">` +
    `<option value="1" ${state.favourableClass === 1 ? "selected" : ""}>class 1</option>` +
    `<option value="0" ${state.favourableClass === 0 ? "selected" : ""}>class 0</option>` +
    `</select></label>`;
  const options = dataset.features
    .map((f) =>
      `<option value="${esc(f.name)}" ` +
      `${state.sensitiveAttribute === f.name ? "selected" : ""}>${esc(f.name)}</option>`)
    .join("");
  const sensitive = required.has("sensitive_attribute")
    ? `<label title="The attribute whose groups must be treated equally">` +
      `sensitive attribute <select data-action="set-sensitive">` +
      `<option value="">choose...</option>${options}</select></label>`
    : "";
  const legitimate = required.has("legitimate_attributes")
    ? `<label title="Explaining attributes that stratify the check">` +
      `legitimate attributes <select multiple data-action="set-legitimate">` +
      `${dataset.features.map((f) =>
        `<option value="${esc(f.name)}" ` +
        `${state.legitimateAttributes.includes(f.name) ? "selected" : ""}>` +
        `${esc(f.name)}</option>`).join("")}</select></label>`
    : "";
  return `<div class="dropdowns">${favourable}${sensitive}${legitimate}` +
    `<button data-action="evaluate" title="Evaluate this definition on the active subgroups">` +
    `evaluate</button></div>`;
}

function renderResult(result: EvaluationResult | null): string {
  if (!result) return `<p class="hint">Evaluate the definition to see charts here.</p>`;
  if (result.kind === "stratified_parity") {
    return renderStratifiedBars(result, "favourable rate per stratum and group");
  }
  if (result.kind === "composite_parity") {
    return `<div class="composite" data-satisfied="${result.satisfied}">` +
      result.parts.map((part) => renderParityBars(part, `${part.rate_kind} parity`)).join("") +
      `</div>`;
  }
  return renderParityBars(result, `${result.rate_kind} parity`);
}

function renderDescriptionPane(state: ViewState, data: CompassData): string {
  if (!data.description) {
    return `<div class="description-pane"><p class="hint">` +
      `Click a node to read its description.</p></div>`;
  }
  const d = data.description;
  const definitionBlock = d.definition_name
    ? `<h3>${esc(d.definition_name)}</h3><p>${esc(d.definition_description ?? "")}</p>` +
      dropdowns(state, data.dataset, d)
    : "";
  return `<div class="description-pane">` +
    `<h2>${esc(d.node_id)}</h2><p>${esc(d.text)}</p>` + definitionBlock +
    `<div class="charts">${d.kind === "leaf" ? renderResult(data.result) : ""}</div>` +
    `</div>`;
}

export function renderFairnessCompass(state: ViewState, data: CompassData): string {
  return `<section class="tab compass">` +
    renderTreePane(state, data.tree) +
    `<div class="divider" data-action="drag-divider" data-pane="compass"></div>` +
    renderDescriptionPane(state, data) +
    `</section>`;
}

export function renderTabs(state: ViewState): string {
  const tab = (id: string, label: string) =>
    `<button class="tab-button${state.activeTab === id ? " active" : ""}" ` +
    `data-action="switch-tab" data-tab="${id}" title="Switch to ${esc(label)}">` +
    `${esc(label)}</button>`;
  return `<nav class="tabs">${tab("SubgroupExploration", "Subgroup Exploration")}` +
    `${tab("FairnessCompass", "Fairness Compass")}</nav>`;
}
