/** Subgroup exploration tab: overview charts, suggested/similar subgroups,
 * and the pinned-vs-hovered detailed comparison. All numbers come from API
 * payloads; nothing is recomputed client side.
 */

import { renderBarChart, renderScatter } from "./charts.js";
import { dataValue, esc, fmtDelta, fmtRate } from "./format.js";
import type { ViewState } from "./state.js";
import type {
  CompareResponse,
  MetricsResponse,
  SimilarEntry,
  SuggestionEntry,
} from "./types.js";

const ALL_METRICS = [
  "accuracy", "precision", "recall", "tnr", "fpr", "fnr",
  "positive_rate", "negative_rate", "base_rate",
];

export interface ExplorationData {
  metrics: MetricsResponse | null;
  suggestions: SuggestionEntry[];
  similar: SimilarEntry[];
  comparison: CompareResponse | null;
}

function metricPicker(selected: string[]): string {
  return `<div class="metric-picker">` + ALL_METRICS
    .map((m) =>
      `<label title="Toggle the ${esc(m)} series"><input type="checkbox" ` +
      `data-action="toggle-metric" data-metric="${esc(m)}" ` +
      `${selected.includes(m) ? "checked" : ""}/>${esc(m)}</label>`)
    .join("") + `</div>`;
}

function overviewCharts(state: ViewState, metrics: MetricsResponse): string {
  const charts = state.selectedMetrics
    .map((metric) => {
      const bars = metrics.subgroups.map((entry) => ({
        label: entry.subgroup.display_name,
        value: entry.metrics[metric as keyof typeof entry.metrics] as number | null,
        group: entry.subgroup.id,
      }));
      return `<figure class="overview" data-metric="${esc(metric)}">` +
        `<figcaption>${esc(metric)}</figcaption>` +
        renderBarChart(bars, `${metric} per subgroup`) + `</figure>`;
    })
    .join("");
  const scatter = renderScatter(
    metrics.subgroups.map((entry) => ({
      label: entry.subgroup.display_name,
      size: entry.subgroup.size,
      value: entry.metrics[state.selectedMetrics[0] as keyof typeof entry.metrics
        ] as number | null ?? null,
    })),
    `${state.selectedMetrics[0] ?? "metric"} vs size`,
  );
  return charts + scatter;
}

function subgroupRows(state: ViewState, metrics: MetricsResponse): string {
  return metrics.subgroups
    .map((entry) => {
      const pinned = entry.subgroup.id === state.pinnedSubgroupId;
      return `<tr data-subgroup="${esc(entry.subgroup.id)}" ` +
        `class="${pinned ? "pinned" : ""}">` +
        `<td>${esc(entry.subgroup.display_name)}</td>` +
        `<td data-value="${entry.subgroup.size}">${entry.subgroup.size}</td>` +
        `<td><button data-action="pin" data-subgroup="${esc(entry.subgroup.id)}" ` +
        `title="Pin this subgroup for comparison">${pinned ? "pinned" : "pin"}</button>` +
        `<button data-action="hover" data-subgroup="${esc(entry.subgroup.id)}" ` +
        `title="Compare this subgroup against the pinned one">compare</button></td></tr>`;
    })
    .join("");
}

function comparisonPanel(comparison: CompareResponse | null): string {
  if (!comparison) {
    return `<div class="comparison empty"><p class="hint">` +
      `Pin a subgroup, then hover another to compare them here.</p></div>`;
  }
  const rows = ALL_METRICS
    .map((metric) => {
      const pinnedValue = comparison.pinned.metrics[
        metric as keyof typeof comparison.pinned.metrics] as number | null;
      const hoveredValue = comparison.hovered.metrics[
        metric as keyof typeof comparison.hovered.metrics] as number | null;
      const delta = comparison.deltas[metric] ?? null;
      return `<tr data-metric="${esc(metric)}">` +
        `<td>${esc(metric)}</td>` +
        `<td data-role="pinned" data-value="${dataValue(pinnedValue)}">${fmtRate(pinnedValue)}</td>` +
        `<td data-role="hovered" data-value="${dataValue(hoveredValue)}">${fmtRate(hoveredValue)}</td>` +
        `<td data-role="delta" data-value="${dataValue(delta)}">${fmtDelta(delta)}</td></tr>`;
    })
    .join("");
  return `<div class="comparison">` +
    `<h3>${esc(comparison.pinned.subgroup.display_name)} (pinned) vs ` +
    `${esc(comparison.hovered.subgroup.display_name)}</h3>` +
    `<table><thead><tr><th>metric</th><th>pinned</th><th>hovered</th>` +
    `<th>delta</th></tr></thead><tbody>${rows}</tbody></table></div>`;
}

function suggestionsPanel(suggestions: SuggestionEntry[], similar: SimilarEntry[]): string {
  const suggested = suggestions.length
    ? suggestions
        .map((s) =>
          `<li data-subgroup="${esc(s.subgroup.id)}" ` +
          `data-notability="${dataValue(s.notability)}">` +
          `${esc(s.subgroup.display_name)} (size ${s.subgroup.size}, ` +
          `notability ${fmtRate(s.notability)}) ` +
          `<button data-action="adopt-suggestion" data-subgroup="${esc(s.subgroup.id)}" ` +
          `title="Add this suggested subgroup to the active set">add</button></li>`)
        .join("")
    : "<li class='hint'>no suggestions</li>";
  const neighbours = similar.length
    ? similar
        .map((s) =>
          `<li data-subgroup="${esc(s.subgroup.id)}" data-distance="${dataValue(s.distance)}">` +
          `${esc(s.subgroup.display_name)} (distance ${s.distance.toFixed(3)})</li>`)
        .join("")
    : "<li class='hint'>pin a subgroup to see its neighbours</li>";
  return `<div class="suggestions"><h3>Suggested subgroups</h3><ul>${suggested}</ul>` +
    `<h3>Similar subgroups</h3><ul>${neighbours}</ul></div>`;
}

export function renderSubgroupExploration(state: ViewState, data: ExplorationData): string {
  if (!data.metrics || data.metrics.subgroups.length === 0) {
    return `<section class="tab exploration"><p class="hint">` +
      `Generate subgroups from the sidebar to begin exploring.</p></section>`;
  }
  return `<section class="tab exploration">` +
    `<div class="overview-pane" style="flex-basis:${(state.paneDividers.exploration * 100).toFixed(0)}%">` +
    `<h2>Subgroup overview</h2>` + metricPicker(state.selectedMetrics) +
    overviewCharts(state, data.metrics) +
    `<table class="groups"><thead><tr><th>subgroup</th><th>size</th><th></th></tr></thead>` +
    `<tbody>${subgroupRows(state, data.metrics)}</tbody></table></div>` +
    `<div class="divider" data-action="drag-divider" data-pane="exploration"></div>` +
    `<div class="detail-pane">` + suggestionsPanel(data.suggestions, data.similar) +
    comparisonPanel(data.comparison) + `</div></section>`;
}
