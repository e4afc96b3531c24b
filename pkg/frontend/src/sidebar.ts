/** Feature sidebar: distributions, subgroup generation controls, saved sets. */

import { renderBarChart } from "./charts.js";
import { esc, fmtPercent } from "./format.js";
import type { ViewState } from "./state.js";
import type { DatasetSummary, GroupSetInfo, Histogram } from "./types.js";

export interface SidebarData {
  dataset: DatasetSummary;
  histograms: Record<string, Histogram>;
  groupSets: GroupSetInfo[];
  selectedFeatures: string[];
}

export function renderFeatureSidebar(state: ViewState, data: SidebarData): string {
  if (state.collapsedSidebar) {
    return `<aside class="sidebar collapsed">` +
      `<button data-action="toggle-sidebar" title="Expand the feature sidebar">&raquo;</button>` +
      `</aside>`;
  }
  const features = data.dataset.features
    .map((feature) => {
      const histogram = data.histograms[feature.name];
      const selected = data.selectedFeatures.includes(feature.name);
      const chart = histogram
        ? renderBarChart(
            histogram.bins.map(([label, count]) => ({
              label: `${label} (${fmtPercent(count, histogram.total)})`,
              value: count,
            })),
            `${feature.name} distribution`,
          )
        : `<div class="chart empty">not loaded</div>`;
      return `<section class="feature" data-feature="${esc(feature.name)}">` +
        `<label title="Select ${esc(feature.name)} for subgroup generation">` +
        `<input type="checkbox" data-action="select-feature" ` +
        `data-feature="${esc(feature.name)}" ${selected ? "checked" : ""}/> ` +
        `${esc(feature.name)} <em>(${feature.kind})</em></label>${chart}</section>`;
    })
    .join("");
  const generateDisabled = data.selectedFeatures.length === 0 ? "disabled" : "";
  const savedSets = data.groupSets.length
    ? data.groupSets
        .map((gs) =>
          `<li><button data-action="restore-group-set" data-group-set="${esc(gs.id)}" ` +
          `title="Replace the active groups with this saved set">` +
          `${esc(gs.name)} (${gs.subgroup_ids.length})</button></li>`)
        .join("")
    : "<li class='hint'>no saved sets yet</li>";
  return `<aside class="sidebar">` +
    `<button data-action="toggle-sidebar" title="Collapse the feature sidebar">&laquo;</button>` +
    `<h2>Features (${data.dataset.row_count} rows)</h2>` +
    `<div class="features">${features}</div>` +
    `<div class="generation">` +
    `<button data-action="generate-groups" ${generateDisabled} ` +
    `title="Generate subgroups from the checked features">Generate subgroups</button>` +
    `<button data-action="save-group-set" title="Save the active groups for later">Save active set</button>` +
    `</div>` +
    `<h3>Saved group sets</h3><ul class="saved-sets">${savedSets}</ul>` +
    (state.errorMessage
      ? `<p class="error" role="alert">${esc(state.errorMessage)}</p>`
      : "") +
    `</aside>`;
}
