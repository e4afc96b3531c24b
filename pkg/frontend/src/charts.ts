/** Chart rendering to HTML strings.
 *
 * Every numeric the user sees is carried verbatim in a data-value attribute
 * taken straight from the API payload; bar heights are presentation only.
 * The contract tests compare those attributes against the payloads.
 */

import { dataValue, esc, fmtRate } from "./format.js";
import type { ParityAssessment, Rate, StratifiedParity } from "./types.js";

export interface Bar {
  label: string;
  value: Rate;
  group?: string;
  stratum?: string;
}

function barHeight(value: Rate, max: number): number {
  if (value === null || max <= 0) return 2;
  return Math.max(2, (value / max) * 100);
}

export function renderBarChart(bars: Bar[], title: string): string {
  if (bars.length === 0) {
    return `<div class="chart empty" title="${esc(title)}">No data</div>`;
  }
  const max = Math.max(...bars.map((b) => (b.value === null ? 0 : b.value)), 1e-9);
  const rendered = bars
    .map((b) => {
      const attrs = [
        `class="bar${b.value === null ? " undefined" : ""}"`,
        `data-label="${esc(b.label)}"`,
        `data-value="${dataValue(b.value)}"`,
        b.group !== undefined ? `data-group="${esc(b.group)}"` : "",
        b.stratum !== undefined ? `data-stratum="${esc(b.stratum)}"` : "",
        `style="height:${barHeight(b.value, max).toFixed(1)}%"`,
        `title="${esc(b.label)}: ${fmtRate(b.value)}"`,
      ].filter(Boolean).join(" ");
      return `<div ${attrs}><span class="bar-label">${esc(b.label)}</span>` +
        `<span class="bar-value">${fmtRate(b.value)}</span></div>`;
    })
    .join("");
  return `<div class="chart bar-chart" data-title="${esc(title)}">${rendered}</div>`;
}

/** Rate-vs-size scatter; one point per subgroup. */
export function renderScatter(
  points: { label: string; size: number; value: Rate }[],
  title: string,
): string {
  if (points.length === 0) {
    return `<div class="chart empty" title="${esc(title)}">No data</div>`;
  }
  const maxSize = Math.max(...points.map((p) => p.size), 1);
  const rendered = points
    .map((p) => {
      const x = ((p.size / maxSize) * 100).toFixed(1);
      const y = (p.value === null ? 0 : p.value * 100).toFixed(1);
      return `<div class="point" data-label="${esc(p.label)}" ` +
        `data-size="${p.size}" data-value="${dataValue(p.value)}" ` +
        `style="left:${x}%;bottom:${y}%" ` +
        `title="${esc(p.label)}: size ${p.size}, ${fmtRate(p.value)}"></div>`;
    })
    .join("");
  return `<div class="chart scatter" data-title="${esc(title)}">${rendered}</div>`;
}

/** One bar per (stratum, sensitive group) pair, grouped by stratum. */
export function renderStratifiedBars(result: StratifiedParity, title: string): string {
  const groups = result.strata.map((entry) => {
    const stratum = entry.predicates
      .map((p) => p.category ?? `bin ${p.bin_index}`)
      .join(", ");
    const bars: Bar[] = entry.assessment.per_group.map(([group, value]) => ({
      label: group,
      value,
      group,
      stratum,
    }));
    const verdict = entry.assessment.satisfied ? "ok" : "violated";
    return `<div class="stratum ${verdict}" data-stratum="${esc(stratum)}" ` +
      `data-max-difference="${dataValue(entry.assessment.max_abs_difference)}">` +
      `<h4>${esc(stratum)}</h4>${renderBarChart(bars, stratum)}</div>`;
  });
  const verdict = result.satisfied ? "satisfied" : "VIOLATED";
  return `<div class="stratified" data-title="${esc(title)}" ` +
    `data-satisfied="${result.satisfied}">` +
    `<p class="verdict">${verdict} over ${result.strata.length} strata</p>` +
    `${groups.join("")}</div>`;
}

export function renderParityBars(result: ParityAssessment, title: string): string {
  const bars: Bar[] = result.per_group.map(([group, value]) => ({
    label: group,
    value,
    group,
  }));
  const verdict = result.satisfied ? "satisfied" : "VIOLATED";
  return `<div class="parity" data-title="${esc(title)}" ` +
    `data-satisfied="${result.satisfied}" ` +
    `data-max-difference="${dataValue(result.max_abs_difference)}">` +
    `<p class="verdict">${esc(result.rate_kind)} parity: ${verdict} ` +
    `(max difference ${fmtRate(result.max_abs_difference)}, ` +
    `threshold ${fmtRate(result.threshold)})</p>` +
    `${renderBarChart(bars, title)}</div>`;
}
