/** Formatting helpers; displayed text is rounded, data-value attrs are not. */

import type { Rate } from "./types.js";

export function esc(value: unknown): string {
  return String(value)
    .replaceAll("&", "&amp;")
    .replaceAll("<", "&lt;")
    .replaceAll(">", "&gt;")
    .replaceAll('"', "&quot;");
}

/** Exact payload value for data-value attributes (contract-test anchor). */
export function dataValue(value: Rate): string {
  return value === null ? "null" : String(value);
}

export function fmtRate(value: Rate): string {
  return value === null ? "undefined" : value.toFixed(4);
}

export function fmtDelta(value: Rate): string {
  if (value === null) return "undefined";
  const sign = value >= 0 ? "+" : "";
  return `${sign}${value.toFixed(4)}`;
}

export function fmtPercent(count: number, total: number): string {
  if (total === 0) return "0%";
  return `${((100 * count) / total).toFixed(1)}%`;
}
