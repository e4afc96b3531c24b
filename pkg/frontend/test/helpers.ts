/** Extract data-* attributes from rendered HTML strings (no DOM needed). */

export interface RenderedBar {
  label: string | null;
  value: string;
  group: string | null;
  stratum: string | null;
}

const TAG = /<div ([^>]*\bclass="bar[^"]*"[^>]*)>/g;

function attr(attrs: string, name: string): string | null {
  const match = attrs.match(new RegExp(`${name}="([^"]*)"`));
  return match ? match[1] : null;
}

export function extractBars(html: string): RenderedBar[] {
  const bars: RenderedBar[] = [];
  for (const match of html.matchAll(TAG)) {
    const attrs = match[1];
    bars.push({
      label: attr(attrs, "data-label"),
      value: attr(attrs, "data-value") ?? "",
      group: attr(attrs, "data-group"),
      stratum: attr(attrs, "data-stratum"),
    });
  }
  return bars;
}

export function extractDataValues(html: string, role?: string): string[] {
  const pattern = role
    ? new RegExp(`data-role="${role}" data-value="([^"]*)"`, "g")
    : /data-value="([^"]*)"/g;
  return Array.from(html.matchAll(pattern), (m) => m[1]);
}
