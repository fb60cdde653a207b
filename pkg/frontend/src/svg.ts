/** Small string-building helpers for HTML/SVG output. */

export function esc(text: string): string {
  return text
    .replaceAll("&", "&amp;")
    .replaceAll("<", "&lt;")
    .replaceAll(">", "&gt;")
    .replaceAll('"', "&quot;");
}

export type Attrs = Record<string, string | number>;

export function el(tag: string, attrs: Attrs = {}, children = ""): string {
  const parts = Object.entries(attrs)
    .map(([k, v]) => `${k}="${typeof v === "number" ? fmt(v) : esc(v)}"`)
    .join(" ");
  return `<${tag}${parts ? " " + parts : ""}>${children}</${tag}>`;
}

export function fmt(x: number): string {
  return Number.isInteger(x) ? String(x) : x.toFixed(2);
}

/** SVG path for a donut segment between two angles (radians, 0 = 12 o'clock). */
export function donutSegmentPath(
  cx: number,
  cy: number,
  rOuter: number,
  rInner: number,
  start: number,
  end: number,
): string {
  const point = (r: number, a: number) =>
    `${fmt(cx + r * Math.sin(a))} ${fmt(cy - r * Math.cos(a))}`;
  // full-circle arcs degenerate; stop a hair short
  if (end - start >= 2 * Math.PI - 1e-9) {
    end = start + 2 * Math.PI - 1e-4;
  }
  const large = end - start > Math.PI ? 1 : 0;
  return (
    `M ${point(rOuter, start)} ` +
    `A ${fmt(rOuter)} ${fmt(rOuter)} 0 ${large} 1 ${point(rOuter, end)} ` +
    `L ${point(rInner, end)} ` +
    `A ${fmt(rInner)} ${fmt(rInner)} 0 ${large} 0 ${point(rInner, start)} Z`
  );
}

/** Deterministic categorical palette keyed by sorted label order. */
const PALETTE = [
  "#4c78a8", "#f58518", "#54a24b", "#b279a2",
  "#e45756", "#72b7b2", "#eeca3b", "#9d755d",
];

export function labelColors(labels: readonly string[]): Map<string, string> {
  const sorted = [...labels].sort();
  return new Map(sorted.map((b, i) => [b, PALETTE[i % PALETTE.length]]));
}

export const INCREASE_COLOR = "#74add1"; // light blue: rank climbed
export const DECREASE_COLOR = "#f46d43"; // orange: rank dropped
