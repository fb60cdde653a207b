/**
 * HTML/SVG renderers over the pure view-models. Every renderer is a
 * string function so snapshots stay deterministic and testable without
 * a browser.
 */

import type { ChangeRecord, ReportPayload } from "./types.js";
import type { HopFilter, ViewState } from "./state.js";
import {
  DEFAULT_LAYOUT,
  DonutArc,
  InfluenceLayout,
  RadarAxis,
  barChartData,
  detailRows,
  donutPair,
  filterInfluence,
  influenceLayout,
  percentLabel,
  radarAxes,
} from "./diagnosis.js";
import {
  DECREASE_COLOR,
  INCREASE_COLOR,
  donutSegmentPath,
  el,
  esc,
  fmt,
  labelColors,
} from "./svg.js";

function labelColorMap(report: ReportPayload): Map<string, string> {
  return labelColors([...new Set(report.records.map((r) => r.label))]);
}

// ---------------------------------------------------------------- radar

export function renderRadarSvg(axes: RadarAxis[], size = 220): string {
  const cx = size / 2;
  const cy = size / 2;
  const radius = size / 2 - 34;
  const point = (i: number, scale: number) => {
    const angle = (2 * Math.PI * i) / axes.length;
    return [cx + radius * scale * Math.sin(angle), cy - radius * scale * Math.cos(angle)];
  };
  const gridRings = [0.25, 0.5, 0.75, 1.0]
    .map((s) => {
      const pts = axes.map((_, i) => point(i, s).map(fmt).join(",")).join(" ");
      return el("polygon", { points: pts, class: "radar-grid" });
    })
    .join("");
  const spokes = axes
    .map((_, i) => {
      const [x, y] = point(i, 1);
      return el("line", { x1: cx, y1: cy, x2: x, y2: y, class: "radar-grid" });
    })
    .join("");
  const valuePoints = axes.map((a, i) => point(i, a.normalized).map(fmt).join(",")).join(" ");
  const labels = axes
    .map((a, i) => {
      const [x, y] = point(i, 1.22);
      return el(
        "text",
        { x, y, class: "radar-label", "text-anchor": "middle" },
        `${esc(a.label)} ${fmt(a.value)}`,
      );
    })
    .join("");
  return el(
    "svg",
    { viewBox: `0 0 ${size} ${size}`, class: "radar" },
    gridRings + spokes + el("polygon", { points: valuePoints, class: "radar-value" }) + labels,
  );
}

// ------------------------------------------------------------ bar chart

export function renderBarChartSvg(
  report: ReportPayload,
  filter: HopFilter,
  width = 560,
  height = 200,
): string {
  const bars = barChartData(report, filter);
  const colors = labelColorMap(report);
  if (!bars.length) {
    return `<svg viewBox="0 0 ${width} ${height}" class="barchart">` +
      `<text x="${width / 2}" y="${height / 2}" text-anchor="middle" class="empty">` +
      `no influenced nodes in this view</text></svg>`;
  }
  const maxRank = Math.max(...bars.map((b) => b.x));
  const maxAbs = Math.max(1, ...bars.map((b) => Math.abs(b.y)));
  const margin = 24;
  const zero = height / 2;
  const xFor = (rank: number) => margin + ((rank - 1) / Math.max(1, maxRank - 1)) * (width - 2 * margin);
  const yScale = (height / 2 - margin) / maxAbs;
  const barWidth = Math.max(1, Math.min(10, (width - 2 * margin) / (maxRank + 1) - 1));
  const rects = bars
    .map((b) => {
      const h = Math.abs(b.y) * yScale;
      const y = b.y > 0 ? zero - h : zero;
      return el("rect", {
        x: xFor(b.x) - barWidth / 2,
        y,
        width: barWidth,
        height: Math.max(h, 0.5),
        fill: colors.get(b.label) ?? "#888",
        "data-node": b.node,
        class: "bar",
      });
    })
    .join("");
  const axis = el("line", { x1: margin, y1: zero, x2: width - margin, y2: zero, class: "axis" });
  const caption = el(
    "text",
    { x: width - margin, y: height - 6, "text-anchor": "end", class: "axis-label" },
    "x: original rank, y: rank change",
  );
  return el("svg", { viewBox: `0 0 ${width} ${height}`, class: "barchart" }, axis + rects + caption);
}

// ---------------------------------------------------------------- donuts

export function renderDonutSvg(
  arcs: DonutArc[],
  colors: Map<string, string>,
  title: string,
  size = 150,
): string {
  const cx = size / 2;
  const cy = size / 2 + 8;
  const segments = arcs
    .filter((a) => a.fraction > 0)
    .map((a) =>
      el("path", {
        d: donutSegmentPath(cx, cy, size / 2 - 18, size / 4 - 6, a.start, a.end),
        fill: colors.get(a.label) ?? "#888",
        "data-label": a.label,
        "data-fraction": String(a.fraction),
      }),
    )
    .join("");
  const legend = arcs
    .map((a, i) =>
      el(
        "text",
        { x: 4, y: 12 + 12 * i, class: "donut-legend", fill: colors.get(a.label) ?? "#888" },
        `${esc(a.label)} ${percentLabel(a.fraction)}`,
      ),
    )
    .join("");
  const caption = el(
    "text",
    { x: cx, y: size + 18, "text-anchor": "middle", class: "donut-title" },
    esc(title),
  );
  return el("svg", { viewBox: `0 0 ${size} ${size + 24}`, class: "donut" }, segments + legend + caption);
}

export function renderDonutsHtml(report: ReportPayload): string {
  const { before, after } = donutPair(report.topk);
  const colors = labelColors(Object.keys(report.topk.before));
  return (
    renderDonutSvg(before, colors, `top-${report.topk.k} before`) +
    renderDonutSvg(after, colors, `top-${report.topk.k} after`)
  );
}

// ---------------------------------------------------------- detail table

export function renderDetailTableHtml(rows: ChangeRecord[]): string {
  const body = rows
    .map(
      (r) =>
        `<tr data-node="${esc(r.node)}">` +
        `<td class="node-id">${esc(r.node)}</td><td>${r.previousRank}</td>` +
        `<td>${r.perturbedRank}</td>` +
        `<td class="${r.delta > 0 ? "up" : r.delta < 0 ? "down" : ""}">${r.delta}</td>` +
        `<td>${esc(r.label)}</td></tr>`,
    )
    .join("");
  return (
    '<table class="detail-table"><thead><tr>' +
    "<th>node</th><th>previous</th><th>perturbed</th><th>Δ</th><th>label</th>" +
    `</tr></thead><tbody>${body}</tbody></table>`
  );
}

// ------------------------------------------------------- influence view

/** padding between the viewBox edge and the layout origin */
export const INFLUENCE_PAD = 30;

export function influenceViewSize(layout: InfluenceLayout): number {
  return layout.extent + 2 * INFLUENCE_PAD;
}

export function renderInfluenceSvg(layout: InfluenceLayout, report: ReportPayload): string {
  const colors = labelColorMap(report);
  const pad = INFLUENCE_PAD;
  const size = influenceViewSize(layout);
  const shift = (v: number) => v + pad;
  const ringCircles = layout.rings
    .map((r) =>
      el("circle", { cx: shift(0), cy: shift(0), r: r.radius, class: "hop-ring" }),
    )
    .join("");
  const ringLabels = layout.rings
    .map((r) => {
      const text = r.ring === "inf" ? "hop ∞" : r.ring === "band" ? "hop ≥ 10" : `hop ${r.ring}`;
      return el("text", { x: shift(r.radius), y: shift(0) - 4, class: "ring-label" }, text);
    })
    .join("");
  const edges = layout.edges
    .map((e) =>
      el("line", {
        x1: shift(e.x1),
        y1: shift(e.y1),
        x2: shift(e.x2),
        y2: shift(e.y2),
        stroke: e.increased ? INCREASE_COLOR : DECREASE_COLOR,
        "stroke-width": e.width,
        ...(e.dashed ? { "stroke-dasharray": "4 3" } : {}),
        class: "influence-edge",
      }),
    )
    .join("");
  const nodes = layout.nodes
    .map((n) => {
      const color = colors.get(n.label) ?? "#888";
      const fill = n.isRemoved ? "#222" : n.isInf ? "#fff" : color;
      const stroke = n.isInf ? color : "#222";
      return el("circle", {
        cx: shift(n.x),
        cy: shift(n.y),
        r: n.radius,
        fill,
        stroke,
        "stroke-width": n.isInf ? 2 : 1,
        "data-node": n.node,
        class: "influence-node",
      });
    })
    .join("");
  const notice = layout.notice
    ? el("text", { x: 6, y: size - 8, class: "notice" }, esc(layout.notice))
    : "";
  return el(
    "svg",
    { viewBox: `0 0 ${size} ${size}`, class: "influence" },
    ringCircles + ringLabels + edges + nodes + notice,
  );
}

// ----------------------------------------------------------- full panel

export function renderDiagnosisHtml(state: ViewState, report: ReportPayload): string {
  const filter = state.hopFilter;
  const open = state.tabs.map((t) => t.report);
  const layout = influenceLayout(filterInfluence(report.influence, filter), DEFAULT_LAYOUT);
  return (
    '<div class="diag-grid">' +
    `<div class="panel radar-panel"><h3>overview</h3>${renderRadarSvg(radarAxes(report, open))}</div>` +
    `<div class="panel"><h3>ranking changes</h3>${renderBarChartSvg(report, filter)}</div>` +
    `<div class="panel"><h3>top-k proportions</h3><div class="donut-row">${renderDonutsHtml(report)}</div></div>` +
    `<div class="panel"><h3>influence graph</h3>${renderInfluenceSvg(layout, report)}</div>` +
    `<div class="panel detail-panel"><h3>influenced nodes</h3>${renderDetailTableHtml(detailRows(report, filter))}</div>` +
    "</div>"
  );
}
