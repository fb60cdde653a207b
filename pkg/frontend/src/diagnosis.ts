/**
 * View-models for the diagnosis views: radar overview, ranking-change
 * bar chart, top-k donut pair, detail rows, and the radial influence
 * layout. All pure projections of fetched payloads; the hop/direction
 * filter drives the bar chart, detail table, and influence view from
 * one shared node set.
 */

import type {
  ChangeRecord,
  InfluencePayload,
  ReportPayload,
  TopkPayload,
} from "./types.js";
import type { HopFilter } from "./state.js";

// ---------------------------------------------------------------- radar

export const OVERVIEW_METRICS: Array<{ key: keyof ReportPayload["overview"]; label: string }> = [
  { key: "influencedCount", label: "influenced" },
  { key: "increasedCount", label: "increased" },
  { key: "decreasedCount", label: "decreased" },
  { key: "maxIncrease", label: "max +" },
  { key: "maxDecrease", label: "max −" },
  { key: "medianIncrease", label: "median +" },
  { key: "medianDecrease", label: "median −" },
  { key: "removedDegree", label: "degree" },
];

export interface RadarAxis {
  key: string;
  label: string;
  value: number;
  /** value / max over all open tabs for this axis (0 when all zero). */
  normalized: number;
}

export function radarAxes(
  report: ReportPayload,
  openReports: readonly ReportPayload[],
): RadarAxis[] {
  // per-axis normalization against every open diagnosis keeps tab
  // switches comparable
  const pool = openReports.length ? openReports : [report];
  return OVERVIEW_METRICS.map(({ key, label }) => {
    const value = report.overview[key];
    const axisMax = Math.max(...pool.map((r) => r.overview[key]), 0);
    return { key, label, value, normalized: axisMax > 0 ? value / axisMax : 0 };
  });
}

// ----------------------------------------------------- influence filter

/**
 * Client-side mirror of GET /api/perturbation/{node}/influence: keeps the
 * removed node, restricts the rest by hop range and delta direction
 * (hop-inf nodes only when the range is unbounded), and keeps edges whose
 * endpoints both survive.
 */
export function filterInfluence(ig: InfluencePayload, f: HopFilter): InfluencePayload {
  if (f.hopMin < 1 || (f.hopMax !== null && f.hopMax < f.hopMin)) {
    throw new Error(`empty hop range [${f.hopMin}, ${f.hopMax}]`);
  }
  const keep = (hop: number | null, delta: number, node: string): boolean => {
    if (node === ig.removed) return true;
    if (hop === null) {
      if (f.hopMax !== null) return false;
    } else if (hop < f.hopMin || (f.hopMax !== null && hop > f.hopMax)) {
      return false;
    }
    if (f.direction === "increased") return delta > 0;
    if (f.direction === "decreased") return delta < 0;
    return true;
  };
  const nodes = ig.nodes.filter((n) => keep(n.hop, n.delta, n.node));
  const kept = new Set(nodes.map((n) => n.node));
  const edges = ig.edges.filter((e) => kept.has(e.source) && kept.has(e.target));
  return { removed: ig.removed, nodes, edges };
}

/** The one node set the coordinated views render from. */
export function visibleNodes(report: ReportPayload, f: HopFilter): Set<string> {
  const filtered = filterInfluence(report.influence, f);
  const nodes = new Set(filtered.nodes.map((n) => n.node));
  nodes.delete(report.removed);
  return nodes;
}

// ------------------------------------------------------------ bar chart

export interface Bar {
  node: string;
  x: number; // original (pre-removal) rank
  y: number; // signed rank delta
  label: string;
}

export function barChartData(report: ReportPayload, f: HopFilter): Bar[] {
  const visible = visibleNodes(report, f);
  return report.records
    .filter((r) => visible.has(r.node))
    .map((r) => ({ node: r.node, x: r.previousRank, y: r.delta, label: r.label }))
    .sort((a, b) => a.x - b.x);
}

export function detailRows(report: ReportPayload, f: HopFilter): ChangeRecord[] {
  const visible = visibleNodes(report, f);
  return report.records.filter((r) => visible.has(r.node));
}

// ---------------------------------------------------------------- donuts

export interface DonutArc {
  label: string;
  fraction: number;
  start: number; // radians from 12 o'clock
  end: number;
}

export function donutArcs(fractions: Record<string, number>): DonutArc[] {
  let angle = 0;
  return Object.keys(fractions)
    .sort()
    .map((label) => {
      const fraction = fractions[label];
      const start = angle;
      angle += fraction * 2 * Math.PI;
      return { label, fraction, start, end: angle };
    });
}

/** Display rounding used in donut legends: one decimal of percent. */
export function percentLabel(fraction: number): string {
  return `${(fraction * 100).toFixed(1)}%`;
}

export function donutPair(topk: TopkPayload): { before: DonutArc[]; after: DonutArc[] } {
  return { before: donutArcs(topk.before), after: donutArcs(topk.after) };
}

// ------------------------------------------------------ influence layout

export interface LayoutOptions {
  ringGap: number;
  /** rings past this collapse into one "hop >= maxRing+1" band */
  maxRing: number;
  /** influenced-node count beyond which banding gets a visible notice */
  nodeCap: number;
}

export const DEFAULT_LAYOUT: LayoutOptions = { ringGap: 52, maxRing: 9, nodeCap: 400 };

export interface PlacedNode {
  node: string;
  x: number;
  y: number;
  hop: number | null;
  delta: number;
  label: string;
  /** ring the node is drawn on ("0".."9", "band", "inf") */
  ring: string;
  radius: number;
  isRemoved: boolean;
  isInf: boolean;
}

export interface PlacedEdge {
  source: string;
  target: string;
  x1: number;
  y1: number;
  x2: number;
  y2: number;
  dashed: boolean;
  /** sign of the target's delta decides the color */
  increased: boolean;
  width: number;
}

export interface InfluenceLayout {
  nodes: PlacedNode[];
  edges: PlacedEdge[];
  rings: Array<{ ring: string; radius: number; count: number }>;
  extent: number;
  notice: string | null;
}

/**
 * Nodes whose placed centers fall inside a drag-selection rectangle
 * (the influence view's lasso); the removed node is never selectable.
 */
export function nodesInRect(
  layout: InfluenceLayout,
  x0: number,
  y0: number,
  x1: number,
  y1: number,
): string[] {
  const [left, right] = x0 <= x1 ? [x0, x1] : [x1, x0];
  const [top, bottom] = y0 <= y1 ? [y0, y1] : [y1, y0];
  return layout.nodes
    .filter(
      (n) =>
        !n.isRemoved &&
        n.x >= left && n.x <= right &&
        n.y >= top && n.y <= bottom,
    )
    .map((n) => n.node)
    .sort();
}

function ringOf(hop: number | null, maxRing: number): { ring: string; index: number } {
  if (hop === null) return { ring: "inf", index: maxRing + 2 };
  if (hop === 0) return { ring: "0", index: 0 };
  if (hop > maxRing) return { ring: "band", index: maxRing + 1 };
  return { ring: String(hop), index: hop };
}

/**
 * Concentric hop rings opening toward the bottom-right: the removed node
 * sits at the top-left origin, ring radius grows with hop, and nodes on a
 * ring are ordered deterministically by node id (no physics, so layouts
 * are reproducible). Hops past maxRing collapse into one band ring;
 * hop-inf nodes take the outermost ring with dashed attachment edges.
 */
export function influenceLayout(
  ig: InfluencePayload,
  opts: LayoutOptions = DEFAULT_LAYOUT,
): InfluenceLayout {
  const byRing = new Map<string, { index: number; nodes: typeof ig.nodes }>();
  for (const n of ig.nodes) {
    const { ring, index } = ringOf(n.node === ig.removed ? 0 : n.hop, opts.maxRing);
    const bucket = byRing.get(ring) ?? { index, nodes: [] };
    bucket.nodes.push(n);
    byRing.set(ring, bucket);
  }

  const maxDelta = Math.max(1, ...ig.nodes.map((n) => Math.abs(n.delta)));
  const sizeFor = (delta: number) =>
    4 + 9 * Math.sqrt(Math.abs(delta) / maxDelta);

  const placed = new Map<string, PlacedNode>();
  const rings: InfluenceLayout["rings"] = [];
  const theta0 = 0.12;
  const theta1 = Math.PI / 2 - 0.12;
  for (const [ring, bucket] of [...byRing.entries()].sort((a, b) => a[1].index - b[1].index)) {
    const radius = bucket.index * opts.ringGap;
    if (ring !== "0") {
      rings.push({ ring, radius, count: bucket.nodes.length });
    }
    const ordered = [...bucket.nodes].sort((a, b) =>
      a.node < b.node ? -1 : a.node > b.node ? 1 : 0,
    );
    ordered.forEach((n, i) => {
      const t = ordered.length === 1 ? 0.5 : i / (ordered.length - 1);
      const theta = theta0 + t * (theta1 - theta0);
      const isRemoved = n.node === ig.removed;
      placed.set(n.node, {
        node: n.node,
        x: isRemoved ? 0 : radius * Math.sin(theta),
        y: isRemoved ? 0 : radius * Math.cos(theta),
        hop: n.hop,
        delta: n.delta,
        label: n.label,
        ring,
        radius: isRemoved ? 8 : sizeFor(n.delta),
        isRemoved,
        isInf: n.hop === null && !isRemoved,
      });
    });
  }

  const edges: PlacedEdge[] = ig.edges.flatMap((e) => {
    const s = placed.get(e.source);
    const t = placed.get(e.target);
    if (!s || !t) return [];
    return [{
      source: e.source,
      target: e.target,
      x1: s.x,
      y1: s.y,
      x2: t.x,
      y2: t.y,
      dashed: e.kind === "inf_attach",
      increased: t.delta > 0,
      width: 1 + 2.5 * (Math.abs(t.delta) / maxDelta),
    }];
  });

  const influenced = ig.nodes.length - 1;
  const banded = byRing.has("band");
  const notice =
    influenced > opts.nodeCap && banded
      ? `large influence graph (${influenced} nodes): hops ≥ ${opts.maxRing + 1} shown as one band`
      : banded
        ? `hops ≥ ${opts.maxRing + 1} collapsed into one band`
        : null;

  const extent = Math.max(...rings.map((r) => r.radius), opts.ringGap);
  return { nodes: [...placed.values()], edges, rings, extent, notice };
}
