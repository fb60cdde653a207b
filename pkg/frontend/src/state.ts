/**
 * View state and its pure transitions. Filters and tab bookkeeping are
 * plain projections over already-fetched payloads; nothing here calls
 * the network or recomputes audit numbers.
 */

import type { ReportPayload, RuleDirection, RulePayload, ThresholdKind } from "./types.js";

export type SortOrder = "asc" | "desc";
export type SortKey = string; // "rank" | "si" | "siPos" | "siNeg" | "perLabel:<label>"
export type HopDirection = "all" | "increased" | "decreased";

export interface HopFilter {
  hopMin: number;
  /** null = unbounded (includes hop-inf nodes). */
  hopMax: number | null;
  direction: HopDirection;
}

export interface DiagnosisTab {
  node: string;
  report: ReportPayload;
}

export interface ViewState {
  sessionId: string | null;
  selectedNode: string | null;
  tabs: DiagnosisTab[];
  activeTab: string | null;
  sort: { key: SortKey; order: SortOrder };
  hopFilter: HopFilter;
  k: number;
  ruleDrafts: string[];
  notice: string | null;
}

export const MAX_TABS = 8;

export const IDENTITY_FILTER: HopFilter = { hopMin: 1, hopMax: null, direction: "all" };

export function initialState(): ViewState {
  return {
    sessionId: null,
    selectedNode: null,
    tabs: [],
    activeTab: null,
    sort: { key: "rank", order: "asc" },
    hopFilter: { ...IDENTITY_FILTER },
    k: 100,
    ruleDrafts: [],
    notice: null,
  };
}

/** First click on a column sorts descending; clicking it again flips. */
export function toggleSort(state: ViewState, key: SortKey): ViewState {
  const order: SortOrder =
    state.sort.key === key && state.sort.order === "desc" ? "asc" : "desc";
  return { ...state, sort: { key, order } };
}

export function openTab(state: ViewState, report: ReportPayload): ViewState {
  const existing = state.tabs.find((t) => t.node === report.removed);
  if (existing) {
    return { ...state, activeTab: report.removed, selectedNode: report.removed };
  }
  if (state.tabs.length >= MAX_TABS) {
    return { ...state, notice: `tab limit of ${MAX_TABS} reached; close one first` };
  }
  return {
    ...state,
    tabs: [...state.tabs, { node: report.removed, report }],
    activeTab: report.removed,
    selectedNode: report.removed,
    notice: null,
  };
}

export function closeTab(state: ViewState, node: string): ViewState {
  const tabs = state.tabs.filter((t) => t.node !== node);
  const activeTab =
    state.activeTab === node ? (tabs.length ? tabs[tabs.length - 1].node : null) : state.activeTab;
  return { ...state, tabs, activeTab };
}

export function activeReport(state: ViewState): ReportPayload | null {
  const tab = state.tabs.find((t) => t.node === state.activeTab);
  return tab ? tab.report : null;
}

export function toggleShield(state: ViewState, node: string): ViewState {
  const drafts = state.ruleDrafts.includes(node)
    ? state.ruleDrafts.filter((n) => n !== node)
    : [...state.ruleDrafts, node];
  return { ...state, ruleDrafts: drafts };
}

export function clearDrafts(state: ViewState): ViewState {
  return { ...state, ruleDrafts: [] };
}

export function setHopFilter(state: ViewState, filter: HopFilter): ViewState {
  return { ...state, hopFilter: filter };
}

/** Build the rule object POSTed to /api/session/{id}/rules. */
export function buildRule(
  drafts: readonly string[],
  direction: RuleDirection,
  threshold: number,
  kind: ThresholdKind,
  id: string,
): RulePayload {
  if (!drafts.length) {
    throw new Error("no shielded nodes to protect");
  }
  return {
    id,
    protected: [...drafts].sort(),
    direction,
    threshold,
    kind,
  };
}

/** A fresh rule id that does not collide with the existing ones. */
export function nextRuleId(existing: readonly RulePayload[]): string {
  const taken = new Set(existing.map((r) => r.id));
  let i = existing.length + 1;
  while (taken.has(`rule-${i}`)) {
    i += 1;
  }
  return `rule-${i}`;
}
