/**
 * App bootstrap: fetch, render, wire events. All state transitions go
 * through the pure functions in state.ts; this file only owns the DOM.
 */

import { AuditApi, ApiError } from "./api.js";
import {
  IDENTITY_FILTER,
  ViewState,
  activeReport,
  buildRule,
  closeTab,
  initialState,
  nextRuleId,
  openTab,
  setHopFilter,
  toggleShield,
  toggleSort,
} from "./state.js";
import { renderTableHtml } from "./table.js";
import { INFLUENCE_PAD, influenceViewSize, renderDiagnosisHtml } from "./render.js";
import { filterInfluence, influenceLayout, nodesInRect } from "./diagnosis.js";
import { esc } from "./svg.js";
import type { ReportPayload, RulePayload, SensitivityPayload, SummaryPayload } from "./types.js";

const api = new AuditApi("");

let state: ViewState = initialState();
let table: SensitivityPayload | null = null;
let rules: RulePayload[] = [];

function $(id: string): HTMLElement {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node;
}

function showError(err: unknown): void {
  const box = $("notice");
  const message =
    err instanceof ApiError ? `${err.code}: ${err.message}` : String(err);
  box.innerHTML =
    `<span class="error">${esc(message)}</span> ` +
    '<button id="retry">retry</button>';
  const retry = document.getElementById("retry");
  retry?.addEventListener("click", () => void refreshTable());
}

function showNotice(): void {
  $("notice").textContent = state.notice ?? "";
}

function renderSummary(summary: SummaryPayload): void {
  const labels = Object.entries(summary.labelCounts)
    .map(([b, n]) => `${b}: ${n}`)
    .join(", ");
  $("summary").textContent =
    `${summary.nodeCount} nodes, ${summary.edgeCount} edges (${labels})`;
}

function renderRules(): void {
  const items = rules
    .map(
      (r) =>
        `<li><code>${esc(r.id)}</code> protect {${r.protected.map(esc).join(", ")}} ` +
        `${r.direction === "no_decrease" ? "from dropping" : "from climbing"} ` +
        `by more than ${r.threshold}${r.kind === "pct" ? "%" : ""}</li>`,
    )
    .join("");
  $("rules").innerHTML = items || "<li class=\"muted\">no constraints yet</li>";
  $("drafts").textContent = state.ruleDrafts.length
    ? `shielded: ${state.ruleDrafts.join(", ")}`
    : "shield rows to draft a constraint";
}

async function refreshTable(): Promise<void> {
  const panel = $("table-panel");
  panel.classList.add("loading");
  try {
    table = await api.sensitivity({
      sort: state.sort.key,
      order: state.sort.order,
      sessionId: state.sessionId,
    });
    panel.innerHTML = renderTableHtml(table.records, state.sort, state.ruleDrafts);
    $("table-meta").textContent =
      `${table.total} candidate perturbation${table.total === 1 ? "" : "s"}`;
    wireTable(panel);
  } catch (err) {
    showError(err);
  } finally {
    panel.classList.remove("loading");
  }
}

function wireTable(panel: HTMLElement): void {
  panel.querySelectorAll<HTMLElement>("th.sortable").forEach((th) => {
    th.addEventListener("click", () => {
      state = toggleSort(state, th.dataset.sort ?? "rank");
      void refreshTable();
    });
  });
  panel.querySelectorAll<HTMLElement>("button.shield").forEach((btn) => {
    btn.addEventListener("click", () => {
      state = toggleShield(state, btn.dataset.shield ?? "");
      renderRules();
      void refreshTable();
    });
  });
  panel.querySelectorAll<HTMLElement>("button.diagnose").forEach((btn) => {
    btn.addEventListener("click", () => void diagnose(btn.dataset.diagnose ?? ""));
  });
}

async function diagnose(node: string): Promise<void> {
  try {
    const report = await api.perturbation(node, state.k);
    state = openTab(state, report);
    showNotice();
    renderDiagnosis();
  } catch (err) {
    showError(err);
  }
}

function renderDiagnosis(): void {
  const tabsBox = $("tabs");
  tabsBox.innerHTML = state.tabs
    .map(
      (t) =>
        `<span class="tab${t.node === state.activeTab ? " active" : ""}" data-tab="${esc(t.node)}">` +
        `remove ${esc(t.node)} <button class="close" data-close="${esc(t.node)}">×</button></span>`,
    )
    .join("");
  tabsBox.querySelectorAll<HTMLElement>(".tab").forEach((tab) => {
    tab.addEventListener("click", () => {
      state = { ...state, activeTab: tab.dataset.tab ?? null };
      renderDiagnosis();
    });
  });
  tabsBox.querySelectorAll<HTMLElement>("button.close").forEach((btn) => {
    btn.addEventListener("click", (ev) => {
      ev.stopPropagation();
      state = closeTab(state, btn.dataset.close ?? "");
      renderDiagnosis();
    });
  });

  const report = activeReport(state);
  const panel = $("diagnosis");
  if (!report) {
    panel.innerHTML =
      '<p class="muted">pick a node in the table and hit ⌖ to diagnose its removal</p>';
    return;
  }
  panel.innerHTML = renderDiagnosisHtml(state, report);
  // detail-table hover highlights the matching influence-graph node
  panel.querySelectorAll<HTMLElement>(".detail-table tr[data-node]").forEach((row) => {
    row.addEventListener("mouseenter", () => highlight(panel, row.dataset.node ?? "", true));
    row.addEventListener("mouseleave", () => highlight(panel, row.dataset.node ?? "", false));
  });
  wireLasso(panel, report);
}

/** Drag a marquee over the influence view to shield the caught nodes. */
function wireLasso(panel: HTMLElement, report: ReportPayload): void {
  const svg = panel.querySelector<SVGSVGElement>("svg.influence");
  if (!svg) return;
  const layout = influenceLayout(filterInfluence(report.influence, state.hopFilter));
  const viewSize = influenceViewSize(layout);
  let start: { x: number; y: number } | null = null;
  let marquee: SVGRectElement | null = null;

  const toView = (ev: PointerEvent) => {
    const box = svg.getBoundingClientRect();
    return {
      x: ((ev.clientX - box.left) / box.width) * viewSize,
      y: ((ev.clientY - box.top) / box.height) * viewSize,
    };
  };

  svg.addEventListener("pointerdown", (ev) => {
    start = toView(ev);
    marquee = document.createElementNS("http://www.w3.org/2000/svg", "rect");
    marquee.setAttribute("class", "marquee");
    svg.appendChild(marquee);
    svg.setPointerCapture(ev.pointerId);
  });
  svg.addEventListener("pointermove", (ev) => {
    if (!start || !marquee) return;
    const here = toView(ev);
    marquee.setAttribute("x", String(Math.min(start.x, here.x)));
    marquee.setAttribute("y", String(Math.min(start.y, here.y)));
    marquee.setAttribute("width", String(Math.abs(here.x - start.x)));
    marquee.setAttribute("height", String(Math.abs(here.y - start.y)));
  });
  svg.addEventListener("pointerup", (ev) => {
    if (!start) return;
    const here = toView(ev);
    marquee?.remove();
    const caught = nodesInRect(
      layout,
      start.x - INFLUENCE_PAD,
      start.y - INFLUENCE_PAD,
      here.x - INFLUENCE_PAD,
      here.y - INFLUENCE_PAD,
    );
    start = null;
    marquee = null;
    if (!caught.length) return;
    for (const node of caught) {
      if (!state.ruleDrafts.includes(node)) {
        state = toggleShield(state, node);
      }
    }
    renderRules();
    void refreshTable();
  });
}

function highlight(panel: HTMLElement, node: string, on: boolean): void {
  panel
    .querySelectorAll<SVGElement>(`.influence-node[data-node="${CSS.escape(node)}"]`)
    .forEach((circle) => circle.classList.toggle("highlight", on));
}

function wireControls(): void {
  $("apply-filter").addEventListener("click", () => {
    const hopMin = Number((<HTMLInputElement>$("hop-min")).value) || 1;
    const rawMax = (<HTMLInputElement>$("hop-max")).value.trim();
    const hopMax = rawMax === "" || rawMax === "inf" ? null : Number(rawMax);
    const direction = (<HTMLSelectElement>$("direction")).value as
      | "all"
      | "increased"
      | "decreased";
    state = setHopFilter(state, { hopMin, hopMax, direction });
    renderDiagnosis();
  });
  $("reset-filter").addEventListener("click", () => {
    state = setHopFilter(state, { ...IDENTITY_FILTER });
    (<HTMLInputElement>$("hop-min")).value = "1";
    (<HTMLInputElement>$("hop-max")).value = "";
    (<HTMLSelectElement>$("direction")).value = "all";
    renderDiagnosis();
  });
  $("apply-k").addEventListener("click", () => {
    state = { ...state, k: Number((<HTMLInputElement>$("k-input")).value) || 100 };
    const active = state.activeTab;
    if (active) {
      // re-fetch so the donut k comes from the API, not local math
      state = closeTab(state, active);
      void diagnose(active);
    }
  });
  $("update-constraints").addEventListener("click", () => void updateConstraints());
  $("clear-rules").addEventListener("click", () => void clearRules());
}

async function updateConstraints(): Promise<void> {
  if (!state.ruleDrafts.length) {
    state = { ...state, notice: "shield at least one node first" };
    showNotice();
    return;
  }
  try {
    if (!state.sessionId) {
      state = { ...state, sessionId: (await api.createSession()).sessionId };
    }
    const direction = (<HTMLSelectElement>$("rule-direction")).value as
      | "no_decrease"
      | "no_increase";
    const threshold = Number((<HTMLInputElement>$("rule-threshold")).value) || 0;
    const kind = (<HTMLSelectElement>$("rule-kind")).value as "abs" | "pct";
    rules = [...rules, buildRule(state.ruleDrafts, direction, threshold, kind, nextRuleId(rules))];
    const { retained } = await api.setRules(state.sessionId!, rules);
    state = { ...state, ruleDrafts: [], notice: `${retained} perturbations retained` };
    renderRules();
    showNotice();
    await refreshTable();
  } catch (err) {
    showError(err);
  }
}

async function clearRules(): Promise<void> {
  rules = [];
  if (state.sessionId) {
    try {
      await api.setRules(state.sessionId, []);
    } catch (err) {
      showError(err);
      return;
    }
  }
  state = { ...state, ruleDrafts: [], notice: null };
  renderRules();
  showNotice();
  await refreshTable();
}

async function boot(): Promise<void> {
  wireControls();
  renderRules();
  renderDiagnosis();
  try {
    renderSummary(await api.summary());
  } catch (err) {
    showError(err);
  }
  await refreshTable();
}

void boot();
