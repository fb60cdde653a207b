/**
 * Sensitivity table: client-side sorting that mirrors the API's ordering
 * contract (sort value, ties by node id ascending) plus the HTML view.
 */

import type { SensitivityRecord } from "./types.js";
import type { SortKey, SortOrder } from "./state.js";
import { esc } from "./svg.js";

export function sortValue(record: SensitivityRecord, key: SortKey): number {
  switch (key) {
    case "rank":
      return record.originalRank;
    case "si":
      return record.si;
    case "siPos":
      return record.siPos;
    case "siNeg":
      return record.siNeg;
    default: {
      if (!key.startsWith("perLabel:")) {
        throw new Error(`unknown sort key ${key}`);
      }
      const label = key.slice("perLabel:".length);
      return (record.perLabelPos[label] ?? 0) + (record.perLabelNeg[label] ?? 0);
    }
  }
}

export function sortRecords(
  records: readonly SensitivityRecord[],
  key: SortKey,
  order: SortOrder,
): SensitivityRecord[] {
  const sign = order === "desc" ? -1 : 1;
  return [...records].sort((a, b) => {
    const diff = sortValue(a, key) - sortValue(b, key);
    if (diff !== 0) return sign * diff;
    return a.node < b.node ? -1 : a.node > b.node ? 1 : 0;
  });
}

export function labelColumns(records: readonly SensitivityRecord[]): string[] {
  const labels = new Set<string>();
  for (const r of records) {
    for (const b of Object.keys(r.perLabelPos)) labels.add(b);
  }
  return [...labels].sort();
}

const ARROWS: Record<SortOrder, string> = { asc: "▲", desc: "▼" };

export function renderTableHtml(
  records: readonly SensitivityRecord[],
  sort: { key: SortKey; order: SortOrder },
  drafts: readonly string[],
): string {
  const labels = labelColumns(records);
  const shielded = new Set(drafts);
  const header = (key: SortKey, text: string) => {
    const arrow = sort.key === key ? ` ${ARROWS[sort.order]}` : "";
    return `<th class="sortable" data-sort="${esc(key)}">${esc(text)}${arrow}</th>`;
  };
  const head =
    "<tr><th></th><th></th>" +
    header("rank", "rank") +
    "<th>node</th>" +
    header("si", "SI") +
    header("siPos", "SI+") +
    header("siNeg", "SI−") +
    labels.map((b) => header(`perLabel:${b}`, b)).join("") +
    "</tr>";
  const rows = sortRecords(records, sort.key, sort.order)
    .map((r) => {
      const on = shielded.has(r.node);
      const perLabel = labels
        .map((b) => `<td>${(r.perLabelPos[b] ?? 0)}/${(r.perLabelNeg[b] ?? 0)}</td>`)
        .join("");
      return (
        `<tr data-node="${esc(r.node)}">` +
        `<td><button class="shield${on ? " on" : ""}" data-shield="${esc(r.node)}" ` +
        `title="toggle protection draft">⛨</button></td>` +
        `<td><button class="diagnose" data-diagnose="${esc(r.node)}" ` +
        `title="diagnose this removal">⌖</button></td>` +
        `<td>${r.originalRank}</td>` +
        `<td class="node-id">${esc(r.node)}</td>` +
        `<td>${r.si}</td><td>${r.siPos}</td><td>${r.siNeg}</td>` +
        perLabel +
        "</tr>"
      );
    })
    .join("");
  return `<table class="sens-table"><thead>${head}</thead><tbody>${rows}</tbody></table>`;
}
