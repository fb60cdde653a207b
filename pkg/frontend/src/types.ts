/**
 * Wire types for the audit service API. Every field the UI renders comes
 * straight from one of these payloads; the UI never derives rankings or
 * deltas on its own.
 */

export interface SummaryPayload {
  nodeCount: number;
  edgeCount: number;
  labelCounts: Record<string, number>;
}

export interface SensitivityRecord {
  node: string;
  originalRank: number;
  si: number;
  siPos: number;
  siNeg: number;
  perLabelPos: Record<string, number>;
  perLabelNeg: Record<string, number>;
}

export interface SensitivityPayload {
  total: number;
  fingerprint: string;
  records: SensitivityRecord[];
}

export interface OverviewPayload {
  influencedCount: number;
  increasedCount: number;
  decreasedCount: number;
  maxIncrease: number;
  maxDecrease: number;
  medianIncrease: number;
  medianDecrease: number;
  removedDegree: number;
}

export interface ChangeRecord {
  node: string;
  previousRank: number;
  perturbedRank: number;
  delta: number;
  label: string;
}

export interface TopkPayload {
  k: number;
  before: Record<string, number>;
  after: Record<string, number>;
}

export type EdgeKind = "traversal" | "inf_attach";

export interface InfluenceNodePayload {
  node: string;
  /** BFS depth from the removed node; null marks hop-inf nodes. */
  hop: number | null;
  delta: number;
  label: string;
}

export interface InfluenceEdgePayload {
  source: string;
  target: string;
  kind: EdgeKind;
}

export interface InfluencePayload {
  removed: string;
  nodes: InfluenceNodePayload[];
  edges: InfluenceEdgePayload[];
}

export interface ReportPayload {
  removed: string;
  fingerprint: string;
  k: number;
  overview: OverviewPayload;
  records: ChangeRecord[];
  topk: TopkPayload;
  influence: InfluencePayload;
}

export type RuleDirection = "no_decrease" | "no_increase";
export type ThresholdKind = "abs" | "pct";

export interface RulePayload {
  id: string;
  protected: string[];
  direction: RuleDirection;
  threshold: number;
  kind: ThresholdKind;
}

export interface ApiErrorBody {
  error: { code: string; param: string | null; message: string };
}
