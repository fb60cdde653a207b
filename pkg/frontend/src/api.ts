/** Typed fetch client for the audit service. */

import type {
  ApiErrorBody,
  InfluencePayload,
  ReportPayload,
  RulePayload,
  SensitivityPayload,
  SummaryPayload,
} from "./types.js";
import type { HopFilter, SortKey, SortOrder } from "./state.js";

export class ApiError extends Error {
  constructor(
    public status: number,
    public code: string,
    public param: string | null,
    message: string,
  ) {
    super(message);
  }
}

async function request<T>(url: string, init?: RequestInit): Promise<T> {
  const resp = await fetch(url, init);
  if (!resp.ok) {
    let body: ApiErrorBody | null = null;
    try {
      body = (await resp.json()) as ApiErrorBody;
    } catch {
      // non-JSON error body; fall through to a generic error
    }
    if (body?.error) {
      throw new ApiError(resp.status, body.error.code, body.error.param, body.error.message);
    }
    throw new ApiError(resp.status, "http_error", null, `${resp.status} for ${url}`);
  }
  return (await resp.json()) as T;
}

export interface SensitivityQuery {
  sort: SortKey;
  order: SortOrder;
  limit?: number;
  offset?: number;
  sessionId?: string | null;
}

export class AuditApi {
  constructor(private base = "") {}

  summary(): Promise<SummaryPayload> {
    return request(`${this.base}/api/summary`);
  }

  sensitivity(q: SensitivityQuery): Promise<SensitivityPayload> {
    const params = new URLSearchParams({ sort: q.sort, order: q.order });
    if (q.limit !== undefined) params.set("limit", String(q.limit));
    if (q.offset) params.set("offset", String(q.offset));
    if (q.sessionId) params.set("sessionId", q.sessionId);
    return request(`${this.base}/api/sensitivity?${params}`);
  }

  perturbation(node: string, k?: number): Promise<ReportPayload> {
    const suffix = k !== undefined ? `?k=${k}` : "";
    return request(`${this.base}/api/perturbation/${encodeURIComponent(node)}${suffix}`);
  }

  influence(node: string, f: HopFilter): Promise<InfluencePayload> {
    const params = new URLSearchParams({
      hopMin: String(f.hopMin),
      hopMax: f.hopMax === null ? "inf" : String(f.hopMax),
      direction: f.direction,
    });
    return request(
      `${this.base}/api/perturbation/${encodeURIComponent(node)}/influence?${params}`,
    );
  }

  createSession(): Promise<{ sessionId: string }> {
    return request(`${this.base}/api/session`, { method: "POST" });
  }

  setRules(sessionId: string, rules: RulePayload[]): Promise<{ retained: number }> {
    return request(`${this.base}/api/session/${encodeURIComponent(sessionId)}/rules`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(rules),
    });
  }

  deleteSession(sessionId: string): Promise<{ deleted: string }> {
    return request(`${this.base}/api/session/${encodeURIComponent(sessionId)}`, {
      method: "DELETE",
    });
  }
}
