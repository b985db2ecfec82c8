// Thin typed client over the documented HTTP API.

import type {
  ApiError,
  PlotDocument,
  QueryRequest,
  QueryResponse,
  RecordDetail,
} from "./types.js";

export class ApiRequestError extends Error {
  readonly code: string;
  readonly status: number;

  constructor(status: number, body: ApiError) {
    super(body.message || `request failed with ${status}`);
    this.code = body.error || "unknown";
    this.status = status;
  }
}

async function asJson<T>(resp: Response): Promise<T> {
  if (!resp.ok) {
    let body: ApiError = { error: "unknown", message: `HTTP ${resp.status}` };
    try {
      body = (await resp.json()) as ApiError;
    } catch {
      // non-JSON error body; keep the fallback
    }
    throw new ApiRequestError(resp.status, body);
  }
  return (await resp.json()) as T;
}

export class ApiClient {
  constructor(readonly baseUrl: string = "") {}

  async submitQuery(request: QueryRequest): Promise<QueryResponse> {
    const resp = await fetch(`${this.baseUrl}/api/v1/query`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(request),
    });
    return asJson<QueryResponse>(resp);
  }

  async getRecord(recordId: string): Promise<RecordDetail> {
    const resp = await fetch(
      `${this.baseUrl}/api/v1/records/${encodeURIComponent(recordId)}`,
    );
    return asJson<RecordDetail>(resp);
  }

  async getPlot(queryHash: string): Promise<PlotDocument> {
    const resp = await fetch(
      `${this.baseUrl}/api/v1/plots/${encodeURIComponent(queryHash)}`,
    );
    return asJson<PlotDocument>(resp);
  }

  frameUrl(recordId: string, index: number): string {
    return `${this.baseUrl}/api/v1/records/${encodeURIComponent(recordId)}/frames/${index}`;
  }
}
