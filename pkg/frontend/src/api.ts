// Thin fetch client for the bgplens query API. The console keeps no state
// of its own beyond the current view; every render re-reads the API.

import type {
  Alert,
  AsViewResult,
  Health,
  PathMetricsResult,
  TimelineResult,
  TopNResult,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    public status: number,
    message: string,
  ) {
    super(message);
  }
}

type Params = Record<string, string | number | undefined>;

export class ApiClient {
  constructor(
    private base: string = "",
    private token?: string,
  ) {}

  private async request<T>(method: string, path: string, params?: Params, body?: unknown): Promise<T> {
    const url = new URL(this.base + path, window.location.origin);
    for (const [key, value] of Object.entries(params ?? {})) {
      if (value !== undefined && value !== "") url.searchParams.set(key, String(value));
    }
    const headers: Record<string, string> = {};
    if (body !== undefined) headers["Content-Type"] = "application/json";
    if (this.token) headers["Authorization"] = `Bearer ${this.token}`;
    const response = await fetch(url.toString(), {
      method,
      headers,
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    if (!response.ok) {
      let detail = response.statusText;
      try {
        const payload = await response.json();
        if (payload && payload.detail) detail = String(payload.detail);
      } catch {
        // keep the status text
      }
      throw new ApiError(response.status, detail);
    }
    return (await response.json()) as T;
  }

  alerts(filter: { state?: string; kind?: string; from?: number; to?: number } = {}): Promise<{ alerts: Alert[] }> {
    return this.request("GET", "/api/v1/alerts", filter);
  }

  ack(id: string, state: "acknowledged" | "dismissed", note?: string): Promise<Alert> {
    return this.request("POST", `/api/v1/alerts/${id}/ack`, undefined, { state, note });
  }

  topn(metric: string, n: number, window?: number): Promise<TopNResult> {
    return this.request("GET", "/api/v1/topn", { metric, n, window });
  }

  asView(asn: number, from?: number, to?: number): Promise<AsViewResult> {
    return this.request("GET", `/api/v1/as/${asn}`, { from, to });
  }

  pathCompare(a: number, b: number, from?: number, to?: number): Promise<PathMetricsResult> {
    return this.request("GET", "/api/v1/path", { a, b, from, to });
  }

  prefixTimeline(prefix: string, from?: number, to?: number): Promise<TimelineResult> {
    return this.request("GET", `/api/v1/prefix/${prefix}/timeline`, { from, to });
  }

  health(): Promise<Health> {
    return this.request("GET", "/api/v1/health");
  }
}
