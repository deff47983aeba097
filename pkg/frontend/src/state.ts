// ViewState <-> URL hash. The console is stateless against the API:
// reloading any deep link reproduces the view from the hash alone.

export type ViewState =
  | { view: "alerts"; state?: string; kind?: string; from?: number; to?: number; selected?: string }
  | { view: "topn"; metric: string; n: number; window?: number }
  | { view: "as"; asn: number | null; from?: number; to?: number }
  | { view: "path"; a?: number; b?: number; from?: number; to?: number }
  | { view: "prefix"; prefix: string | null; overlay?: string; from?: number; to?: number };

export const DEFAULT_STATE: ViewState = { view: "alerts", state: "open" };

function putNum(params: URLSearchParams, key: string, value: number | undefined): void {
  if (value !== undefined) params.set(key, String(value));
}

export function encodeState(state: ViewState): string {
  const params = new URLSearchParams();
  let path: string;
  switch (state.view) {
    case "alerts":
      path = "/alerts";
      if (state.state) params.set("state", state.state);
      if (state.kind) params.set("kind", state.kind);
      if (state.selected) params.set("selected", state.selected);
      putNum(params, "from", state.from);
      putNum(params, "to", state.to);
      break;
    case "topn":
      path = "/topn";
      params.set("metric", state.metric);
      params.set("n", String(state.n));
      putNum(params, "window", state.window);
      break;
    case "as":
      path = state.asn === null ? "/as" : `/as/${state.asn}`;
      putNum(params, "from", state.from);
      putNum(params, "to", state.to);
      break;
    case "path":
      path = "/path";
      putNum(params, "a", state.a);
      putNum(params, "b", state.b);
      putNum(params, "from", state.from);
      putNum(params, "to", state.to);
      break;
    case "prefix":
      path = state.prefix === null ? "/prefix" : `/prefix/${encodeURIComponent(state.prefix)}`;
      if (state.overlay) params.set("overlay", state.overlay);
      putNum(params, "from", state.from);
      putNum(params, "to", state.to);
      break;
  }
  const query = params.toString();
  return `#${path}${query ? "?" + query : ""}`;
}

function numOr(params: URLSearchParams, key: string): number | undefined {
  const raw = params.get(key);
  if (raw === null || raw === "") return undefined;
  const value = Number(raw);
  return Number.isFinite(value) ? value : undefined;
}

export function decodeState(hash: string): ViewState {
  const trimmed = hash.replace(/^#/, "");
  if (!trimmed || trimmed === "/") return { ...DEFAULT_STATE };
  const [path, query = ""] = trimmed.split("?", 2);
  const params = new URLSearchParams(query);
  const parts = path.split("/").filter((p) => p.length > 0);
  switch (parts[0]) {
    case "topn":
      return {
        view: "topn",
        metric: params.get("metric") ?? "transit_count",
        n: numOr(params, "n") ?? 10,
        window: numOr(params, "window"),
      };
    case "as": {
      const asn = parts.length > 1 ? Number(parts[1]) : NaN;
      return {
        view: "as",
        asn: Number.isFinite(asn) ? asn : null,
        from: numOr(params, "from"),
        to: numOr(params, "to"),
      };
    }
    case "path":
      return {
        view: "path",
        a: numOr(params, "a"),
        b: numOr(params, "b"),
        from: numOr(params, "from"),
        to: numOr(params, "to"),
      };
    case "prefix":
      return {
        view: "prefix",
        prefix: parts.length > 1 ? decodeURIComponent(parts.slice(1).join("/")) : null,
        overlay: params.get("overlay") ?? undefined,
        from: numOr(params, "from"),
        to: numOr(params, "to"),
      };
    default:
      return {
        view: "alerts",
        state: params.get("state") ?? undefined,
        kind: params.get("kind") ?? undefined,
        selected: params.get("selected") ?? undefined,
        from: numOr(params, "from"),
        to: numOr(params, "to"),
      };
  }
}
