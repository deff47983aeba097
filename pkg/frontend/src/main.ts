// Console shell: hash router, 10 s polling, optimistic acknowledgments.

import { ApiClient, ApiError } from "./api.js";
import { clear, el, toast } from "./render.js";
import { DEFAULT_STATE, decodeState, encodeState, ViewState } from "./state.js";
import type { Alert } from "./types.js";
import { renderAlerts } from "./views/alerts.js";
import { renderAsView } from "./views/asview.js";
import { renderPathCompare } from "./views/pathcompare.js";
import { renderTimeline } from "./views/timeline.js";
import { renderTopN } from "./views/topn.js";

const POLL_INTERVAL_MS = 10_000;

const NAV: { view: ViewState["view"]; label: string; target: ViewState }[] = [
  { view: "alerts", label: "Alerts", target: { view: "alerts", state: "open" } },
  { view: "topn", label: "Top N", target: { view: "topn", metric: "transit_count", n: 10 } },
  { view: "as", label: "AS view", target: { view: "as", asn: null } },
  { view: "path", label: "Path compare", target: { view: "path" } },
  { view: "prefix", label: "Prefix timeline", target: { view: "prefix", prefix: null } },
];

export class Console {
  private api: ApiClient;
  private root: HTMLElement;
  private inFlight = false;
  private current: ViewState = DEFAULT_STATE;

  constructor(root: HTMLElement, api?: ApiClient) {
    this.root = root;
    this.api = api ?? new ApiClient();
  }

  start(): void {
    window.addEventListener("hashchange", () => void this.refresh());
    // concurrent timer polls coalesce: a poll in flight skips the tick
    setInterval(() => {
      if (!this.inFlight) void this.refresh();
    }, POLL_INTERVAL_MS);
    void this.refresh();
  }

  navigate(state: ViewState): void {
    const target = encodeState(state);
    if (window.location.hash === target) {
      void this.refresh();
    } else {
      window.location.hash = target; // hashchange triggers the render
    }
  }

  async refresh(): Promise<void> {
    if (this.inFlight) return;
    this.inFlight = true;
    try {
      this.current = decodeState(window.location.hash);
      this.renderNav();
      await this.renderCurrent();
      await this.renderHealth();
    } catch (error) {
      toast(error instanceof Error ? error.message : String(error), "error");
    } finally {
      this.inFlight = false;
    }
  }

  private renderNav(): void {
    const nav = document.getElementById("nav");
    if (!nav) return;
    clear(nav as HTMLElement);
    for (const item of NAV) {
      nav.append(
        el(
          "button",
          {
            class: "tab" + (this.current.view === item.view ? " active" : ""),
            onclick: () => this.navigate(item.target),
          },
          item.label,
        ),
      );
    }
  }

  private async renderHealth(): Promise<void> {
    const chip = document.getElementById("health");
    if (!chip) return;
    try {
      const health = await this.api.health();
      chip.textContent =
        `${health.windows_sealed} windows · ${health.alerts_open} open alert` +
        `${health.alerts_open === 1 ? "" : "s"}`;
      chip.className = "health ok";
    } catch {
      chip.textContent = "api unreachable";
      chip.className = "health down";
    }
  }

  private async renderCurrent(): Promise<void> {
    const state = this.current;
    switch (state.view) {
      case "alerts":
        return this.showAlerts(state);
      case "topn": {
        const result = await this.api.topn(state.metric, state.n, state.window);
        renderTopN(this.root, result, {
          onMetric: (metric) => this.navigate({ ...state, metric }),
          onAs: (asn) => this.navigate({ view: "as", asn }),
        });
        return;
      }
      case "as": {
        let result = null;
        if (state.asn !== null) {
          try {
            result = await this.api.asView(state.asn, state.from, state.to);
          } catch (error) {
            if (!(error instanceof ApiError && error.status === 404)) throw error;
          }
        }
        renderAsView(this.root, result, state.asn, {
          onLookup: (asn) => this.navigate({ view: "as", asn, from: state.from, to: state.to }),
        });
        return;
      }
      case "path": {
        let result = null;
        if (state.a !== undefined && state.b !== undefined) {
          result = await this.api.pathCompare(state.a, state.b, state.from, state.to);
        }
        renderPathCompare(this.root, result, { a: state.a, b: state.b }, {
          onCompare: (a, b) => this.navigate({ view: "path", a, b, from: state.from, to: state.to }),
        });
        return;
      }
      case "prefix": {
        let primary = null;
        let overlay = null;
        if (state.prefix !== null) {
          try {
            primary = await this.api.prefixTimeline(state.prefix, state.from, state.to);
          } catch (error) {
            if (!(error instanceof ApiError && error.status === 404)) throw error;
          }
          if (state.overlay) {
            try {
              overlay = await this.api.prefixTimeline(state.overlay, state.from, state.to);
            } catch (error) {
              if (!(error instanceof ApiError && error.status === 404)) throw error;
            }
          }
        }
        renderTimeline(this.root, primary, overlay, { prefix: state.prefix, overlay: state.overlay }, {
          onLookup: (prefix, over) =>
            this.navigate({ view: "prefix", prefix, overlay: over, from: state.from, to: state.to }),
        });
        return;
      }
    }
  }

  private async showAlerts(state: ViewState & { view: "alerts" }): Promise<void> {
    const filter = { state: state.state ?? "", kind: state.kind ?? "" };
    const result = await this.api.alerts({
      state: filter.state || undefined,
      kind: filter.kind || undefined,
      from: state.from,
      to: state.to,
    });
    renderAlerts(this.root, result.alerts, filter, state.selected, {
      onFilter: (newState, newKind) =>
        this.navigate({ ...state, state: newState || undefined, kind: newKind || undefined, selected: undefined }),
      onSelect: (id) => this.navigate({ ...state, selected: id }),
      onAck: (id, ackState, note) => void this.ack(result.alerts, id, ackState, note),
      onTimeline: (prefix, overlay) => this.navigate({ view: "prefix", prefix, overlay }),
    });
  }

  /** Optimistic ack: flip the row immediately, roll back if the API refuses. */
  private async ack(
    alerts: Alert[],
    id: string,
    ackState: "acknowledged" | "dismissed",
    note: string,
  ): Promise<void> {
    const target = alerts.find((alert) => alert.id === id);
    const row = this.root.querySelector(`tr[data-id="${id}"]`);
    const previous = target?.state;
    if (target) target.state = ackState;
    row?.classList.remove("open");
    row?.classList.add(ackState);
    try {
      await this.api.ack(id, ackState, note || undefined);
      toast(`alert ${ackState}`);
    } catch (error) {
      if (target && previous) target.state = previous;
      row?.classList.remove(ackState);
      row?.classList.add(previous ?? "open");
      if (error instanceof ApiError && error.status === 409) {
        toast("alert changed elsewhere; list refreshed", "error");
      } else {
        toast(error instanceof Error ? error.message : String(error), "error");
      }
    }
    await this.refresh();
  }
}

export function boot(): void {
  const root = document.getElementById("view");
  if (root) new Console(root).start();
}

if (typeof document !== "undefined" && document.getElementById("view")) {
  boot();
}
