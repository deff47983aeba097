// Alert triage: filterable list, evidence detail, acknowledge/dismiss.

import { clear, el, fmtMicro } from "../render.js";
import type { Alert, EvidenceItem } from "../types.js";

export interface AlertHandlers {
  onFilter(state: string, kind: string): void;
  onSelect(id: string): void;
  onAck(id: string, state: "acknowledged" | "dismissed", note: string): void;
  onTimeline(prefix: string, overlay?: string): void;
}

const KINDS = [
  "",
  "origin_change",
  "subprefix_injection",
  "special_use",
  "unallocated",
  "short_prefix",
  "long_prefix",
  "rare_prefix",
];

function select(options: string[], current: string, onChange: (value: string) => void): HTMLSelectElement {
  const node = el("select", {
    onchange: (event) => onChange((event.target as HTMLSelectElement).value),
  });
  for (const option of options) {
    const item = el("option", { value: option }, option || "any");
    if (option === current) item.setAttribute("selected", "selected");
    node.append(item);
  }
  return node;
}

function evidenceRow(item: EvidenceItem): HTMLElement {
  const cells: string[] = [];
  if (item.prefix) cells.push(item.prefix);
  if (item.origin_as !== undefined) cells.push(`AS${item.origin_as}`);
  if (item.origins) cells.push(item.origins.map((o) => `AS${o}`).join(", "));
  if (item.mask_length !== undefined) cells.push(`/${item.mask_length}`);
  if (item.absent_windows !== undefined) cells.push(`absent ${item.absent_windows} windows`);
  if (item.event) cells.push(`${item.event.ts} via ${item.event.vp} (${item.event.path ?? item.event.kind})`);
  return el(
    "tr",
    { class: `evidence-${item.role}` },
    el("td", { class: "role" }, item.role.replace(/_/g, " ")),
    el("td", {}, cells.join(" · ")),
  );
}

function detailPane(alert: Alert, handlers: AlertHandlers): HTMLElement {
  const note = el("input", {
    type: "text",
    placeholder: "operator note",
    class: "note-input",
    value: alert.note ?? "",
  });
  const actions =
    alert.state === "open"
      ? el(
          "div",
          { class: "actions" },
          note,
          el(
            "button",
            { class: "ack", onclick: () => handlers.onAck(alert.id, "acknowledged", note.value) },
            "Acknowledge",
          ),
          el(
            "button",
            { class: "dismiss", onclick: () => handlers.onAck(alert.id, "dismissed", note.value) },
            "Dismiss",
          ),
        )
      : el("div", { class: "actions" }, el("span", { class: `state-chip ${alert.state}` }, alert.state));

  const covering = alert.evidence.find((item) => item.role === "covering");
  const timelineLink = el(
    "button",
    {
      class: "link",
      onclick: () => handlers.onTimeline(alert.prefix, covering?.prefix),
    },
    "view prefix timeline",
  );

  return el(
    "div",
    { class: "detail" },
    el("h3", {}, `${alert.kind.replace(/_/g, " ")} — ${alert.prefix}`),
    el(
      "div",
      { class: "meta" },
      `first seen ${fmtMicro(alert.first_event_us)} · last ${fmtMicro(alert.last_event_us)}` +
        ` · ${alert.trigger_count} trigger${alert.trigger_count === 1 ? "" : "s"}` +
        ` · implicated ${alert.implicated.map((o) => `AS${o}`).join(", ") || "none"}`,
    ),
    el("table", { class: "evidence" }, ...alert.evidence.map(evidenceRow)),
    alert.note ? el("div", { class: "note" }, `note: ${alert.note}`) : null,
    actions,
    timelineLink,
  );
}

export function renderAlerts(
  container: HTMLElement,
  alerts: Alert[],
  filter: { state: string; kind: string },
  selectedId: string | undefined,
  handlers: AlertHandlers,
): void {
  clear(container);
  const filters = el(
    "div",
    { class: "filters" },
    el("label", {}, "state "),
    select(["", "open", "acknowledged", "dismissed"], filter.state, (value) =>
      handlers.onFilter(value, filter.kind),
    ),
    el("label", {}, " kind "),
    select(KINDS, filter.kind, (value) => handlers.onFilter(filter.state, value)),
    el("span", { class: "count" }, `${alerts.length} alert${alerts.length === 1 ? "" : "s"}`),
  );

  const rows = alerts.map((alert) => {
    const row = el(
      "tr",
      {
        class: `alert-row ${alert.state}` + (alert.id === selectedId ? " selected" : ""),
        "data-id": alert.id,
        onclick: () => handlers.onSelect(alert.id),
      },
      el("td", {}, el("span", { class: `kind-badge ${alert.kind}` }, alert.kind.replace(/_/g, " "))),
      el("td", { class: "mono" }, alert.prefix),
      el("td", {}, fmtMicro(alert.first_event_us)),
      el("td", {}, alert.implicated.map((o) => `AS${o}`).join(", ")),
      el("td", {}, el("span", { class: `state-chip ${alert.state}` }, alert.state)),
    );
    return row;
  });

  const list = alerts.length
    ? el(
        "table",
        { class: "alert-table" },
        el(
          "thead",
          {},
          el(
            "tr",
            {},
            el("th", {}, "kind"),
            el("th", {}, "prefix"),
            el("th", {}, "first event"),
            el("th", {}, "implicated"),
            el("th", {}, "state"),
          ),
        ),
        el("tbody", {}, ...rows),
      )
    : el("div", { class: "empty" }, "no alerts match the current filters");

  const selected = alerts.find((alert) => alert.id === selectedId);
  container.append(
    filters,
    el(
      "div",
      { class: "split" },
      el("div", { class: "pane list" }, list),
      el(
        "div",
        { class: "pane" },
        selected ? detailPane(selected, handlers) : el("div", { class: "empty" }, "select an alert"),
      ),
    ),
  );
}
