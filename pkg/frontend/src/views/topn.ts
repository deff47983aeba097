// Top-N bar table per metric.

import { clear, el, fmtTime } from "../render.js";
import type { TopNResult } from "../types.js";

export const METRICS = [
  "transit_count",
  "origin_prefix_count",
  "path_change_count",
  "rank_change_frequency",
];

export interface TopNHandlers {
  onMetric(metric: string): void;
  onAs(asn: number): void;
}

export function renderTopN(container: HTMLElement, result: TopNResult, handlers: TopNHandlers): void {
  clear(container);
  const picker = el(
    "div",
    { class: "filters" },
    el("label", {}, "metric "),
    (() => {
      const node = el("select", {
        onchange: (event) => handlers.onMetric((event.target as HTMLSelectElement).value),
      });
      for (const metric of METRICS) {
        const option = el("option", { value: metric }, metric.replace(/_/g, " "));
        if (metric === result.metric) option.setAttribute("selected", "selected");
        node.append(option);
      }
      return node;
    })(),
    el(
      "span",
      { class: "count" },
      result.window === null ? "no sealed windows" : `window ${fmtTime(result.window)}`,
    ),
  );
  container.append(picker);

  if (result.entries.length === 0) {
    container.append(el("div", { class: "empty" }, "no data for this metric yet"));
    return;
  }

  const max = Math.max(...result.entries.map((entry) => entry.value)) || 1;
  const rows = result.entries.map((entry, i) => {
    const width = Math.max(2, (entry.value / max) * 100);
    return el(
      "tr",
      { class: "topn-row", onclick: () => handlers.onAs(entry.subject) },
      el("td", { class: "rank" }, String(i + 1)),
      el("td", { class: "mono" }, `AS${entry.subject}`),
      el(
        "td",
        { class: "bar-cell" },
        el("div", { class: "bar", style: `width:${width.toFixed(1)}%` }),
        el("span", { class: "bar-value" }, String(entry.value)),
      ),
    );
  });
  container.append(el("table", { class: "topn-table" }, el("tbody", {}, ...rows)));
}
