// AS connectivity view: adjacency graph plus per-window stability records.

import { clear, el, fmtTime, sparkline, svg } from "../render.js";
import type { AsViewResult } from "../types.js";

// Internet-scale adjacency cannot render; show the strongest neighbors.
export const MAX_NEIGHBORS = 200;

export interface AsViewHandlers {
  onLookup(asn: number): void;
}

function adjacencyGraph(result: AsViewResult, handlers: AsViewHandlers): HTMLElement {
  const shown = result.adjacency.slice(0, MAX_NEIGHBORS);
  const size = 420;
  const center = size / 2;
  const radius = center - 60;
  const chart = svg("svg", {
    width: String(size),
    height: String(size),
    viewBox: `0 0 ${size} ${size}`,
    class: "adjacency",
  });
  const maxCount = Math.max(...shown.map((n) => n.transit_count), 1);
  shown.forEach((neighbor, i) => {
    const angle = (2 * Math.PI * i) / shown.length - Math.PI / 2;
    const x = center + radius * Math.cos(angle);
    const y = center + radius * Math.sin(angle);
    chart.append(
      svg("line", {
        x1: String(center),
        y1: String(center),
        x2: String(x),
        y2: String(y),
        class: "edge",
        "stroke-width": (0.5 + 2.5 * (neighbor.transit_count / maxCount)).toFixed(2),
      }),
    );
    const node = svg("g", { class: "neighbor", "data-asn": String(neighbor.neighbor) });
    node.append(
      svg("circle", { cx: String(x), cy: String(y), r: "9" }),
      svg(
        "text",
        {
          x: String(x),
          y: String(y - 13),
          "text-anchor": "middle",
        },
        `AS${neighbor.neighbor}`,
      ),
    );
    node.addEventListener("click", () => handlers.onLookup(neighbor.neighbor));
    chart.append(node);
  });
  chart.append(
    svg("circle", { cx: String(center), cy: String(center), r: "16", class: "hub" }),
    svg("text", { x: String(center), y: String(center + 30), "text-anchor": "middle", class: "hub-label" }, `AS${result.asn}`),
  );
  const wrapper = el("div", { class: "graph-wrap" });
  wrapper.append(chart);
  if (result.adjacency.length > MAX_NEIGHBORS) {
    wrapper.append(
      el(
        "div",
        { class: "truncation-note" },
        `showing top ${MAX_NEIGHBORS} of ${result.adjacency.length} neighbors by transit count`,
      ),
    );
  }
  return wrapper;
}

export function renderAsView(
  container: HTMLElement,
  result: AsViewResult | null,
  requested: number | null,
  handlers: AsViewHandlers,
): void {
  clear(container);
  const input = el("input", {
    type: "text",
    class: "asn-input",
    placeholder: "AS number",
    value: requested === null ? "" : String(requested),
  }) as HTMLInputElement;
  const go = () => {
    const asn = Number(input.value.replace(/^AS/i, ""));
    if (Number.isFinite(asn) && asn >= 0) handlers.onLookup(asn);
  };
  input.addEventListener("keydown", (event) => {
    if ((event as KeyboardEvent).key === "Enter") go();
  });
  container.append(
    el("div", { class: "filters" }, el("label", {}, "AS "), input, el("button", { onclick: go }, "load")),
  );

  if (result === null) {
    container.append(
      el("div", { class: "empty" }, requested === null ? "enter an AS number" : `AS${requested}: no data in range`),
    );
    return;
  }

  const ranks = result.records.map((row) => row.rank);
  const rows = result.records.map((row) =>
    el(
      "tr",
      {},
      el("td", {}, fmtTime(row.window_start)),
      el("td", { class: "num" }, String(row.rank)),
      el(
        "td",
        { class: "num" },
        row.rank_change === null ? "new" : row.rank_change > 0 ? `+${row.rank_change}` : String(row.rank_change),
      ),
      el(
        "td",
        { class: "num" },
        row.rank_change_frequency === null ? "–" : row.rank_change_frequency.toFixed(3),
      ),
      el("td", { class: "num" }, String(row.path_change_count)),
    ),
  );

  container.append(
    el(
      "div",
      { class: "split" },
      el(
        "div",
        { class: "pane" },
        el("h3", {}, `rank over ${result.records.length} windows`),
        sparkline(ranks, 360, 60),
        el(
          "table",
          { class: "stability-table" },
          el(
            "thead",
            {},
            el(
              "tr",
              {},
              el("th", {}, "window"),
              el("th", {}, "rank"),
              el("th", {}, "Δrank"),
              el("th", {}, "change freq"),
              el("th", {}, "path changes"),
            ),
          ),
          el("tbody", {}, ...rows),
        ),
      ),
      el(
        "div",
        { class: "pane" },
        el("h3", {}, `${result.adjacency.length} neighbors`),
        adjacencyGraph(result, handlers),
      ),
    ),
  );
}
