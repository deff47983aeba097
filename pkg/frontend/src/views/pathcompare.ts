// Two-AS path comparison: shortest/longest hops, uniqueness, prepends.

import { clear, el, fmtTime } from "../render.js";
import type { PathMetricsResult } from "../types.js";

export interface PathHandlers {
  onCompare(a: number, b: number): void;
}

function metric(label: string, value: string): HTMLElement {
  return el(
    "div",
    { class: "metric" },
    el("div", { class: "metric-value" }, value),
    el("div", { class: "metric-label" }, label),
  );
}

export function renderPathCompare(
  container: HTMLElement,
  result: PathMetricsResult | null,
  requested: { a?: number; b?: number },
  handlers: PathHandlers,
): void {
  clear(container);
  const inputA = el("input", {
    type: "text",
    class: "asn-input",
    placeholder: "AS a",
    value: requested.a === undefined ? "" : String(requested.a),
  }) as HTMLInputElement;
  const inputB = el("input", {
    type: "text",
    class: "asn-input",
    placeholder: "AS b",
    value: requested.b === undefined ? "" : String(requested.b),
  }) as HTMLInputElement;
  const go = () => {
    const a = Number(inputA.value.replace(/^AS/i, ""));
    const b = Number(inputB.value.replace(/^AS/i, ""));
    if (Number.isFinite(a) && Number.isFinite(b) && a !== b) handlers.onCompare(a, b);
  };
  container.append(
    el(
      "div",
      { class: "filters" },
      el("label", {}, "compare "),
      inputA,
      el("label", {}, " with "),
      inputB,
      el("button", { onclick: go }, "compare"),
    ),
  );

  if (result === null) {
    container.append(el("div", { class: "empty" }, "pick two distinct AS numbers"));
    return;
  }
  if (result.path_count === 0) {
    container.append(
      el("div", { class: "empty" }, `no observed path carries both AS${result.as_a} and AS${result.as_b}`),
    );
    return;
  }

  const period =
    result.period === null ? "" : ` over ${fmtTime(result.period[0])} – ${fmtTime(result.period[1])}`;
  container.append(
    el("h3", {}, `AS${result.as_a} ↔ AS${result.as_b}${period}`),
    el(
      "div",
      { class: "metric-grid" },
      metric("paths observed", String(result.path_count)),
      metric("shortest path", `${result.shortest_hops} hops`),
      metric("longest path", `${result.longest_hops} hops`),
      metric("longest unique path", String(result.longest_unique_path_len)),
      metric("unique paths", String(result.unique_path_count)),
      metric("largest prepend", String(result.largest_prepend)),
      metric(
        "prepend variation",
        result.prepend_range === null ? "none" : `[${result.prepend_range[0]}–${result.prepend_range[1]}]`,
      ),
    ),
  );
}
