// Prefix timeline: per-window origin series. When an overlay prefix is
// given (the covering announcement from a sub-prefix alert), both series
// render together so the injection onset reads like the incident graph:
// the covering prefix as the steady top band, the injected sub-prefix
// appearing mid-period.

import { clear, el, fmtTime, svg } from "../render.js";
import type { TimelineResult } from "../types.js";

export interface TimelineHandlers {
  onLookup(prefix: string, overlay?: string): void;
}

interface Series {
  label: string;
  windows: { start: number; origins: number[]; eventCount: number }[];
}

function toSeries(result: TimelineResult): Series {
  return {
    label: result.prefix,
    windows: result.windows.map((w) => ({
      start: w.window_start,
      origins: w.origins,
      eventCount: w.events.length,
    })),
  };
}

function onsetWindow(series: Series): number | null {
  let sawEmpty = false;
  for (const w of series.windows) {
    if (w.origins.length === 0) {
      sawEmpty = true;
    } else if (sawEmpty || w === series.windows[0]) {
      if (sawEmpty) return w.start;
      break;
    }
  }
  return null;
}

function drawChart(primary: Series, overlay: Series | null): SVGElement {
  const all = overlay ? [overlay, primary] : [primary];
  const starts = Array.from(new Set(all.flatMap((s) => s.windows.map((w) => w.start)))).sort(
    (a, b) => a - b,
  );
  const width = 640;
  const laneHeight = 46;
  const left = 30;
  const height = all.length * laneHeight + 46;
  const chart = svg("svg", {
    width: String(width),
    height: String(height),
    viewBox: `0 0 ${width} ${height}`,
    class: "timeline",
  });
  const step = starts.length > 1 ? (width - left - 20) / (starts.length - 1) : 0;
  const xOf = (start: number) => left + starts.indexOf(start) * step;

  all.forEach((series, lane) => {
    const y = 24 + lane * laneHeight;
    chart.append(
      svg("text", { x: "4", y: String(y - 8), class: "lane-label" }, series.label),
      svg("line", { x1: String(left), y1: String(y + 14), x2: String(width - 20), y2: String(y + 14), class: "lane-axis" }),
    );
    for (const w of series.windows) {
      if (w.origins.length === 0) continue;
      const x = xOf(w.start);
      const colorClass = w.origins.length > 1 ? "multi-origin" : "single-origin";
      chart.append(
        svg("rect", {
          x: String(x - Math.max(step / 2 - 1, 3)),
          y: String(y),
          width: String(Math.max(step - 2, 6)),
          height: "14",
          class: `origin-band ${colorClass}`,
          "data-window": String(w.start),
          "data-origins": w.origins.join(","),
        }),
        svg(
          "text",
          { x: String(x), y: String(y + 11), "text-anchor": "middle", class: "origin-label" },
          w.origins.map((o) => `AS${o}`).join("+"),
        ),
      );
      if (w.eventCount > 0) {
        chart.append(
          svg("circle", {
            cx: String(x),
            cy: String(y + 22),
            r: "3",
            class: "event-dot",
          }),
        );
      }
    }
  });

  const onset = onsetWindow(primary);
  if (onset !== null && overlay) {
    const x = xOf(onset);
    chart.append(
      svg("line", {
        x1: String(x),
        y1: "8",
        x2: String(x),
        y2: String(height - 30),
        class: "onset-line",
      }),
      svg("text", { x: String(x + 4), y: "16", class: "onset-label" }, "injection onset"),
    );
  }

  starts.forEach((start, i) => {
    if (starts.length > 8 && i % Math.ceil(starts.length / 8) !== 0) return;
    chart.append(
      svg(
        "text",
        { x: String(xOf(start)), y: String(height - 10), "text-anchor": "middle", class: "axis-label" },
        fmtTime(start).slice(11, 16),
      ),
    );
  });
  return chart;
}

export function renderTimeline(
  container: HTMLElement,
  primary: TimelineResult | null,
  overlay: TimelineResult | null,
  requested: { prefix: string | null; overlay?: string },
  handlers: TimelineHandlers,
): void {
  clear(container);
  const input = el("input", {
    type: "text",
    class: "prefix-input",
    placeholder: "prefix, e.g. 123.123.0.0/18",
    value: requested.prefix ?? "",
  }) as HTMLInputElement;
  const overlayInput = el("input", {
    type: "text",
    class: "prefix-input",
    placeholder: "overlay (covering prefix)",
    value: requested.overlay ?? "",
  }) as HTMLInputElement;
  const go = () => {
    if (input.value.includes("/")) {
      handlers.onLookup(input.value.trim(), overlayInput.value.trim() || undefined);
    }
  };
  container.append(
    el(
      "div",
      { class: "filters" },
      el("label", {}, "prefix "),
      input,
      el("label", {}, " overlay "),
      overlayInput,
      el("button", { onclick: go }, "load"),
    ),
  );

  if (requested.prefix === null) {
    container.append(el("div", { class: "empty" }, "enter a prefix"));
    return;
  }
  if (primary === null) {
    container.append(el("div", { class: "empty" }, `${requested.prefix}: not observed in range`));
    return;
  }
  container.append(drawChart(toSeries(primary), overlay ? toSeries(overlay) : null));

  const announced = primary.windows.filter((w) => w.origins.length > 0);
  const origins = new Set(announced.flatMap((w) => w.origins));
  container.append(
    el(
      "div",
      { class: "meta" },
      `${primary.prefix}: announced in ${announced.length} of ${primary.windows.length} windows` +
        ` by ${origins.size} origin${origins.size === 1 ? "" : "s"}` +
        (overlay ? ` · overlaid on ${overlay.prefix}` : ""),
    ),
  );
}
