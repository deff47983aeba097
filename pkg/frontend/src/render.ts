// Small DOM/SVG helpers; no framework, views build plain elements.

type Child = Node | string | null | undefined;

export function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string | ((event: Event) => void)> = {},
  ...children: Child[]
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [key, value] of Object.entries(attrs)) {
    if (typeof value === "function") {
      node.addEventListener(key.replace(/^on/, ""), value);
    } else if (key === "class") {
      node.className = value;
    } else {
      node.setAttribute(key, value);
    }
  }
  for (const child of children) {
    if (child === null || child === undefined) continue;
    node.append(child);
  }
  return node;
}

const SVG_NS = "http://www.w3.org/2000/svg";

export function svg(tag: string, attrs: Record<string, string> = {}, ...children: Child[]): SVGElement {
  const node = document.createElementNS(SVG_NS, tag);
  for (const [key, value] of Object.entries(attrs)) {
    node.setAttribute(key, value);
  }
  for (const child of children) {
    if (child === null || child === undefined) continue;
    node.append(child);
  }
  return node as SVGElement;
}

export function clear(node: HTMLElement): void {
  while (node.firstChild) node.removeChild(node.firstChild);
}

export function fmtTime(tsSeconds: number): string {
  return new Date(tsSeconds * 1000).toISOString().replace("T", " ").slice(0, 19) + "Z";
}

export function fmtMicro(us: number): string {
  return fmtTime(Math.floor(us / 1_000_000));
}

/** Inline sparkline; lower rank = better, so the y axis is inverted. */
export function sparkline(values: (number | null)[], width = 120, height = 28): SVGElement {
  const chart = svg("svg", {
    width: String(width),
    height: String(height),
    class: "sparkline",
    viewBox: `0 0 ${width} ${height}`,
  });
  const present = values.filter((v): v is number => v !== null);
  if (present.length === 0) return chart;
  const lo = Math.min(...present);
  const hi = Math.max(...present);
  const span = hi - lo || 1;
  const step = values.length > 1 ? width / (values.length - 1) : 0;
  const points: string[] = [];
  values.forEach((value, i) => {
    if (value === null) return;
    const x = values.length > 1 ? i * step : width / 2;
    const y = 3 + ((value - lo) / span) * (height - 6);
    points.push(`${x.toFixed(1)},${y.toFixed(1)}`);
  });
  chart.append(
    svg("polyline", { points: points.join(" "), fill: "none", stroke: "#58a6ff", "stroke-width": "1.5" }),
  );
  return chart;
}

export function toast(message: string, kind: "info" | "error" = "info"): void {
  const host = document.getElementById("toasts");
  if (!host) return;
  const item = el("div", { class: `toast ${kind}` }, message);
  host.append(item);
  setTimeout(() => item.remove(), 4000);
}
