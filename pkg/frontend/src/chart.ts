/** Minimal dependency-free SVG line chart for run traces. */

const SVG_NS = "http://www.w3.org/2000/svg";

export interface Series {
  label: string;
  color: string;
  /** One value per step; null points are skipped (gaps, not zeros). */
  values: (number | null)[];
}

export interface ChartOptions {
  width?: number;
  height?: number;
  /** Step numbers for the x axis, parallel to every series. */
  steps: number[];
  series: Series[];
  /** Horizontal rule, e.g. the intervention threshold. */
  hline?: { y: number; color?: string } | null;
  /** Dashed vertical markers, e.g. triggered intervention steps. */
  vlines?: number[];
  yMin?: number;
  yMax?: number;
}

const MARGIN = { top: 12, right: 12, bottom: 24, left: 36 };

function el<K extends string>(tag: K, attrs: Record<string, string | number>) {
  const node = document.createElementNS(SVG_NS, tag);
  for (const [k, v] of Object.entries(attrs)) node.setAttribute(k, String(v));
  return node;
}

export function lineChart(opts: ChartOptions): SVGSVGElement {
  const width = opts.width ?? 560;
  const height = opts.height ?? 220;
  const innerW = width - MARGIN.left - MARGIN.right;
  const innerH = height - MARGIN.top - MARGIN.bottom;

  const ys = opts.series
    .flatMap((s) => s.values)
    .filter((v): v is number => v !== null);
  if (opts.hline) ys.push(opts.hline.y);
  let yMin = opts.yMin ?? Math.min(0, ...ys);
  let yMax = opts.yMax ?? Math.max(1, ...ys);
  if (yMin === yMax) {
    yMin -= 0.5;
    yMax += 0.5;
  }
  const x0 = opts.steps.length ? opts.steps[0] : 0;
  const x1 = opts.steps.length ? opts.steps[opts.steps.length - 1] : 1;
  const xSpan = x1 > x0 ? x1 - x0 : 1;

  const px = (t: number) => MARGIN.left + ((t - x0) / xSpan) * innerW;
  const py = (v: number) =>
    MARGIN.top + innerH - ((v - yMin) / (yMax - yMin)) * innerH;

  const svg = el("svg", {
    width,
    height,
    viewBox: `0 0 ${width} ${height}`,
  }) as SVGSVGElement;

  // frame and y extremes
  svg.appendChild(
    el("rect", {
      x: MARGIN.left,
      y: MARGIN.top,
      width: innerW,
      height: innerH,
      fill: "none",
      stroke: "#ccc",
    }),
  );
  for (const v of [yMin, yMax]) {
    const label = el("text", {
      x: MARGIN.left - 4,
      y: py(v) + 4,
      "text-anchor": "end",
      "font-size": 10,
      fill: "#666",
    });
    label.textContent = v.toFixed(2);
    svg.appendChild(label);
  }

  for (const t of opts.vlines ?? []) {
    svg.appendChild(
      el("line", {
        x1: px(t),
        x2: px(t),
        y1: MARGIN.top,
        y2: MARGIN.top + innerH,
        stroke: "#999",
        "stroke-dasharray": "4 3",
        class: "marker",
      }),
    );
  }

  if (opts.hline) {
    svg.appendChild(
      el("line", {
        x1: MARGIN.left,
        x2: MARGIN.left + innerW,
        y1: py(opts.hline.y),
        y2: py(opts.hline.y),
        stroke: opts.hline.color ?? "#d62728",
        class: "rule",
      }),
    );
  }

  opts.series.forEach((s, si) => {
    let d = "";
    let drawing = false;
    s.values.forEach((v, i) => {
      if (v === null) {
        drawing = false;
        return;
      }
      d += `${drawing ? "L" : "M"}${px(opts.steps[i]).toFixed(1)},${py(v).toFixed(1)}`;
      drawing = true;
    });
    if (d) {
      svg.appendChild(
        el("path", {
          d,
          fill: "none",
          stroke: s.color,
          "stroke-width": 1.5,
          class: "series",
          "data-label": s.label,
        }),
      );
    }
    const label = el("text", {
      x: MARGIN.left + 6,
      y: MARGIN.top + 12 + 12 * si,
      "font-size": 10,
      fill: s.color,
    });
    label.textContent = s.label;
    svg.appendChild(label);
  });

  return svg;
}
