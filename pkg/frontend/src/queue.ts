import { PendingQuery } from "./api.js";
import { ConsoleSession, SessionState } from "./session.js";

const SVG_NS = "http://www.w3.org/2000/svg";
const CLASS_COLORS = ["#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd"];

const VIEW = { w: 420, h: 320, pad: 18 };

function scales(features: number[][]) {
  const xs = features.map((f) => f[0]);
  const ys = features.map((f) => f[1]);
  const x0 = Math.min(...xs);
  const x1 = Math.max(...xs);
  const y0 = Math.min(...ys);
  const y1 = Math.max(...ys);
  const sx = (v: number) =>
    VIEW.pad + ((v - x0) / (x1 - x0 || 1)) * (VIEW.w - 2 * VIEW.pad);
  // screen y grows downward
  const sy = (v: number) =>
    VIEW.h - VIEW.pad - ((v - y0) / (y1 - y0 || 1)) * (VIEW.h - 2 * VIEW.pad);
  return { sx, sy };
}

interface QueueCtx {
  selected: number | null;
  select: (index: number) => void;
}

function scatter(
  p: PendingQuery,
  drafts: Map<number, number>,
  ctx: QueueCtx,
): SVGSVGElement {
  const svg = document.createElementNS(SVG_NS, "svg");
  svg.setAttribute("width", String(VIEW.w));
  svg.setAttribute("height", String(VIEW.h));
  svg.setAttribute("class", "queue-scatter");
  const queried = new Set(p.indices);
  const { sx, sy } = scales(p.features);
  p.features.forEach((f, i) => {
    const c = document.createElementNS(SVG_NS, "circle");
    c.setAttribute("cx", sx(f[0]).toFixed(1));
    c.setAttribute("cy", sy(f[1]).toFixed(1));
    c.setAttribute("data-index", String(i));
    if (!queried.has(i)) {
      c.setAttribute("r", "2.5");
      c.setAttribute("class", "pt");
      c.setAttribute("fill", "#bbb");
    } else {
      const draft = drafts.get(i);
      c.setAttribute("r", "5");
      c.setAttribute(
        "class",
        "pt queried" + (i === ctx.selected ? " selected" : ""),
      );
      c.setAttribute(
        "fill",
        draft === undefined ? "#fff" : CLASS_COLORS[draft % CLASS_COLORS.length],
      );
      c.setAttribute("stroke", i === ctx.selected ? "#000" : "#555");
      c.setAttribute("stroke-width", i === ctx.selected ? "2" : "1");
      c.addEventListener("click", () => ctx.select(i));
    }
    svg.appendChild(c);
  });
  return svg;
}

function table(
  p: PendingQuery,
  drafts: Map<number, number>,
  ctx: QueueCtx,
): HTMLTableElement {
  const t = document.createElement("table");
  t.className = "queue-table";
  const head = t.insertRow();
  ["index", ...p.features[0].map((_, d) => `f${d}`), "class"].forEach((h) => {
    const cell = document.createElement("th");
    cell.textContent = h;
    head.appendChild(cell);
  });
  for (const i of p.indices) {
    const row = t.insertRow();
    row.dataset.index = String(i);
    if (i === ctx.selected) row.className = "selected";
    row.insertCell().textContent = String(i);
    for (const v of p.features[i]) {
      row.insertCell().textContent = v.toFixed(4);
    }
    const d = drafts.get(i);
    row.insertCell().textContent = d === undefined ? "" : String(d);
    row.addEventListener("click", () => ctx.select(i));
  }
  return t;
}

/** Labeling view: scatter (2D) or table (higher-d) of the pending query,
 * class assignment via buttons or digit keys, submit gated on completeness. */
export function renderQueue(
  root: HTMLElement,
  session: ConsoleSession,
): () => void {
  let selected: number | null = null;
  let lastStep: number | null = null;

  const assign = (klass: number) => {
    const p = session.snapshot().pending;
    if (!p || selected === null || klass >= p.n_classes) return;
    session.setDraft(selected, klass);
    const next = p.indices.find(
      (i) => !session.snapshot().drafts.has(i),
    );
    selected = next ?? selected;
    redraw(session.snapshot());
  };

  const onKey = (ev: KeyboardEvent) => {
    if (/^[0-9]$/.test(ev.key)) assign(Number(ev.key));
  };
  root.ownerDocument.addEventListener("keydown", onKey);

  const redraw = (state: SessionState) => {
    const p = state.pending;
    root.replaceChildren();

    if (state.lastSubmit) {
      const done = document.createElement("div");
      done.className = "submit-result";
      const { pre, post } = state.lastSubmit;
      done.textContent = `estimate ${pre?.toFixed(4)} -> ${post?.toFixed(4)} after labeling`;
      root.appendChild(done);
    }

    if (!p) {
      const idle = document.createElement("div");
      idle.className = "queue-idle";
      idle.textContent = "no labels requested";
      root.appendChild(idle);
      return;
    }
    if (p.step !== lastStep) {
      lastStep = p.step;
      selected = p.indices.find((i) => !state.drafts.has(i)) ?? null;
    }

    const info = document.createElement("div");
    info.className = "queue-info";
    info.textContent =
      `step ${p.step}: ${state.drafts.size}/${p.indices.length} labeled`;
    root.appendChild(info);

    if (state.rejection) {
      const err = document.createElement("div");
      err.className = "rejection";
      err.textContent = `rejected (${state.rejection.code}): ${state.rejection.message}`;
      root.appendChild(err);
    }

    const ctx: QueueCtx = {
      selected,
      select: (i) => {
        selected = i;
        redraw(session.snapshot());
      },
    };
    root.appendChild(
      p.features[0].length === 2
        ? scatter(p, state.drafts, ctx)
        : table(p, state.drafts, ctx),
    );

    const bar = document.createElement("div");
    bar.className = "class-bar";
    for (let k = 0; k < p.n_classes; k++) {
      const b = document.createElement("button");
      b.textContent = `class ${k}`;
      b.dataset.class = String(k);
      b.addEventListener("click", () => assign(k));
      bar.appendChild(b);
    }
    root.appendChild(bar);

    const submit = document.createElement("button");
    submit.className = "submit";
    submit.textContent = "Submit";
    submit.disabled = !session.canSubmit();
    submit.addEventListener("click", () => {
      // rejection lands in state and is re-rendered; nothing else to do here
      void session.submit().catch(() => undefined);
    });
    root.appendChild(submit);
  };

  redraw(session.snapshot());
  const off = session.onChange(redraw);
  return () => {
    off();
    root.ownerDocument.removeEventListener("keydown", onKey);
  };
}
