import { StepRecord } from "./api.js";
import { lineChart, Series } from "./chart.js";
import { ConsoleSession, SessionState } from "./session.js";

const PALETTE = [
  "#1f77b4",
  "#ff7f0e",
  "#2ca02c",
  "#9467bd",
  "#8c564b",
  "#e377c2",
];

function estimateSeries(records: StepRecord[]): Series[] {
  const out: Series[] = [];
  const truth = records.map((r) => r.acc_true);
  if (truth.some((v) => v !== null)) {
    out.push({ label: "acc_true", color: "#000", values: truth });
  }
  const methods = records.length ? Object.keys(records[0].estimates) : [];
  methods.forEach((m, i) => {
    out.push({
      label: m,
      color: PALETTE[i % PALETTE.length],
      values: records.map((r) => r.estimates[m] ?? null),
    });
  });
  return out;
}

/** Dashboard view: estimate traces, uncertainty trace with the threshold
 * rule, dashed markers at triggered steps, stale banner on fetch trouble. */
export function renderDashboard(
  root: HTMLElement,
  session: ConsoleSession,
): () => void {
  const banner = document.createElement("div");
  banner.className = "banner";
  banner.hidden = true;
  banner.textContent = "server unreachable: showing last known data";

  const header = document.createElement("div");
  header.className = "run-header";

  const estBox = document.createElement("div");
  estBox.className = "chart estimates";
  const uncBox = document.createElement("div");
  uncBox.className = "chart uncertainty";

  root.replaceChildren(banner, header, estBox, uncBox);

  const redraw = (state: SessionState) => {
    banner.hidden = !state.stale;
    const d = state.detail;
    header.textContent = d
      ? `${d.run_id}: ${d.status} (step ${d.t}/${d.n_steps})`
      : "loading run";

    const records = state.records;
    const steps = records.map((r) => r.t);
    const markers = records
      .filter((r) => r.intervention.triggered)
      .map((r) => r.t);

    estBox.replaceChildren(
      lineChart({
        steps,
        series: estimateSeries(records),
        vlines: markers,
        yMin: 0,
        yMax: 1,
      }),
    );

    const threshold = d?.threshold ?? null;
    uncBox.replaceChildren(
      lineChart({
        steps,
        series: [
          {
            label: "uncertainty",
            color: "#17becf",
            values: records.map((r) => r.uncertainty_pre),
          },
        ],
        hline: threshold === null ? null : { y: threshold },
        vlines: markers,
        yMin: 0,
      }),
    );
  };

  redraw(session.snapshot());
  return session.onChange(redraw);
}
