import {
  AdvanceResponse,
  PendingQuery,
  RunDetail,
  StepRecord,
} from "../src/api.js";

export function record(t: number, over: Partial<StepRecord> = {}): StepRecord {
  return {
    t,
    acc_true: 0.9,
    estimates: { IUPM: 0.85, AC: 0.8 },
    uncertainty_pre: 0.05,
    intervention: { triggered: false, strategy: null, m: null, indices: null },
    estimate_post: null,
    uncertainty_post: null,
    wall_time: null,
    ...over,
  };
}

export function triggered(t: number, over: Partial<StepRecord> = {}): StepRecord {
  return record(t, {
    intervention: { triggered: true, strategy: "UI", m: 2, indices: [0, 1] },
    estimate_post: 0.9,
    uncertainty_post: 0.01,
    ...over,
  });
}

export function pendingQuery(over: Partial<PendingQuery> = {}): PendingQuery {
  return {
    run_id: "fake",
    step: 3,
    indices: [1, 4, 7],
    features: Array.from({ length: 10 }, (_, i) => [i * 0.3, (i % 4) * 0.5]),
    n_classes: 2,
    ...over,
  };
}

interface Rejection {
  status: number;
  code: string;
  message: string;
  detail?: unknown;
}

/** In-memory stand-in speaking the service's URL surface. Tests mutate the
 * public fields to script a scenario and read `calls` afterwards. */
export class FakeServer {
  detail: RunDetail = {
    run_id: "fake",
    status: "DONE",
    t: 0,
    n_steps: 5,
    config: {},
    threshold: 0.1,
  };
  records: StepRecord[] = [];
  pendingBody: PendingQuery | null = null;
  advanceResults: AdvanceResponse[] = [];
  rejectSubmit: Rejection | null = null;
  networkDown = false;
  calls: string[] = [];
  submitted: unknown[] = [];

  fetch = async (input: RequestInfo | URL, init?: RequestInit) => {
    const url = String(input);
    const method = init?.method ?? "GET";
    this.calls.push(`${method} ${url}`);
    if (this.networkDown) throw new TypeError("fetch failed");

    const json = (body: unknown, status = 200) =>
      new Response(JSON.stringify(body), {
        status,
        headers: { "content-type": "application/json" },
      });

    if (url.endsWith("/runs")) return json([this.detail]);
    if (/\/runs\/[^/]+$/.test(url)) return json(this.detail);
    if (url.includes("/steps")) {
      const from = Number(new URL(url, "http://x").searchParams.get("from") ?? 1);
      return json({ records: this.records.filter((r) => r.t >= from) });
    }
    if (url.endsWith("/pending")) return json({ pending: this.pendingBody });
    if (url.endsWith("/advance")) {
      const next = this.advanceResults.shift();
      if (!next) {
        return json(
          { code: "run_done", message: "run already completed", detail: null },
          409,
        );
      }
      if (next.pending) this.pendingBody = next.pending;
      if (next.record) this.records.push(next.record);
      this.detail = {
        ...this.detail,
        status: next.status as RunDetail["status"],
      };
      return json(next);
    }
    if (url.endsWith("/labels")) {
      this.submitted.push(JSON.parse(String(init?.body)));
      if (this.rejectSubmit) {
        const r = this.rejectSubmit;
        return json(
          { code: r.code, message: r.message, detail: r.detail ?? null },
          r.status,
        );
      }
      const rec = triggered(this.pendingBody?.step ?? 0);
      this.records.push(rec);
      this.pendingBody = null;
      this.detail = { ...this.detail, status: "RUNNING" };
      return json({
        status: "RUNNING",
        record: rec,
        queried_sd_post: [0, 0],
      });
    }
    return json({ code: "unknown", message: "no route", detail: null }, 404);
  };
}
