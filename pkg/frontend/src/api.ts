/** Typed client for the monitor service. Every number shown in the console
 * comes out of these responses; nothing is recomputed client-side. */

export interface RunInfo {
  run_id: string;
  status: "INIT" | "RUNNING" | "AWAITING_LABELS" | "DONE";
  t: number;
  n_steps: number;
}

export interface RunDetail extends RunInfo {
  config: Record<string, unknown>;
  /** Intervention threshold, null when the run has no policy. */
  threshold: number | null;
}

export interface Intervention {
  triggered: boolean;
  strategy: string | null;
  m: number | null;
  indices: number[] | null;
  labels_used?: number[];
}

export interface StepRecord {
  t: number;
  acc_true: number | null;
  estimates: Record<string, number>;
  uncertainty_pre: number | null;
  intervention: Intervention;
  estimate_post: number | null;
  uncertainty_post: number | null;
  wall_time: number | null;
}

export interface PendingQuery {
  run_id: string;
  step: number;
  indices: number[];
  features: number[][];
  n_classes: number;
}

export interface LabelItem {
  index: number;
  class: number;
}

export interface SubmitResponse {
  status: string;
  record: StepRecord;
  /** Post-label per-sample spread for the queried indices (pinned => 0). */
  queried_sd_post: number[];
}

export interface AdvanceResponse {
  status: string;
  record?: StepRecord;
  pending?: PendingQuery;
}

export interface TraceBody {
  t: number[];
  eps_hat: number[];
  L_hat: number[];
  shift_strength: number[];
  cum_bound: number[];
}

/** Error body the service returns for 4xx responses. */
export class ApiFailure extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
    readonly detail: unknown = null,
  ) {
    super(message);
  }
}

async function parse<T>(res: Response): Promise<T> {
  if (res.ok) return res.json() as Promise<T>;
  let body: { code?: string; message?: string; detail?: unknown } = {};
  try {
    body = await res.json();
  } catch {
    // non-JSON error body; fall through with the status alone
  }
  throw new ApiFailure(
    res.status,
    body.code ?? "http_error",
    body.message ?? `request failed with status ${res.status}`,
    body.detail ?? null,
  );
}

export class Client {
  constructor(
    readonly baseUrl: string,
    private readonly fetchFn: typeof fetch = fetch,
  ) {}

  private get(path: string) {
    return this.fetchFn(this.baseUrl + path);
  }

  private post(path: string, body?: unknown) {
    return this.fetchFn(this.baseUrl + path, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: body === undefined ? null : JSON.stringify(body),
    });
  }

  async listRuns(): Promise<RunInfo[]> {
    return parse(await this.get("/runs"));
  }

  async runDetail(runId: string): Promise<RunDetail> {
    return parse(await this.get(`/runs/${runId}`));
  }

  async steps(runId: string, fromT = 1): Promise<StepRecord[]> {
    const body = await parse<{ records: StepRecord[] }>(
      await this.get(`/runs/${runId}/steps?from=${fromT}`),
    );
    return body.records;
  }

  async pending(runId: string): Promise<PendingQuery | null> {
    const body = await parse<{ pending: PendingQuery | null }>(
      await this.get(`/runs/${runId}/pending`),
    );
    return body.pending;
  }

  async advance(runId: string): Promise<AdvanceResponse> {
    return parse(await this.post(`/runs/${runId}/advance`));
  }

  async submitLabels(
    runId: string,
    step: number,
    labels: LabelItem[],
  ): Promise<SubmitResponse> {
    return parse(await this.post(`/runs/${runId}/labels`, { step, labels }));
  }

  async trace(runId: string): Promise<TraceBody> {
    return parse(await this.get(`/runs/${runId}/trace`));
  }
}
