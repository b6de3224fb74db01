import {
  ApiFailure,
  Client,
  LabelItem,
  PendingQuery,
  RunDetail,
  StepRecord,
  SubmitResponse,
} from "./api.js";

export interface SessionState {
  detail: RunDetail | null;
  records: StepRecord[];
  pending: PendingQuery | null;
  /** Draft class per queried index; only keys from pending.indices. */
  drafts: Map<number, number>;
  /** Set while the server is unreachable; views show a stale-data banner. */
  stale: boolean;
  /** Last rejected submission, surfaced until the next successful action. */
  rejection: ApiFailure | null;
  lastSubmit: { pre: number | null; post: number | null } | null;
}

type Listener = (state: SessionState) => void;

/** Stateless view over server state plus local drafts.
 *
 * The session is also the run's driver: while the run reports RUNNING (or
 * INIT) each poll issues one advance, so a single open console moves the
 * run forward at polling cadence. The server's state machine rejects a
 * second writer.
 */
export class ConsoleSession {
  readonly client: Client;
  readonly runId: string;
  readonly pollMs: number;

  private state: SessionState = {
    detail: null,
    records: [],
    pending: null,
    drafts: new Map(),
    stale: false,
    rejection: null,
    lastSubmit: null,
  };
  private listeners = new Set<Listener>();
  private timer: ReturnType<typeof setInterval> | null = null;

  constructor(client: Client, runId: string, pollMs = 1000) {
    this.client = client;
    this.runId = runId;
    this.pollMs = pollMs;
  }

  snapshot(): SessionState {
    return this.state;
  }

  onChange(fn: Listener): () => void {
    this.listeners.add(fn);
    return () => this.listeners.delete(fn);
  }

  private emit() {
    for (const fn of this.listeners) fn(this.state);
  }

  start() {
    if (this.timer !== null) return;
    this.timer = setInterval(() => void this.tick(), this.pollMs);
    void this.tick();
  }

  stop() {
    if (this.timer !== null) clearInterval(this.timer);
    this.timer = null;
  }

  /** One polling round: refresh status and records, drive the run. */
  async tick(): Promise<void> {
    try {
      const detail = await this.client.runDetail(this.runId);
      const fresh = await this.client.steps(
        this.runId,
        this.state.records.length + 1,
      );
      this.state = {
        ...this.state,
        detail,
        records: fresh.length
          ? [...this.state.records, ...fresh]
          : this.state.records,
        stale: false,
      };
      if (detail.status === "INIT" || detail.status === "RUNNING") {
        await this.advanceOnce();
      } else if (detail.status === "AWAITING_LABELS") {
        await this.loadPending();
      } else {
        this.stop();
      }
    } catch (err) {
      if (err instanceof ApiFailure) {
        // logical rejection (e.g. a competing console advanced first)
        this.state = { ...this.state, rejection: err };
      } else {
        this.state = { ...this.state, stale: true };
      }
    }
    this.emit();
  }

  private async advanceOnce() {
    const out = await this.client.advance(this.runId);
    if (out.record) {
      this.state = {
        ...this.state,
        records: [...this.state.records, out.record],
        detail: this.state.detail && {
          ...this.state.detail,
          status: out.status as RunDetail["status"],
          t: out.record.t,
        },
      };
    }
    if (out.pending) this.setPending(out.pending);
  }

  private async loadPending() {
    // refetch even when a query is held: a competing console may have
    // resolved ours, leaving a different step pending
    const pending = await this.client.pending(this.runId);
    if (pending) this.setPending(pending);
  }

  private setPending(pending: PendingQuery) {
    const sameStep = this.state.pending?.step === pending.step;
    this.state = {
      ...this.state,
      pending,
      // a new query invalidates drafts from any earlier one
      drafts: sameStep ? this.state.drafts : new Map(),
      detail: this.state.detail && {
        ...this.state.detail,
        status: "AWAITING_LABELS",
      },
    };
  }

  /** Record a draft label. Only queried indices and classes in range. */
  setDraft(index: number, klass: number) {
    const p = this.state.pending;
    if (!p || !p.indices.includes(index)) {
      throw new Error(`index ${index} is not part of the pending query`);
    }
    if (!Number.isInteger(klass) || klass < 0 || klass >= p.n_classes) {
      throw new Error(`class ${klass} out of range for K=${p.n_classes}`);
    }
    const drafts = new Map(this.state.drafts);
    drafts.set(index, klass);
    this.state = { ...this.state, drafts };
    this.emit();
  }

  /** Submit is legal once every queried sample has a draft. */
  canSubmit(): boolean {
    const p = this.state.pending;
    return p !== null && p.indices.every((i) => this.state.drafts.has(i));
  }

  /** All-or-nothing submission; rejection keeps the drafts. */
  async submit(): Promise<SubmitResponse> {
    const p = this.state.pending;
    if (!p) throw new Error("no pending query");
    if (!this.canSubmit()) throw new Error("labels are incomplete");
    const labels: LabelItem[] = p.indices.map((i) => ({
      index: i,
      class: this.state.drafts.get(i)!,
    }));
    try {
      const out = await this.client.submitLabels(this.runId, p.step, labels);
      this.state = {
        ...this.state,
        pending: null,
        drafts: new Map(),
        rejection: null,
        records: [...this.state.records, out.record],
        lastSubmit: {
          pre: out.record.estimates["IUPM"] ?? null,
          post: out.record.estimate_post,
        },
        detail: this.state.detail && {
          ...this.state.detail,
          status: out.status as RunDetail["status"],
          t: out.record.t,
        },
      };
      this.emit();
      return out;
    } catch (err) {
      if (err instanceof ApiFailure) {
        this.state = { ...this.state, rejection: err };
        this.emit();
      }
      throw err;
    }
  }
}
