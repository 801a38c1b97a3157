// Typed client for the workbench service.  Every byte shown in the UI
// comes from these responses; result documents are parsed with the
// verbatim number parser.

import { parseVerbatim } from "./minijson.js";
import type {
  ExperimentDoc, JobDoc, ModelDoc, QualityDoc, ResultEntry, SummaryDoc,
} from "./types.js";

export interface ErrorBody {
  error: string;
  type?: string;
  key_path?: string;
  detail?: unknown;
}

export class ApiError extends Error {
  readonly status: number;
  readonly body: ErrorBody | null;

  constructor(status: number, body: ErrorBody | null, message?: string) {
    super(message ?? body?.error ?? `request failed with status ${status}`);
    this.status = status;
    this.body = body;
  }

  get isCapability(): boolean {
    return this.status === 422;
  }

  get isConflict(): boolean {
    return this.status === 409;
  }
}

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

const defaultFetch: FetchLike = (url, init) => fetch(url, init);

function sleep(ms: number): Promise<void> {
  return new Promise((resolve) => setTimeout(resolve, ms));
}

export interface PollOptions {
  intervalMs?: number;
  timeoutMs?: number;
  wait?: (ms: number) => Promise<void>;
}

export class Api {
  constructor(
    private readonly base: string = "",
    private readonly fetchFn: FetchLike = defaultFetch,
  ) {}

  private async request(path: string, init?: RequestInit): Promise<unknown> {
    let res: Response;
    try {
      res = await this.fetchFn(this.base + path, init);
    } catch (e) {
      throw new ApiError(0, null, `cannot reach the service: ${String(e)}`);
    }
    const raw = await res.text();
    if (!res.ok) {
      let body: ErrorBody | null = null;
      try {
        body = JSON.parse(raw) as ErrorBody;
      } catch {
        // non-JSON error page; keep body null
      }
      throw new ApiError(res.status, body);
    }
    return parseVerbatim(raw);
  }

  private get(path: string): Promise<unknown> {
    return this.request(path);
  }

  private post(path: string, body: unknown): Promise<unknown> {
    return this.request(path, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    });
  }

  // -- reads ----------------------------------------------------------------

  experiment(): Promise<ExperimentDoc> {
    return this.get("/api/experiment") as Promise<ExperimentDoc>;
  }

  models(): Promise<ModelDoc[]> {
    return this.get("/api/models") as Promise<ModelDoc[]>;
  }

  summary(): Promise<SummaryDoc> {
    return this.get("/api/data/summary") as Promise<SummaryDoc>;
  }

  quality(): Promise<QualityDoc> {
    return this.get("/api/data/quality") as Promise<QualityDoc>;
  }

  results(): Promise<ResultEntry[]> {
    return this.get("/api/results") as Promise<ResultEntry[]>;
  }

  job(id: string): Promise<JobDoc> {
    return this.get(`/api/jobs/${encodeURIComponent(id)}`) as Promise<JobDoc>;
  }

  jobResult(id: string): Promise<ResultEntry> {
    return this.get(`/api/jobs/${encodeURIComponent(id)}/result`) as Promise<ResultEntry>;
  }

  // -- mutations ------------------------------------------------------------

  loadData(body: { path: string; target: string; task: string; name?: string }): Promise<unknown> {
    return this.post("/api/data/load", body);
  }

  prepare(body: { test_ratio?: number; seed?: number }): Promise<unknown> {
    return this.post("/api/data/prepare", body);
  }

  register(body: { id: string; scores_path: string }): Promise<unknown> {
    return this.post("/api/models/register", body);
  }

  train(body: {
    family: string; id?: string; params?: Record<string, unknown>;
    seed?: number; purify?: boolean;
  }): Promise<{ job_id: string }> {
    return this.post("/api/models/train", body) as Promise<{ job_id: string }>;
  }

  interpret(body: { model: string; local?: boolean; row?: number }): Promise<{ job_id: string }> {
    return this.post("/api/interpret", body) as Promise<{ job_id: string }>;
  }

  explain(body: {
    model: string; method: string; config?: Record<string, unknown>;
  }): Promise<{ job_id: string }> {
    return this.post("/api/explain", body) as Promise<{ job_id: string }>;
  }

  diagnose(test: string, body: {
    model?: string; config?: Record<string, unknown>;
  }): Promise<{ job_id: string }> {
    return this.post(`/api/diagnose/${encodeURIComponent(test)}`, body) as Promise<{ job_id: string }>;
  }

  compare(body: {
    models: string[]; tests?: string[]; config?: Record<string, unknown>;
  }): Promise<{ job_id: string }> {
    return this.post("/api/compare", body) as Promise<{ job_id: string }>;
  }

  // -- jobs -----------------------------------------------------------------

  async pollJob(id: string, opts: PollOptions = {}): Promise<JobDoc> {
    const interval = opts.intervalMs ?? 250;
    const timeout = opts.timeoutMs ?? 300000;
    const wait = opts.wait ?? sleep;
    const started = Date.now();
    for (;;) {
      const job = await this.job(id);
      if (job.status === "done" || job.status === "failed") return job;
      if (Date.now() - started > timeout) {
        throw new ApiError(0, null, `job ${id} still ${job.status} after ${timeout}ms`);
      }
      await wait(interval);
    }
  }

  // Submit, poll to completion, fetch the stored entry.  A failed job
  // surfaces its error type and message as an ApiError.
  async runJob(submitted: Promise<{ job_id: string }>, opts: PollOptions = {}): Promise<ResultEntry> {
    const { job_id } = await submitted;
    const job = await this.pollJob(job_id, opts);
    if (job.status === "failed") {
      const err = job.error;
      throw new ApiError(
        0,
        err ? { error: err.message, type: err.type } : null,
        err ? `${err.type}: ${err.message}` : `job ${job_id} failed`,
      );
    }
    return this.jobResult(job_id);
  }
}
