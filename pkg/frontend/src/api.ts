/** Typed client for the study service's HTTP interface. */

export type StudyKey = "F" | "J";
export type Answer = "Yes" | "No";

export interface SessionInfo {
  session_id: string;
  key_mapping: Record<StudyKey, Answer>;
  instructions: string;
  n_trials: number;
}

export interface TrialPayload {
  done: false;
  trial_index: number;
  n_trials: number;
  item_id: string;
  statements: string[];
  question: string;
}

export interface DonePayload {
  done: true;
  n_trials: number;
}

export type NextPayload = TrialPayload | DonePayload;

export interface SubmitResult {
  recorded: boolean;
  /** True when the server already had this response (a retransmit). */
  duplicate: boolean;
}

export class ApiError extends Error {
  constructor(
    message: string,
    readonly status: number | null = null,
    /** Server error code: "bad_key" | "bad_rt" | "conflict" | "unknown_session" | ... */
    readonly code: string | null = null,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

export interface StudyApiOptions {
  fetchFn?: typeof fetch;
  /** Transient retries per request (network failures, 5xx, 429). */
  maxRetries?: number;
  backoffMs?: number;
  sleep?: (ms: number) => Promise<void>;
}

const defaultSleep = (ms: number) => new Promise<void>((r) => setTimeout(r, ms));

export class StudyApi {
  private readonly fetchFn: typeof fetch;
  private readonly maxRetries: number;
  private readonly backoffMs: number;
  private readonly sleep: (ms: number) => Promise<void>;

  constructor(
    readonly baseUrl: string,
    opts: StudyApiOptions = {},
  ) {
    this.fetchFn = opts.fetchFn ?? fetch.bind(globalThis);
    this.maxRetries = opts.maxRetries ?? 4;
    this.backoffMs = opts.backoffMs ?? 300;
    this.sleep = opts.sleep ?? defaultSleep;
  }

  async createSession(): Promise<SessionInfo> {
    const body = await this.request("POST", "/sessions");
    return body as SessionInfo;
  }

  async nextTrial(sessionId: string): Promise<NextPayload> {
    const body = await this.request("GET", `/sessions/${encodeURIComponent(sessionId)}/next`);
    return body as NextPayload;
  }

  /**
   * Record one keypress.  Transient failures are retried here, so a lost
   * acknowledgment never loses the trial: the server answers the retransmit
   * with a duplicate notice, which is reported as `recorded`.
   */
  async submitResponse(
    sessionId: string,
    itemId: string,
    key: StudyKey,
    rtMs: number,
  ): Promise<SubmitResult> {
    const path = `/sessions/${encodeURIComponent(sessionId)}/responses`;
    const payload = { item_id: itemId, key, rt_ms: rtMs };
    const resp = await this.fetchWithRetry("POST", path, payload);
    if (resp.status === 200) {
      return { recorded: true, duplicate: false };
    }
    const body = await safeJson(resp);
    if (resp.status === 409 && body?.error === "duplicate") {
      return { recorded: true, duplicate: true };
    }
    throw new ApiError(
      body?.detail ?? `HTTP ${resp.status} from ${path}`,
      resp.status,
      body?.error ?? null,
    );
  }

  private async request(method: string, path: string, payload?: unknown): Promise<unknown> {
    const resp = await this.fetchWithRetry(method, path, payload);
    if (resp.status !== 200) {
      const body = await safeJson(resp);
      throw new ApiError(
        body?.detail ?? `HTTP ${resp.status} from ${path}`,
        resp.status,
        body?.error ?? null,
      );
    }
    return resp.json();
  }

  private async fetchWithRetry(method: string, path: string, payload?: unknown): Promise<Response> {
    let lastError: unknown = null;
    for (let attempt = 0; attempt <= this.maxRetries; attempt++) {
      if (attempt > 0) {
        await this.sleep(this.backoffMs * 2 ** (attempt - 1));
      }
      let resp: Response;
      try {
        resp = await this.fetchFn(this.baseUrl + path, {
          method,
          headers: payload === undefined ? undefined : { "Content-Type": "application/json" },
          body: payload === undefined ? undefined : JSON.stringify(payload),
        });
      } catch (err) {
        lastError = err; // network failure: retry
        continue;
      }
      if (resp.status >= 500 || resp.status === 429) {
        lastError = new ApiError(`HTTP ${resp.status} from ${path}`, resp.status);
        continue;
      }
      return resp;
    }
    throw new ApiError(
      `${path} failed after ${this.maxRetries + 1} attempts: ${String(lastError)}`,
      lastError instanceof ApiError ? lastError.status : null,
    );
  }
}

interface ErrorBody {
  error?: string;
  detail?: string;
  recorded?: boolean;
}

async function safeJson(resp: Response): Promise<ErrorBody | null> {
  try {
    return (await resp.json()) as ErrorBody;
  } catch {
    return null;
  }
}
