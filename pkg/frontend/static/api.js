/** Typed client for the study service's HTTP interface. */
export class ApiError extends Error {
    constructor(message, status = null, 
    /** Server error code: "bad_key" | "bad_rt" | "conflict" | "unknown_session" | ... */
    code = null) {
        super(message);
        this.status = status;
        this.code = code;
        this.name = "ApiError";
    }
}
const defaultSleep = (ms) => new Promise((r) => setTimeout(r, ms));
export class StudyApi {
    constructor(baseUrl, opts = {}) {
        this.baseUrl = baseUrl;
        this.fetchFn = opts.fetchFn ?? fetch.bind(globalThis);
        this.maxRetries = opts.maxRetries ?? 4;
        this.backoffMs = opts.backoffMs ?? 300;
        this.sleep = opts.sleep ?? defaultSleep;
    }
    async createSession() {
        const body = await this.request("POST", "/sessions");
        return body;
    }
    async nextTrial(sessionId) {
        const body = await this.request("GET", `/sessions/${encodeURIComponent(sessionId)}/next`);
        return body;
    }
    /**
     * Record one keypress.  Transient failures are retried here, so a lost
     * acknowledgment never loses the trial: the server answers the retransmit
     * with a duplicate notice, which is reported as `recorded`.
     */
    async submitResponse(sessionId, itemId, key, rtMs) {
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
        throw new ApiError(body?.detail ?? `HTTP ${resp.status} from ${path}`, resp.status, body?.error ?? null);
    }
    async request(method, path, payload) {
        const resp = await this.fetchWithRetry(method, path, payload);
        if (resp.status !== 200) {
            const body = await safeJson(resp);
            throw new ApiError(body?.detail ?? `HTTP ${resp.status} from ${path}`, resp.status, body?.error ?? null);
        }
        return resp.json();
    }
    async fetchWithRetry(method, path, payload) {
        let lastError = null;
        for (let attempt = 0; attempt <= this.maxRetries; attempt++) {
            if (attempt > 0) {
                await this.sleep(this.backoffMs * 2 ** (attempt - 1));
            }
            let resp;
            try {
                resp = await this.fetchFn(this.baseUrl + path, {
                    method,
                    headers: payload === undefined ? undefined : { "Content-Type": "application/json" },
                    body: payload === undefined ? undefined : JSON.stringify(payload),
                });
            }
            catch (err) {
                lastError = err; // network failure: retry
                continue;
            }
            if (resp.status >= 500 || resp.status === 429) {
                lastError = new ApiError(`HTTP ${resp.status} from ${path}`, resp.status);
                continue;
            }
            return resp;
        }
        throw new ApiError(`${path} failed after ${this.maxRetries + 1} attempts: ${String(lastError)}`, lastError instanceof ApiError ? lastError.status : null);
    }
}
async function safeJson(resp) {
    try {
        return (await resp.json());
    }
    catch {
        return null;
    }
}
