// Session state machine: one in-flight submission at a time, progress taken
// from the server's cursor, resync on duplicate/out-of-order, and offline
// responses preserved for retry.

import { ApiClient, ApiError, Mode, NetworkError, Progress, Stimulus } from "./api.js";

export interface UiSessionState {
  sessionId: string | null;
  mode: Mode | null;
  dataset: string;
  current: Stimulus | null;
  progressDone: number;
  progressTotal: number;
  inFlight: boolean;
  completed: boolean;
  pendingResponse: number | null;
  lastError: string | null;
}

export type SubmitOutcome =
  | { kind: "accepted"; progress: Progress }
  | { kind: "ignored"; reason: "in-flight" | "no-stimulus" }
  | { kind: "rejected"; detail: string }
  | { kind: "resynced" }
  | { kind: "offline" };

function initialState(): UiSessionState {
  return {
    sessionId: null,
    mode: null,
    dataset: "",
    current: null,
    progressDone: 0,
    progressTotal: 0,
    inFlight: false,
    completed: false,
    pendingResponse: null,
    lastError: null,
  };
}

function clientMeta(): Record<string, number> | undefined {
  if (typeof window === "undefined") return undefined;
  return {
    viewport_w: window.innerWidth,
    viewport_h: window.innerHeight,
    dpr: window.devicePixelRatio,
  };
}

export class SurveySession {
  readonly state: UiSessionState = initialState();
  private shownAt = 0;

  constructor(
    private api: ApiClient,
    private now: () => number = () => Date.now(),
  ) {}

  async start(mode: Mode, dataset: string, seed?: number): Promise<void> {
    const created = await this.api.createSession(mode, dataset, seed);
    const s = this.state;
    s.sessionId = created.session_id;
    s.mode = mode;
    s.dataset = dataset;
    s.progressTotal = created.count;
    s.progressDone = 0;
    s.completed = false;
    s.current = null;
    s.pendingResponse = null;
    s.lastError = null;
    await this.fetchNext();
  }

  private async fetchNext(): Promise<void> {
    const s = this.state;
    if (!s.sessionId) throw new Error("no session");
    const next = await this.api.nextStimulus(s.sessionId);
    if (next.done) {
      s.current = null;
      s.completed = true;
      if (next.progress) s.progressDone = next.progress.done;
      return;
    }
    s.current = next;
    s.progressDone = next.progress.done;
    s.progressTotal = next.progress.total;
    this.shownAt = this.now();
  }

  /** True when `value` is a legal response for the current stimulus. */
  validResponse(value: number): boolean {
    const s = this.state;
    if (!s.current) return false;
    if (s.mode === "rating") {
      return Number.isInteger(value) && value >= 0 && value <= 10;
    }
    return s.current.pairs.some((p) => p.id === value);
  }

  async submit(value: number): Promise<SubmitOutcome> {
    const s = this.state;
    if (s.inFlight) return { kind: "ignored", reason: "in-flight" };
    if (!s.current || s.completed || !s.sessionId) {
      return { kind: "ignored", reason: "no-stimulus" };
    }
    if (!this.validResponse(value)) {
      return { kind: "rejected", detail: `response ${value} is out of range` };
    }
    s.inFlight = true;
    try {
      const ack = await this.api.submitJudgment(s.sessionId, {
        stimulus_id: s.current.stimulus_id,
        response: value,
        elapsed_ms: Math.max(0, Math.round(this.now() - this.shownAt)),
        client_meta: clientMeta(),
      });
      s.progressDone = ack.progress.done; // server cursor is authoritative
      s.pendingResponse = null;
      s.lastError = null;
      await this.fetchNext();
      return { kind: "accepted", progress: ack.progress };
    } catch (err) {
      if (err instanceof ApiError && err.status === 409) {
        // duplicate or out-of-order: trust the server and resynchronize
        await this.fetchNext();
        return { kind: "resynced" };
      }
      if (err instanceof ApiError) {
        s.lastError = err.message;
        return { kind: "rejected", detail: err.message };
      }
      if (err instanceof NetworkError) {
        s.pendingResponse = value; // keep the response for retry
        s.lastError = err.message;
        return { kind: "offline" };
      }
      throw err;
    } finally {
      s.inFlight = false;
    }
  }

  /** Resubmit a response that failed on a network error. */
  async retry(): Promise<SubmitOutcome> {
    const pending = this.state.pendingResponse;
    if (pending === null) return { kind: "ignored", reason: "no-stimulus" };
    this.state.pendingResponse = null;
    return this.submit(pending);
  }
}

/** Map a keyboard key to a response value; same records as pointer entry. */
export function keyToResponse(key: string, state: UiSessionState): number | null {
  if (!state.current) return null;
  if (state.mode === "rating") {
    if (/^[0-9]$/.test(key)) return parseInt(key, 10);
    return null;
  }
  const lower = key.toLowerCase();
  if (lower === "a") return state.current.pairs[0]?.id ?? null;
  if (lower === "b") return state.current.pairs[1]?.id ?? null;
  return null;
}
