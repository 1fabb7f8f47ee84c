// Typed client for the survey service HTTP API.

export type Mode = "rating" | "2afc";

export interface PairColors {
  id: number;
  a: string;
  b: string;
}

export interface DisplayMeta {
  background: string;
  separation_px: number;
}

export interface Progress {
  done: number;
  total: number;
}

export interface Stimulus {
  done: false;
  stimulus_id: string;
  mode: Mode;
  pairs: PairColors[];
  display: DisplayMeta;
  progress: Progress;
}

export interface DoneMarker {
  done: true;
  progress?: Progress;
}

export type NextResponse = Stimulus | DoneMarker;

export interface SessionCreated {
  session_id: string;
  count: number;
}

export interface JudgmentAck {
  ok: boolean;
  progress: Progress;
}

export interface JudgmentBody {
  stimulus_id: string;
  response: number;
  elapsed_ms: number;
  client_meta?: Record<string, number>;
}

export interface DatasetInfo {
  dataset: string;
  pairs: PairColors[];
  has_human: boolean;
  display: DisplayMeta;
}

/** HTTP-level failure (4xx/5xx) with the service's detail message. */
export class ApiError extends Error {
  constructor(public status: number, detail: string) {
    super(detail);
    this.name = "ApiError";
  }
}

/** Transport-level failure: the service could not be reached at all. */
export class NetworkError extends Error {
  constructor(cause: unknown) {
    super(`service unreachable: ${cause}`);
    this.name = "NetworkError";
  }
}

export class ApiClient {
  constructor(private baseUrl: string = "") {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    let resp: Response;
    try {
      resp = await fetch(this.baseUrl + path, init);
    } catch (err) {
      throw new NetworkError(err);
    }
    if (!resp.ok) {
      let detail = `${resp.status}`;
      try {
        const body = await resp.json();
        if (body && typeof body.detail === "string") detail = body.detail;
      } catch {
        // non-JSON error body; keep the status code
      }
      throw new ApiError(resp.status, detail);
    }
    return resp.json() as Promise<T>;
  }

  private post<T>(path: string, body: unknown): Promise<T> {
    return this.request<T>(path, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(body),
    });
  }

  createSession(mode: Mode, dataset: string, seed?: number): Promise<SessionCreated> {
    const body: Record<string, unknown> = { mode, dataset };
    if (seed !== undefined) body.seed = seed;
    return this.post("/api/sessions", body);
  }

  nextStimulus(sessionId: string): Promise<NextResponse> {
    return this.request(`/api/sessions/${sessionId}/next`);
  }

  submitJudgment(sessionId: string, body: JudgmentBody): Promise<JudgmentAck> {
    return this.post(`/api/sessions/${sessionId}/judgments`, body);
  }

  dataset(name: string): Promise<DatasetInfo> {
    return this.request(`/api/dataset?dataset=${encodeURIComponent(name)}`);
  }
}
