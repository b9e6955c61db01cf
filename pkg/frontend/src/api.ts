/** Typed HTTP client for the workbench service plus an SSE projection
 * subscriber that resumes from the last received snapshot on reconnect. */

export interface DatasetInfo {
  name: string;
  nodes: number;
  edges: number;
}

export interface GraphPayload {
  nodes: number;
  edges: Array<[number, number]>;
}

export interface MetricsPayload {
  metrics: Record<string, number[]>;
  communities: number[];
}

export interface JobRequest {
  dataset: string;
  kind: "embed" | "project" | "regress" | "structure" | "metrics";
  model?: string;
  params?: Record<string, unknown>;
}

export interface JobInfo {
  id: string;
  status: "pending" | "running" | "done" | "failed";
  kind: string;
  dataset: string;
  error?: string;
  artifact?: string;
}

export interface RankingListPayload {
  anchor: number;
  space_id: string;
  measure: "cosine" | "euclidean";
  k: number;
  nodes: number[];
  scores: number[];
  ndcg?: number;
}

export interface RegressionPayload {
  regressors: Record<
    string,
    { test_r2: number; importances: Record<string, number> }
  >;
}

export interface StructurePayload {
  k: number;
  assignment: number[];
  /** Per-cluster mean |Δembedding| curves, one row per cluster. */
  centroids: number[][];
  /** Per-dimension pair counts backing each centroid curve. */
  support?: number[][];
}

export interface ProjectionSnapshot {
  iteration: number;
  points: Array<[number, number]>;
}

export class ApiError extends Error {
  constructor(
    public status: number,
    message: string,
  ) {
    super(message);
  }
}

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class WorkbenchClient {
  constructor(
    private baseUrl: string,
    private fetchFn: FetchLike = (...a) => fetch(...a),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const res = await this.fetchFn(`${this.baseUrl}${path}`, init);
    if (!res.ok) {
      let detail = res.statusText;
      try {
        const body = await res.json();
        if (typeof body?.detail === "string") detail = body.detail;
      } catch {
        // non-JSON error body; keep the status text
      }
      throw new ApiError(res.status, detail);
    }
    return (await res.json()) as T;
  }

  listDatasets(): Promise<DatasetInfo[]> {
    return this.request("/api/datasets");
  }

  graph(dataset: string): Promise<GraphPayload> {
    return this.request(`/api/graph/${encodeURIComponent(dataset)}`);
  }

  metrics(dataset: string): Promise<MetricsPayload> {
    return this.request(`/api/metrics/${encodeURIComponent(dataset)}`);
  }

  regression(dataset: string): Promise<RegressionPayload> {
    return this.request(`/api/regression/${encodeURIComponent(dataset)}`);
  }

  structure(dataset: string): Promise<StructurePayload> {
    return this.request(`/api/structure/${encodeURIComponent(dataset)}`);
  }

  submitJob(job: JobRequest): Promise<JobInfo> {
    return this.request("/api/jobs", {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(job),
    });
  }

  job(id: string): Promise<JobInfo> {
    return this.request(`/api/jobs/${encodeURIComponent(id)}`);
  }

  rankings(
    dataset: string,
    anchor: number,
    opts: { spaces: string[]; measure: "cosine" | "euclidean"; k: number },
  ): Promise<RankingListPayload[]> {
    const q = new URLSearchParams({
      anchor: String(anchor),
      measure: opts.measure,
      k: String(opts.k),
    });
    for (const s of opts.spaces) q.append("space", s);
    return this.request(
      `/api/rankings/${encodeURIComponent(dataset)}?${q.toString()}`,
    );
  }
}

export interface StreamHandlers {
  onSnapshot: (snap: ProjectionSnapshot, eventId: string) => void;
  onDone?: () => void;
  onStale?: (stale: boolean) => void;
}

/** Incremental parser for a text/event-stream body. Frames are separated by
 * a blank line; `id:`, `event:` and `data:` fields are honoured. */
export class SseParser {
  private buffer = "";

  constructor(
    private emit: (event: string, data: string, id: string | null) => void,
  ) {}

  push(chunk: string): void {
    this.buffer += chunk;
    let sep: number;
    while ((sep = this.buffer.indexOf("\n\n")) !== -1) {
      const frame = this.buffer.slice(0, sep);
      this.buffer = this.buffer.slice(sep + 2);
      this.dispatch(frame);
    }
  }

  private dispatch(frame: string): void {
    let event = "message";
    let id: string | null = null;
    const data: string[] = [];
    for (const line of frame.split("\n")) {
      if (line.startsWith("event:")) event = line.slice(6).trim();
      else if (line.startsWith("id:")) id = line.slice(3).trim();
      else if (line.startsWith("data:")) data.push(line.slice(5).trim());
    }
    if (data.length > 0 || event !== "message") {
      this.emit(event, data.join("\n"), id);
    }
  }
}

/** Subscribes to the projection snapshot stream for a job. Reconnects with
 * `Last-Event-ID` after a dropped connection so already-rendered snapshots
 * are not replayed; while disconnected, handlers.onStale(true) is raised so
 * views can badge the panel as stale. */
export class ProjectionStream {
  private lastEventId: string | null = null;
  private closed = false;

  constructor(
    private baseUrl: string,
    private jobId: string,
    private handlers: StreamHandlers,
    private fetchFn: FetchLike = (...a) => fetch(...a),
  ) {}

  async run(maxReconnects = 5): Promise<void> {
    let attempts = 0;
    while (!this.closed) {
      try {
        const finished = await this.connectOnce();
        if (finished) return;
      } catch {
        // fall through to reconnect
      }
      if (this.closed) return;
      this.handlers.onStale?.(true);
      attempts += 1;
      if (attempts > maxReconnects) {
        throw new Error(`stream for job ${this.jobId} dropped too many times`);
      }
    }
  }

  close(): void {
    this.closed = true;
  }

  /** One connection lifetime; resolves true when the server sent `done`. */
  private async connectOnce(): Promise<boolean> {
    const headers: Record<string, string> = { accept: "text/event-stream" };
    if (this.lastEventId !== null) headers["Last-Event-ID"] = this.lastEventId;
    const res = await this.fetchFn(
      `${this.baseUrl}/api/stream/projection/${encodeURIComponent(this.jobId)}`,
      { headers },
    );
    if (!res.ok || res.body === null) {
      throw new ApiError(res.status, "stream connection failed");
    }
    this.handlers.onStale?.(false);
    let done = false;
    const parser = new SseParser((event, data, id) => {
      if (event === "snapshot") {
        if (id !== null) this.lastEventId = id;
        this.handlers.onSnapshot(
          JSON.parse(data) as ProjectionSnapshot,
          id ?? "",
        );
      } else if (event === "done") {
        done = true;
      }
    });
    const reader = res.body.getReader();
    const decoder = new TextDecoder();
    for (;;) {
      const { value, done: eof } = await reader.read();
      if (eof) break;
      parser.push(decoder.decode(value, { stream: true }));
      if (done || this.closed) {
        await reader.cancel().catch(() => undefined);
        break;
      }
    }
    if (done) this.handlers.onDone?.();
    return done;
  }
}
