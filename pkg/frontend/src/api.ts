/** Typed client for the advisor service HTTP API.
 *
 * The fetch implementation is injected so tests can run against a
 * fixture backend without a network.
 */

export interface AdviceEvent {
  kind:
    | "read_ok"
    | "progress"
    | "theorem"
    | "minimize"
    | "result"
    | "tactic"
    | "error"
    | "noproof"
    | "outcome";
  prover?: string;
  time_s?: number;
  hints?: number;
  strategy?: string;
  count?: number;
  names?: string[];
  tactic?: string;
  message?: string;
  status?: "theorem" | "noproof" | "error";
}

export interface ProjectInfo {
  name: string;
  theorems: number;
  definitions: number;
}

export interface JobInfo {
  id: string;
  project: string;
  status: "running" | "done" | "failed";
  stage: string;
  error?: string;
}

export interface QueryResponse {
  events: AdviceEvent[];
}

export type FetchLike = (
  url: string,
  init?: {
    method?: string;
    headers?: Record<string, string>;
    body?: string;
  },
) => Promise<{ status: number; json(): Promise<unknown> }>;

/** Error carrying the HTTP status so views can render 401/404 inline. */
export class ApiError extends Error {
  constructor(
    public status: number,
    message: string,
  ) {
    super(message);
  }
}

export class ApiClient {
  constructor(
    private fetchImpl: FetchLike,
    private base: string = "",
  ) {}

  private async request(
    path: string,
    init?: Parameters<FetchLike>[1],
  ): Promise<unknown> {
    const resp = await this.fetchImpl(this.base + path, init);
    const accepted = resp.status === 200 || resp.status === 202;
    if (!accepted) {
      let detail = `HTTP ${resp.status}`;
      try {
        const body = (await resp.json()) as { detail?: string };
        if (body && typeof body.detail === "string") detail = body.detail;
      } catch {
        // non-JSON error body: keep the generic status message
      }
      throw new ApiError(resp.status, detail);
    }
    return resp.json();
  }

  async projects(): Promise<ProjectInfo[]> {
    return (await this.request("/projects")) as ProjectInfo[];
  }

  async query(
    project: string,
    goal: string,
    budget?: number,
  ): Promise<AdviceEvent[]> {
    const body: Record<string, unknown> = { project, goal };
    if (budget !== undefined) body.budget = budget;
    const data = (await this.request("/query", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(body),
    })) as QueryResponse;
    return data.events;
  }

  async upload(name: string, corpus: string, token: string): Promise<JobInfo> {
    return (await this.request(`/project/${encodeURIComponent(name)}`, {
      method: "POST",
      headers: {
        "Content-Type": "application/json",
        Authorization: `Bearer ${token}`,
      },
      body: JSON.stringify({ corpus }),
    })) as JobInfo;
  }

  async job(id: string): Promise<JobInfo> {
    return (await this.request(`/job/${encodeURIComponent(id)}`)) as JobInfo;
  }

  /** Link target for a premise inside the per-project HTML pages. */
  premiseUrl(project: string, premise: string): string {
    return (
      `${this.base}/project/${encodeURIComponent(project)}` +
      `/html/${safeFilename(premise)}.html`
    );
  }
}

/** Mirror of the server's HTML page naming: non [A-Za-z0-9_-] characters
 * become _XX hex escapes, so links resolve for any theorem name. */
export function safeFilename(name: string): string {
  let out = "";
  for (const ch of name) {
    if (/[A-Za-z0-9_-]/.test(ch)) out += ch;
    else out += "_" + ch.codePointAt(0)!.toString(16).padStart(2, "0");
  }
  return out;
}
