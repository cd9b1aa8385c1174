/** In-memory fixture backend implementing the service HTTP API surface
 * the UI consumes, mirroring the real server's status codes. */

import { AdviceEvent, FetchLike } from "../src/api.js";

export const SUCCESS_EVENTS: AdviceEvent[] = [
  { kind: "read_ok" },
  {
    kind: "theorem",
    prover: "default",
    time_s: 0.05,
    hints: 6,
    strategy: "bayes/hol/32/standard/default",
  },
  { kind: "minimize", count: 2 },
  { kind: "minimize", count: 1 },
  { kind: "result", names: ["ADD_ZERO"] },
  { kind: "tactic", tactic: "MESON_TAC[ADD_ZERO]", names: ["ADD_ZERO"], time_s: 0.07 },
  {
    kind: "outcome",
    status: "theorem",
    prover: "default",
    names: ["ADD_ZERO"],
    tactic: "MESON_TAC[ADD_ZERO]",
    time_s: 0.07,
  },
];

interface Call {
  url: string;
  method: string;
  headers: Record<string, string>;
  body: unknown;
}

export class FixtureBackend {
  calls: Call[] = [];
  token = "tok123";
  projects = [{ name: "demo", theorems: 5, definitions: 2 }];
  /** job id -> remaining poll responses before the terminal one */
  jobPolls = 2;
  failIngest = false;
  networkDown = false;
  private jobSeq = 0;
  private jobs = new Map<string, { polls: number; fail: boolean }>();

  fetch: FetchLike = async (url, init) => {
    if (this.networkDown) throw new TypeError("fetch failed");
    const method = init?.method ?? "GET";
    const headers = init?.headers ?? {};
    const body = init?.body ? JSON.parse(init.body) : undefined;
    this.calls.push({ url, method, headers, body });
    return this.route(url, method, headers, body);
  };

  private respond(status: number, payload: unknown) {
    return { status, json: async () => payload };
  }

  private route(
    url: string,
    method: string,
    headers: Record<string, string>,
    body: any,
  ) {
    if (url === "/projects" && method === "GET") {
      return this.respond(200, this.projects);
    }
    if (url === "/query" && method === "POST") {
      if (!this.projects.some((p) => p.name === body.project)) {
        return this.respond(404, { detail: `unknown project: ${body.project}` });
      }
      return this.respond(200, { events: SUCCESS_EVENTS });
    }
    const upload = url.match(/^\/project\/([^/]+)$/);
    if (upload && method === "POST") {
      if (headers["Authorization"] !== `Bearer ${this.token}`) {
        return this.respond(401, { detail: "invalid or missing token" });
      }
      const id = `job${++this.jobSeq}`;
      this.jobs.set(id, { polls: this.jobPolls, fail: this.failIngest });
      return this.respond(202, {
        id,
        project: upload[1],
        status: "running",
        stage: "setup",
      });
    }
    const job = url.match(/^\/job\/([^/]+)$/);
    if (job && method === "GET") {
      const rec = this.jobs.get(job[1]);
      if (!rec) return this.respond(404, { detail: "no such job" });
      if (rec.polls > 0) {
        rec.polls -= 1;
        const stage = rec.polls === 1 ? "parse" : "features";
        return this.respond(200, {
          id: job[1],
          project: "x",
          status: "running",
          stage,
        });
      }
      if (rec.fail) {
        return this.respond(200, {
          id: job[1],
          project: "x",
          status: "failed",
          stage: "parse",
          error: "record 1: unknown kind 'junk'",
        });
      }
      return this.respond(200, {
        id: job[1],
        project: "x",
        status: "done",
        stage: "finalize",
      });
    }
    return this.respond(404, { detail: "not found" });
  }
}
