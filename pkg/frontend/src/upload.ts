/** Authenticated corpus upload with job polling.
 *
 * Posts the corpus with a bearer token, then polls GET /job/<<id>> every
 * 500 ms until the ingest finishes, surfacing each pipeline stage name.
 * Authentication failures are shown inline and the form fields (project
 * name and corpus text) are never cleared by an error. The token lives
 * only in this object, never in storage.
 */

import { ApiClient, ApiError, JobInfo } from "./api.js";

export const POLL_INTERVAL_MS = 500;

export type UploadStatus = "idle" | "uploading" | "running" | "done" | "failed";

export interface UploadViewState {
  name: string;
  corpus: string;
  status: UploadStatus;
  stage: string | null;
  error: string | null;
}

type Sleep = (ms: number) => Promise<void>;

const realSleep: Sleep = (ms) => new Promise((r) => setTimeout(r, ms));

export class UploadSession {
  readonly state: UploadViewState;
  private listeners: Array<(s: UploadViewState) => void> = [];

  constructor(
    private api: ApiClient,
    name: string,
    corpus: string,
    private token: string,
    private sleep: Sleep = realSleep,
  ) {
    this.state = {
      name,
      corpus,
      status: "idle",
      stage: null,
      error: null,
    };
  }

  onChange(fn: (s: UploadViewState) => void): void {
    this.listeners.push(fn);
  }

  private notify(): void {
    for (const fn of this.listeners) fn(this.state);
  }

  async run(): Promise<void> {
    this.state.status = "uploading";
    this.state.error = null;
    this.notify();
    let job: JobInfo;
    try {
      job = await this.api.upload(this.state.name, this.state.corpus, this.token);
    } catch (err) {
      this.state.status = "failed";
      this.state.error =
        err instanceof ApiError && err.status === 401
          ? "unauthorized: check the upload token"
          : err instanceof Error
            ? err.message
            : String(err);
      this.notify();
      return;
    }
    this.state.status = "running";
    this.state.stage = job.stage;
    this.notify();
    while (true) {
      let info: JobInfo;
      try {
        info = await this.api.job(job.id);
      } catch (err) {
        this.state.status = "failed";
        this.state.error = err instanceof Error ? err.message : String(err);
        this.notify();
        return;
      }
      this.state.stage = info.stage;
      if (info.status === "done") {
        this.state.status = "done";
        this.notify();
        return;
      }
      if (info.status === "failed") {
        this.state.status = "failed";
        this.state.error = info.error ?? "ingest failed";
        this.notify();
        return;
      }
      this.notify();
      await this.sleep(POLL_INTERVAL_MS);
    }
  }
}
