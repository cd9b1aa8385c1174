/** Query console state machine.
 *
 * Each session owns a query panel: it submits the goal, drains the
 * backend's event list in order, and exposes an append-only view that
 * the DOM layer renders. The event list is never reordered and the
 * outcome field is only populated after the terminal event arrives.
 */

import { AdviceEvent, ApiClient, ApiError } from "./api.js";

export type SessionStatus = "idle" | "running" | "done" | "failed";

export interface QueryViewState {
  project: string;
  goal: string;
  events: AdviceEvent[];
  outcome: AdviceEvent | null;
  errorBanner: string | null;
  canRetry: boolean;
  status: SessionStatus;
}

const TERMINAL_KINDS = new Set(["outcome"]);

export class QuerySession {
  readonly state: QueryViewState;
  private listeners: Array<(s: QueryViewState) => void> = [];

  constructor(
    private api: ApiClient,
    project: string,
    goal: string,
  ) {
    this.state = {
      project,
      goal,
      events: [],
      outcome: null,
      errorBanner: null,
      canRetry: false,
      status: "idle",
    };
  }

  onChange(fn: (s: QueryViewState) => void): void {
    this.listeners.push(fn);
  }

  private notify(): void {
    for (const fn of this.listeners) fn(this.state);
  }

  /** Submit (or resubmit) the goal. The typed goal is part of the
   * session state and survives every failure mode. */
  async run(): Promise<void> {
    this.state.status = "running";
    this.state.errorBanner = null;
    this.state.canRetry = false;
    this.notify();
    let events: AdviceEvent[];
    try {
      events = await this.api.query(this.state.project, this.state.goal);
    } catch (err) {
      this.state.status = "failed";
      if (err instanceof ApiError) {
        // 404 unknown project, 422 bad request: inline banner
        this.state.errorBanner = err.message;
      } else {
        // network failure: offer a retry, keeping the goal
        this.state.errorBanner = "backend unreachable";
        this.state.canRetry = true;
      }
      this.notify();
      return;
    }
    for (const ev of events) {
      this.state.events.push(ev);
      if (TERMINAL_KINDS.has(ev.kind)) this.state.outcome = ev;
      this.notify();
    }
    this.state.status = "done";
    this.notify();
  }

  /** Premise names from the result event, paired with their page links. */
  premiseLinks(): Array<{ name: string; href: string }> {
    const result = this.state.events.find((e) => e.kind === "result");
    if (!result || !result.names) return [];
    return result.names.map((name) => ({
      name,
      href: this.api.premiseUrl(this.state.project, name),
    }));
  }

  /** The suggested tactic, once proved. */
  tactic(): string | null {
    const ev = this.state.events.find((e) => e.kind === "tactic");
    return ev && ev.tactic ? ev.tactic : null;
  }
}
