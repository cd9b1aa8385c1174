import { describe, expect, it } from "vitest";

import { ApiClient, safeFilename } from "../src/api.js";
import { QuerySession } from "../src/query.js";
import { FixtureBackend, SUCCESS_EVENTS } from "./fixture.js";

function session(backend: FixtureBackend, project = "demo", goal = "!k. k + 0 = k") {
  return new QuerySession(new ApiClient(backend.fetch), project, goal);
}

describe("query console lifecycle", () => {
  it("renders submit -> progress -> tactic with events in order", async () => {
    const s = session(new FixtureBackend());
    const seen: string[] = [];
    s.onChange((st) => {
      const last = st.events[st.events.length - 1];
      if (last) seen.push(last.kind);
    });
    await s.run();
    expect(s.state.status).toBe("done");
    // the view received exactly the backend's events, in backend order
    expect(s.state.events).toEqual(SUCCESS_EVENTS);
    expect(s.state.events.map((e) => e.kind)).toEqual(
      SUCCESS_EVENTS.map((e) => e.kind),
    );
    expect(s.tactic()).toBe("MESON_TAC[ADD_ZERO]");
  });

  it("only sets the outcome after the terminal event", async () => {
    const s = session(new FixtureBackend());
    const outcomeAtCount: Array<[number, boolean]> = [];
    s.onChange((st) => {
      outcomeAtCount.push([st.events.length, st.outcome !== null]);
    });
    await s.run();
    for (const [n, hasOutcome] of outcomeAtCount) {
      if (n < SUCCESS_EVENTS.length) expect(hasOutcome).toBe(false);
    }
    expect(s.state.outcome?.kind).toBe("outcome");
    expect(s.state.outcome?.status).toBe("theorem");
  });

  it("the event list is append-only across notifications", async () => {
    const s = session(new FixtureBackend());
    let prev: string[] = [];
    s.onChange((st) => {
      const kinds = st.events.map((e) => e.kind);
      expect(kinds.slice(0, prev.length)).toEqual(prev);
      prev = kinds;
    });
    await s.run();
  });

  it("links each premise into the project HTML pages", async () => {
    const s = session(new FixtureBackend());
    await s.run();
    expect(s.premiseLinks()).toEqual([
      { name: "ADD_ZERO", href: "/project/demo/html/ADD_ZERO.html" },
    ]);
  });

  it("shows a 404 banner inline and keeps the typed goal", async () => {
    const s = session(new FixtureBackend(), "ghost", "!x. x = x");
    await s.run();
    expect(s.state.status).toBe("failed");
    expect(s.state.errorBanner).toContain("ghost");
    expect(s.state.goal).toBe("!x. x = x");
    expect(s.state.events).toEqual([]);
  });

  it("offers retry when the backend is down, then succeeds", async () => {
    const backend = new FixtureBackend();
    backend.networkDown = true;
    const s = session(backend);
    await s.run();
    expect(s.state.status).toBe("failed");
    expect(s.state.canRetry).toBe(true);
    expect(s.state.goal).toBe("!k. k + 0 = k");

    backend.networkDown = false;
    await s.run();
    expect(s.state.status).toBe("done");
    expect(s.state.canRetry).toBe(false);
    expect(s.tactic()).toBe("MESON_TAC[ADD_ZERO]");
  });
});

describe("premise page naming", () => {
  it("keeps plain names and hex-escapes the rest, like the server", () => {
    expect(safeFilename("ADD_ZERO")).toBe("ADD_ZERO");
    expect(safeFilename("REAL_LE.TRANS")).toBe("REAL_LE_2eTRANS");
    expect(safeFilename("a b")).toBe("a_20b");
  });
});
