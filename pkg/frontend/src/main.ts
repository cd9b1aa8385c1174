/** DOM wiring for the advisor web console.
 *
 * All interesting behaviour lives in the framework-free session objects
 * (query.ts, upload.ts); this file only binds them to the page.
 */

import { AdviceEvent, ApiClient } from "./api.js";
import { QuerySession } from "./query.js";
import { UploadSession } from "./upload.js";

const api = new ApiClient((url, init) => fetch(url, init));

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

function describeEvent(ev: AdviceEvent): string {
  switch (ev.kind) {
    case "read_ok":
      return "Read OK";
    case "theorem":
      return `Theorem! Time: ${ev.time_s?.toFixed(2)}s Prover: ${ev.prover} ` +
        `Hints: ${ev.hints} Str: ${ev.strategy}`;
    case "minimize":
      return `Minimizing, current no: ${ev.count}`;
    case "result":
      return `Result: ${(ev.names ?? []).join(" ")}`;
    case "tactic":
      return `Suggested (${ev.time_s?.toFixed(2)}s): ${ev.tactic}`;
    case "error":
      return `Error: ${ev.message}`;
    case "noproof":
      return "NoProof";
    default:
      return ev.kind;
  }
}

async function loadProjects(): Promise<void> {
  const select = el<HTMLSelectElement>("project");
  try {
    const projects = await api.projects();
    select.innerHTML = "";
    for (const p of projects) {
      const opt = document.createElement("option");
      opt.value = p.name;
      opt.textContent = `${p.name} (${p.theorems} theorems)`;
      select.appendChild(opt);
    }
  } catch {
    el("query-banner").textContent = "could not load project list";
  }
}

function renderQuery(session: QuerySession): void {
  const log = el("event-log");
  const banner = el("query-banner");
  const panel = el("tactic-panel");
  session.onChange((s) => {
    log.innerHTML = "";
    for (const ev of s.events) {
      const li = document.createElement("li");
      li.className = `ev-${ev.kind}`;
      li.textContent = describeEvent(ev);
      log.appendChild(li);
    }
    banner.textContent = s.errorBanner ?? "";
    el<HTMLButtonElement>("retry").hidden = !s.canRetry;
    const tactic = session.tactic();
    if (s.outcome && tactic) {
      const links = session
        .premiseLinks()
        .map((p) => `<a href="${p.href}">${p.name}</a>`)
        .join(" ");
      panel.innerHTML = `<code>${tactic}</code><div>${links}</div>`;
    } else if (s.outcome) {
      panel.textContent = s.outcome.status ?? "";
    }
  });
}

function bindQueryForm(): void {
  const form = el<HTMLFormElement>("query-form");
  let session: QuerySession | null = null;
  form.addEventListener("submit", (e) => {
    e.preventDefault();
    const project = el<HTMLSelectElement>("project").value;
    const goal = el<HTMLTextAreaElement>("goal").value;
    session = new QuerySession(api, project, goal);
    renderQuery(session);
    void session.run();
  });
  el<HTMLButtonElement>("retry").addEventListener("click", () => {
    if (session) void session.run();
  });
}

function bindUploadForm(): void {
  const form = el<HTMLFormElement>("upload-form");
  form.addEventListener("submit", (e) => {
    e.preventDefault();
    const session = new UploadSession(
      api,
      el<HTMLInputElement>("up-name").value,
      el<HTMLTextAreaElement>("up-corpus").value,
      el<HTMLInputElement>("up-token").value,
    );
    const status = el("upload-status");
    session.onChange((s) => {
      status.textContent = s.error
        ? `error: ${s.error}`
        : s.status === "done"
          ? `done (${s.stage})`
          : s.stage
            ? `${s.status}: ${s.stage}`
            : s.status;
    });
    void session.run();
  });
}

void loadProjects();
bindQueryForm();
bindUploadForm();
