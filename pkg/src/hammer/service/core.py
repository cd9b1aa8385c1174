"""Shared advisor state behind every front end (TCP, HTTP, CLI)."""

from __future__ import annotations

import shutil
import threading
import uuid
from typing import Dict, Iterator, List, Optional

from ..advise import answer_query, parse_strategies
from ..knowledge import Project, ingest, list_projects, load_project
from ..provers import ExternalProver, ProverRegistry, ProverSpec
from .config import ServiceConfig


class UnknownProject(Exception):
    pass


def default_registry() -> ProverRegistry:
    """External provers found on PATH; empty when none are installed (the
    TAUT decision procedure still answers propositional queries)."""
    reg = ProverRegistry()
    candidates = [
        ("e", "eprover", "eprover --auto --cpu-limit={timeout} "
                         "--proof-object {file}"),
        ("vampire", "vampire", "vampire --mode casc -t {timeout} {file}"),
        ("z3", "z3", "z3 -T:{timeout} {file}"),
    ]
    for name, binary, command in candidates:
        if shutil.which(binary):
            reg.add(ExternalProver(ProverSpec(name=name, command=command)))
    return reg


class _Job:
    def __init__(self, name: str):
        self.id = uuid.uuid4().hex[:12]
        self.project = name
        self.status = "running"
        self.stage: Optional[str] = None
        self.error: Optional[str] = None

    def as_dict(self) -> dict:
        return {"id": self.id, "project": self.project, "status": self.status,
                "stage": self.stage, "error": self.error}


class AdvisorState:
    """Project cache, prover registry, job table, and the query entry point."""

    def __init__(self, config: ServiceConfig, registry: Optional[ProverRegistry] = None):
        self.config = config
        if registry is not None:
            self.registry = registry
        elif config.provers_file:
            self.registry = ProverRegistry.from_file(config.provers_file)
        else:
            self.registry = default_registry()
        self._projects: Dict[str, Project] = {}
        self._lock = threading.Lock()
        self._jobs: Dict[str, _Job] = {}
        self._ingesting: set = set()
        self._query_slots = threading.BoundedSemaphore(config.max_concurrent)

    # -- projects -----------------------------------------------------------

    def project_names(self) -> List[str]:
        return list_projects(self.config.project_root)

    def project(self, name: str) -> Project:
        with self._lock:
            if name not in self._projects:
                try:
                    self._projects[name] = load_project(self.config.project_root, name)
                except FileNotFoundError:
                    raise UnknownProject(name) from None
            return self._projects[name]

    def default_project(self) -> Optional[str]:
        names = self.project_names()
        return names[0] if names else None

    # -- queries ------------------------------------------------------------

    def query(self, project_name: str, goal: str,
              budget_s: Optional[float] = None, **kw) -> Iterator[dict]:
        proj = self.project(project_name)
        strategies = None
        if self.config.strategies_file:
            with open(self.config.strategies_file, encoding="utf-8") as f:
                strategies = parse_strategies(f.read())
        with self._query_slots:
            yield from answer_query(
                proj, goal, registry=self.registry,
                budget_s=budget_s or self.config.budget_s,
                strategies=strategies, **kw)

    # -- ingest jobs --------------------------------------------------------

    def start_ingest(self, name: str, corpus_text: str) -> _Job:
        with self._lock:
            if name in self._ingesting:
                raise RuntimeError(f"ingest already running for {name!r}")
            self._ingesting.add(name)
            job = _Job(name)
            self._jobs[job.id] = job

        def work():
            try:
                proj = ingest(self.config.project_root, name, [corpus_text],
                              progress=lambda s: setattr(job, "stage", s))
                with self._lock:
                    self._projects[name] = proj
                job.status = "done"
            except Exception as e:
                job.error = str(e)
                job.status = "failed"
            finally:
                with self._lock:
                    self._ingesting.discard(name)

        threading.Thread(target=work, daemon=True).start()
        return job

    def job(self, job_id: str) -> Optional[_Job]:
        return self._jobs.get(job_id)
