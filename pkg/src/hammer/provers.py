"""Prover backends: external TPTP provers under timeouts, SZS parsing, and a
deterministic mock backend for exercising the orchestration."""

from __future__ import annotations

import json
import os
import re
import shlex
import signal
import subprocess
import tempfile
import threading
import time
from dataclasses import dataclass, field
from typing import Dict, List, Optional

from .fof import FofProblem, write_tptp


class SpawnError(Exception):
    pass


PROVED = "Proved"
COUNTERSAT = "CounterSatisfiable"
TIMEOUT = "Timeout"
GAVEUP = "GaveUp"
ERROR = "Error"

_SZS_MAP = {
    "Theorem": PROVED,
    "Unsatisfiable": PROVED,
    "ContradictoryAxioms": PROVED,
    "CounterSatisfiable": COUNTERSAT,
    "Satisfiable": COUNTERSAT,
    "Timeout": TIMEOUT,
    "ResourceOut": TIMEOUT,
    "GaveUp": GAVEUP,
    "Unknown": GAVEUP,
}

_SZS_RE = re.compile(r"SZS status[: ]+(\w+)")
_IDENT_RE = re.compile(r"[A-Za-z0-9_]+")


@dataclass
class ProverSpec:
    """External prover: command template with {file} and {timeout} holes."""
    name: str
    command: str
    wall_limit: float = 30.0

    def __post_init__(self):
        if "{file}" not in self.command or "{timeout}" not in self.command:
            raise ValueError("command template needs {file} and {timeout}")
        if self.wall_limit <= 0:
            raise ValueError("wall limit must be positive")


@dataclass
class ProofResult:
    status: str
    used: List[str] = field(default_factory=list)
    wall_time: float = 0.0
    raw_output: str = ""
    prover: str = ""

    def __post_init__(self):
        if self.status != PROVED:
            self.used = []


def parse_szs(output: str, axiom_names: List[str]) -> Optional[str]:
    m = _SZS_RE.search(output)
    return m.group(1) if m else None


def used_axioms(output: str, axiom_names: List[str]) -> List[str]:
    """Axiom names referenced anywhere in the prover output (proof objects
    name them; the identifier scan is the fallback for terse backends)."""
    present = set(_IDENT_RE.findall(output))
    return [n for n in axiom_names if n in present]


class ProverBackend:
    """One callable proof attempt; implementations must be thread-safe."""

    name = "backend"

    def run(self, problem: FofProblem, timeout_s: float,
            scratch_dir: Optional[str] = None,
            cancel: Optional[threading.Event] = None) -> ProofResult:
        raise NotImplementedError


# Cap on simultaneously running external prover processes.
_process_semaphore = threading.BoundedSemaphore(os.cpu_count() or 4)
_invocation_count = 0
_invocation_lock = threading.Lock()


def invocation_count() -> int:
    return _invocation_count


def _count_invocation():
    global _invocation_count
    with _invocation_lock:
        _invocation_count += 1


def set_process_cap(n: int):
    global _process_semaphore
    _process_semaphore = threading.BoundedSemaphore(n)


class ExternalProver(ProverBackend):
    def __init__(self, spec: ProverSpec):
        self.spec = spec
        self.name = spec.name

    def run(self, problem: FofProblem, timeout_s: float,
            scratch_dir: Optional[str] = None,
            cancel: Optional[threading.Event] = None) -> ProofResult:
        _count_invocation()
        timeout_s = min(timeout_s, self.spec.wall_limit)
        fd, path = tempfile.mkstemp(suffix=".p", prefix=f"{self.spec.name}_",
                                    dir=scratch_dir)
        try:
            with os.fdopen(fd, "w") as f:
                f.write(write_tptp(problem))
            cmd = self.spec.command.format(file=shlex.quote(path),
                                           timeout=int(max(1, timeout_s)))
            start = time.monotonic()
            with _process_semaphore:
                try:
                    proc = subprocess.Popen(
                        cmd, shell=True, stdout=subprocess.PIPE,
                        stderr=subprocess.STDOUT, start_new_session=True,
                    )
                except OSError as e:
                    raise SpawnError(str(e)) from e
                deadline = start + timeout_s
                out = b""
                while True:
                    remaining = deadline - time.monotonic()
                    cancelled = cancel is not None and cancel.is_set()
                    if remaining <= 0 or cancelled:
                        try:
                            os.killpg(proc.pid, signal.SIGKILL)
                        except ProcessLookupError:
                            pass
                        proc.communicate()
                        return ProofResult(
                            TIMEOUT, wall_time=time.monotonic() - start,
                            prover=self.spec.name)
                    try:
                        out, _ = proc.communicate(timeout=min(0.05, remaining))
                        break
                    except subprocess.TimeoutExpired:
                        continue
            wall = time.monotonic() - start
            text = out.decode("utf-8", errors="replace")
            szs = parse_szs(text, problem.axiom_names)
            if szs is None:
                return ProofResult(ERROR, wall_time=wall, raw_output=text,
                                   prover=self.spec.name)
            status = _SZS_MAP.get(szs, ERROR)
            used: List[str] = []
            if status == PROVED:
                used = [problem.name_map.decode(n)
                        for n in used_axioms(text, problem.axiom_names)]
            return ProofResult(status, used=used, wall_time=wall,
                               raw_output=text, prover=self.spec.name)
        finally:
            try:
                os.unlink(path)
            except OSError:
                pass


class MockProver(ProverBackend):
    """Proves iff its answer set is among the submitted premises; reports the
    answer plus configured extras (simulating a non-minimal proof).

    Extras are only reported when the submission still contains premises
    outside them: re-running on exactly the previously reported set finds the
    smaller proof, which is what drives minimization to a fixpoint."""

    def __init__(self, name: str, answer_set, extra_reported=(), latency_s=0.0,
                 cancel_poll=0.05):
        self.name = name
        self.answer_set = frozenset(answer_set)
        self.extra_reported = frozenset(extra_reported)
        self.latency_s = latency_s
        self.cancel_poll = cancel_poll
        self.cancel_event: Optional[threading.Event] = None

    def run(self, problem: FofProblem, timeout_s: float,
            scratch_dir: Optional[str] = None,
            cancel: Optional[threading.Event] = None) -> ProofResult:
        _count_invocation()
        cancel = cancel or self.cancel_event
        start = time.monotonic()
        deadline = start + min(self.latency_s, timeout_s)
        while time.monotonic() < deadline:
            if cancel is not None and cancel.is_set():
                return ProofResult(TIMEOUT, wall_time=time.monotonic() - start,
                                   prover=self.name)
            time.sleep(min(self.cancel_poll,
                           max(0.0, deadline - time.monotonic())))
        if self.latency_s > timeout_s:
            return ProofResult(TIMEOUT, wall_time=time.monotonic() - start,
                               prover=self.name)
        submitted = {problem.name_map.decode(n) for n in problem.axiom_names}
        wall = time.monotonic() - start
        if self.answer_set <= submitted:
            noisy = self.answer_set | (self.extra_reported & submitted)
            used = sorted(noisy) if submitted - noisy else sorted(self.answer_set)
            assert set(used) <= submitted
            return ProofResult(PROVED, used=used, wall_time=wall, prover=self.name)
        return ProofResult(GAVEUP, wall_time=wall, prover=self.name)


@dataclass
class ProverRegistry:
    backends: Dict[str, ProverBackend] = field(default_factory=dict)

    def add(self, backend: ProverBackend) -> "ProverRegistry":
        self.backends[backend.name] = backend
        return self

    def get(self, name: str) -> ProverBackend:
        try:
            return self.backends[name]
        except KeyError:
            raise SpawnError(f"no prover named {name!r}") from None

    def names(self):
        return list(self.backends)

    @classmethod
    def from_config(cls, entries) -> "ProverRegistry":
        """Entries: [{"name":..., "type":"external"|"mock", ...}, ...]"""
        reg = cls()
        for e in entries:
            kind = e.get("type", "external")
            if kind == "external":
                reg.add(ExternalProver(ProverSpec(
                    name=e["name"], command=e["command"],
                    wall_limit=float(e.get("wall_limit", 30.0)))))
            elif kind == "mock":
                reg.add(MockProver(
                    e["name"], e.get("answer", []), e.get("extra", []),
                    float(e.get("latency", 0.0))))
            else:
                raise ValueError(f"unknown prover type {kind!r}")
        return reg

    @classmethod
    def from_file(cls, path) -> "ProverRegistry":
        with open(path, encoding="utf-8") as f:
            return cls.from_config(json.load(f))


def run_prover(backend: ProverBackend, problem: FofProblem, timeout_s: float,
               scratch_dir: Optional[str] = None,
               cancel: Optional[threading.Event] = None) -> ProofResult:
    result = backend.run(problem, timeout_s, scratch_dir, cancel)
    submitted = {problem.name_map.decode(n) for n in problem.axiom_names}
    assert set(result.used) <= submitted, "backend reported unsubmitted premises"
    return result
