"""Query orchestration: strategy portfolio scheduling, proof minimization,
the propositional tautology check, and tactic emission."""

from __future__ import annotations

import threading
import time
from concurrent.futures import FIRST_COMPLETED, ThreadPoolExecutor, wait
from dataclasses import dataclass
from typing import Callable, Dict, Iterable, List, Optional, Tuple

from .features import extract_features, intern
from .fof import encode_problem
from .learners import EmptyTrainingSet, rank
from .parser import ParseError, TypeError_, parse_term
from .provers import PROVED, ProofResult, ProverBackend, run_prover
from .terms import App, Const, TermExpr, canonical_print, strip_app

GRACE_S = 2.0          # slack past the budget before the coordinator gives up
DEFAULT_BUDGET_S = 30.0
PROGRESS_INTERVAL_S = 1.0


class StrategyError(Exception):
    pass


@dataclass(frozen=True)
class StrategyInstance:
    """One portfolio slot: a learner over a dependency channel feeding the
    top N premises under one feature method to one prover."""
    learner: str            # 'bayes' | 'knn'
    k: Optional[int]        # neighbour count, knn only
    dep_source: str         # 'hol' | 'atp' | 'hol+atp'
    premises: int
    features: str
    prover: str
    limit: float = 30.0

    @property
    def ident(self) -> str:
        l = self.learner if self.learner != "knn" else f"{self.k}-nn"
        return f"{l}/{self.dep_source}/{self.premises}/{self.features}/{self.prover}"


def parse_strategy(line: str) -> StrategyInstance:
    """`learner,depsource,N,features,prover[,limit]`; learner is `bayes` or
    `<k>-nn`."""
    parts = [p.strip() for p in line.split(",")]
    if len(parts) not in (5, 6):
        raise StrategyError(f"bad strategy line {line!r}")
    lpart = parts[0].lower()
    if lpart in ("bayes", "naive-bayes", "nb"):
        learner, k = "bayes", None
    elif lpart.endswith("-nn") and lpart[:-3].isdigit():
        learner, k = "knn", int(lpart[:-3])
    elif lpart.startswith("knn") and lpart[3:].isdigit():
        learner, k = "knn", int(lpart[3:])
    else:
        raise StrategyError(f"unknown learner {parts[0]!r} in {line!r}")
    dep = parts[1]
    if dep.split(":", 1)[0] not in ("hol", "atp", "hol+atp", "combined"):
        raise StrategyError(f"unknown dependency source {dep!r} in {line!r}")
    try:
        n = int(parts[2])
        limit = float(parts[5]) if len(parts) == 6 else 30.0
    except ValueError as e:
        raise StrategyError(f"bad number in {line!r}: {e}") from e
    if n <= 0 or limit <= 0:
        raise StrategyError(f"non-positive bound in {line!r}")
    from .features import EXTRACTION_METHODS
    if parts[3] not in EXTRACTION_METHODS:
        raise StrategyError(f"unknown feature method {parts[3]!r} in {line!r}")
    return StrategyInstance(learner, k, dep, n, parts[3], parts[4], limit)


def parse_strategies(text: str) -> List[StrategyInstance]:
    out = []
    for line in text.splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            out.append(parse_strategy(line))
    if not out:
        raise StrategyError("empty strategy configuration")
    return out


def greedy_cover(solved: Dict[str, set], k: int = 7) -> List[str]:
    """Pick up to k strategy identifiers greedily by marginal coverage of the
    solved-problem record; ties break on identifier."""
    remaining = dict(solved)
    covered: set = set()
    chosen: List[str] = []
    while remaining and len(chosen) < k:
        best = min(remaining,
                   key=lambda s: (-len(remaining[s] - covered), s))
        gain = remaining[best] - covered
        if not gain and covered:
            break
        chosen.append(best)
        covered |= remaining.pop(best)
    return chosen


# ---------------------------------------------------------------------------
# Tautology check


TAUT_MAX_ATOMS = 24

_PROP_BIN = {"/\\", "\\/", "==>", "<=>"}


def _abstract_prop(t: TermExpr, atoms: dict):
    """Propositional skeleton; non-connective subterms become atoms keyed by
    structural identity so repeated subterms share an atom."""
    head, args = strip_app(t)
    if isinstance(head, Const) and head.name in _PROP_BIN and len(args) == 2:
        return (head.name, _abstract_prop(args[0], atoms),
                _abstract_prop(args[1], atoms))
    if isinstance(head, Const) and head.name == "~" and len(args) == 1:
        return ("~", _abstract_prop(args[0], atoms))
    if isinstance(head, Const) and head.name in ("T", "F") and not args:
        return ("const", head.name == "T")
    key = t  # frozen dataclasses compare structurally, variables included
    if key not in atoms:
        atoms[key] = len(atoms)
    return ("atom", atoms[key])


def _eval_prop(f, assign: dict):
    """Three-valued evaluation under a partial assignment: True/False/None."""
    tag = f[0]
    if tag == "const":
        return f[1]
    if tag == "atom":
        return assign.get(f[1])
    if tag == "~":
        v = _eval_prop(f[1], assign)
        return None if v is None else not v
    a = _eval_prop(f[1], assign)
    b = _eval_prop(f[2], assign)
    if tag == "/\\":
        if a is False or b is False:
            return False
        return True if (a is True and b is True) else None
    if tag == "\\/":
        if a is True or b is True:
            return True
        return False if (a is False and b is False) else None
    if tag == "==>":
        if a is False or b is True:
            return True
        return False if (a is True and b is False) else None
    # <=>
    if a is None or b is None:
        return None
    return a == b


def taut_check(goal: TermExpr, timeout_s: float = 5.0) -> str:
    """'Proved' when the propositional abstraction is a tautology, otherwise
    'Unknown' (including atom blow-up and timeout); never 'Error'."""
    try:
        atoms: dict = {}
        skeleton = _abstract_prop(goal, atoms)
        n = len(atoms)
        if n > TAUT_MAX_ATOMS:
            return "Unknown"
        deadline = time.monotonic() + timeout_s

        def valid(assign: dict, next_atom: int) -> bool:
            v = _eval_prop(skeleton, assign)
            if v is True:
                return True
            if v is False:
                return False
            if time.monotonic() > deadline:
                raise TimeoutError
            assign[next_atom] = True
            if not valid(assign, next_atom + 1):
                return False
            assign[next_atom] = False
            ok = valid(assign, next_atom + 1)
            del assign[next_atom]
            return ok

        return "Proved" if valid({}, 0) else "Unknown"
    except TimeoutError:
        return "Unknown"
    except Exception:
        return "Unknown"


# ---------------------------------------------------------------------------
# Minimization


def minimize(backends: List[ProverBackend], conjecture: TermExpr,
             used: Iterable[str], statements: Dict[str, TermExpr], *,
             timeout_s: float = 30.0, deadline: Optional[float] = None,
             scratch_dir=None, on_round: Optional[Callable[[int], None]] = None,
             cancel: Optional[threading.Event] = None) -> List[str]:
    """Cross-prover pseudo-minimization: re-run every prover on exactly the
    current premise set, adopt any strictly smaller verified used set, repeat
    to a fixpoint. Failures keep the last verified set."""
    current = sorted(set(used))
    for _ in range(len(current) + 1):
        if on_round:
            on_round(len(current))
        best: Optional[List[str]] = None
        for backend in backends:
            if deadline is not None and time.monotonic() >= deadline:
                return current
            if cancel is not None and cancel.is_set():
                return current
            t = timeout_s
            if deadline is not None:
                t = min(t, max(0.1, deadline - time.monotonic()))
            problem = encode_problem(
                conjecture, [(n, statements[n]) for n in current])
            res = run_prover(backend, problem, t, scratch_dir, cancel)
            if res.status == PROVED and (best is None or len(res.used) < len(best)):
                best = sorted(res.used)
        if best is None or len(best) >= len(current):
            break  # no prover shrank it further (or all failed): fixpoint
        current = best
    return current


# ---------------------------------------------------------------------------
# Tactic emission


def emit_tactic(minimized: Iterable[str], parent_of: Callable[[str], str]
                ) -> Tuple[str, List[str]]:
    """Replay tactic text over the original (parent) theorem names."""
    names: List[str] = []
    for label in minimized:
        p = parent_of(label)
        if p not in names:
            names.append(p)
    return f"MESON_TAC[{';'.join(names)}]", names


# ---------------------------------------------------------------------------
# Query coordination


@dataclass
class AdviceOutcome:
    status: str                      # 'theorem' | 'noproof' | 'error'
    message: str = ""
    strategy: Optional[str] = None
    prover: Optional[str] = None
    names: Optional[List[str]] = None
    tactic: Optional[str] = None
    time_s: float = 0.0


def _rank_premises(project, goal: TermExpr, inst: StrategyInstance,
                   cutoff: Optional[int]) -> List[str]:
    model = project.model(inst.learner, inst.k, inst.dep_source, inst.features)
    feats = project.query_features(goal, inst.features)
    ranking = rank(model, feats)
    out = []
    for serial, _score in ranking:
        if cutoff is not None and serial >= cutoff:
            continue
        out.append(project.label_table.string(serial))
        if len(out) >= inst.premises:
            break
    return out


def answer_query(project, goal_text: str, *, registry, budget_s: float = DEFAULT_BUDGET_S,
                 strategies: Optional[List[StrategyInstance]] = None,
                 parallel: bool = True, use_cache: bool = True,
                 cutoff: Optional[int] = None, scratch_dir=None,
                 decision_procedures: Optional[dict] = None):
    """Answer one advice query, yielding transcript events.

    Events are dicts with a 'kind' key; 'progress' ticks are emitted while
    provers run and are the only events excluded from the response cache.
    The terminal events mirror the wire protocol: theorem/minimize/result/
    tactic, or noproof, or error."""

    start = time.monotonic()
    recorded: List[dict] = []

    def ev(kind: str, **data) -> dict:
        e = {"kind": kind}
        e.update(data)
        if kind != "progress":
            recorded.append(e)
        return e

    # Parse first: cache keys are over the normalized statement, so queries
    # differing only in whitespace or variable names hit the same entry.
    try:
        goal = parse_term(goal_text, project.symbols)
    except (ParseError, TypeError_) as e:
        yield ev("error", message=str(e))
        yield ev("outcome", status="error", message=str(e))
        return

    normalized = canonical_print(goal, "diff", project.symbols)
    cache = project.cache if use_cache else None
    key = None
    if cache is not None:
        key = cache.key(project.name, normalized)
        hit = cache.lookup(key)
        if hit is not None:
            for e in hit:
                yield dict(e)
            return

    yield ev("read_ok")

    if decision_procedures is None:
        decision_procedures = {"TAUT": taut_check}
    if strategies is None:
        strategies = parse_strategies(project.strategies_text())

    deadline = start + budget_s
    cancel = threading.Event()
    winner: dict = {}
    winner_lock = threading.Lock()

    errors: List[str] = []

    def attempt_strategy(inst: StrategyInstance):
        try:
            return _attempt_strategy(inst)
        except Exception as e:  # keep other portfolio slots running
            errors.append(f"{inst.ident}: {e}")
            return None

    def _attempt_strategy(inst: StrategyInstance):
        try:
            labels = _rank_premises(project, goal, inst, cutoff)
        except EmptyTrainingSet:
            return None
        backend = registry.get(inst.prover)
        premises = [(l, project.statements[l]) for l in labels]
        problem = encode_problem(goal, premises)
        t = min(inst.limit, max(0.1, deadline - time.monotonic()))
        res = run_prover(backend, problem, t, scratch_dir, cancel)
        if res.status == PROVED:
            with winner_lock:
                if "result" not in winner:
                    winner["result"] = (inst, res, len(labels))
                    cancel.set()
            return res
        return None

    def attempt_decision(name: str, proc):
        t = max(0.1, deadline - time.monotonic())
        verdict = proc(goal, t)
        if verdict == "Proved":
            res = ProofResult(PROVED, used=[], prover=name)
            with winner_lock:
                if "result" not in winner:
                    winner["result"] = (None, res, 0)
                    cancel.set()
            return res
        return None

    tasks: List[Tuple[Callable, tuple]] = []
    for name, proc in decision_procedures.items():
        tasks.append((attempt_decision, (name, proc)))
    for inst in strategies:
        tasks.append((attempt_strategy, (inst,)))

    if parallel and len(tasks) > 1:
        pool = ThreadPoolExecutor(max_workers=len(tasks))
        futures = {pool.submit(fn, *args) for fn, args in tasks}
        try:
            pending = set(futures)
            next_tick = start + PROGRESS_INTERVAL_S
            while pending:
                now = time.monotonic()
                if now >= deadline + GRACE_S:
                    break
                done, pending = wait(
                    pending, timeout=min(max(0.0, next_tick - now), 0.25),
                    return_when=FIRST_COMPLETED)
                if "result" in winner:
                    break
                if time.monotonic() >= next_tick and pending:
                    yield ev("progress")
                    next_tick += PROGRESS_INTERVAL_S
        finally:
            cancel.set()
            pool.shutdown(wait=True)
    else:
        for fn, args in tasks:
            if time.monotonic() >= deadline or "result" in winner:
                break
            fn(*args)
    cancel.set()

    if "result" not in winner:
        if errors and len(errors) == len(strategies):
            yield ev("error", message=errors[0])
            yield ev("outcome", status="error", message=errors[0],
                     time_s=time.monotonic() - start)
            if cache is not None:
                cache.store(key, recorded)
            return
        yield ev("noproof")
        yield ev("outcome", status="noproof", time_s=time.monotonic() - start)
        if cache is not None:
            cache.store(key, recorded)
        return

    inst, res, n_sent = winner["result"]
    proof_time = time.monotonic() - start
    yield ev("theorem", prover=res.prover, time_s=round(proof_time, 3),
             hints=n_sent,
             strategy=inst.ident if inst is not None else res.prover)

    if inst is None:
        # decision procedure: nothing to minimize, tactic is the procedure
        tactic = f"{res.prover}_TAC"
        yield ev("result", names=[])
        yield ev("tactic", tactic=tactic, names=[],
                 time_s=round(time.monotonic() - start, 3))
        yield ev("outcome", status="theorem", prover=res.prover,
                 strategy=res.prover, names=[], tactic=tactic,
                 time_s=time.monotonic() - start)
        if cache is not None:
            cache.store(key, recorded)
        return

    # minimization runs past the proof but still under budget + grace
    rounds: List[int] = []
    backends = [registry.get(n) for n in registry.names()]
    minimized = minimize(
        backends, goal, res.used, project.statements,
        timeout_s=inst.limit, deadline=deadline + GRACE_S,
        scratch_dir=scratch_dir, on_round=rounds.append)
    for k in rounds:
        yield ev("minimize", count=k)

    tactic, names = emit_tactic(minimized, lambda l: project.parents.get(l, l))
    yield ev("result", names=names)
    yield ev("tactic", tactic=tactic, names=names,
             time_s=round(time.monotonic() - start, 3))
    yield ev("outcome", status="theorem", prover=res.prover,
             strategy=inst.ident, names=names, tactic=tactic,
             time_s=time.monotonic() - start)
    if cache is not None:
        cache.store(key, recorded)


def answer_query_collect(project, goal_text: str, **kw) -> Tuple[List[dict], AdviceOutcome]:
    """Run a query to completion; returns (events, outcome)."""
    events = list(answer_query(project, goal_text, **kw))
    out = events[-1]
    assert out["kind"] == "outcome"
    outcome = AdviceOutcome(
        status=out["status"], message=out.get("message", ""),
        strategy=out.get("strategy"), prover=out.get("prover"),
        names=out.get("names"), tactic=out.get("tactic"),
        time_s=out.get("time_s", 0.0))
    return events, outcome
