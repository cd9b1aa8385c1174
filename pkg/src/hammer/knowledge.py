"""Project management: corpus ingest, dependency stores, content-hash naming,
cross-project proof reuse, reports, and the file-based response cache."""

from __future__ import annotations

import hashlib
import html as html_mod
import json
import os
import pickle
import shutil
import tempfile
import threading
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Tuple

from filelock import FileLock, Timeout as LockTimeout

from . import learners
from .features import (
    EXTRACTION_METHODS, FeatureTable, extract_features, intern,
    write_feature_file,
)
from .learners import (
    KnnParams, RankerModel, TrainingExample, split_conjuncts, train,
)
from .parser import parse_term, parse_type
from .terms import (
    Abs, App, Const, SymbolTable, TermExpr, TypeExpr, Var, basic_table,
    canonical_print, check_term,
)


class CorpusError(Exception):
    pass


class UndefinedSymbol(Exception):
    pass


# ---------------------------------------------------------------------------
# Corpus records


@dataclass
class DefRecord:
    symbol: str
    ty: TypeExpr
    body: TermExpr
    index: int


@dataclass
class ThmRecord:
    name: str
    statement: TermExpr
    deps: List[str]
    index: int


@dataclass
class Corpus:
    """Ordered definition and theorem records; order is chronological."""
    records: list = field(default_factory=list)

    @property
    def theorems(self) -> List[ThmRecord]:
        return [r for r in self.records if isinstance(r, ThmRecord)]

    @property
    def definitions(self) -> List[DefRecord]:
        return [r for r in self.records if isinstance(r, DefRecord)]


def parse_corpus(lines: Iterable[str], table: Optional[SymbolTable] = None
                 ) -> Tuple[Corpus, SymbolTable]:
    """Read line-delimited corpus records, typechecking in processing order."""
    table = (table or basic_table()).copy()
    corpus = Corpus()
    seen_thms: set = set()
    for i, line in enumerate(lines):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        try:
            rec = json.loads(line)
        except json.JSONDecodeError as e:
            raise CorpusError(f"record {i}: invalid JSON: {e}") from e
        kind = rec.get("kind")
        try:
            if kind == "tycon":
                table.add_tycon(rec["name"], int(rec["arity"]))
            elif kind == "def":
                sym = rec["symbol"]
                if sym in table.consts:
                    raise CorpusError(f"record {i}: symbol {sym!r} already defined")
                ty = parse_type(rec["type"], table)
                body = parse_term(rec["body"], table, expect=ty)
                check_term(body)
                table.add_const(sym, ty)
                corpus.records.append(DefRecord(sym, ty, body, i))
            elif kind == "thm":
                name = rec["name"]
                if name in seen_thms:
                    raise CorpusError(f"record {i}: theorem {name!r} repeated")
                stmt = parse_term(rec["statement"], table)
                check_term(stmt)
                for d in rec.get("deps", []):
                    if d not in seen_thms:
                        raise CorpusError(
                            f"record {i}: theorem {name!r} depends on {d!r} "
                            f"which does not precede it")
                corpus.records.append(ThmRecord(name, stmt, list(rec.get("deps", [])), i))
                seen_thms.add(name)
            else:
                raise CorpusError(f"record {i}: unknown kind {kind!r}")
        except (CorpusError,):
            raise
        except Exception as e:
            raise CorpusError(f"record {i}: {e}") from e
    return corpus, table


# ---------------------------------------------------------------------------
# Content-based naming


def _rename_consts(t: TermExpr, names: Dict[str, str]) -> TermExpr:
    if isinstance(t, Const):
        return Const(names.get(t.name, t.name), t.ty)
    if isinstance(t, App):
        return App(_rename_consts(t.fn, names), _rename_consts(t.arg, names))
    if isinstance(t, Abs):
        return Abs(t.var, _rename_consts(t.body, names))
    return t


def content_hash_term(t: TermExpr, symbol_hashes: Dict[str, str],
                      algo: str = "md5") -> str:
    """Hash of the variable-normalized term after recursive replacement of
    previously named symbols; whitespace and variable names cannot matter."""
    text = canonical_print(_rename_consts(t, symbol_hashes), "hashing")
    h = hashlib.new(algo)
    h.update(text.encode("utf-8"))
    return h.hexdigest()


def content_name_symbol(defrec: DefRecord, symbol_hashes: Dict[str, str],
                        algo: str = "md5") -> str:
    return content_hash_term(defrec.body, symbol_hashes, algo)


def content_name_thm(stmt: TermExpr, symbol_hashes: Dict[str, str],
                     algo: str = "md5") -> str:
    return content_hash_term(stmt, symbol_hashes, algo)


# ---------------------------------------------------------------------------
# Common proof store (pooled across projects)


class CommonStore:
    """Content-named proof records shared across projects; append-only."""

    def __init__(self, path):
        self.path = Path(path)
        self.path.mkdir(parents=True, exist_ok=True)
        self._lock = FileLock(str(self.path / "store.lock"))

    def _file(self, thm_hash: str) -> Path:
        return self.path / f"{thm_hash}.deps"

    def proofs(self, thm_hash: str) -> List[frozenset]:
        f = self._file(thm_hash)
        if not f.exists():
            return []
        # one proof per line; a blank line is a proof with no dependencies
        return [frozenset(line.split())
                for line in f.read_text(encoding="utf-8").splitlines()]

    def add(self, thm_hash: str, dep_hashes: Iterable[str]):
        entry = " ".join(sorted(set(dep_hashes)))
        with self._lock:
            existing = set()
            f = self._file(thm_hash)
            if f.exists():
                existing = set(f.read_text(encoding="utf-8").splitlines())
            if entry not in existing:
                with open(f, "a", encoding="utf-8") as fh:
                    fh.write(entry + "\n")

    def theorem_hashes(self) -> List[str]:
        return [p.stem for p in self.path.glob("*.deps")]


# ---------------------------------------------------------------------------
# Response cache


class ResponseCache:
    """File-based query cache with per-entry file locking."""

    def __init__(self, path, lock_timeout: float = 5.0):
        self.path = Path(path)
        self.path.mkdir(parents=True, exist_ok=True)
        self.lock_timeout = lock_timeout

    @staticmethod
    def key(project_id: str, normalized_query: str) -> str:
        h = hashlib.md5()
        h.update(project_id.encode("utf-8"))
        h.update(b"\n")
        h.update(normalized_query.encode("utf-8"))
        return h.hexdigest()

    def lookup(self, key: str) -> Optional[list]:
        f = self.path / f"{key}.json"
        if not f.exists():
            return None
        try:
            return json.loads(f.read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError):
            return None

    def store(self, key: str, events: list) -> bool:
        """Write the full transcript (progress ticks excluded by the caller).
        Returns False when the per-entry lock could not be taken in time."""
        f = self.path / f"{key}.json"
        lock = FileLock(str(self.path / f"{key}.lock"))
        try:
            with lock.acquire(timeout=self.lock_timeout):
                tmp = f.with_suffix(".tmp")
                tmp.write_text(json.dumps(events), encoding="utf-8")
                os.replace(tmp, f)
            return True
        except LockTimeout:
            return False

    def invalidate_all(self):
        for f in self.path.glob("*.json"):
            f.unlink()

    def entries(self) -> List[str]:
        return [p.stem for p in self.path.glob("*.json")]


# ---------------------------------------------------------------------------
# Project


_SUBDIRS = ("user", "features", "deps", "cache", "aux", "html", "snapshot")

DEFAULT_STRATEGIES = "\n".join([
    # learner,depsource,N,features,prover[,limit]
    "bayes,hol,32,standard,default,30",
    "bayes,hol,128,standard,default,30",
    "bayes,atp,32,standard,default,30",
    "bayes,hol+atp,96,all-vars-same,default,30",
    "bayes,hol+atp,128,all-vars-diff,default,30",
    "40-nn,hol,32,standard,default,30",
    "160-nn,hol+atp,128,standard,default,30",
]) + "\n"


@dataclass
class Project:
    """One ingested corpus with its learning data and serving state."""

    name: str
    root: str  # project directory
    corpus: Corpus
    symbols: SymbolTable
    label_table: FeatureTable
    feature_tables: Dict[str, FeatureTable]
    label_features: Dict[str, Dict[int, list]]   # method -> label serial -> feats
    statements: Dict[str, TermExpr]              # conjunct label -> statement
    parents: Dict[str, str]                      # conjunct label -> theorem name
    conjuncts: Dict[str, List[str]]              # theorem name -> labels
    hol_deps: Dict[str, List[str]]               # theorem -> dep theorems
    atp_deps: Dict[str, List[List[str]]]         # theorem -> proofs (dep lists)
    thm_hashes: Dict[str, str]                   # theorem name -> content name
    conjunct_hashes: Dict[str, str]              # conjunct label -> content name
    def_hashes: Dict[str, str]                   # symbol -> content name
    _models: dict = field(default_factory=dict, repr=False)
    _model_lock: threading.Lock = field(default_factory=threading.Lock, repr=False)

    def __getstate__(self):
        state = dict(self.__dict__)
        state["_model_lock"] = None
        return state

    def __setstate__(self, state):
        self.__dict__.update(state)
        self._model_lock = threading.Lock()

    # -- serving ------------------------------------------------------------

    @property
    def cache(self) -> ResponseCache:
        return ResponseCache(os.path.join(self.root, "cache"))

    @property
    def theorem_names(self) -> List[str]:
        return [t.name for t in self.corpus.theorems]

    def label_serial(self, label: str) -> int:
        n = self.label_table.serial(label)
        if n is None:
            raise KeyError(label)
        return n

    def parent_of(self, label: str) -> str:
        try:
            return self.parents[label]
        except KeyError:
            raise learners.EmptyTrainingSet if False else KeyError(label)

    def deps_for_channel(self, thm: str, channel: str) -> List[List[str]]:
        """Dependency lists for one theorem under a dependency-data channel."""
        base = channel.split(":", 1)[0]
        if base == "hol":
            return [self.hol_deps.get(thm, [])]
        if base == "atp":
            return self.atp_deps.get(thm, [])
        if base in ("hol+atp", "combined"):
            atp = self.atp_deps.get(thm, [])
            return atp if atp else [self.hol_deps.get(thm, [])]
        raise ValueError(f"unknown dependency channel {channel!r}")

    def training_examples(self, channel: str, method: str) -> List[TrainingExample]:
        out = []
        feats = self.label_features[method]
        for thm in self.corpus.theorems:
            deplists = self.deps_for_channel(thm.name, channel)
            dep_serials_lists = []
            for deps in deplists:
                serials = []
                for d in deps:
                    for lab in self.conjuncts.get(d, []):
                        serials.append(self.label_serial(lab))
                dep_serials_lists.append(tuple(sorted(set(serials))))
            if not dep_serials_lists:
                dep_serials_lists = [()]
            for lab in self.conjuncts[thm.name]:
                serial = self.label_serial(lab)
                for dep_serials in dep_serials_lists:
                    out.append(TrainingExample(
                        label=serial,
                        features=tuple(feats[serial]),
                        deps=dep_serials))
        return out

    def model(self, learner: str, k: Optional[int], channel: str,
              method: str) -> RankerModel:
        key = (learner, k, channel, method)
        with self._model_lock:
            if key not in self._models:
                examples = self.training_examples(channel, method)
                if learner == "knn":
                    m = train(examples, "knn", KnnParams(k=k or 40))
                else:
                    m = train(examples, "naive-bayes")
                self._models[key] = m
            return self._models[key]

    def query_features(self, goal: TermExpr, method: str) -> list:
        fs = extract_features(goal, method, self.symbols)
        return intern(fs, self.feature_tables[method])

    def stats(self) -> dict:
        return {
            "name": self.name,
            "theorems": len(self.corpus.theorems),
            "definitions": len(self.corpus.definitions),
            "conjuncts": len(self.statements),
            "atp_proved": sum(1 for v in self.atp_deps.values() if v),
            "features": {m: len(t) for m, t in self.feature_tables.items()},
        }

    def save_snapshot(self):
        snap = Path(self.root) / "snapshot" / "project.pkl"
        snap.parent.mkdir(parents=True, exist_ok=True)
        with open(snap, "wb") as f:
            pickle.dump(self, f)

    def strategies_text(self) -> str:
        p = Path(self.root) / "strategies.conf"
        if p.exists():
            return p.read_text(encoding="utf-8")
        return DEFAULT_STRATEGIES


def load_project(projects_root, name: str) -> Project:
    snap = Path(projects_root) / name / "snapshot" / "project.pkl"
    if not snap.exists():
        raise FileNotFoundError(f"no project {name!r} under {projects_root}")
    with open(snap, "rb") as f:
        proj = pickle.load(f)
    proj.root = str(Path(projects_root) / name)
    return proj


def list_projects(projects_root) -> List[str]:
    root = Path(projects_root)
    if not root.exists():
        return []
    return sorted(p.name for p in root.iterdir()
                  if (p / "snapshot" / "project.pkl").exists())


# ---------------------------------------------------------------------------
# Ingest (project creation stages)


INGEST_STAGES = (
    "setup", "parse", "hashes", "features", "hol-deps", "reuse", "atp-pass",
    "html", "train", "finalize",
)


def ingest(projects_root, name: str, corpus_texts: Iterable[str], *,
           common: Optional[CommonStore] = None,
           registry=None, atp_timeout: float = 5.0,
           strategies_text: Optional[str] = None,
           progress=None) -> Project:
    """Create (or replace) a project from corpus text, running the creation
    stages; aborts atomically on corpus violations."""

    def stage(s):
        if progress:
            progress(s)

    projects_root = Path(projects_root)
    projects_root.mkdir(parents=True, exist_ok=True)
    ingest_lock = FileLock(str(projects_root / f"{name}.ingest.lock"))
    with ingest_lock:
        stage("setup")
        tmp = Path(tempfile.mkdtemp(prefix=f".{name}_", dir=projects_root))
        try:
            for d in _SUBDIRS:
                (tmp / d).mkdir()

            stage("parse")
            lines = []
            for text in corpus_texts:
                lines.extend(text.splitlines())
            (tmp / "user" / "corpus.jsonl").write_text(
                "\n".join(lines) + "\n", encoding="utf-8")
            corpus, table = parse_corpus(lines)
            table.freeze()

            stage("hashes")
            sym_hashes: Dict[str, str] = {}
            def_hashes: Dict[str, str] = {}
            thm_hashes: Dict[str, str] = {}
            conj_hashes: Dict[str, str] = {}
            conjuncts: Dict[str, List[str]] = {}
            statements: Dict[str, TermExpr] = {}
            parents: Dict[str, str] = {}
            label_table = FeatureTable()
            for rec in corpus.records:
                if isinstance(rec, DefRecord):
                    h = content_name_symbol(rec, sym_hashes)
                    def_hashes[rec.symbol] = h
                    sym_hashes[rec.symbol] = h
                else:
                    thm_hashes[rec.name] = content_name_thm(rec.statement, sym_hashes)
                    pieces = split_conjuncts(rec.name, rec.statement)
                    conjuncts[rec.name] = []
                    for lab, stmt in pieces:
                        label_table.add(lab)
                        conjuncts[rec.name].append(lab)
                        statements[lab] = stmt
                        parents[lab] = rec.name
                        conj_hashes[lab] = content_name_thm(stmt, sym_hashes)
            hashes_doc = {
                "definitions": def_hashes,
                "theorems": thm_hashes,
                "conjuncts": conj_hashes,
            }
            (tmp / "hashes.json").write_text(
                json.dumps(hashes_doc, indent=1, sort_keys=True), encoding="utf-8")

            stage("features")
            feature_tables = {m: FeatureTable() for m in EXTRACTION_METHODS}
            label_features: Dict[str, Dict[int, list]] = {m: {} for m in EXTRACTION_METHODS}
            for method in EXTRACTION_METHODS:
                rows = []
                for thm in corpus.theorems:
                    for lab in conjuncts[thm.name]:
                        fs = extract_features(statements[lab], method, table)
                        serials = intern(fs, feature_tables[method])
                        serial = label_table.serial(lab)
                        label_features[method][serial] = serials
                        rows.append((serial, serials))
                write_feature_file(tmp / "features" / f"{method}.fea", rows)
                feature_tables[method].save(tmp / "features" / f"{method}.tbl")
            label_table.save(tmp / "features" / "labels.tbl")
            for t in feature_tables.values():
                t.freeze()
            label_table.freeze()

            stage("hol-deps")
            hol_deps = {t.name: list(t.deps) for t in corpus.theorems}
            with open(tmp / "deps" / "hol.deps", "w", encoding="utf-8") as f:
                for thm in corpus.theorems:
                    f.write(f"{thm.name}: {' '.join(hol_deps[thm.name])}\n")

            proj = Project(
                name=name, root=str(tmp), corpus=corpus, symbols=table,
                label_table=label_table, feature_tables=feature_tables,
                label_features=label_features, statements=statements,
                parents=parents, conjuncts=conjuncts, hol_deps=hol_deps,
                atp_deps={}, thm_hashes=thm_hashes,
                conjunct_hashes=conj_hashes, def_hashes=def_hashes)

            stage("reuse")
            if common is not None:
                reuse_compatible(proj, common)

            stage("atp-pass")
            if registry is not None:
                solved = _atp_pass(proj, registry, atp_timeout)
                _write_portfolio_report(proj, solved)
            _write_atp_deps(proj)
            if common is not None:
                export_to_common(proj, common)

            stage("html")
            _write_html(proj)

            stage("train")
            strategies = strategies_text if strategies_text is not None \
                else DEFAULT_STRATEGIES
            (tmp / "strategies.conf").write_text(strategies, encoding="utf-8")
            _pretrain(proj, strategies)

            stage("finalize")
            proj.save_snapshot()
            final = projects_root / name
            if final.exists():
                shutil.rmtree(final)
            os.replace(tmp, final)
            proj.root = str(final)
            return proj
        except Exception:
            shutil.rmtree(tmp, ignore_errors=True)
            raise


def _pretrain(proj: Project, strategies_text: str):
    # imported here: advise depends on knowledge for orchestration types
    from .advise import parse_strategies
    for inst in parse_strategies(strategies_text):
        try:
            proj.model(inst.learner, inst.k, inst.dep_source, inst.features)
        except learners.EmptyTrainingSet:
            pass


def _write_atp_deps(proj: Project):
    with open(Path(proj.root) / "deps" / "atp.deps", "w", encoding="utf-8") as f:
        for thm, proofs in proj.atp_deps.items():
            for deps in proofs:
                f.write(f"{thm}: {' '.join(deps)}\n")


def _atp_pass(proj: Project, registry, timeout_s: float) -> Dict[str, set]:
    """Attempt each theorem from its recorded dependencies and keep minimized
    ATP proofs as an extra training channel; returns the per-backend
    solved-problem record."""
    from .advise import minimize as run_minimize
    from .provers import PROVED, run_prover
    from .fof import encode_problem
    solved: Dict[str, set] = {n: set() for n in registry.names()}
    for thm in proj.corpus.theorems:
        premises = []
        for d in proj.hol_deps.get(thm.name, []):
            for lab in proj.conjuncts[d]:
                premises.append((lab, proj.statements[lab]))
        proved_used = None
        for backend_name in registry.names():
            backend = registry.get(backend_name)
            problem = encode_problem(thm.statement, premises)
            res = run_prover(backend, problem, timeout_s)
            if res.status == PROVED:
                solved[backend_name].add(thm.name)
                if proved_used is None:
                    proved_used = res.used
        if proved_used is None:
            continue
        backends = [registry.get(n) for n in registry.names()]
        minimized = run_minimize(
            backends, thm.statement, proved_used,
            {lab: stmt for lab, stmt in premises}, timeout_s=timeout_s)
        dep_thms = []
        for lab in minimized:
            parent = proj.parents.get(lab, lab)
            if parent not in dep_thms:
                dep_thms.append(parent)
        proj.atp_deps.setdefault(thm.name, []).append(dep_thms)
    return solved


def _write_portfolio_report(proj: Project, solved: Dict[str, set]):
    """Greedy-coverage portfolio report over the solved-problem record."""
    from .advise import greedy_cover
    chosen = greedy_cover(solved, k=7)
    lines = ["# greedy coverage over the ingest solved-problem record"]
    covered: set = set()
    for name in chosen:
        gain = solved[name] - covered
        covered |= solved[name]
        lines.append(f"{name}: +{len(gain)} (total {len(covered)})")
    (Path(proj.root) / "aux" / "portfolio.txt").write_text(
        "\n".join(lines) + "\n", encoding="utf-8")


def export_to_common(proj: Project, common: CommonStore) -> int:
    """Copy this project's ATP proof records into the common store under
    content names; idempotent."""
    count = 0
    for thm, proofs in proj.atp_deps.items():
        th = proj.thm_hashes[thm]
        for deps in proofs:
            common.add(th, [proj.thm_hashes[d] for d in deps])
            count += 1
    return count


def reuse_compatible(proj: Project, common: CommonStore) -> int:
    """Import compatible content-named proofs: every dependency must exist in
    the project and precede the theorem in chronological order."""
    hash_to_name = {h: n for n, h in proj.thm_hashes.items()}
    position = {t.name: i for i, t in enumerate(proj.corpus.theorems)}
    imported = 0
    for thm in proj.corpus.theorems:
        h = proj.thm_hashes[thm.name]
        for proof in common.proofs(h):
            deps = []
            ok = True
            for dh in proof:
                dname = hash_to_name.get(dh)
                if dname is None or position[dname] >= position[thm.name]:
                    ok = False
                    break
                deps.append(dname)
            if not ok:
                continue
            deps.sort(key=lambda n: position[n])
            existing = proj.atp_deps.setdefault(thm.name, [])
            if deps not in existing:
                existing.append(deps)
                imported += 1
    # reuse safety: the imported graph must respect chronology
    for thm, proofs in proj.atp_deps.items():
        for deps in proofs:
            assert all(position[d] < position[thm] for d in deps)
    return imported


# ---------------------------------------------------------------------------
# Reports


@dataclass
class ReuseReport:
    project: str
    previous: str
    unique_conjuncts: int
    in_previous: int
    atp_proved: int
    atp_proofs: int
    reusable_proofs: int

    def as_dict(self) -> dict:
        return dict(self.__dict__)


def reuse_report(proj: Project, previous: Project) -> ReuseReport:
    cur_conj = set(proj.conjunct_hashes.values())
    prev_conj = set(previous.conjunct_hashes.values())
    in_prev = len(cur_conj & prev_conj)

    atp_proved = sum(1 for v in proj.atp_deps.values() if v)
    atp_proofs = sum(len(v) for v in proj.atp_deps.values())

    hash_to_name = {h: n for n, h in proj.thm_hashes.items()}
    position = {t.name: i for i, t in enumerate(proj.corpus.theorems)}
    reusable = 0
    for thm, proofs in previous.atp_deps.items():
        th = previous.thm_hashes.get(thm)
        tname = hash_to_name.get(th)
        if tname is None:
            continue
        for deps in proofs:
            ok = True
            for d in deps:
                dh = previous.thm_hashes.get(d)
                dname = hash_to_name.get(dh)
                if dname is None or position[dname] >= position[tname]:
                    ok = False
                    break
            if ok:
                reusable += 1
    return ReuseReport(
        project=proj.name, previous=previous.name,
        unique_conjuncts=len(cur_conj), in_previous=in_prev,
        atp_proved=atp_proved, atp_proofs=atp_proofs,
        reusable_proofs=reusable)


def duplicate_definitions(proj: Project) -> List[List[str]]:
    """Groups of symbols sharing a definition content name (size >= 2)."""
    by_hash: Dict[str, List[str]] = {}
    for rec in proj.corpus.definitions:
        by_hash.setdefault(proj.def_hashes[rec.symbol], []).append(rec.symbol)
    return sorted([sorted(g) for g in by_hash.values() if len(g) >= 2])


# ---------------------------------------------------------------------------
# HTML pages


def _safe_filename(name: str) -> str:
    return "".join(c if c.isalnum() or c in "_-" else f"_{ord(c):02x}" for c in name)


def _write_html(proj: Project):
    out = Path(proj.root) / "html"
    items = []
    for thm in proj.corpus.theorems:
        fn = _safe_filename(thm.name) + ".html"
        items.append(f'<li><a href="{fn}">{html_mod.escape(thm.name)}</a></li>')
        deps = "".join(
            f'<li><a href="{_safe_filename(d)}.html">{html_mod.escape(d)}</a></li>'
            for d in proj.hol_deps.get(thm.name, []))
        stmt = html_mod.escape(canonical_print(thm.statement, "diff", proj.symbols))
        page = (
            f"<html><head><title>{html_mod.escape(thm.name)}</title></head>"
            f"<body><h1>{html_mod.escape(thm.name)}</h1>"
            f"<pre>{stmt}</pre>"
            f"<h2>Dependencies</h2><ul>{deps}</ul>"
            f'<p><a href="index.html">index</a></p></body></html>')
        (out / fn).write_text(page, encoding="utf-8")
    index = (
        f"<html><head><title>{html_mod.escape(proj.name)}</title></head>"
        f"<body><h1>{html_mod.escape(proj.name)}</h1>"
        f"<ul>{''.join(items)}</ul></body></html>")
    (out / "index.html").write_text(index, encoding="utf-8")
