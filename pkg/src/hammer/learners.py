"""Premise-selection learners: sparse naive Bayes and distance-weighted k-NN,
plus conjunct splitting and the ranking daemon."""

from __future__ import annotations

import math
import pickle
import socket
import socketserver
import threading
from dataclasses import dataclass, field
from typing import Iterable, List, Optional, Tuple

from .terms import (
    Abs, App, Const, TermExpr, Var, free_vars, is_binder_app, mk_fun, strip_app,
    BOOL,
)


class EmptyTrainingSet(Exception):
    pass


@dataclass(frozen=True)
class TrainingExample:
    """One theorem conjunct: its label, features, and proof dependencies."""
    label: int
    features: tuple
    deps: tuple  # label serials of the proof premises, chronologically earlier


@dataclass
class NaiveBayesParams:
    w_t: float = 1.0       # weight of the log-count prior
    w_h: float = 1.0       # weight of matching-feature log conditionals
    w_m: float = 1.0       # weight of the missing-feature penalty
    mu: float = -15.0      # per-feature missing penalty


@dataclass
class KnnParams:
    k: int = 40
    self_weight: float = 2.0
    dudani: bool = False   # (d_k - d_i)/(d_k - d_1) weighting instead of raw


_MIN_SCORE = -1e9


@dataclass
class RankerModel:
    """Counts-based model servable for label ranking.

    T_l: how many proofs use label l (a theorem depends on itself).
    t_{l,f}: in how many of those proofs the proving example had feature f.
    """

    method: str  # 'naive-bayes' | 'knn'
    labels: tuple = ()
    n_examples: int = 0
    doc_freq: dict = field(default_factory=dict)       # f -> example count
    label_count: dict = field(default_factory=dict)    # l -> T_l
    cooccur: dict = field(default_factory=dict)        # l -> {f: t_{l,f}}
    examples: tuple = ()                               # kept for knn
    nb: NaiveBayesParams = field(default_factory=NaiveBayesParams)
    knn: KnnParams = field(default_factory=KnnParams)

    MAGIC = b"HHMODEL1"

    def save(self, path):
        with open(path, "wb") as f:
            f.write(self.MAGIC)
            pickle.dump(self, f)

    @classmethod
    def load(cls, path) -> "RankerModel":
        with open(path, "rb") as f:
            magic = f.read(len(cls.MAGIC))
            if magic != cls.MAGIC:
                raise ValueError(f"bad model file magic {magic!r}")
            return pickle.load(f)


def train(examples: List[TrainingExample], method: str = "naive-bayes",
          params=None) -> RankerModel:
    """Count-based training; an example with label l contributes one use of
    every dependency of l and of l itself."""
    if not examples:
        raise EmptyTrainingSet("no training examples")
    if method not in ("naive-bayes", "knn"):
        raise ValueError(f"unknown learner method {method!r}")
    model = RankerModel(method=method)
    if isinstance(params, NaiveBayesParams):
        model.nb = params
    elif isinstance(params, KnnParams):
        model.knn = params
    labels = set()
    for ex in examples:
        labels.add(ex.label)
        labels.update(ex.deps)
        for f in set(ex.features):
            model.doc_freq[f] = model.doc_freq.get(f, 0) + 1
        for d in set(ex.deps) | {ex.label}:
            model.label_count[d] = model.label_count.get(d, 0) + 1
            cc = model.cooccur.setdefault(d, {})
            for f in set(ex.features):
                cc[f] = cc.get(f, 0) + 1
    model.labels = tuple(sorted(labels))
    model.n_examples = len(examples)
    model.examples = tuple(examples)
    return model


def _nb_score(model: RankerModel, query) -> dict:
    p = model.nb
    scores = {}
    qset = set(query)
    for l in model.labels:
        t_l = model.label_count.get(l, 0)
        if t_l == 0:
            scores[l] = _MIN_SCORE
            continue
        s = p.w_t * math.log(t_l)
        cc = model.cooccur.get(l, {})
        for f in qset:
            t_lf = cc.get(f, 0)
            if t_lf > 0:
                s += p.w_h * math.log(t_lf / t_l)
            else:
                s += p.w_m * p.mu
        scores[l] = s
    return scores


def _idf(model: RankerModel, f: int) -> float:
    n_f = model.doc_freq.get(f, 0)
    if n_f == 0:
        return 0.0
    return math.log(model.n_examples / n_f)


def _knn_score(model: RankerModel, query) -> dict:
    p = model.knn
    qset = set(query)
    sims = []
    for i, ex in enumerate(model.examples):
        s = 0.0
        for f in qset.intersection(ex.features):
            s += _idf(model, f) ** 2
        sims.append((s, i))
    sims.sort(key=lambda t: (-t[0], t[1]))
    nearest = sims[:p.k]
    weights = [s for s, _ in nearest]
    if p.dudani and len(nearest) > 1:
        d1, dk = weights[0], weights[-1]
        span = d1 - dk
        weights = [1.0 if span == 0 else (w - dk) / span for w in weights]
    scores = {l: 0.0 for l in model.labels}
    for (sim, i), w in zip(nearest, weights):
        ex = model.examples[i]
        for d in ex.deps:
            scores[d] = scores.get(d, 0.0) + w
        scores[ex.label] = scores.get(ex.label, 0.0) + w * p.self_weight
    return scores


def rank(model: RankerModel, query: Iterable[int]) -> List[Tuple[int, float]]:
    """Descending (label, score) over all known labels; serial breaks ties."""
    query = list(query)
    if model.method == "naive-bayes":
        scores = _nb_score(model, query)
    else:
        scores = _knn_score(model, query)
    return sorted(scores.items(), key=lambda t: (-t[1], t[0]))


# ---------------------------------------------------------------------------
# Conjunct splitting


def split_conjuncts(name: str, statement: TermExpr):
    """Split top-level (possibly universally quantified) conjunctions into
    (label, conjunct) pairs; conjuncts are re-quantified over their free
    variables."""
    binders = []
    body = statement
    while is_binder_app(body) and body.fn.name == "!":
        binders.append(body.arg.var)
        body = body.arg.body

    def conjuncts(t):
        if isinstance(t, App) and isinstance(t.fn, App) \
                and isinstance(t.fn.fn, Const) and t.fn.fn.name == "/\\":
            return conjuncts(t.fn.arg) + conjuncts(t.arg)
        return [t]

    parts = conjuncts(body)
    if len(parts) == 1:
        return [(name, statement)]

    def requantify(t):
        fvs = free_vars(t)
        for v in reversed(binders):
            if v in fvs:
                q = Const("!", mk_fun(mk_fun(v.ty, BOOL), BOOL))
                t = App(q, Abs(v, t))
        return t

    return [(f"{name}_{i}", requantify(p)) for i, p in enumerate(parts, start=1)]


def parent_name(label: str, theorem_names) -> str:
    """Map a conjunct label back to its parent theorem name."""
    if label in theorem_names:
        return label
    base, sep, tail = label.rpartition("_")
    if sep and tail.isdigit() and base in theorem_names:
        return base
    raise KeyError(f"unknown label {label!r}")


# ---------------------------------------------------------------------------
# Ranking daemon


class _RankHandler(socketserver.StreamRequestHandler):
    def handle(self):
        while True:
            line = self.rfile.readline()
            if not line:
                return
            try:
                text = line.decode("utf-8").strip()
                if not text:
                    raise ValueError("empty request")
                m_part, _, feats_part = text.partition(";")
                m = int(m_part)
                feats = [int(x) for x in feats_part.split(",") if x.strip()]
                ranking = rank(self.server.model, feats)[:m]
                reply = ",".join(f"{l}={s:.9g}" for l, s in ranking)
            except Exception as e:  # malformed request keeps the connection
                reply = f"error: {e}"
            self.wfile.write(reply.encode("utf-8") + b"\n")
            self.wfile.flush()


class RankingDaemon:
    """Long-running responder: request `M;f1,f2,...`, reply `l=score,...`."""

    def __init__(self, model: RankerModel, host: str = "127.0.0.1", port: int = 0):
        class _Server(socketserver.ThreadingTCPServer):
            allow_reuse_address = True
            daemon_threads = True

        self._server = _Server((host, port), _RankHandler)
        self._server.model = model
        self._thread = threading.Thread(target=self._server.serve_forever, daemon=True)

    @property
    def address(self):
        return self._server.server_address

    def start(self) -> "RankingDaemon":
        self._thread.start()
        return self

    def stop(self):
        self._server.shutdown()
        self._server.server_close()


def query_daemon(address, m: int, features: Iterable[int]) -> str:
    with socket.create_connection(address) as sock:
        req = f"{m};{','.join(str(f) for f in features)}\n"
        sock.sendall(req.encode("utf-8"))
        buf = b""
        while not buf.endswith(b"\n"):
            chunk = sock.recv(4096)
            if not chunk:
                break
            buf += chunk
        return buf.decode("utf-8").strip()
