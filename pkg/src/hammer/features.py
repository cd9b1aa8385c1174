"""Feature extraction and stable feature/label interning tables."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Iterable, Optional

from .terms import (
    Abs, App, Const, LOGICALS, QUANTIFIERS, SymbolTable, TermExpr, TyApp,
    TypeExpr, Var, canonical_print, strip_app, type_of,
)

log = logging.getLogger(__name__)

EXTRACTION_METHODS = ("standard", "all-vars-same", "all-vars-diff")

_VAR_MODE = {
    "standard": "standard",
    "all-vars-same": "same",
    "all-vars-diff": "diff",
}

# Heads whose applications contribute structure, not features.  Equality
# atoms are skipped too: after variable normalization they carry almost no
# content and the reference feature listings omit them.
_SKIP_HEADS = frozenset(LOGICALS) | {"="}

# Constants whose names are not features; `=` does count as a symbol.
_SKIP_NAMES = frozenset(LOGICALS)


def _tycons_of(ty: TypeExpr, acc: set):
    if isinstance(ty, TyApp):
        acc.add(ty.name)
        for a in ty.args:
            _tycons_of(a, acc)


def extract_features(t: TermExpr, method: str,
                     table: Optional[SymbolTable] = None) -> frozenset:
    """Feature strings of a formula: symbol names, type-constructor names,
    and printed subterms under the method's variable mode."""
    if method not in EXTRACTION_METHODS:
        raise ValueError(f"unknown extraction method {method!r}")
    mode = _VAR_MODE[method]
    out: set = set()

    def type_feats(u: TermExpr):
        _tycons_of(type_of(u), out)

    def emit(u: TermExpr):
        s = canonical_print(u, mode, table).strip()
        if s:
            out.add(s)

    def walk(u: TermExpr):
        type_feats(u)
        if isinstance(u, Var):
            emit(u)
            return
        if isinstance(u, Const):
            if u.name not in _SKIP_NAMES:
                out.add(u.name)
            return
        if isinstance(u, Abs):
            type_feats(u.var)
            walk(u.body)
            return
        head, args = strip_app(u)
        if isinstance(head, Const):
            if head.name not in _SKIP_NAMES:
                out.add(head.name)
            type_feats(head)
            if head.name in _SKIP_HEADS:
                if head.name in QUANTIFIERS and len(args) == 1 \
                        and isinstance(args[0], Abs):
                    type_feats(args[0])
                    type_feats(args[0].var)
                    walk(args[0].body)
                else:
                    for a in args:
                        walk(a)
                return
            emit(u)
            for a in args:
                walk(a)
            return
        # variable or abstraction head
        emit(u)
        walk(head)
        for a in args:
            walk(a)

    walk(t)
    return frozenset(out)


@dataclass
class FeatureTable:
    """Append-only bidirectional map between strings and serial numbers.

    Numbering is stable under extension; the same structure is used for
    features and for conjunct labels.
    """

    by_string: dict = field(default_factory=dict)
    by_serial: dict = field(default_factory=dict)
    frozen: bool = False

    def __len__(self) -> int:
        return len(self.by_string)

    def add(self, s: str) -> int:
        if s in self.by_string:
            return self.by_string[s]
        if self.frozen:
            raise KeyError(f"table frozen; unknown entry {s!r}")
        n = len(self.by_string)
        self.by_string[s] = n
        self.by_serial[n] = s
        return n

    def serial(self, s: str) -> Optional[int]:
        return self.by_string.get(s)

    def string(self, n: int) -> str:
        return self.by_serial[n]

    def freeze(self) -> "FeatureTable":
        self.frozen = True
        return self

    def save(self, path):
        with open(path, "w", encoding="utf-8") as f:
            for n in range(len(self.by_serial)):
                f.write(f"{n}\t{self.by_serial[n]}\n")

    @classmethod
    def load(cls, path) -> "FeatureTable":
        t = cls()
        with open(path, encoding="utf-8") as f:
            for line in f:
                line = line.rstrip("\n")
                if not line:
                    continue
                n, s = line.split("\t", 1)
                assert int(n) == t.add(s)
        return t


def intern(fs: Iterable[str], table: FeatureTable) -> list:
    """Sorted serials of a feature set.

    While the table is writable unseen features get fresh serials; against a
    frozen table unseen features are dropped (logged).
    """
    out = []
    for s in sorted(fs):
        if table.frozen:
            n = table.serial(s)
            if n is None:
                log.debug("dropping unseen feature %r", s)
                continue
        else:
            n = table.add(s)
        out.append(n)
    out.sort()
    return out


def write_feature_file(path, rows):
    """Rows of (label_serial, feature_serials) as `label: f1,f2,...` lines."""
    with open(path, "w", encoding="utf-8") as f:
        for label, feats in rows:
            f.write(f"{label}: {','.join(str(x) for x in sorted(feats))}\n")


def read_feature_file(path):
    rows = []
    with open(path, encoding="utf-8") as f:
        for line in f:
            line = line.strip()
            if not line:
                continue
            label, rest = line.split(":", 1)
            feats = [int(x) for x in rest.split(",") if x.strip()]
            rows.append((int(label), feats))
    return rows
