"""Polymorphic tagged first-order encoding and TPTP FOF output.

Pipeline: lambda-lifting, Meng-Paulson minimal arities with an explicit
`happ` application operator, a `p` predicate for boolean terms in formula
positions, and a binary `t` wrapper carrying the encoded type of every
first-order term.  Equality stays native on tagged terms.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from .terms import (
    Abs, App, BOOL, Const, QUANTIFIERS, TermExpr, TyApp, TypeExpr, TyVar, Var,
    check_term, free_vars, is_fun, mk_app, mk_fun, strip_app, type_of,
)


class UnsupportedTerm(Exception):
    pass


class UnknownIdentifier(Exception):
    pass


# ---------------------------------------------------------------------------
# First-order syntax


@dataclass(frozen=True)
class FoVar:
    name: str


@dataclass(frozen=True)
class FoTerm:
    fn: str
    args: tuple = ()


@dataclass(frozen=True)
class FoPred:
    name: str
    args: tuple


@dataclass(frozen=True)
class FoEq:
    left: FoTerm
    right: FoTerm


@dataclass(frozen=True)
class FoNot:
    arg: object


@dataclass(frozen=True)
class FoBin:
    op: str  # '&' '|' '=>' '<=>'
    left: object
    right: object


@dataclass(frozen=True)
class FoQuant:
    kind: str  # '!' or '?'
    vars: tuple
    body: object


# ---------------------------------------------------------------------------
# Identifier escaping (reversible)


def escape_name(name: str) -> str:
    out = ["hh_"]
    for c in name:
        if c.islower() or c.isdigit():
            out.append(c)
        else:
            code = ord(c)
            if code < 256:
                out.append(f"_{code:02x}")
            else:
                out.append(f"_u{code:04x}")
    return "".join(out)


def unescape_name(ident: str) -> str:
    if not ident.startswith("hh_"):
        raise UnknownIdentifier(f"not an encoded identifier: {ident!r}")
    s = ident[3:]
    out = []
    i = 0
    while i < len(s):
        c = s[i]
        if c == "_":
            if i + 1 < len(s) and s[i + 1] == "u":
                out.append(chr(int(s[i + 2:i + 6], 16)))
                i += 6
            else:
                out.append(chr(int(s[i + 1:i + 3], 16)))
                i += 3
        else:
            out.append(c)
            i += 1
    return "".join(out)


@dataclass
class NameMap:
    """Bijection between TPTP-safe identifiers and original names."""

    to_original: Dict[str, str] = field(default_factory=dict)

    def bind(self, original: str) -> str:
        ident = escape_name(original)
        prev = self.to_original.get(ident)
        if prev is not None and prev != original:
            raise AssertionError("escape collision")
        self.to_original[ident] = original
        return ident

    def decode(self, ident: str) -> str:
        try:
            return self.to_original[ident]
        except KeyError:
            raise UnknownIdentifier(ident) from None


def decode_name(name_map: NameMap, ident: str) -> str:
    return name_map.decode(ident)


# ---------------------------------------------------------------------------
# Lambda lifting


_LAM_PREFIX = "_LAM"


def _lift_lambdas(t: TermExpr, counter: list, axioms: list) -> TermExpr:
    """Replace every abstraction not directly under a quantifier by a fresh
    function symbol with a defining axiom."""

    def go(u: TermExpr, under_binder: bool) -> TermExpr:
        if isinstance(u, (Var, Const)):
            return u
        if isinstance(u, App):
            head, args = strip_app(u)
            if isinstance(head, Const) and head.name in QUANTIFIERS \
                    and len(args) == 1 and isinstance(args[0], Abs):
                ab = args[0]
                return App(head, Abs(ab.var, go(ab.body, False)))
            return mk_app(go(head, False), [go(a, False) for a in args])
        if isinstance(u, Abs):
            body = go(u.body, False)
            lifted = Abs(u.var, body)
            fvs = free_vars(lifted)
            counter[0] += 1
            name = f"{_LAM_PREFIX}{counter[0]}"
            cty = lifted.var.ty
            fnty = mk_fun(cty, type_of(body))
            for v in reversed(fvs):
                fnty = mk_fun(v.ty, fnty)
            c = Const(name, fnty)
            replacement = mk_app(c, fvs)
            # !v1..vn x. c v1..vn x = body
            lhs = App(replacement, Var(lifted.var.name, cty))
            eq = Const("=", mk_fun(type_of(lhs), mk_fun(type_of(lhs), BOOL)))
            ax_body = App(App(eq, lhs), body)
            ax = ax_body
            for v in reversed(fvs + [Var(lifted.var.name, cty)]):
                q = Const("!", mk_fun(mk_fun(v.ty, BOOL), BOOL))
                ax = App(q, Abs(v, ax))
            check_term(ax)
            axioms.append((f"{name}_def", ax))
            return replacement
        raise UnsupportedTerm(repr(u))

    return go(t, False)


# ---------------------------------------------------------------------------
# Problem encoding


@dataclass
class FofProblem:
    formulas: List[Tuple[str, str, object]]  # (name, role, formula)
    name_map: NameMap
    arities: Dict[str, int]
    axiom_names: List[str]          # names of encoded premise axioms only
    header: List[str] = field(default_factory=list)


def _min_arities(terms) -> Dict[str, int]:
    arities: Dict[str, int] = {}

    def go(u):
        head, args = strip_app(u)
        if isinstance(head, Const):
            if head.name in QUANTIFIERS and len(args) == 1 and isinstance(args[0], Abs):
                go(args[0].body)
                return
            n = len(args)
            prev = arities.get(head.name)
            arities[head.name] = n if prev is None else min(prev, n)
        for a in args:
            go(a)
        if isinstance(head, Abs):
            go(head.body)

    for t in terms:
        go(t)
    return arities


class _FormulaEncoder:
    def __init__(self, arities, name_map: NameMap):
        self.arities = arities
        self.name_map = name_map
        self.tyvars: Dict[str, str] = {}
        self.used_names: set = set()
        self.bound: Dict[Var, str] = {}
        self.free: Dict[Var, str] = {}

    def _fresh(self, base: str) -> str:
        name = "".join(c if c.isalnum() or c == "_" else "_" for c in base)
        name = name.upper()
        if not name or not name[0].isalpha():
            name = "V" + name
        cand, i = name, 1
        while cand in self.used_names:
            i += 1
            cand = f"{name}_{i}"
        self.used_names.add(cand)
        return cand

    def tyvar(self, name: str) -> str:
        if name not in self.tyvars:
            self.tyvars[name] = self._fresh(name)
        return self.tyvars[name]

    def enc_type(self, ty: TypeExpr) -> FoTerm:
        if isinstance(ty, TyVar):
            return FoVar(self.tyvar(ty.name))
        return FoTerm(self.name_map.bind(ty.name),
                      tuple(self.enc_type(a) for a in ty.args))

    def var_name(self, v: Var) -> str:
        if v in self.bound:
            return self.bound[v]
        if v not in self.free:
            self.free[v] = self._fresh(v.name)
        return self.free[v]

    def _tag(self, ty: TypeExpr, base) -> FoTerm:
        return FoTerm("t", (self.enc_type(ty), base))

    def enc_term(self, u: TermExpr) -> FoTerm:
        if isinstance(u, Var):
            return self._tag(u.ty, FoVar(self.var_name(u)))
        head, args = strip_app(u)
        if isinstance(head, Abs):
            raise UnsupportedTerm("abstraction survived lambda-lifting")
        if isinstance(head, Var):
            cur = self.enc_term(head)
            ty = head.ty
            for a in args:
                ty = ty.args[1]
                cur = self._tag(ty, FoTerm("happ", (cur, self.enc_term(a))))
            return cur
        m = self.arities.get(head.name, 0)
        ty = head.ty
        for _ in range(m):
            ty = ty.args[1]
        base = FoTerm(self.name_map.bind(head.name),
                      tuple(self.enc_term(a) for a in args[:m]))
        cur = self._tag(ty, base)
        for a in args[m:]:
            ty = ty.args[1]
            cur = self._tag(ty, FoTerm("happ", (cur, self.enc_term(a))))
        return cur

    def enc_formula(self, u: TermExpr):
        head, args = strip_app(u)
        if isinstance(head, Const):
            if head.name == "~" and len(args) == 1:
                return FoNot(self.enc_formula(args[0]))
            if head.name in ("/\\", "\\/", "==>", "<=>") and len(args) == 2:
                op = {"/\\": "&", "\\/": "|", "==>": "=>", "<=>": "<=>"}[head.name]
                return FoBin(op, self.enc_formula(args[0]), self.enc_formula(args[1]))
            if head.name in QUANTIFIERS and len(args) == 1 and isinstance(args[0], Abs):
                ab = args[0]
                name = self._fresh(ab.var.name)
                old = self.bound.get(ab.var)
                self.bound[ab.var] = name
                body = self.enc_formula(ab.body)
                if old is None:
                    del self.bound[ab.var]
                else:
                    self.bound[ab.var] = old
                return FoQuant("!" if head.name == "!" else "?", (name,), body)
            if head.name == "=" and len(args) == 2:
                return FoEq(self.enc_term(args[0]), self.enc_term(args[1]))
        return FoPred("p", (self.enc_term(u),))

    def encode(self, u: TermExpr):
        body = self.enc_formula(u)
        # universally close over free term variables and type variables
        free_names = tuple(self.free.values())
        ty_names = tuple(self.tyvars.values())
        prefix = ty_names + free_names
        if prefix:
            body = FoQuant("!", prefix, body)
        return body


def encode_problem(conjecture: TermExpr, premises: List[Tuple[str, TermExpr]],
                   header: Optional[List[str]] = None) -> FofProblem:
    """Encode a conjecture and its premises as one untyped FOF problem."""
    counter = [0]
    lam_axioms: list = []
    lifted_premises = [(n, _lift_lambdas(t, counter, lam_axioms)) for n, t in premises]
    lifted_conj = _lift_lambdas(conjecture, counter, lam_axioms)

    all_terms = [t for _, t in lifted_premises] + [t for _, t in lam_axioms] \
        + [lifted_conj]
    arities = _min_arities(all_terms)
    name_map = NameMap()

    formulas = []
    axiom_names = []
    seen = set()
    for name, t in lifted_premises:
        ident = name_map.bind(name)
        if ident in seen:
            raise ValueError(f"duplicate premise name {name!r}")
        seen.add(ident)
        enc = _FormulaEncoder(arities, name_map)
        formulas.append((ident, "axiom", enc.encode(t)))
        axiom_names.append(ident)
    for name, t in lam_axioms:
        ident = name_map.bind(name)
        enc = _FormulaEncoder(arities, name_map)
        formulas.append((ident, "axiom", enc.encode(t)))
    enc = _FormulaEncoder(arities, name_map)
    formulas.append(("conj", "conjecture", enc.encode(lifted_conj)))

    return FofProblem(formulas=formulas, name_map=name_map, arities=arities,
                      axiom_names=axiom_names, header=list(header or []))


# ---------------------------------------------------------------------------
# TPTP output


def _fmt_term(t) -> str:
    if isinstance(t, FoVar):
        return t.name
    if not t.args:
        return t.fn
    return f"{t.fn}({','.join(_fmt_term(a) for a in t.args)})"


def _fmt_formula(f) -> str:
    if isinstance(f, FoPred):
        return f"{f.name}({','.join(_fmt_term(a) for a in f.args)})"
    if isinstance(f, FoEq):
        return f"{_fmt_term(f.left)} = {_fmt_term(f.right)}"
    if isinstance(f, FoNot):
        return f"~ ({_fmt_formula(f.arg)})"
    if isinstance(f, FoBin):
        return f"({_fmt_formula(f.left)}) {f.op} ({_fmt_formula(f.right)})"
    if isinstance(f, FoQuant):
        return f"{f.kind} [{','.join(f.vars)}] : ({_fmt_formula(f.body)})"
    raise AssertionError(f)


def write_tptp(problem: FofProblem) -> str:
    """Valid TPTP FOF text, axioms first, conjecture last, deterministic."""
    lines = [f"% hh: {h}" for h in problem.header]
    lines.append("% hh: encoding=polymorphic-tagged equality=native-on-tagged")
    for name, role, f in problem.formulas:
        lines.append(f"fof({name}, {role}, {_fmt_formula(f)}).")
    return "\n".join(lines) + "\n"
