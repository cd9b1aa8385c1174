"""Surface-grammar parser and Hindley-Milner type inference.

The grammar is documented in docs/grammar.md: juxtaposition application,
a fixed infix table, `!x. t` / `?x. t` / `\\x. t` binders, `(t:ty)`
annotations, `&n` numeral coercion, and a type syntax with
right-associative `->` and binary `^`.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Optional

from .terms import (
    Abs, App, BOOL, Const, InfixEntry, NEG_PREC, SymbolTable, TermExpr,
    TyApp, TypeExpr, TyVar, Var, basic_table, is_fun, mk_fun, mk_num_literal,
    subst_type,
)


class ParseError(Exception):
    def __init__(self, message: str, pos: int):
        super().__init__(f"{message} (at offset {pos})")
        self.pos = pos


class TypeError_(Exception):
    """Non-unifiable application or annotation."""


class UnknownSymbol(Exception):
    """Symbolic operator absent from the symbol table."""


# ---------------------------------------------------------------------------
# Tokenizer

_SYMBOL_TOKENS = [
    "<=>", "==>", "/\\", "\\/", "->", "<=", ">=",
    "<", ">", "=", "+", "-", "*", "/", "^", "~", "&",
    "!", "?", "\\", ".", "(", ")", ":", ",", ";",
]
_SYMBOL_CHARS = set("".join(_SYMBOL_TOKENS))


@dataclass
class Token:
    kind: str  # ident | tyvar | num | sym | eof
    text: str
    pos: int


def tokenize(text: str):
    toks = []
    i, n = 0, len(text)
    while i < n:
        c = text[i]
        if c.isspace():
            i += 1
            continue
        if c == "'" and i + 1 < n and (text[i + 1].isalpha() or text[i + 1] == "_"):
            j = i + 1
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            toks.append(Token("tyvar", text[i + 1:j], i))
            i = j
            continue
        if c.isalpha() or c == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] in "_'"):
                j += 1
            toks.append(Token("ident", text[i:j], i))
            i = j
            continue
        if c.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            toks.append(Token("num", text[i:j], i))
            i = j
            continue
        if c in _SYMBOL_CHARS:
            for tok in _SYMBOL_TOKENS:
                if text.startswith(tok, i):
                    toks.append(Token("sym", tok, i))
                    i += len(tok)
                    break
            else:
                raise ParseError(f"unexpected character {c!r}", i)
            continue
        raise ParseError(f"unexpected character {c!r}", i)
    toks.append(Token("eof", "", n))
    return toks


# ---------------------------------------------------------------------------
# Type parsing


class _TokStream:
    def __init__(self, toks):
        self.toks = toks
        self.i = 0

    def peek(self) -> Token:
        return self.toks[self.i]

    def next(self) -> Token:
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, text: str) -> Token:
        t = self.peek()
        if t.text != text or t.kind == "eof":
            raise ParseError(f"expected {text!r}, found {t.text!r}", t.pos)
        return self.next()


def _parse_type(ts: _TokStream, table: Optional[SymbolTable]) -> TypeExpr:
    # fun := cart ('->' fun)?
    left = _parse_type_cart(ts, table)
    if ts.peek().text == "->":
        ts.next()
        right = _parse_type(ts, table)
        return mk_fun(left, right)
    return left


def _parse_type_cart(ts: _TokStream, table) -> TypeExpr:
    left = _parse_type_atom(ts, table)
    while ts.peek().text == "^":
        ts.next()
        right = _parse_type_atom(ts, table)
        left = TyApp("cart", (left, right))
    return left


def _parse_type_atom(ts: _TokStream, table) -> TypeExpr:
    t = ts.peek()
    if t.kind == "tyvar":
        ts.next()
        return TyVar(t.text)
    if t.text == "(":
        ts.next()
        inner = _parse_type(ts, table)
        ts.expect(")")
        return inner
    if t.kind == "ident":
        ts.next()
        args = ()
        if ts.peek().text == "(":
            ts.next()
            lst = [_parse_type(ts, table)]
            while ts.peek().text == ",":
                ts.next()
                lst.append(_parse_type(ts, table))
            ts.expect(")")
            args = tuple(lst)
        known = table.tycons.get(t.text) if table is not None else None
        if known is not None and known != len(args):
            raise ParseError(
                f"type constructor {t.text} expects {known} arguments", t.pos)
        if table is not None and known is None and not args:
            # unknown bare identifier in type position reads as a type variable
            return TyVar(t.text)
        return TyApp(t.text, args)
    raise ParseError(f"expected a type, found {t.text!r}", t.pos)


def parse_type(text: str, table: Optional[SymbolTable] = None) -> TypeExpr:
    ts = _TokStream(tokenize(text))
    ty = _parse_type(ts, table)
    end = ts.peek()
    if end.kind != "eof":
        raise ParseError(f"trailing input {end.text!r} after type", end.pos)
    return ty


# ---------------------------------------------------------------------------
# Raw (pre-typed) terms


@dataclass
class RIdent:
    name: str
    pos: int


@dataclass
class ROp:
    """Occurrence of a possibly-overloaded constant."""
    candidates: tuple
    pos: int
    site: int = -1  # overload site index, filled before elaboration


@dataclass
class RNum:
    value: int
    real: bool
    pos: int


@dataclass
class RApp:
    fn: object
    arg: object


@dataclass
class RAbs:
    var: str
    ty: Optional[TypeExpr]
    body: object
    pos: int


@dataclass
class RBind:
    binder: str  # '!' or '?'
    var: str
    ty: Optional[TypeExpr]
    body: object
    pos: int


@dataclass
class RAnnot:
    term: object
    ty: TypeExpr


_BINDER_TOKENS = ("!", "?", "\\")


def _parse_term(ts: _TokStream, table: SymbolTable):
    t = ts.peek()
    if t.text in _BINDER_TOKENS and t.kind == "sym":
        ts.next()
        vars_ = _parse_binder_vars(ts, table)
        ts.expect(".")
        body = _parse_term(ts, table)
        for name, ty, pos in reversed(vars_):
            if t.text == "\\":
                body = RAbs(name, ty, body, pos)
            else:
                body = RBind(t.text, name, ty, body, pos)
        return body
    return _parse_infix(ts, table, 0)


def _parse_binder_vars(ts: _TokStream, table: SymbolTable):
    out = []
    while True:
        t = ts.peek()
        if t.kind == "ident" and t.text not in table.infixes:
            ts.next()
            ty = None
            if ts.peek().text == ":":
                ts.next()
                ty = _parse_type(ts, table)
            out.append((t.text, ty, t.pos))
        elif t.text == "(":
            ts.next()
            name = ts.peek()
            if name.kind != "ident":
                raise ParseError("expected a bound variable name", name.pos)
            ts.next()
            ts.expect(":")
            ty = _parse_type(ts, table)
            ts.expect(")")
            out.append((name.text, ty, name.pos))
        else:
            break
    if not out:
        raise ParseError("expected at least one bound variable", ts.peek().pos)
    return out


def _parse_infix(ts: _TokStream, table: SymbolTable, min_prec: int):
    left = _parse_prefix(ts, table)
    while True:
        t = ts.peek()
        entry = table.infixes.get(t.text) if t.kind in ("sym", "ident") else None
        if entry is None or entry.prec < min_prec:
            return left
        ts.next()
        nxt = entry.prec + 1 if entry.assoc == "l" else entry.prec
        right = _parse_infix(ts, table, nxt)
        left = RApp(RApp(ROp(entry.candidates, t.pos), left), right)


def _parse_prefix(ts: _TokStream, table: SymbolTable):
    t = ts.peek()
    if t.text == "~" and t.kind == "sym":
        ts.next()
        arg = _parse_infix(ts, table, NEG_PREC + 1)
        return RApp(ROp(("~",), t.pos), arg)
    return _parse_app(ts, table)


def _parse_app(ts: _TokStream, table: SymbolTable):
    head = _parse_atom(ts, table)
    while True:
        t = ts.peek()
        if t.text in ("(",) or t.kind in ("ident", "num", "tyvar") \
                or (t.kind == "sym" and t.text in ("&", "~", "\\", "!", "?")):
            if t.kind == "ident" and t.text in table.infixes:
                return head
            if t.text in _BINDER_TOKENS or t.text == "~":
                # binders and negation bind looser; `f !x. p` needs parens
                return head
            head = RApp(head, _parse_atom(ts, table))
        else:
            return head


def _parse_atom(ts: _TokStream, table: SymbolTable):
    t = ts.peek()
    if t.text == "(":
        ts.next()
        inner = _parse_term(ts, table)
        if ts.peek().text == ":":
            ts.next()
            ty = _parse_type(ts, table)
            inner = RAnnot(inner, ty)
        ts.expect(")")
        return inner
    if t.kind == "ident":
        if t.text in table.infixes:
            raise ParseError(f"infix {t.text!r} used without a left operand", t.pos)
        ts.next()
        return RIdent(t.text, t.pos)
    if t.kind == "num":
        ts.next()
        return RNum(int(t.text), False, t.pos)
    if t.text == "&":
        ts.next()
        nt = ts.peek()
        if nt.kind != "num":
            raise ParseError("expected a numeral after '&'", nt.pos)
        ts.next()
        return RNum(int(nt.text), True, nt.pos)
    if t.kind == "sym" and t.text not in ("(", ")", ".", ":", ",", ";") \
            and t.text not in table.infixes and t.text not in _BINDER_TOKENS \
            and t.text not in ("~", "&"):
        raise UnknownSymbol(f"unknown operator {t.text!r} at offset {t.pos}")
    raise ParseError(f"unexpected token {t.text!r}", t.pos)


# ---------------------------------------------------------------------------
# Type inference


class _Infer:
    def __init__(self, table: SymbolTable):
        self.table = table
        self.sub: dict = {}
        self.counter = itertools.count()

    def fresh(self) -> TyVar:
        return TyVar(f"?{next(self.counter)}")

    def resolve(self, ty: TypeExpr) -> TypeExpr:
        while isinstance(ty, TyVar) and ty.name in self.sub:
            ty = self.sub[ty.name]
        return ty

    def walk(self, ty: TypeExpr) -> TypeExpr:
        ty = self.resolve(ty)
        if isinstance(ty, TyApp):
            return TyApp(ty.name, tuple(self.walk(a) for a in ty.args))
        return ty

    def occurs(self, name: str, ty: TypeExpr) -> bool:
        ty = self.resolve(ty)
        if isinstance(ty, TyVar):
            return ty.name == name
        return any(self.occurs(name, a) for a in ty.args)

    def unify(self, a: TypeExpr, b: TypeExpr):
        a, b = self.resolve(a), self.resolve(b)
        if isinstance(a, TyVar):
            if isinstance(b, TyVar) and b.name == a.name:
                return
            if self.occurs(a.name, b):
                raise TypeError_(f"occurs check: '{a.name} in {b}")
            self.sub[a.name] = b
            return
        if isinstance(b, TyVar):
            self.unify(b, a)
            return
        if a.name != b.name or len(a.args) != len(b.args):
            raise TypeError_(f"cannot unify {a} with {b}")
        for x, y in zip(a.args, b.args):
            self.unify(x, y)

    def instantiate(self, scheme: TypeExpr) -> TypeExpr:
        ren: dict = {}

        def go(ty):
            if isinstance(ty, TyVar):
                if ty.name not in ren:
                    ren[ty.name] = self.fresh()
                return ren[ty.name]
            return TyApp(ty.name, tuple(go(a) for a in ty.args))

        return go(scheme)


def _collect_overloads(raw, sites):
    if isinstance(raw, ROp):
        if len(raw.candidates) > 1:
            raw.site = len(sites)
            sites.append(raw.candidates)
    elif isinstance(raw, RApp):
        _collect_overloads(raw.fn, sites)
        _collect_overloads(raw.arg, sites)
    elif isinstance(raw, (RAbs, RBind)):
        _collect_overloads(raw.body, sites)
    elif isinstance(raw, RAnnot):
        _collect_overloads(raw.term, sites)


def _elaborate(raw, inf: _Infer, env: dict, free: dict, choice):
    """Build a TermExpr with unification metavariables for unknown types."""
    table = inf.table
    if isinstance(raw, RIdent):
        if raw.name in env:
            return env[raw.name]
        cands = table.candidates(raw.name)
        if cands is not None:
            return Const(cands[0], inf.instantiate(table.consts[cands[0]]))
        if raw.name not in free:
            free[raw.name] = Var(raw.name, inf.fresh())
        return free[raw.name]
    if isinstance(raw, ROp):
        name = raw.candidates[0] if raw.site < 0 else choice[raw.site]
        return Const(name, inf.instantiate(table.consts[name]))
    if isinstance(raw, RNum):
        t = mk_num_literal(raw.value)
        if raw.real:
            t = App(Const("real_of_num", mk_fun(TyApp("num"), TyApp("real"))), t)
        return t
    if isinstance(raw, RApp):
        f = _elaborate(raw.fn, inf, env, free, choice)
        x = _elaborate(raw.arg, inf, env, free, choice)
        res = inf.fresh()
        inf.unify(_ty_of(f, inf), mk_fun(_ty_of(x, inf), res))
        return App(f, x)
    if isinstance(raw, RAbs):
        vty = raw.ty if raw.ty is not None else inf.fresh()
        v = Var(raw.var, vty)
        env2 = dict(env)
        env2[raw.var] = v
        body = _elaborate(raw.body, inf, env2, free, choice)
        return Abs(v, body)
    if isinstance(raw, RBind):
        vty = raw.ty if raw.ty is not None else inf.fresh()
        v = Var(raw.var, vty)
        env2 = dict(env)
        env2[raw.var] = v
        body = _elaborate(raw.body, inf, env2, free, choice)
        inf.unify(_ty_of(body, inf), BOOL)
        q = Const(raw.binder, mk_fun(mk_fun(vty, BOOL), BOOL))
        return App(q, Abs(v, body))
    if isinstance(raw, RAnnot):
        t = _elaborate(raw.term, inf, env, free, choice)
        inf.unify(_ty_of(t, inf), raw.ty)
        return t
    raise AssertionError(f"unexpected raw node {raw!r}")


def _ty_of(t: TermExpr, inf: _Infer) -> TypeExpr:
    if isinstance(t, (Var, Const)):
        return t.ty
    if isinstance(t, Abs):
        return mk_fun(t.var.ty, _ty_of(t.body, inf))
    fty = inf.resolve(_ty_of(t.fn, inf))
    if is_fun(fty):
        return fty.args[1]
    if isinstance(fty, TyVar):
        res = inf.fresh()
        inf.unify(fty, mk_fun(inf.fresh(), res))
        return res
    raise TypeError_(f"application of non-function type {fty}")


def _apply_sub(t: TermExpr, inf: _Infer, gen: dict) -> TermExpr:
    def goty(ty):
        ty = inf.walk(ty)
        return _generalize(ty, gen)

    def go(u):
        if isinstance(u, Var):
            return Var(u.name, goty(u.ty))
        if isinstance(u, Const):
            return Const(u.name, goty(u.ty))
        if isinstance(u, Abs):
            return Abs(go(u.var), go(u.body))
        return App(go(u.fn), go(u.arg))

    return go(t)


_GEN_NAMES = "abcdefghijklmnopqrstuvwxyz"


def _generalize(ty: TypeExpr, gen: dict) -> TypeExpr:
    if isinstance(ty, TyVar):
        if ty.name.startswith("?"):
            if ty.name not in gen:
                i = len(gen)
                nm = _GEN_NAMES[i] if i < 26 else f"{_GEN_NAMES[i % 26]}{i // 26}"
                gen[ty.name] = TyVar(nm)
            return gen[ty.name]
        return ty
    return TyApp(ty.name, tuple(_generalize(a, gen) for a in ty.args))


def parse_term(text: str, symbols: Optional[SymbolTable] = None,
               expect: Optional[TypeExpr] = BOOL) -> TermExpr:
    """Parse and typecheck one formula; by default the result must be bool."""
    table = symbols if symbols is not None else basic_table()
    ts = _TokStream(tokenize(text))
    raw = _parse_term(ts, table)
    end = ts.peek()
    if end.kind != "eof":
        raise ParseError(f"trailing input {end.text!r}", end.pos)

    sites: list = []
    _collect_overloads(raw, sites)
    last_err: Optional[Exception] = None
    for choice in itertools.product(*sites) if sites else [()]:
        inf = _Infer(table)
        try:
            term = _elaborate(raw, inf, {}, {}, choice)
            if expect is not None:
                inf.unify(_ty_of(term, inf), expect)
            return _apply_sub(term, inf, {})
        except TypeError_ as e:
            if last_err is None:
                last_err = e
    raise last_err if last_err is not None else TypeError_("no typing found")
