"""Typed lambda-term language: types, terms, symbol tables, printing."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Iterator, Optional, Union


# ---------------------------------------------------------------------------
# Types


@dataclass(frozen=True)
class TyVar:
    """Type variable, written 'a in the surface syntax."""
    name: str

    def __str__(self) -> str:
        return "'" + self.name


@dataclass(frozen=True)
class TyApp:
    """Type constructor application; arity 0 for base types like bool."""
    name: str
    args: tuple = ()

    def __str__(self) -> str:
        return print_type(self)


TypeExpr = Union[TyVar, TyApp]

BOOL = TyApp("bool")
NUM = TyApp("num")
REAL = TyApp("real")


def mk_fun(a: TypeExpr, b: TypeExpr) -> TyApp:
    return TyApp("fun", (a, b))


def mk_fun_n(args, result):
    for a in reversed(args):
        result = mk_fun(a, result)
    return result


def is_fun(ty: TypeExpr) -> bool:
    return isinstance(ty, TyApp) and ty.name == "fun" and len(ty.args) == 2


def type_vars(ty: TypeExpr, acc=None) -> list:
    """Type variable names in first left-to-right occurrence order."""
    if acc is None:
        acc = []
    if isinstance(ty, TyVar):
        if ty.name not in acc:
            acc.append(ty.name)
    else:
        for a in ty.args:
            type_vars(a, acc)
    return acc


_NORM_NAMES = [chr(ord("A") + i) for i in range(26)]


def _norm_name(i: int) -> str:
    if i < 26:
        return _NORM_NAMES[i]
    return _NORM_NAMES[i % 26] + str(i // 26)


def normalize_type(ty: TypeExpr) -> TypeExpr:
    """Rename type variables A, B, C, ... by first occurrence; idempotent."""
    order = type_vars(ty)
    ren = {n: _norm_name(i) for i, n in enumerate(order)}

    def go(t):
        if isinstance(t, TyVar):
            return TyVar(ren[t.name])
        return TyApp(t.name, tuple(go(a) for a in t.args))

    return go(ty)


def subst_type(ty: TypeExpr, sub: dict) -> TypeExpr:
    if isinstance(ty, TyVar):
        return sub.get(ty.name, ty)
    return TyApp(ty.name, tuple(subst_type(a, sub) for a in ty.args))


def print_type(ty: TypeExpr, *, quoted_vars: bool = False) -> str:
    """Surface syntax for a type: -> right-associative, ^ binary, f(a,b) generic."""

    def atom(t, inside):
        s = go(t)
        if inside == "fun_left" and is_fun(t):
            return "(" + s + ")"
        if inside == "cart" and isinstance(t, TyApp) and t.name in ("fun", "cart") and t.args:
            return "(" + s + ")"
        return s

    def go(t):
        if isinstance(t, TyVar):
            return ("'" + t.name) if quoted_vars else t.name
        if t.name == "fun" and len(t.args) == 2:
            return atom(t.args[0], "fun_left") + "->" + go(t.args[1])
        if t.name == "cart" and len(t.args) == 2:
            return atom(t.args[0], "cart") + "^" + atom(t.args[1], "cart")
        if not t.args:
            return t.name
        return t.name + "(" + ",".join(go(a) for a in t.args) + ")"

    return go(ty)


# ---------------------------------------------------------------------------
# Terms


@dataclass(frozen=True)
class Var:
    name: str
    ty: TypeExpr


@dataclass(frozen=True)
class Const:
    """Constant occurrence carrying its instantiated type."""
    name: str
    ty: TypeExpr


@dataclass(frozen=True)
class App:
    fn: "TermExpr"
    arg: "TermExpr"


@dataclass(frozen=True)
class Abs:
    var: Var
    body: "TermExpr"


TermExpr = Union[Var, Const, App, Abs]

# Constants that shape formula structure rather than content.
CONNECTIVES = ("/\\", "\\/", "==>", "<=>", "~")
QUANTIFIERS = ("!", "?")
LOGICALS = CONNECTIVES + QUANTIFIERS


class TermError(Exception):
    pass


class TypeCheckError(TermError):
    pass


def type_of(t: TermExpr) -> TypeExpr:
    if isinstance(t, (Var, Const)):
        return t.ty
    if isinstance(t, Abs):
        return mk_fun(t.var.ty, type_of(t.body))
    fty = type_of(t.fn)
    if not is_fun(fty):
        raise TypeCheckError(f"application of non-function type {fty}")
    return fty.args[1]


def check_term(t: TermExpr) -> TypeExpr:
    """Verify the application-typing invariant on every node; return the type."""
    if isinstance(t, (Var, Const)):
        return t.ty
    if isinstance(t, Abs):
        return mk_fun(t.var.ty, check_term(t.body))
    fty = check_term(t.fn)
    aty = check_term(t.arg)
    if not is_fun(fty) or fty.args[0] != aty:
        raise TypeCheckError(
            f"ill-typed application: function {print_type(fty)} to argument {print_type(aty)}"
        )
    return fty.args[1]


def strip_app(t: TermExpr):
    """Decompose an application spine into (head, [args])."""
    args = []
    while isinstance(t, App):
        args.append(t.arg)
        t = t.fn
    args.reverse()
    return t, args


def mk_app(head: TermExpr, args) -> TermExpr:
    for a in args:
        head = App(head, a)
    return head


def mk_comb(f: TermExpr, x: TermExpr) -> App:
    t = App(f, x)
    type_of(t)
    return t


def is_binder_app(t: TermExpr) -> bool:
    if not isinstance(t, App):
        return False
    return (
        isinstance(t.fn, Const)
        and t.fn.name in QUANTIFIERS
        and isinstance(t.arg, Abs)
    )


def free_vars(t: TermExpr, bound=(), acc=None) -> list:
    """Free variables in first-occurrence order."""
    if acc is None:
        acc = []
    if isinstance(t, Var):
        if t not in bound and t not in acc:
            acc.append(t)
    elif isinstance(t, App):
        free_vars(t.fn, bound, acc)
        free_vars(t.arg, bound, acc)
    elif isinstance(t, Abs):
        free_vars(t.body, bound + (t.var,), acc)
    return acc


def subterms(t: TermExpr) -> set:
    """All subterms of t, including t and application spine partials.

    A bare occurrence of a binder variable directly under its own binder
    (Abs(x, x)) is not listed separately.
    """
    out = set()

    def go(u):
        out.add(u)
        if isinstance(u, App):
            go(u.fn)
            go(u.arg)
        elif isinstance(u, Abs):
            if u.body != u.var:
                go(u.body)

    go(t)
    return out


def alpha_equal(a: TermExpr, b: TermExpr, *, free_bijection=False,
                tyvar_bijection=False) -> bool:
    """Alpha-equivalence; optionally also up to a bijection of free variable
    names and of type variable names."""
    tymap: dict = {}
    tyrev: dict = {}
    fvmap: dict = {}
    fvrev: dict = {}

    def ty_eq(x, y):
        if not tyvar_bijection:
            return x == y
        if isinstance(x, TyVar) and isinstance(y, TyVar):
            if x.name in tymap:
                return tymap[x.name] == y.name
            if y.name in tyrev:
                return False
            tymap[x.name] = y.name
            tyrev[y.name] = x.name
            return True
        if isinstance(x, TyApp) and isinstance(y, TyApp):
            return (
                x.name == y.name
                and len(x.args) == len(y.args)
                and all(ty_eq(p, q) for p, q in zip(x.args, y.args))
            )
        return False

    def go(x, y, bx, by):
        if isinstance(x, Var) and isinstance(y, Var):
            if x in bx or y in by:
                return bx.get(x) == by.get(y) and ty_eq(x.ty, y.ty)
            if not ty_eq(x.ty, y.ty):
                return False
            if not free_bijection:
                return x.name == y.name
            if x.name in fvmap:
                return fvmap[x.name] == y.name
            if y.name in fvrev:
                return False
            fvmap[x.name] = y.name
            fvrev[y.name] = x.name
            return True
        if isinstance(x, Const) and isinstance(y, Const):
            return x.name == y.name and ty_eq(x.ty, y.ty)
        if isinstance(x, App) and isinstance(y, App):
            return go(x.fn, y.fn, bx, by) and go(x.arg, y.arg, bx, by)
        if isinstance(x, Abs) and isinstance(y, Abs):
            if not ty_eq(x.var.ty, y.var.ty):
                return False
            n = len(bx)
            bx2 = dict(bx)
            by2 = dict(by)
            bx2[x.var] = n
            by2[y.var] = n
            return go(x.body, y.body, bx2, by2)
        return False

    return go(a, b, {}, {})


# ---------------------------------------------------------------------------
# Symbol table


@dataclass(frozen=True)
class InfixEntry:
    prec: int
    assoc: str  # 'l' or 'r'
    candidates: tuple  # constant names, tried in order


@dataclass
class SymbolTable:
    """Constants with polymorphic type schemes plus parsing annotations.

    Frozen at project load; mutation only during corpus ingest.
    """

    consts: dict = field(default_factory=dict)      # name -> scheme TypeExpr
    tycons: dict = field(default_factory=dict)      # name -> arity
    infixes: dict = field(default_factory=dict)     # token -> InfixEntry
    aliases: dict = field(default_factory=dict)     # surface name -> (candidates,)
    _frozen: bool = False

    def freeze(self):
        self._frozen = True
        return self

    def copy(self) -> "SymbolTable":
        return SymbolTable(
            dict(self.consts), dict(self.tycons), dict(self.infixes),
            dict(self.aliases),
        )

    def add_const(self, name: str, scheme: TypeExpr):
        if self._frozen:
            raise TermError("symbol table is frozen")
        self.consts[name] = scheme

    def add_tycon(self, name: str, arity: int):
        if self._frozen:
            raise TermError("symbol table is frozen")
        prev = self.tycons.get(name)
        if prev is not None and prev != arity:
            raise TermError(f"type constructor {name} redeclared with arity {arity} != {prev}")
        self.tycons[name] = arity

    def candidates(self, surface: str):
        """Constant candidates for a surface identifier, or None if unknown."""
        if surface in self.aliases:
            return self.aliases[surface]
        if surface in self.consts:
            return (surface,)
        return None

    def print_name(self, const_name: str) -> str:
        return _PRINT_NAMES.get(const_name, const_name)

    def infix_of(self, const_name: str):
        """(token, prec, assoc) when the constant prints infix, else None."""
        return _INFIX_PRINT.get(const_name)


def _ty(s: str) -> TypeExpr:
    # tiny scheme builder used only below; full parsing lives in parser.py
    from .parser import parse_type
    return parse_type(s)


_BASE_INFIXES = {
    "<=>": (2, "r", ("<=>",)),
    "==>": (4, "r", ("==>",)),
    "\\/": (6, "r", ("\\/",)),
    "/\\": (8, "r", ("/\\",)),
    "=": (12, "r", ("=",)),
    "<": (12, "r", ("real_lt", "lt")),
    "<=": (12, "r", ("real_le", "le")),
    ">": (12, "r", ("real_gt", "gt")),
    ">=": (12, "r", ("real_ge", "ge")),
    "IN": (12, "r", ("IN",)),
    "SUBSET": (12, "r", ("SUBSET",)),
    "UNION": (16, "l", ("UNION",)),
    "DIFF": (18, "l", ("DIFF",)),
    "INTER": (20, "l", ("INTER",)),
    "+": (16, "l", ("real_add", "vector_add", "add")),
    "-": (18, "l", ("real_sub", "vector_sub", "sub")),
    "*": (20, "l", ("real_mul", "mul")),
    "/": (22, "l", ("real_div",)),
}

_BASE_ALIASES = {
    "norm": ("vector_norm",),
    "abs": ("real_abs",),
    "max": ("real_max",),
    "min": ("real_min",),
}

# constant -> surface token for printing
_PRINT_NAMES = {
    "vector_norm": "norm",
    "real_abs": "abs",
    "real_max": "max",
    "real_min": "min",
    "real_lt": "<",
    "real_le": "<=",
    "real_gt": ">",
    "real_ge": ">=",
    "real_add": "+",
    "real_sub": "-",
    "real_mul": "*",
    "real_div": "/",
    "vector_add": "+",
    "vector_sub": "-",
}

_INFIX_PRINT = {}
for _tok, (_prec, _assoc, _cands) in _BASE_INFIXES.items():
    for _c in _cands:
        _INFIX_PRINT[_c] = (_tok, _prec, _assoc)

NEG_PREC = 10
APP_PREC = 100


def basic_table() -> SymbolTable:
    """Symbol table covering the bundled surface grammar."""
    t = SymbolTable()
    for name, arity in [
        ("bool", 0), ("fun", 2), ("num", 0), ("real", 0), ("cart", 2),
    ]:
        t.add_tycon(name, arity)
    decls = {
        "=": "'a->'a->bool",
        "/\\": "bool->bool->bool",
        "\\/": "bool->bool->bool",
        "==>": "bool->bool->bool",
        "<=>": "bool->bool->bool",
        "~": "bool->bool",
        "!": "('a->bool)->bool",
        "?": "('a->bool)->bool",
        "T": "bool",
        "F": "bool",
        "real_of_num": "num->real",
        "NUMERAL": "num->num",
        "BIT0": "num->num",
        "BIT1": "num->num",
        "_0": "num",
        "SUC": "num->num",
        "add": "num->num->num",
        "sub": "num->num->num",
        "mul": "num->num->num",
        "lt": "num->num->bool",
        "le": "num->num->bool",
        "gt": "num->num->bool",
        "ge": "num->num->bool",
        "real_add": "real->real->real",
        "real_sub": "real->real->real",
        "real_mul": "real->real->real",
        "real_div": "real->real->real",
        "real_max": "real->real->real",
        "real_min": "real->real->real",
        "real_abs": "real->real",
        "real_neg": "real->real",
        "real_lt": "real->real->bool",
        "real_le": "real->real->bool",
        "real_gt": "real->real->bool",
        "real_ge": "real->real->bool",
        "vector_add": "real^'n->real^'n->real^'n",
        "vector_sub": "real^'n->real^'n->real^'n",
        "vector_norm": "real^'n->real",
        "closed": "(real^'n->bool)->bool",
        "IN": "'a->('a->bool)->bool",
        "SUBSET": "('a->bool)->('a->bool)->bool",
        "INTER": "('a->bool)->('a->bool)->('a->bool)",
        "UNION": "('a->bool)->('a->bool)->('a->bool)",
        "DIFF": "('a->bool)->('a->bool)->('a->bool)",
        "EMPTY": "'a->bool",
        "UNIV": "'a->bool",
    }
    for name, scheme in decls.items():
        t.add_const(name, _ty(scheme))
    t.infixes = {tok: InfixEntry(p, a, c) for tok, (p, a, c) in _BASE_INFIXES.items()}
    t.aliases = dict(_BASE_ALIASES)
    return t


# ---------------------------------------------------------------------------
# Numerals


def mk_num_literal(n: int) -> TermExpr:
    def bits(k):
        if k == 0:
            return Const("_0", NUM)
        if k & 1:
            return App(Const("BIT1", mk_fun(NUM, NUM)), bits(k >> 1))
        return App(Const("BIT0", mk_fun(NUM, NUM)), bits(k >> 1))

    return App(Const("NUMERAL", mk_fun(NUM, NUM)), bits(n))


def dest_num_literal(t: TermExpr) -> Optional[int]:
    """Inverse of mk_num_literal; None when t is not a numeral."""
    if not (isinstance(t, App) and isinstance(t.fn, Const) and t.fn.name == "NUMERAL"):
        return None
    val, shift, u = 0, 0, t.arg
    while True:
        if isinstance(u, Const) and u.name == "_0":
            return val
        if isinstance(u, App) and isinstance(u.fn, Const) and u.fn.name in ("BIT0", "BIT1"):
            if u.fn.name == "BIT1":
                val |= 1 << shift
            shift += 1
            u = u.arg
        else:
            return None


def dest_real_literal(t: TermExpr) -> Optional[int]:
    if isinstance(t, App) and isinstance(t.fn, Const) and t.fn.name == "real_of_num":
        return dest_num_literal(t.arg)
    return None


# ---------------------------------------------------------------------------
# Canonical printing


VAR_MODES = ("standard", "same", "diff", "hashing")


def canonical_print(t: TermExpr, mode: str, table: Optional[SymbolTable] = None) -> str:
    """Deterministic print of a well-typed term under a variable mode.

    standard: variables print as "A" ++ their normalized type
    same:     every variable prints as "A"
    diff:     variables renamed X0, X1, ... by first occurrence, every
              occurrence annotated with its type (parseable, round-trips)
    hashing:  fully parenthesized prefix form, injective up to alpha- and
              type-variable renaming (see docs/grammar.md)
    """
    if mode not in VAR_MODES:
        raise ValueError(f"unknown variable mode {mode!r}")
    table = table or _default_table()
    if mode == "hashing":
        return _hashing_print(t)
    if mode == "diff":
        names: dict = {}
        order = free_vars(t)
        for v in order:
            names[v] = f"X{len(names)}"
        return _surface_print(t, mode, table, names)
    return _surface_print(t, mode, table, {})


_DEFAULT_TABLE = None


def _default_table() -> SymbolTable:
    global _DEFAULT_TABLE
    if _DEFAULT_TABLE is None:
        _DEFAULT_TABLE = basic_table().freeze()
    return _DEFAULT_TABLE


def _render_var(v: Var, mode: str, names: dict) -> str:
    if mode == "standard":
        return "A" + print_type(normalize_type(v.ty))
    if mode == "same":
        return "A"
    # diff
    return f"({names[v]}:{print_type(v.ty, quoted_vars=True)})"


def _surface_print(t: TermExpr, mode: str, table: SymbolTable, names: dict) -> str:
    def bind(v: Var) -> str:
        if mode == "diff":
            nm = f"X{len(names)}"
            names[v] = nm
            return f"({nm}:{print_type(v.ty, quoted_vars=True)})"
        return _render_var(v, mode, names)

    def pr(u: TermExpr, prec: int) -> str:
        n = dest_real_literal(u)
        if n is not None:
            return f"&{n}"
        n = dest_num_literal(u)
        if n is not None:
            return str(n)
        if isinstance(u, Var):
            return _render_var(u, mode, names)
        if isinstance(u, Const):
            return table.print_name(u.name)
        if isinstance(u, Abs):
            s = f"\\{bind(u.var)}. {pr(u.body, 0)}"
            return f"({s})" if prec > 0 else s
        head, args = strip_app(u)
        if isinstance(head, Const):
            if head.name in QUANTIFIERS and len(args) == 1 and isinstance(args[0], Abs):
                ab = args[0]
                s = f"{head.name}{bind(ab.var)}. {pr(ab.body, 0)}"
                return f"({s})" if prec > 0 else s
            if head.name == "~" and len(args) == 1:
                s = f"~{pr(args[0], NEG_PREC + 1)}"
                return f"({s})" if prec > NEG_PREC else s
            fx = table.infix_of(head.name)
            if fx is not None and len(args) == 2:
                tok, p, assoc = fx
                lp = p if assoc == "l" else p + 1
                rp = p + 1 if assoc == "l" else p
                s = f"{pr(args[0], lp)} {tok} {pr(args[1], rp)}"
                return f"({s})" if prec > p else s
        parts = [pr(head, APP_PREC + 1) if isinstance(head, Abs) else pr(head, APP_PREC)]
        for a in args:
            if isinstance(a, (App, Abs)) and dest_real_literal(a) is None \
                    and dest_num_literal(a) is None:
                sa = f"({pr(a, 0)})"
            else:
                sa = pr(a, APP_PREC + 1)
            parts.append(sa)
        s = " ".join(parts)
        return f"({s})" if prec > APP_PREC else s

    return pr(t, 0)


def _escape_name(name: str) -> str:
    return name.replace("\\", "\\\\").replace("(", "\\(").replace(")", "\\)").replace(":", "\\:")


def _hashing_print(t: TermExpr) -> str:
    tyren: dict = {}

    def ty(x: TypeExpr) -> str:
        if isinstance(x, TyVar):
            if x.name not in tyren:
                tyren[x.name] = "'" + _norm_name(len(tyren))
            return tyren[x.name]
        if not x.args:
            return _escape_name(x.name)
        return _escape_name(x.name) + "(" + ",".join(ty(a) for a in x.args) + ")"

    freeren: dict = {}

    def go(u: TermExpr, bound: dict, depth: int) -> str:
        if isinstance(u, Var):
            if u in bound:
                return f"(V{bound[u]}:{ty(u.ty)})"
            if u not in freeren:
                freeren[u] = len(freeren)
            return f"(F{freeren[u]}:{ty(u.ty)})"
        if isinstance(u, Const):
            return f"(C {_escape_name(u.name)}:{ty(u.ty)})"
        if isinstance(u, Abs):
            b2 = dict(bound)
            b2[u.var] = depth
            return f"(L (V{depth}:{ty(u.var.ty)}) {go(u.body, b2, depth + 1)})"
        return f"(@ {go(u.fn, bound, depth)} {go(u.arg, bound, depth)})"

    return go(t, {}, 0)
