import pytest
from hypothesis import given, strategies as st

from hammer.parser import (
    ParseError, TypeError_, UnknownSymbol, parse_term, parse_type, tokenize,
)
from hammer.terms import (
    BOOL, REAL, App, Const, TyApp, Var, basic_table, canonical_print,
    check_term, type_of,
)


def test_tokenize_maximal_munch():
    toks = [t.text for t in tokenize("a<=>b==>c<=d") if t.kind != "eof"]
    assert toks == ["a", "<=>", "b", "==>", "c", "<=", "d"]


def test_parse_infix_precedence():
    tbl = basic_table()
    t = parse_term("a + b * c = a", tbl)
    lhs = t.fn.arg  # a + (b * c): top of the left side is the +
    assert lhs.fn.fn.name in ("real_add", "add")
    inner = lhs.arg
    assert inner.fn.fn.name in ("real_mul", "mul")


def test_parse_binders_with_type_annotations():
    tbl = basic_table()
    t = parse_term("!x:real y. x + y = y + x", tbl)
    check_term(t)
    assert type_of(t) == BOOL


def test_paper_query_syntax_parses():
    tbl = basic_table()
    t = parse_term(
        "!A B (C:A->bool). ((A DIFF B) INTER C = EMPTY) <=>"
        " ((A INTER C) SUBSET B)", tbl)
    check_term(t)


def test_real_literal():
    tbl = basic_table()
    t = parse_term("&0 < x", tbl)
    check_term(t)
    head = t.fn.arg  # &0
    assert isinstance(head.fn, Const) and head.fn.name == "real_of_num"


def test_overload_resolution_prefers_typechecking_candidate():
    tbl = basic_table()
    # norm's argument is a vector, so - must elaborate to vector_sub
    t = parse_term("norm (y - x) < e", tbl)
    sub = t.fn.arg.arg.fn.fn
    assert isinstance(sub, Const) and sub.name == "vector_sub"


def test_num_overload():
    tbl = basic_table()
    t = parse_term("!n. n + 0 = n", tbl)
    add = t.arg.body.fn.arg.fn.fn
    assert add.name == "add"


def test_unknown_identifier_is_free_variable():
    tbl = basic_table()
    t = parse_term("frobnicate = frobnicate", tbl)
    assert isinstance(t.fn.arg, Var)


def test_parse_error_reports_position():
    with pytest.raises(ParseError) as ei:
        parse_term("!x. x = ", basic_table())
    assert ei.value.pos is not None


def test_type_error_on_connective_misuse():
    with pytest.raises(TypeError_):
        parse_term("(&1) ==> T", basic_table())


def test_trailing_garbage_rejected():
    with pytest.raises(ParseError):
        parse_term("T )", basic_table())


def test_expect_type_none_allows_non_bool():
    t = parse_term("&1 + &2", basic_table(), expect=None)
    assert type_of(t) == REAL


@given(st.text(alphabet="!?~()=<>/\\&+-*. abcxyz01", max_size=40))
def test_parser_never_crashes_unstructured(text):
    try:
        parse_term(text, basic_table())
    except (ParseError, TypeError_, UnknownSymbol):
        pass


def test_roundtrip_through_diff_print():
    tbl = basic_table()
    cases = [
        "!n. n + 0 = n",
        "!s e. &0 < e /\\ (!x y. x IN s /\\ y IN s ==> y = x) ==> closed s",
        "?x. x + &1 = &2",
        "~(T /\\ F)",
        "(!n. n <= n) \\/ F",
    ]
    for s in cases:
        t = parse_term(s, tbl)
        printed = canonical_print(t, "diff", tbl)
        t2 = parse_term(printed, tbl)
        assert canonical_print(t2, "diff", tbl) == printed
