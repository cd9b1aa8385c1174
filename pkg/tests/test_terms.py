import pytest
from hypothesis import given, strategies as st

from hammer.parser import parse_term, parse_type
from hammer.terms import (
    BOOL, NUM, REAL, Abs, App, Const, TyApp, TyVar, Var, alpha_equal,
    basic_table, canonical_print, check_term, dest_num_literal, free_vars,
    mk_fun, mk_num_literal, normalize_type, print_type, subterms, type_of,
)


def test_type_printing_roundtrip():
    cases = ["real", "num->bool", "(num->num)->num", "real^'n",
             "'a->'b->'a", "(real^'n->bool)->bool"]
    for s in cases:
        ty = parse_type(s)
        assert parse_type(print_type(ty, quoted_vars=True)) == ty


def test_normalize_type_renames_in_first_occurrence_order():
    ty = parse_type("'z->'y->'z")
    assert print_type(normalize_type(ty)) == "A->B->A"


def _random_types():
    base = st.sampled_from([TyApp("bool", ()), TyApp("num", ()),
                            TyVar("'x"), TyVar("'y"), TyVar("'z")])
    return st.recursive(
        base, lambda t: st.tuples(t, t).map(lambda p: mk_fun(*p)), max_leaves=12)


@given(_random_types())
def test_normalize_type_idempotent(ty):
    once = normalize_type(ty)
    assert normalize_type(once) == once


def test_type_of_and_check():
    tbl = basic_table()
    t = parse_term("!n. n + 0 = n", tbl)
    assert type_of(t) == BOOL
    check_term(t)


def test_check_term_rejects_ill_typed():
    f = Var("f", mk_fun(NUM, NUM))
    bad = App(f, Var("x", BOOL))
    with pytest.raises(Exception):
        check_term(bad)


def test_free_vars_through_binders():
    tbl = basic_table()
    t = parse_term("!x. x + y = y + x", tbl)
    assert {v.name for v in free_vars(t)} == {"y"}


def test_subterms_contains_root_and_leaves():
    tbl = basic_table()
    t = parse_term("x + y = y", tbl)
    sub = list(subterms(t))
    assert t in sub
    assert Var("y", REAL) in sub


def test_alpha_equal_modulo_bound_names():
    tbl = basic_table()
    a = parse_term("!x. x + 0 = x", tbl)
    b = parse_term("!y. y + 0 = y", tbl)
    c = parse_term("!y. 0 + y = y", tbl)
    assert alpha_equal(a, b)
    assert not alpha_equal(a, c)


def test_alpha_equal_free_variable_bijection():
    tbl = basic_table()
    a = parse_term("x + y = z", tbl)
    b = parse_term("u + v = w", tbl)
    aa = parse_term("x + x = z", tbl)
    assert alpha_equal(a, b, free_bijection=True)
    assert not alpha_equal(a, aa, free_bijection=True)


@pytest.mark.parametrize("n", [0, 1, 2, 5, 12, 255, 1024])
def test_numeral_roundtrip(n):
    assert dest_num_literal(mk_num_literal(n)) == n


def test_canonical_print_modes_differ_on_variables():
    tbl = basic_table()
    t = parse_term("x + y = y + x", tbl)
    std = canonical_print(t, "standard", tbl)
    same = canonical_print(t, "same", tbl)
    diff = canonical_print(t, "diff", tbl)
    assert "Areal" in std
    assert same.count("A") >= 2
    assert "X0" in diff and "X1" in diff


def test_hashing_print_stable_under_renaming():
    tbl = basic_table()
    a = parse_term("!x. x + y = y + x", tbl)
    b = parse_term("!q. q + w = w + q", tbl)
    assert canonical_print(a, "hashing") == canonical_print(b, "hashing")


def test_hashing_print_distinguishes_types():
    tbl = basic_table()
    a = parse_term("(x:num) = x", tbl)
    b = parse_term("(x:real) = x", tbl)
    assert canonical_print(a, "hashing") != canonical_print(b, "hashing")
