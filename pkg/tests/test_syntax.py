import pytest
from hypothesis import given, settings, strategies as st

from lfpl.syntax import (
    DIAMOND, UNIT, UNIT_LIST, Annot, App, Arrow, Case, Cons, Diamond, Lam, LetPair, List, Unit,
    LfplSyntaxError, Nil, Null, Pair, Prod, Rec, Record, Stack, Sum, Tensor, Tree, Var,
    free_vars, is_diamond_free, parse_program, parse_term, parse_type, show_term, show_type,
)
from lfpl.gen import TermGen, GenConfig
import random

BOOL = Sum(UNIT, UNIT)


# ---------------------------------------------------------------- types

@pytest.mark.parametrize("text, expected", [
    ("L(1) -o L(1)", Arrow(UNIT_LIST, UNIT_LIST)),
    ("1", UNIT),
    ("(L(1) -o L(1 + 1)) * L(1)", Tensor(Arrow(UNIT_LIST, List(BOOL)), UNIT_LIST)),
    ("diam", DIAMOND),
    ("◆", DIAMOND),
    ("L(1) -o L(1) -o L(1)", Arrow(UNIT_LIST, Arrow(UNIT_LIST, UNIT_LIST))),
    ("1 + 1 + 1", Sum(UNIT, Sum(UNIT, UNIT))),
    ("1 * 1 * 1", Tensor(UNIT, Tensor(UNIT, UNIT))),
    ("1 & L(1)", Prod(UNIT, UNIT_LIST)),
    ("S(1) -o T(diam)", Arrow(Stack(UNIT), Tree(DIAMOND))),
    ("1 + diam * 1 * L(1)", Sum(UNIT, Tensor(DIAMOND, Tensor(UNIT, UNIT_LIST)))),
])
def test_parse_type_examples(text, expected):
    assert parse_type(text) == expected


def test_type_printer_is_minimal():
    assert show_type(Arrow(Arrow(UNIT, UNIT), UNIT)) == "(1 -o 1) -o 1"
    assert show_type(Tensor(Sum(UNIT, UNIT), UNIT)) == "(1 + 1) * 1"
    assert show_type(Sum(UNIT, Tensor(UNIT, UNIT))) == "1 + 1 * 1"


@pytest.mark.parametrize("text", ["L(1", "1 -o", "!1", "X", "L(1) L(1)"])
def test_parse_type_errors_have_location(text):
    with pytest.raises(LfplSyntaxError) as e:
        parse_type(text)
    assert e.value.line == 1 and e.value.col >= 1


@pytest.mark.parametrize("a, expected", [
    (UNIT, True), (DIAMOND, False), (Sum(UNIT, Tensor(UNIT, UNIT)), True),
    (UNIT_LIST, False), (Arrow(UNIT, UNIT), False), (Sum(UNIT, DIAMOND), False),
    (Prod(UNIT, UNIT), False), (Stack(UNIT), False),
])
def test_diamond_free_examples(a, expected):
    assert is_diamond_free(a) is expected


def types(depth=3):
    leaf = st.sampled_from([UNIT, DIAMOND])
    return st.recursive(leaf, lambda s: st.one_of(
        st.builds(Sum, s, s), st.builds(Tensor, s, s), st.builds(Arrow, s, s),
        st.builds(Prod, s, s), st.builds(List, s), st.builds(Stack, s), st.builds(Tree, s)),
        max_leaves=8)


@given(types())
def test_type_roundtrip(a):
    assert parse_type(show_type(a)) == a


@given(types())
def test_diamond_free_is_compositional(a):
    if isinstance(a, (Sum, Tensor)):
        assert is_diamond_free(a) == (is_diamond_free(a.left) and is_diamond_free(a.right))
    elif isinstance(a, Unit):
        assert is_diamond_free(a)
    else:
        assert not is_diamond_free(a)


# ---------------------------------------------------------------- terms

REVERSE_SRC = """
revAppend : L(1) -o L(1) -o L(1)
revAppend = lam l1 . rec l1
| nil => lam l2 . l2
| cons (d, x, r) => lam l2 . r (cons (d, x, l2))

reverse : L(1) -o L(1)
reverse = lam l1 . revAppend l1 nil
"""


def test_reverse_listing_abstract_syntax():
    prog = parse_program(REVERSE_SRC)
    ra = prog.term("revAppend")
    assert ra == Lam("l1", Rec(Var("l1"), Lam("l2", Var("l2")), "d", "x", "r",
                               Lam("l2", App(Var("r"), Cons(Var("d"), Var("x"), Var("l2"))))))
    rev = prog.term("reverse")
    assert rev == Lam("l1", App(App(Annot(ra, prog.type("revAppend")), Var("l1")), Nil()))


@pytest.mark.parametrize("text, expected", [
    ("lam x . x", Lam("x", Var("x"))),
    ("<>", Null()),
    ("f x y", App(App(Var("f"), Var("x")), Var("y"))),
    ("(a, b, c)", Pair(Var("a"), Pair(Var("b"), Var("c")))),
    ("{a, b}", Record(Var("a"), Var("b"))),
    ("case s | inj1 a => a | inj2 b => b", Case(Var("s"), "a", Var("a"), "b", Var("b"))),
])
def test_parse_term_examples(text, expected):
    assert parse_term(text) == expected


def test_tuple_patterns_desugar_to_letp():
    t = parse_term("lam (x, y) . (y, x)")
    assert isinstance(t, Lam) and isinstance(t.body, LetPair)
    assert t.body.scrut == Var(t.var)
    assert (t.body.left_var, t.body.right_var) == ("x", "y")


def test_free_vars():
    assert free_vars(parse_term("lam x . f x (y, x)")) == {"f", "y"}


def test_program_errors():
    with pytest.raises(LfplSyntaxError, match="needs a type signature"):
        parse_program("f = <>\n")
    with pytest.raises(LfplSyntaxError, match="unexpected character '!'"):
        parse_program("f : !1 -o 1\nf = lam x . x\n")
    with pytest.raises(LfplSyntaxError, match="duplicate definition"):
        parse_program("f : 1\nf = <>\nf = <>\n")


def test_comments_and_column_one_cases():
    prog = parse_program("-- c\nf : 1 + 1 -o 1\nf = lam b . case b\n| inj1 u => u\n| inj2 u => u\n")
    assert isinstance(prog.term("f").body, Case)


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 10**6))
def test_term_roundtrip_on_generated_terms(seed):
    g = TermGen(random.Random(seed))
    s = g.sample()
    assert parse_term(show_term(s.term)) == s.term
