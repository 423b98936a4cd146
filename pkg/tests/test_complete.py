import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from lfpl import evalop as op
from lfpl.complete import (
    TmSpecError, budget_poly, compile_tm, compile_tm_listout, counting_step, divmod_term,
    encode_function, encode_value, fin, fin_term, inhabitants, iter_poly, iter_sharp, m_den,
    m_value, parse_tm, run_listout, simulate, stack_const, stack_inductive, stack_poly, stdlib,
)
from lfpl.complete.iterate import counter_den, counter_value
from lfpl.complete.stacks import check_stack, edge_scripts, random_script
from lfpl.complete.tm import listout_run
from lfpl.corpus import CORPUS_DIR
from lfpl.costpoly import CostPoly, poly_eval
from lfpl.evalden import STAR, InjD, ListD, PairD, den_apply, unit_list_d
from lfpl.syntax import UNIT, Sum, Tensor, is_diamond_free, parse_type, show_type
from lfpl.typecheck import check_closed

BOOL = Sum(UNIT, UNIT)
T, F = InjD(1, STAR), InjD(2, STAR)


def tm(name):
    return parse_tm((CORPUS_DIR / "tm" / f"{name}.tm").read_text(), name)


def list_len(d):
    return len(d.items)


# ---- building blocks

def test_stdlib_typechecks_and_reverses():
    lib = stdlib(BOOL)
    assert set(lib) == {"revAppend", "reverse", "lfold", "lunfold", "susp"}
    for c in lib.values():
        check_closed(c.ref, c.type)
    xs = (T, F, F)
    assert den_apply(lib["reverse"].den, ListD(xs)).items == (F, F, T)


def test_fin():
    for s in range(1, 6):
        a = fin(s)
        assert len(inhabitants(a)) == s
        assert len({fin_term(s, i) for i in range(s)}) == s
    with pytest.raises(ValueError):
        fin(0)


@pytest.mark.parametrize("k, n", [(0, 0), (0, 5), (1, 7), (2, 7), (2, 0), (2, 8), (2, 9)])
def test_divmod(k, n):
    out = den_apply(divmod_term(k).den, unit_list_d(n))
    q, r = divmod(n, k + 1)
    parts, rem = out.left, out.right
    for _ in range(k):
        assert list_len(parts.left) == q
        parts = parts.right
    assert list_len(parts) == q
    assert list_len(rem) == r


def test_divmod_seven_by_three():
    out = den_apply(divmod_term(2).den, unit_list_d(7))
    assert (list_len(out.left.left), list_len(out.right)) == (2, 1)


def test_encode_value_and_function():
    a = parse_type("(1 + 1) * (1 + 1 + 1)")
    for v in inhabitants(a):
        assert encode_value(a, v).den == v
    table = {v: (InjD(2 if v.left == T else 1, STAR)) for v in inhabitants(a)}
    f = encode_function(a, BOOL, table)
    for v in inhabitants(a):
        assert den_apply(f.den, v) == table[v]
    with pytest.raises(ValueError):
        encode_function(parse_type("L(1)"), BOOL, lambda v: T)


@given(st.integers(0, 2**12 - 1))
def test_encode_function_on_random_tables(bits):
    a = Tensor(BOOL, Tensor(BOOL, BOOL))
    xs = inhabitants(a)
    table = {v: (T if (bits >> i) & 1 else F) for i, v in enumerate(xs)}
    f = encode_function(a, BOOL, table)
    assert all(den_apply(f.den, v) == table[v] for v in xs)


# ---- stacks

def test_budget_values():
    assert m_den(3, 0) == STAR
    assert m_den(2, 2) == PairD(unit_list_d(2), unit_list_d(2))
    assert op.size(m_value(3, 2)) == 6


def test_const_stack_capacity_examples():
    s = stack_const(BOOL, 2)
    assert s.capacity(0) == 2 and s.k == 0
    s1 = stack_inductive(stack_const(BOOL, 1))
    assert (s1.k, s1.capacity(3)) == (1, 3)
    p = stack_poly(BOOL, [1, 0, 1])
    assert (p.k, p.capacity(3)) == (2, 10)


@pytest.mark.parametrize("poly", [[2], [0, 1], [1, 1], [0, 0, 1]])
def test_stack_poly_edge_scripts(poly):
    impl = stack_poly(BOOL, poly)
    for n in range(4):
        for sc in edge_scripts(impl, n, [T, F]):
            assert check_stack(impl, n, sc) is None


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6), st.integers(0, 3))
def test_inductive_stack_random_scripts(seed, n):
    impl = stack_inductive(stack_const(BOOL, 2))
    sc = random_script(random.Random(seed), [T, F], 10)
    assert check_stack(impl, n, sc) is None


# ---- iterators

def test_iter_sharp_applies_n_times():
    f = counting_step(4)
    g = iter_sharp(f)
    for n in range(6):
        out = den_apply(g.den, PairD(counter_den(4, 0), unit_list_d(n)))
        assert counter_value(out.left, 4) == n
        assert out.right == unit_list_d(n)


@settings(max_examples=25, deadline=None)
@given(st.lists(st.integers(0, 2), min_size=1, max_size=3), st.integers(0, 4))
def test_iter_poly_law(p, n):
    width = 6
    it = iter_poly(counting_step(width), CostPoly(p))
    out = den_apply(it.den, PairD(counter_den(width, 0), unit_list_d(n)))
    assert counter_value(out.left, width) == poly_eval(CostPoly(p), n) % (1 << width)


# ---- Turing machines

def test_tm_parse_and_simulate():
    m = tm("bitflip")
    assert (m.states, m.alphabet, m.bound) == (["q"], ["0", "1"], CostPoly([1, 1]))
    run = simulate(m, list("011"))
    assert run.halted and run.steps == 4
    assert [a for a in run.output if a] == list("100")
    assert run_listout(m, list("011")) == list("100")


def test_tm_rejects_partial_delta():
    with pytest.raises(TmSpecError, match=r"not total: no rule for \(q,_\)"):
        tm("bad_delta")


@pytest.mark.parametrize("text", [
    "states: q\nalphabet: 0\nbound: 1\nq,0 -> q,0,X\nq,_ -> HALT,_,R",
    "states: q\nalphabet: 0\nq,0 -> q,0,L\nq,_ -> HALT,_,R",
    "states: q\nalphabet: 0\nbound: 1\nq,0 -> r,0,L\nq,_ -> HALT,_,R",
])
def test_tm_format_errors(text):
    with pytest.raises(TmSpecError):
        parse_tm(text)


def test_budget_poly_dominates():
    for p in ([0], [1, 1], [0, 0, 1], [3, 2, 1]):
        pp, k = budget_poly(p), CostPoly(p).degree
        for n in range(40):
            assert poly_eval(pp, n // (k + 1)) >= poly_eval(CostPoly(p), n) + n


@pytest.mark.parametrize("name", ["bitflip", "identity", "parity_erase", "unary_parity"])
def test_compiled_tm_agrees_with_host(name):
    m = tm(name)
    c, cl = compile_tm(m), compile_tm_listout(m)
    assert show_type(c.term.type).startswith("L(")
    for n in range(4):
        for x in itertools.product(m.alphabet, repeat=n):
            x = list(x)
            assert c.run(x) == simulate(m, x).output
            assert listout_run(cl, x) == run_listout(m, x)


def test_compiled_tm_is_a_closed_lfpl_term():
    c = compile_tm_listout(tm("bitflip"))
    src = c.term.source("bitflip")
    from lfpl.syntax import parse_program
    prog = parse_program(src)
    tt = check_closed(prog.term("bitflip"), prog.type("bitflip"))
    assert is_diamond_free(tt.type) is False
    r = op.evaluate((), tt)
    assert isinstance(r.value, op.LamV)
