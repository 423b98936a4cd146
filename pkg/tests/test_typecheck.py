import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from lfpl.evalden import InjD, PairD, STAR, den_apply, den_eval
from lfpl.complete.encode import inhabitants
from lfpl.gen import TermGen
from lfpl.syntax import (
    DIAMOND, UNIT, UNIT_LIST, Annot, Arrow, Case, Cons, List, Nil, Null, Pair, Sum, Tensor,
    Var, children, is_diamond_free, parse_program, parse_term, parse_type,
)
from lfpl.typecheck import LfplTypeError, TypedTerm, check, check_closed, gen_dup, infer_usage

from conftest import load
from oracle_typing import derivable, enumerate_terms

BOOL = Sum(UNIT, UNIT)


def kind_of(ctx, src, ty=None):
    with pytest.raises(LfplTypeError) as e:
        check(ctx, parse_term(src), parse_type(ty) if ty else None)
    return e.value.kind


def test_reverse_and_susp_check(reverse_prog):
    check((), reverse_prog.term("reverse"), Arrow(UNIT_LIST, UNIT_LIST))
    susp = load("susp.lfpl")
    t = parse_type("L(1 + 1) -o (L(1) -o L(1 + 1)) * L(1)")
    assert susp.type("susp") == t
    check((), susp.term("susp"), t)


def test_reused_diamond():
    assert kind_of([("x", DIAMOND)], "cons (x, <>, cons (x, <>, nil))", "L(1)") == "variable reused"


@pytest.mark.parametrize("ctx, src, ty, kind", [
    ([], "x", "1", "unbound variable"),
    ([("x", UNIT)], "inj1 x", "1", "type mismatch"),
    ([("l", UNIT_LIST), ("e", DIAMOND)],
     "rec l | nil => nil | cons (d, h, t) => cons (e, h, t)", "L(1)", "forbidden capture"),
    ([("x", UNIT)], "lam x . x", "1 -o 1", "shadowing"),
    ([("p", Tensor(UNIT, UNIT))], "letp (a, a) = p in a", "1", "shadowing"),
    ([], "lam x . x", None, "cannot infer"),
    ([("f", Arrow(UNIT, UNIT))], "f (<>, <>)", "1", "type mismatch"),
])
def test_error_kinds(ctx, src, ty, kind):
    assert kind_of(ctx, src, ty) == kind


def test_trec_leaf_case_is_closed():
    ctx = [("t", parse_type("T(1)")), ("z", UNIT)]
    assert kind_of(ctx, "trec t | leaf => z | node (d, x, l, r) => x", "1") == "forbidden capture"


def test_binder_may_reuse_a_consumed_name():
    # x is spent by the first component, so rebinding it later is harmless
    ctx = [("x", UNIT), ("p", Tensor(UNIT, UNIT))]
    check(ctx, parse_term("(x, letp (x, y) = p in (x, y))"), Tensor(UNIT, Tensor(UNIT, UNIT)))


def test_error_location_from_program():
    prog_src = (load.__globals__["CORPUS_DIR"] / "bad_dup_diamond.lfpl").read_text()
    prog = parse_program(prog_src)
    d = prog.defs["dup_cons"]
    with pytest.raises(LfplTypeError) as e:
        check((), d.term, d.type, prog.positions)
    assert e.value.location == (4, 47)


def test_infer_usage_examples():
    a, b = UNIT, BOOL
    assert infer_usage([("x", a), ("y", b)], Var("x")) == {"x"}
    assert infer_usage([("x", a), ("y", b)], Pair(Var("x"), Var("y"))) == {"x", "y"}
    t = Case(Var("s"), "a", Var("a"), "b", Var("b"))
    assert infer_usage([("s", Sum(a, a))], t) == {"s"}


def test_branch_contexts_share_union():
    ctx = [("s", BOOL), ("x", UNIT), ("y", UNIT)]
    tt = check(ctx, parse_term("case s | inj1 u => x | inj2 v => y"), UNIT)
    assert tt.ctx_names() == ("s", "x", "y")
    left, right = tt.subs[1], tt.subs[2]
    assert left.ctx_names() == ("x", "y", "u")
    assert right.ctx_names() == ("x", "y", "v")


def test_rec_step_context_is_exactly_its_binders(reverse_prog):
    tt = check((), reverse_prog.term("revAppend"), reverse_prog.type("revAppend"))
    rec = tt.subs[0]
    step = rec.subs[2]
    assert step.ctx_names() == ("d", "x", "r")


def _nodes(tt: TypedTerm):
    yield tt
    for s in tt.subs:
        yield from _nodes(s)


def test_partitions_are_disjoint_outside_branches():
    for s in (TermGen(random.Random(i)).sample() for i in range(200)):
        for node in _nodes(s.typed):
            names = node.ctx_names()
            assert len(set(names)) == len(names)


@pytest.mark.parametrize("a", [UNIT, BOOL, Tensor(UNIT, BOOL), Sum(BOOL, Tensor(BOOL, UNIT))])
def test_gen_dup(a):
    tt = check_closed(gen_dup(a), Arrow(a, Tensor(a, a)))
    f = den_eval(tt)
    for v in inhabitants(a):
        assert den_apply(f, v) == PairD(v, v)


def small_diamond_free_types(max_size):
    out = {1: [UNIT]}
    for n in range(2, max_size + 1):
        out[n] = []
        for k in range(1, n - 1 + 1):
            for l in out.get(k, []):
                for r in out.get(n - 1 - k, []):
                    out[n] += [Sum(l, r), Tensor(l, r)]
    return [t for v in out.values() for t in v]


def test_gen_dup_exhaustive_up_to_size_5():
    for a in small_diamond_free_types(5):
        assert is_diamond_free(a)
        f = den_eval(check_closed(gen_dup(a), Arrow(a, Tensor(a, a))))
        for v in inhabitants(a):
            assert den_apply(f, v) == PairD(v, v)


def test_gen_dup_rejects_diamonds():
    with pytest.raises(ValueError):
        gen_dup(UNIT_LIST)


def test_check_is_deterministic(reverse_prog):
    t = reverse_prog.term("reverse")
    assert check((), t, reverse_prog.type("reverse")) == check((), t, reverse_prog.type("reverse"))


# ------------------------------------------------------------ declarative oracle

CTX = {"x": UNIT, "s": BOOL, "d": DIAMOND, "e": DIAMOND, "l": UNIT_LIST, "p": Tensor(DIAMOND, UNIT)}
TARGETS = [UNIT, BOOL, UNIT_LIST, Tensor(UNIT, UNIT), Tensor(DIAMOND, UNIT), DIAMOND]


def _checker_accepts(t, a):
    try:
        check(tuple(CTX.items()), t, a)
        return True
    except LfplTypeError as e:
        assert e.kind != "cannot infer"
        return False


def test_checker_agrees_with_bipartition_oracle():
    """Exhaustive up to 6 nodes, a seeded 15% sample at 7 nodes."""
    scope = tuple(CTX)
    rng = random.Random(7)
    total = 0
    for size in range(1, 8):
        for t in enumerate_terms(size, scope, CTX):
            if size == 7 and rng.random() > 0.15:
                continue
            for a in TARGETS:
                want = derivable(CTX, t, a)
                got = _checker_accepts(t, a)
                total += 1
                assert got == want, (t, a)
                if got:
                    used = infer_usage(tuple(CTX.items()), t, a)
                    only = {n: CTX[n] for n in used}
                    assert derivable(only, t, a)
    assert total > 10_000


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10**6))
def test_generated_terms_check_and_use_their_context(seed):
    s = TermGen(random.Random(seed)).sample()
    assert s.typed.type is not None
    names = dict(s.ctx)
    assert set(s.typed.ctx_names()) <= set(names)
