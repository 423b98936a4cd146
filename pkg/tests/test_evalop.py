import random
from collections import Counter
from dataclasses import replace

import pytest
from hypothesis import given, settings, strategies as st

from lfpl import evalop as op
from lfpl.corpus import load_entries
from lfpl.gen import TermGen
from lfpl.syntax import DIAMOND, UNIT, UNIT_LIST, Null, Sum, parse_term, parse_type
from lfpl.typecheck import check, check_closed


def applied(label):
    (e,) = [x for x in load_entries() if x.label == label]
    return e.applied()


def test_null_costs_c_null():
    r = op.evaluate((), check_closed(Null(), UNIT), op.CostModel(c_null=7))
    assert (r.value, r.cost) == (op.NULL_V, 7)


def test_reverse_charges_match_hand_replay():
    # outer app + two apps in reverse + one app per step: 6; closures: rev, revAppend,
    # nil case, three steps: 6; variables: x, l1, l1, three unrollings, 4 per step, l2: 19
    _, tt = applied("reverse:reverse")
    r = op.evaluate({"arg0": op.unit_list(3)}, tt)
    assert r.charges == Counter(c_app=6, c_lam=6, c_var=19, c_nil=1, c_rec=4, c_cons=3)
    assert r.cost == 39
    ex = op.evaluate({"arg0": op.unit_list(3)}, tt, op.CostModel.example_costs())
    assert ex.cost == 10 == 2 * 3 + 4


def test_reverse_reverses():
    _, tt = applied("reverse_bool:reverse")
    t, f = op.InjV(1, op.NULL_V), op.InjV(2, op.NULL_V)
    r = op.evaluate({"arg0": op.list_value([t, t, f])}, tt)
    assert op.list_items(r.value) == [f, t, t]


def test_cost_is_sum_of_charges():
    cm = op.CostModel(**{n: i + 1 for i, n in enumerate(op.CostModel.names())})
    for s in (TermGen(random.Random(i)).sample() for i in range(100)):
        r = op.evaluate(s.env, s.typed, cm)
        assert r.cost == sum(getattr(cm, k) * v for k, v in r.charges.items())


def test_rec_and_trec_unrolling_charges():
    ctx = [("t", parse_type("T(1)"))]
    tt = check(ctx, parse_term("trec t | leaf => <> | node (d, x, l, r) => x"), UNIT)
    tree = op.parse_value("node(<>, node(<>, leaf, leaf), leaf)")
    cm = replace(op.CostModel.uniform(0), c_var=1, c_trec=1)
    r = op.evaluate({"t": tree}, tt, cm)
    # one unrolling per node and per leaf, as with rec on lists
    assert r.charges["c_trec"] == 2 + 3
    assert r.cost == r.charges["c_trec"] + r.charges["c_var"]


@pytest.mark.parametrize("v, n", [
    (op.DIAMOND_V, 1),
    (op.ConsV(op.NULL_V, op.NIL_V), 1),
    (op.PushV(op.DIAMOND_V, op.EMPTY_V), 1),
    (op.NodeV(op.NULL_V, op.LEAF_V, op.LEAF_V), 1),
    (op.list_value([op.DIAMOND_V] * 3), 6),
    (op.PairV(op.unit_list(2), op.DIAMOND_V), 3),
])
def test_size_examples(v, n):
    assert op.size(v) == n


def test_closure_size_counts_captured_env():
    tt = check([("l", UNIT_LIST)], parse_term("lam u . l"), parse_type("1 -o L(1)"))
    r = op.evaluate({"l": op.unit_list(4)}, tt)
    assert isinstance(r.value, op.LamV) and op.size(r.value) == 4


def test_fuel_exhaustion_is_distinct():
    _, tt = applied("reverse:reverse")
    with pytest.raises(op.FuelExhausted):
        op.evaluate({"arg0": op.unit_list(50)}, tt, fuel=20)


def test_fuel_from_environment(monkeypatch):
    monkeypatch.setenv("LFPL_FUEL", "123")
    assert op.default_fuel() == 123


def test_right_to_left_lookup():
    assert op.env_lookup((("x", op.NULL_V), ("x", op.DIAMOND_V)), "x") == op.DIAMOND_V


def test_env_restricted_to_judgement():
    tt = check([("x", UNIT), ("y", UNIT_LIST)], parse_term("x"), UNIT)
    assert op.restrict({"x": op.NULL_V, "y": op.unit_list(3)}, tt) == (("x", op.NULL_V),)
    assert op.check_nsi({"x": op.NULL_V, "y": op.unit_list(3)}, tt)


def test_cost_model_file_and_presets():
    cm = op.CostModel.from_text("rec = 3\nc_app = 2  # comment\n")
    assert (cm.c_rec, cm.c_app, cm.c_var) == (3, 2, 1)
    assert op.CostModel.preset("paper-example") == op.CostModel.example_costs()
    with pytest.raises(ValueError):
        op.CostModel.from_text("c_bogus = 1")
    with pytest.raises(ValueError):
        op.CostModel.from_text("c_rec = -1")


@pytest.mark.parametrize("text", [
    "<>", "inj1 <>", "inj2 (<>, <>)", "[<>, <>]", "stack[inj1 <>]", "leaf",
    "node(<>, leaf, node(<>, leaf, leaf))", "[diamond, diamond]", "([], [inj2 <>])",
])
def test_value_literal_roundtrip(text):
    v = op.parse_value(text)
    assert op.parse_value(op.show_value(v)) == v


@pytest.mark.parametrize("text", ["diamond", "(diamond, <>)", "[<>", "node(<>, <>, leaf)", "x"])
def test_value_literal_errors(text):
    with pytest.raises(op.ValueSyntaxError):
        op.parse_value(text)


def test_value_typing():
    assert op.has_type(op.parse_value("[inj1 <>, inj2 <>]"), parse_type("L(1 + 1)"))
    assert not op.has_type(op.parse_value("[inj1 <>, <>]"), parse_type("L(1 + 1)"))
    assert op.has_type(op.parse_value("[diamond]"), parse_type("L(diam)"))


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 10**6))
def test_generated_terms_preserve_types_and_size(seed):
    s = TermGen(random.Random(seed)).sample()
    r = op.evaluate(s.env, s.typed)
    assert op.has_type(r.value, s.typed.type)
    assert op.size(r.value) <= op.size_env(op.restrict(s.env, s.typed))
    again = op.evaluate(tuple(reversed(s.env)), s.typed)
    assert (again.value, again.cost) == (r.value, r.cost)
