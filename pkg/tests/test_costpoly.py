import random

import pytest
from hypothesis import given, settings, strategies as st

from lfpl import evalop as op
from lfpl.corpus import load_entries
from lfpl.costpoly import (
    CostPoly, PolySynth, env_poly, parse_poly, poly_add, poly_compose, poly_eval, poly_max,
    poly_mul, poly_scale, poly_shift_mul_n, show_poly, term_poly, value_poly, verify_bound,
)
from lfpl.gen import TermGen
from lfpl.syntax import UNIT, Null, Var, parse_term, parse_type
from lfpl.typecheck import check, check_closed

polys = st.lists(st.integers(0, 50), max_size=5).map(CostPoly)
ns = st.integers(0, 40)


def test_examples():
    assert poly_max(CostPoly([3, 1]), CostPoly([0, 2])) == CostPoly([3, 2])
    assert poly_add(CostPoly([1, 2]), CostPoly()) == CostPoly([1, 2])
    assert poly_eval(CostPoly([4, 2]), 3) == 10
    assert CostPoly([1, 0, 0]) == CostPoly([1])
    assert show_poly(CostPoly([4, 2])) == "4 + 2*n"
    assert show_poly(CostPoly([0, 0, 1])) == "1*n^2"
    assert show_poly(CostPoly()) == "0"
    assert poly_eval(CostPoly([0, 0, 0, 1]), 10**6) == 10**18


@given(polys, polys, ns)
def test_arithmetic_is_pointwise(p, q, n):
    assert poly_eval(poly_add(p, q), n) == poly_eval(p, n) + poly_eval(q, n)
    assert poly_eval(poly_mul(p, q), n) == poly_eval(p, n) * poly_eval(q, n)
    assert poly_eval(poly_compose(p, q), n) == poly_eval(p, poly_eval(q, n))
    assert poly_eval(poly_shift_mul_n(p), n) == n * poly_eval(p, n)
    assert poly_eval(poly_scale(3, p), n) == 3 * poly_eval(p, n)
    assert max(poly_eval(p, n), poly_eval(q, n)) <= poly_eval(poly_max(p, q), n)


@given(polys, ns)
def test_monotone_and_canonical(p, n):
    assert poly_eval(p, n) <= poly_eval(p, n + 1)
    assert not p or p[-1] != 0
    assert parse_poly(show_poly(p)) == p


def test_var_and_null_polys():
    cm = op.CostModel(c_var=5, c_null=3)
    assert term_poly(check([("x", UNIT)], Var("x")), cm) == CostPoly([5])
    assert term_poly(check_closed(Null(), UNIT), cm) == CostPoly([3])


def test_reverse_poly_under_example_costs():
    (e,) = [x for x in load_entries() if x.label == "reverse:reverse"]
    _, tt = e.applied()
    assert show_poly(term_poly(tt, op.CostModel.example_costs())) == "4 + 2*n"
    rep = verify_bound({"arg0": op.unit_list(0)}, tt, op.CostModel.example_costs(), range(0, 11))
    assert rep.ok
    costs = [op.evaluate({"arg0": op.unit_list(n)}, tt, op.CostModel.example_costs()).cost
             for n in range(1, 11)]
    slopes = {b - a for a, b in zip(costs, costs[1:])}
    assert slopes == {2}


def test_value_polys():
    assert value_poly(op.DIAMOND_V) == CostPoly()
    assert value_poly(op.parse_value("[inj1 <>, inj2 <>]")) == CostPoly()
    tt = check([("l", parse_type("L(1)"))], parse_term("lam u . l"), parse_type("1 -o L(1)"))
    clo = op.evaluate({"l": op.unit_list(2)}, tt).value
    ps = PolySynth(op.CostModel())
    assert value_poly(clo) == poly_add(env_poly(clo.env), ps.term(clo.body))


def test_tight_null():
    rep = verify_bound((), check_closed(Null(), UNIT), op.CostModel(), range(0, 1))
    assert rep.rows[0].slack == 0


def test_verify_rejects_small_n():
    (e,) = [x for x in load_entries() if x.label == "reverse:reverse"]
    _, tt = e.applied()
    with pytest.raises(ValueError):
        verify_bound({"arg0": op.unit_list(3)}, tt, op.CostModel(), range(0, 2))


def test_report_tsv_columns():
    rep = verify_bound((), check_closed(Null(), UNIT))
    assert rep.tsv().splitlines()[0].split("\t") == [
        "n", "cost", "value_poly", "term_poly", "env_poly", "slack"]


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 10**6), st.sampled_from(["default", "paper-example", "zero"]))
def test_soundness_on_generated_terms(seed, preset):
    s = TermGen(random.Random(seed)).sample()
    assert verify_bound(s.env, s.typed, op.CostModel.preset(preset)).ok
