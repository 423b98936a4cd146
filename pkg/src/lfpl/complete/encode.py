"""Finite data as closed terms, and unary division by a constant."""

from __future__ import annotations

import itertools
from typing import Callable, Mapping

from ..evalden import DenValue, InjD, PairD, STAR
from ..syntax import (
    Arrow, Case, Inj, Lam, LetPair, Null, Pair, Sum, Tensor, Term, Type, Unit,
    UNIT_LIST, Var, is_diamond_free, show_type,
)
from .build import Closed, fin, fin_case, fin_term, lfpl, mt, ty
from .stdlib import lunfold
from ..syntax import UNIT


def inhabitants(a: Type) -> list[DenValue]:
    """All elements of a diamond-free type, in a fixed order."""
    if isinstance(a, Unit):
        return [STAR]
    if isinstance(a, Sum):
        return ([InjD(1, v) for v in inhabitants(a.left)]
                + [InjD(2, v) for v in inhabitants(a.right)])
    if isinstance(a, Tensor):
        return [PairD(x, y) for x, y in itertools.product(inhabitants(a.left), inhabitants(a.right))]
    raise ValueError(f"{show_type(a)} is not diamond-free")


def value_term(a: Type, v: DenValue) -> Term:
    if isinstance(a, Unit):
        return Null()
    if isinstance(a, Sum):
        return Inj(v.index, value_term(a.left if v.index == 1 else a.right, v.value))
    if isinstance(a, Tensor):
        return Pair(value_term(a.left, v.left), value_term(a.right, v.right))
    raise ValueError(f"{show_type(a)} is not diamond-free")


def encode_value(a: Type, v: DenValue) -> Closed:
    """Closed term denoting ``v``."""
    if not is_diamond_free(a):
        raise ValueError(f"{show_type(a)} is not diamond-free")
    c = Closed("value", value_term(a, v), a)
    c.typed
    return c


def _decide(a: Type, x: str, leaf: Callable[[DenValue], Term], depth: list) -> Term:
    """Decision tree on variable ``x`` of type ``a``; ``leaf`` builds each outcome."""
    depth[0] += 1
    tag = depth[0]
    if isinstance(a, Unit):
        return leaf(STAR)
    if isinstance(a, Sum):
        y = f"y{tag}"
        return Case(Var(x), y, _decide(a.left, y, lambda v: leaf(InjD(1, v)), depth),
                    y, _decide(a.right, y, lambda v: leaf(InjD(2, v)), depth))
    if isinstance(a, Tensor):
        p, q = f"p{tag}", f"q{tag}"
        return LetPair(Var(x), p, q, _decide(
            a.left, p, lambda v: _decide(a.right, q, lambda w: leaf(PairD(v, w)), depth), depth))
    raise ValueError(f"{show_type(a)} is not diamond-free")


def encode_function(a: Type, b: Type, f: Callable[[DenValue], DenValue] | Mapping) -> Closed:
    """Closed ``a -o b`` agreeing with ``f`` on every inhabitant of ``a``."""
    if not is_diamond_free(a):
        raise ValueError(f"{show_type(a)} is not diamond-free")
    if not is_diamond_free(b):
        raise ValueError(f"{show_type(b)} is not diamond-free")
    table = f if isinstance(f, Mapping) else None
    fn = (lambda v: table[v]) if table is not None else f
    body = _decide(a, "x", lambda v: value_term(b, fn(v)), [0])
    c = Closed("table", Lam("x", body), Arrow(a, b))
    c.typed
    return c


# ---------------------------------------------------------------- divmod


def divmod_term(k: int) -> Closed:
    """``L(1) -o (L(1))^(k+1) * L(1)``: n diamonds into k+1 lists of n div (k+1) and a remainder."""
    lists = [f"a{i}" for i in range(k + 1)]
    out_t = Tensor(mt(k + 1), UNIT_LIST)
    acc_t = Tensor(mt(k + 1), Tensor(UNIT_LIST, fin(k + 1)))
    nils = "(" + ", ".join(["nil"] * (k + 1)) + ")" if k else "nil"
    tup = "(" + ", ".join(lists) + ")" if k else lists[0]

    # phase j < k: park the diamond in the remainder list
    def park(j: int) -> str:
        return f"(ms, (cons (d, <>, rm), {fin_term(k + 1, j + 1)}))"

    # phase k: the remainder holds k diamonds; hand one to each list
    def spread() -> str:
        fallback = f"((cons (d, <>, a0), {', '.join(lists[1:])}), (nil, {fin_term(k + 1, 0)}))" if k \
            else f"(cons (d, <>, a0), (nil, {fin_term(1, 0)}))"
        body = ("((" + ", ".join(["cons (d, <>, a0)"] + [f"cons (e{i}, <>, a{i})" for i in range(1, k + 1)])
                + f"), (nil, {fin_term(k + 1, 0)}))") if k else fallback
        for i in range(k, 0, -1):
            src = "rm" if i == 1 else f"r{i - 1}"
            body = (f"(case lunfold {src} | inj1 _ => {fallback}"
                    f" | inj2 (e{i}, _, r{i}) => {body})")
        return f"letp {tup} = ms in {body}" if k else f"letp (a0, u0) = (ms, <>) in {body}"

    bodies = [park(j) for j in range(k)] + [spread()]
    src = f"""
        lam x . letp (ms, q) = (rec x
          | nil => ({nils}, (nil, {fin_term(k + 1, 0)}))
          | cons (d, _, acc) => letp (ms, q) = acc in letp (rm, ph) = q in
              {fin_case(k + 1, "ph", bodies)}
          : {ty(acc_t)}) in
        letp (rm, ph) = q in (ms, rm)"""
    return lfpl(f"divmod{k}", src, Arrow(UNIT_LIST, out_t), lunfold=lunfold(UNIT))
