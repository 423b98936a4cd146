"""List utilities, instantiated at a concrete element type."""

from __future__ import annotations

from functools import lru_cache

from ..syntax import DIAMOND, List, Sum, Tensor, Type, UNIT, UNIT_LIST
from .build import Closed, arrow, lfpl, ty


def _la(a: Type) -> Type:
    return List(a)


@lru_cache(maxsize=None)
def rev_append(a: Type) -> Closed:
    return lfpl("revAppend", """
        lam l1 . rec l1
        | nil => lam l2 . l2
        | cons (d, x, r) => lam l2 . r (cons (d, x, l2))
    """, arrow(_la(a), _la(a), _la(a)))


@lru_cache(maxsize=None)
def reverse(a: Type) -> Closed:
    return lfpl("reverse", "lam l1 . revAppend l1 nil", arrow(_la(a), _la(a)),
                revAppend=rev_append(a))


def unfolded(a: Type) -> Type:
    """``1 + diam * A * L(A)``"""
    return Sum(UNIT, Tensor(DIAMOND, Tensor(a, _la(a))))


@lru_cache(maxsize=None)
def lfold(a: Type) -> Closed:
    return lfpl("lfold", """
        lam x . case x .
        | inj1 _ => nil
        | inj2 (d, x, xs) => cons (d, x, xs)
    """, arrow(unfolded(a), _la(a)))


@lru_cache(maxsize=None)
def lunfold(a: Type) -> Closed:
    return lfpl("lunfold", """
        lam x . rec x .
        | nil => inj1 <>
        | cons (d, x, r) => inj2 (d, x, lfold r)
    """, arrow(_la(a), unfolded(a)), lfold=lfold(a))


def suspended(a: Type) -> Type:
    return arrow(UNIT_LIST, _la(a))


@lru_cache(maxsize=None)
def susp(a: Type) -> Closed:
    return lfpl("susp", """
        lam x . rec x .
        | nil => (lam _ . nil, nil)
        | cons (d, x, r) => letp (f, m) = r in
          ((lam n . case (lunfold n) .
             | inj1 _ => nil
             | inj2 (d', _, n') => cons (d', x, f n')), cons (d, <>, m))
    """, arrow(_la(a), Tensor(suspended(a), UNIT_LIST)), lunfold=lunfold(UNIT))


@lru_cache(maxsize=None)
def append(a: Type) -> Closed:
    """Concatenation: ``append xs ys = xs ++ ys``."""
    return lfpl("append", """
        lam xs . rec xs
        | nil => lam ys . ys
        | cons (d, x, r) => lam ys . cons (d, x, r ys)
    """, arrow(_la(a), _la(a), _la(a)))


def stdlib(a: Type = UNIT) -> dict[str, Closed]:
    return {c.name: c for c in (rev_append(a), reverse(a), lfold(a), lunfold(a), susp(a))}
