"""Helpers for assembling closed terms from source text and other closed terms."""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import cached_property

from ..evalden import DenValue, den_eval
from ..syntax import Annot, Arrow, List, Sum, Tensor, Term, Type, UNIT, UNIT_LIST, inline, parse_term, show_type
from ..typecheck import TypedTerm, check


@dataclass(eq=False)
class Closed:
    """A closed term together with its type; referenced from other terms by name."""

    name: str
    term: Term
    type: Type
    _ref: Annot | None = field(default=None, repr=False)

    @property
    def ref(self) -> Annot:
        if self._ref is None:
            self._ref = Annot(self.term, self.type)
        return self._ref

    @cached_property
    def typed(self) -> TypedTerm:
        return check((), self.ref, self.type)

    @cached_property
    def den(self) -> DenValue:
        return den_eval(self.typed, {})

    def source(self, name: str | None = None) -> str:
        """The term as an ``.lfpl`` definition (inlined parts stay ascribed)."""
        from ..syntax import show_term
        name = re.sub(r"[^A-Za-z0-9_']", "_", name or self.name)
        return f"{name} : {show_type(self.type)}\n{name} = {show_term(self.term)}\n"


def ty(a: Type) -> str:
    """Type rendered for splicing into source text."""
    return f"({show_type(a)})"


def lfpl(name: str, src: str, type_: Type, **refs: Closed) -> Closed:
    """Parse ``src``, splice in the given closed terms by name and type-check."""
    term = inline(parse_term(src), {k: v.ref for k, v in refs.items()})
    c = Closed(name, term, type_)
    c.typed  # fail early with a useful traceback
    return c


def mt(k: int) -> Type:
    """``(L(1))^k`` as a right-nested tuple (unit for k = 0)."""
    if k == 0:
        return UNIT
    out: Type = UNIT_LIST
    for _ in range(k - 1):
        out = Tensor(UNIT_LIST, out)
    return out


def fin(s: int) -> Type:
    """A type with exactly ``s`` inhabitants: ``1``, ``1 + 1``, ``1 + (1 + 1)``..."""
    if s < 1:
        raise ValueError("fin needs at least one element")
    out: Type = UNIT
    for _ in range(s - 1):
        out = Sum(UNIT, out)
    return out


def fin_term(s: int, i: int) -> str:
    """Source text of the ``i``-th element of ``fin(s)``."""
    if not 0 <= i < s:
        raise ValueError(f"index {i} out of range for fin({s})")
    if s == 1:
        return "<>"
    if i == 0:
        return "inj1 <>"
    return f"inj2 ({fin_term(s - 1, i - 1)})"


def fin_case(s: int, scrut: str, bodies: list[str], tag: str = "f") -> str:
    """Nested case on an element of ``fin(s)`` with one body per index."""
    assert len(bodies) == s
    if s == 1:
        return bodies[0]
    rest = fin_case(s - 1, f"{tag}{s}", bodies[1:], tag)
    return (f"(case {scrut} | inj1 {tag}u{s} => ({bodies[0]})"
            f" | inj2 {tag}{s} => {rest})")


def arrow(*types: Type) -> Type:
    out = types[-1]
    for a in reversed(types[:-1]):
        out = Arrow(a, out)
    return out
