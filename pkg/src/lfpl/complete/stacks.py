"""Bounded stacks that borrow diamonds instead of storing them.

Every construction yields a ``StackImpl``: the implementation type, closed
``empty``/``push``/``pop`` terms, the capacity polynomial and host-level
oracles ``valid``/``items``/``observe`` over denotations.  ``observe`` maps a
state to a first-order value so that "the state is unchanged" can be
compared even when states are functions.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Callable

from ..costpoly import CostPoly, poly_add, poly_eval, poly_shift_mul_n, show_poly
from ..evalden import (
    DenValue, InjD, ListD, PairD, STAR, den_apply, unit_list_d,
)
from ..syntax import Arrow, List, Sum, Tensor, Type, UNIT, UNIT_LIST, show_type
from .build import Closed, arrow, lfpl, mt, ty
from .stdlib import reverse, susp


@dataclass(eq=False)
class StackImpl:
    label: str
    elem: Type
    k: int
    impl: Type
    empty: Closed
    push: Closed
    pop: Closed
    bound: CostPoly
    valid: Callable[[int, DenValue], bool] = field(repr=False)
    items: Callable[[int, DenValue], list] = field(repr=False)
    observe: Callable[[int, DenValue], object] = field(repr=False)

    def capacity(self, n: int) -> int:
        return poly_eval(self.bound, n)

    def push_type(self) -> Type:
        return push_type(self.elem, self.k, self.impl)

    def pop_type(self) -> Type:
        return pop_type(self.elem, self.k, self.impl)

    def __str__(self):
        return f"{self.label} [k={self.k}, B={show_poly(self.bound)}]"


def push_type(a: Type, k: int, s: Type) -> Type:
    return arrow(mt(k), Tensor(a, s), Tensor(mt(k), Tensor(s, Sum(a, UNIT))))


def pop_type(a: Type, k: int, s: Type) -> Type:
    return arrow(mt(k), s, Tensor(mt(k), Tensor(s, Sum(UNIT, a))))


def m_den(n: int, k: int) -> DenValue:
    """Denotation of the diamond budget ``m_{n,k}``."""
    if k == 0:
        return STAR
    out = unit_list_d(n)
    for _ in range(k - 1):
        out = PairD(unit_list_d(n), out)
    return out


def m_value(n: int, k: int):
    """Operational value of ``m_{n,k}``: k unit lists of length n (n*k diamonds)."""
    from ..evalop import NULL_V, PairV, unit_list
    if k == 0:
        return NULL_V
    out = unit_list(n)
    for _ in range(k - 1):
        out = PairV(unit_list(n), out)
    return out


def _split(k: int) -> tuple[str, str]:
    """Source prefix binding ``l`` and ``m`` from a (k+1)-budget ``mm``."""
    if k == 0:
        return "letp (l, m) = (mm, <>) in", "m"
    return "letp (l, m) = mm in", "m"


def _join(k: int, l: str, m: str) -> str:
    return l if k == 0 else f"({l}, {m})"


# ---------------------------------------------------------------- constant


def _slots_type(a: Type, c: int) -> Type:
    slot = Sum(UNIT, a)
    if c == 0:
        return UNIT
    out: Type = slot
    for _ in range(c - 1):
        out = Tensor(slot, out)
    return out


def _const_core(a: Type, c: int) -> tuple[Closed, Closed]:
    """Push/pop on ``c`` slots without any diamond budget."""
    s = _slots_type(a, c)
    push_t = arrow(Tensor(a, s), Tensor(s, Sum(a, UNIT)))
    pop_t = arrow(s, Tensor(s, Sum(UNIT, a)))
    if c == 0:
        return (lfpl("cpush0", "lam p . letp (x, s) = p in (s, inj1 x)", push_t),
                lfpl("cpop0", "lam s . (s, inj1 <>)", pop_t))
    if c == 1:
        return (lfpl("cpush1", """
                    lam p . letp (x, s) = p in case s
                    | inj1 _ => (inj2 x, inj2 <>)
                    | inj2 y => (inj2 y, inj1 x)""", push_t),
                lfpl("cpop1", """
                    lam s . case s
                    | inj1 u => (inj1 u, inj1 <>)
                    | inj2 y => (inj1 <>, inj2 y)""", pop_t))
    ipush, ipop = _const_core(a, c - 1)
    push = lfpl(f"cpush{c}", """
        lam p . letp (x, s) = p in letp (h, rest) = s in case h
        | inj1 u => letp (rest2, r) = ipush (x, rest) in
                    (case r
                     | inj1 x2 => ((inj2 x2, rest2), inj2 <>)
                     | inj2 v => ((inj1 u, rest2), inj2 v))
        | inj2 y => ((inj2 y, rest), inj1 x)""", push_t, ipush=ipush)
    pop = lfpl(f"cpop{c}", """
        lam s . letp (h, rest) = s in case h
        | inj1 u => letp (rest2, r) = ipop rest in ((inj1 u, rest2), r)
        | inj2 y => ((inj1 <>, rest), inj2 y)""", pop_t, ipop=ipop)
    return push, pop


def _slots(c: int, s: DenValue) -> list:
    out = []
    for i in range(c):
        if i == c - 1:
            out.append(s)
        else:
            out.append(s.left)
            s = s.right
    return out


def stack_const(a: Type, c: int) -> StackImpl:
    """0-stack holding up to ``c`` items in ``c`` slots of type ``1 + A``."""
    s = _slots_type(a, c)
    core_push, core_pop = _const_core(a, c)
    empty_src = "<>" if c == 0 else ", ".join(["inj1 <>"] * c)
    empty = lfpl(f"cempty{c}", f"({empty_src})", s)
    push = lfpl(f"push_const{c}", """
        lam m . lam p . letp (s2, r) = core p in (m, (s2, r))""",
        push_type(a, 0, s), core=core_push)
    pop = lfpl(f"pop_const{c}", """
        lam m . lam s . letp (s2, r) = core s in (m, (s2, r))""",
        pop_type(a, 0, s), core=core_pop)

    def valid(n, st):
        sl = _slots(c, st)
        seen_full = False
        for x in sl:
            if not isinstance(x, InjD):
                return False
            if x.index == 2:
                seen_full = True
            elif seen_full or x.value != STAR:
                return False
        return True

    def items(n, st):
        return [x.value for x in _slots(c, st) if x.index == 2]

    return StackImpl(f"const({c})", a, 0, s, empty, push, pop, CostPoly([c]),
                     valid, items, lambda n, st: st)


# ---------------------------------------------------------------- inductive


def stack_inductive(inner: StackImpl) -> StackImpl:
    """(k+1)-stack over a suspended list of ``n`` inner stacks; bound ``n*B(n)``."""
    a, k, s = inner.elem, inner.k, inner.impl
    s2 = Arrow(UNIT_LIST, List(s))
    state = Tensor(mt(k), Tensor(Sum(a, UNIT), List(s)))
    pstate = Tensor(mt(k), Tensor(Sum(UNIT, a), List(s)))
    split, m = _split(k)
    empty = lfpl("empty_ind", """
        lam l . rec l
        | nil => nil
        | cons (d, u, r) => cons (d, emp, r)""", s2, emp=inner.empty)
    push = lfpl("push_ind", f"""
        lam mm . lam p .
        letp (x, s) = p in
        {split}
        letp (mq, q) = (rec (s l)
          | nil => ({m}, (inj1 x, nil))
          | cons (d, si, acc) =>
              letp (ma, qa) = acc in
              letp (pend, rest) = qa in
              case pend
              | inj1 y => letp (mb, qb) = ipush ma (y, si) in
                          letp (sj, r) = qb in
                          (mb, (r, cons (d, sj, rest)))
              | inj2 u => (ma, (inj2 u, cons (d, si, rest)))
          : {ty(state)}) in
        letp (r, lst) = q in
        letp (f, l2) = susp lst in
        ({_join(k, "l2", "mq")}, (f, r))""",
        push_type(a, k + 1, s2), ipush=inner.push, susp=susp(s))
    pop = lfpl("pop_ind", f"""
        lam mm . lam s .
        {split}
        letp (mq, q) = (rec (rev (s l))
          | nil => ({m}, (inj1 <>, nil))
          | cons (d, si, acc) =>
              letp (ma, qa) = acc in
              letp (pend, rest) = qa in
              case pend
              | inj1 u => letp (mb, qb) = ipop ma si in
                          letp (sj, r) = qb in
                          (mb, (r, cons (d, sj, rest)))
              | inj2 y => (ma, (inj2 y, cons (d, si, rest)))
          : {ty(pstate)}) in
        letp (r, lst) = q in
        letp (f, l2) = susp (rev lst) in
        ({_join(k, "l2", "mq")}, (f, r))""",
        pop_type(a, k + 1, s2), ipop=inner.pop, susp=susp(s), rev=reverse(s))

    def subs(n, st):
        return st(unit_list_d(n)).items

    def valid(n, st):
        parts = subs(n, st)
        if len(parts) != n or not all(inner.valid(n, p) for p in parts):
            return False
        cap = inner.capacity(n)
        sizes = [len(inner.items(n, p)) for p in parts]
        # empties, then at most one partial sub-stack, then full ones
        j = 0
        while j < n and sizes[j] == 0:
            j += 1
        return all(x == cap for x in sizes[j + 1:])

    def items(n, st):
        out = []
        for p in subs(n, st):
            out.extend(inner.items(n, p))
        return out

    def observe(n, st):
        return tuple(inner.observe(n, p) for p in subs(n, st))

    return StackImpl(f"ind({inner.label})", a, k + 1, s2, empty, push, pop,
                     poly_shift_mul_n(inner.bound), valid, items, observe)


# ---------------------------------------------------------------- weaken / add


def stack_weaken(inner: StackImpl) -> StackImpl:
    """Same stack, one more (ignored) unit list in the budget."""
    a, k, s = inner.elem, inner.k, inner.impl
    split, m = _split(k)
    push = lfpl("push_weak", f"""
        lam mm . lam p . {split}
        letp (mb, q) = ipush {m} p in ({_join(k, "l", "mb")}, q)""",
        push_type(a, k + 1, s), ipush=inner.push)
    pop = lfpl("pop_weak", f"""
        lam mm . lam s . {split}
        letp (mb, q) = ipop {m} s in ({_join(k, "l", "mb")}, q)""",
        pop_type(a, k + 1, s), ipop=inner.pop)
    return StackImpl(f"weak({inner.label})", a, k + 1, s, inner.empty, push, pop,
                     inner.bound, inner.valid, inner.items, inner.observe)


def stack_add(first: StackImpl, second: StackImpl) -> StackImpl:
    """Pair of stacks; ``first`` holds the top items and fills only once ``second`` is full."""
    if first.k != second.k:
        raise ValueError(f"arity mismatch: {first.k} vs {second.k}")
    if first.elem != second.elem:
        raise ValueError("element types differ")
    a, k = first.elem, first.k
    s = Tensor(first.impl, second.impl)
    empty = lfpl("empty_add", "(e1, e2)", s, e1=first.empty, e2=second.empty)
    push = lfpl("push_add", """
        lam m . lam p . letp (x, s) = p in letp (s1, s2) = s in
        letp (ma, qa) = push2 m (x, s2) in letp (s2b, r) = qa in
        case r
        | inj1 y => letp (mb, qb) = push1 ma (y, s1) in
                    letp (s1b, r2) = qb in (mb, ((s1b, s2b), r2))
        | inj2 u => (ma, ((s1, s2b), inj2 u))""",
        push_type(a, k, s), push1=first.push, push2=second.push)
    pop = lfpl("pop_add", """
        lam m . lam s . letp (s1, s2) = s in
        letp (ma, qa) = pop1 m s1 in letp (s1b, r) = qa in
        case r
        | inj1 u => letp (mb, qb) = pop2 ma s2 in
                    letp (s2b, r2) = qb in (mb, ((s1b, s2b), r2))
        | inj2 y => (ma, ((s1b, s2), inj2 y))""",
        pop_type(a, k, s), pop1=first.pop, pop2=second.pop)

    def valid(n, st):
        s1, s2 = st.left, st.right
        if not (first.valid(n, s1) and second.valid(n, s2)):
            return False
        return not first.items(n, s1) or len(second.items(n, s2)) == second.capacity(n)

    def items(n, st):
        return first.items(n, st.left) + second.items(n, st.right)

    def observe(n, st):
        return (first.observe(n, st.left), second.observe(n, st.right))

    return StackImpl(f"add({first.label}, {second.label})", a, k, s, empty, push, pop,
                     poly_add(first.bound, second.bound), valid, items, observe)


# ---------------------------------------------------------------- monomial / poly


def stack_monomial(a: Type, c: int, k: int) -> StackImpl:
    """k-stack bounded by ``c * n^k``."""
    out = stack_const(a, c)
    for _ in range(k):
        out = stack_inductive(out)
    return out


def weaken_to(impl: StackImpl, k: int) -> StackImpl:
    if impl.k > k:
        raise ValueError(f"cannot weaken a {impl.k}-stack to arity {k}")
    while impl.k < k:
        impl = stack_weaken(impl)
    return impl


def stack_poly(a: Type, p, arity: int | None = None) -> StackImpl:
    """Stack bounded by the polynomial ``p``, with budget arity ``deg p`` (or ``arity``)."""
    p = CostPoly(p)
    k = p.degree if arity is None else arity
    if k < p.degree:
        raise ValueError(f"arity {k} is below the degree {p.degree}")
    parts = [stack_monomial(a, c, i) for i, c in enumerate(p) if c]
    if not parts:
        parts = [stack_const(a, 0)]
    parts = [weaken_to(x, k) for x in parts]
    out = parts[-1]
    for x in reversed(parts[:-1]):
        out = stack_add(x, out)
    out.label = f"poly({show_poly(p)})"
    return out


# ---------------------------------------------------------------- model checking


@dataclass(frozen=True)
class StackFailure:
    step: int
    op: str
    detail: str

    def __str__(self):
        return f"op {self.step} ({self.op}): {self.detail}"


def check_stack(impl: StackImpl, n: int, script) -> StackFailure | None:
    """Replay ``script`` (items ``("push", x)`` or ``("pop",)``) against a host model.

    Returns the first divergence or None.  Every clause of the bounded
    stack contract is checked, including that the budget comes back intact.
    """
    m = m_den(n, impl.k)
    cap = impl.capacity(n)
    push, pop = impl.push.den, impl.pop.den
    s = impl.empty.den
    model: list = []
    if not impl.valid(n, s):
        return StackFailure(-1, "empty", "empty state is not valid")
    if impl.items(n, s) != []:
        return StackFailure(-1, "empty", "empty state has items")
    for i, step in enumerate(script):
        before = impl.observe(n, s)
        if step[0] == "push":
            x = step[1]
            out = den_apply(push, m, PairD(x, s))
        else:
            out = den_apply(pop, m, s)
        m2, s2, r = out.left, out.right.left, out.right.right
        if m2 != m:
            return StackFailure(i, step[0], "diamond budget not returned intact")
        if step[0] == "push":
            if len(model) >= cap:
                if r != InjD(1, x):
                    return StackFailure(i, "push", f"full stack should refuse, got {r}")
                if impl.observe(n, s2) != before:
                    return StackFailure(i, "push", "refused push changed the state")
            else:
                if r != InjD(2, STAR):
                    return StackFailure(i, "push", f"expected success, got {r}")
                model.insert(0, x)
        else:
            if not model:
                if r != InjD(1, STAR):
                    return StackFailure(i, "pop", f"empty stack should refuse, got {r}")
                if impl.observe(n, s2) != before:
                    return StackFailure(i, "pop", "refused pop changed the state")
            else:
                want = model.pop(0)
                if r != InjD(2, want):
                    return StackFailure(i, "pop", f"expected {want}, got {r}")
        if not impl.valid(n, s2):
            return StackFailure(i, step[0], "resulting state is not valid")
        got = impl.items(n, s2)
        if got != model:
            return StackFailure(i, step[0], f"items {got} differ from model {model}")
        s = s2
    return None


def random_script(rng: random.Random, elems: list, length: int, push_bias: float = 0.6):
    out = []
    for _ in range(length):
        if rng.random() < push_bias:
            out.append(("push", rng.choice(elems)))
        else:
            out.append(("pop",))
    return out


def edge_scripts(impl: StackImpl, n: int, elems: list) -> list:
    """Fill to capacity plus one, then drain plus one; and pop-on-empty."""
    cap = impl.capacity(n)
    fill = [("push", elems[i % len(elems)]) for i in range(cap + 1)]
    return [[("pop",)], fill, fill + [("pop",)] * (cap + 1)]
