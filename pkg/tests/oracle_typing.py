"""Declarative affine typing by brute-force context splitting (core fragment)."""

from itertools import combinations

from lfpl.syntax import (
    DIAMOND, UNIT, Case, Cons, Inj, LetPair, List, Nil, Null, Pair, Rec, Sum, Tensor, Var,
)


def subsets(names):
    names = sorted(names)
    for r in range(len(names) + 1):
        yield from (frozenset(c) for c in combinations(names, r))


def derivable(ctx: dict, t, a) -> bool:
    """Some derivation of ``ctx |- t : a`` exists (weakening allowed anywhere)."""
    if isinstance(t, Var):
        return ctx.get(t.name) == a
    if isinstance(t, Null):
        return a == UNIT
    if isinstance(t, Nil):
        return isinstance(a, List)
    if isinstance(t, Inj):
        return isinstance(a, Sum) and derivable(ctx, t.body, a.left if t.index == 1 else a.right)
    if isinstance(t, Pair):
        if not isinstance(a, Tensor):
            return False
        return any(derivable({n: ctx[n] for n in s}, t.left, a.left)
                   and derivable({n: v for n, v in ctx.items() if n not in s}, t.right, a.right)
                   for s in subsets(ctx))
    if isinstance(t, Cons):
        if not isinstance(a, List):
            return False
        for s1 in subsets(ctx):
            if not derivable({n: ctx[n] for n in s1}, t.diamond, DIAMOND):
                continue
            rest = {n: v for n, v in ctx.items() if n not in s1}
            for s2 in subsets(rest):
                if (derivable({n: rest[n] for n in s2}, t.head, a.elem)
                        and derivable({n: v for n, v in rest.items() if n not in s2}, t.tail, a)):
                    return True
        return False
    # eliminators below have variable scrutinees
    s = t.scrut.name
    st = ctx.get(s)
    rest = {n: v for n, v in ctx.items() if n != s}
    if isinstance(t, Case):
        return (isinstance(st, Sum)
                and derivable({**rest, t.left_var: st.left}, t.left, a)
                and derivable({**rest, t.right_var: st.right}, t.right, a))
    if isinstance(t, LetPair):
        return isinstance(st, Tensor) and derivable(
            {**rest, t.left_var: st.left, t.right_var: st.right}, t.body, a)
    if isinstance(t, Rec):
        return (isinstance(st, List) and derivable(rest, t.nil_case, a)
                and derivable({t.d_var: DIAMOND, t.h_var: st.elem, t.t_var: a}, t.cons_case, a))
    raise TypeError(t)


def enumerate_terms(size: int, scope: tuple, ctx_types: dict, tag: str = "b"):
    """All core terms with exactly ``size`` nodes over variables in ``scope``."""
    if size < 1:
        return
    if size == 1:
        yield Null()
        yield Nil()
        for x in scope:
            yield Var(x)
        return
    for i in (1, 2):
        for b in enumerate_terms(size - 1, scope, ctx_types, tag + "i"):
            yield Inj(i, b)
    for k in range(1, size - 1):
        for l in enumerate_terms(k, scope, ctx_types, tag + "l"):
            for r in enumerate_terms(size - 1 - k, scope, ctx_types, tag + "r"):
                yield Pair(l, r)
    for k1 in range(1, size - 2):
        for k2 in range(1, size - 1 - k1):
            k3 = size - 1 - k1 - k2
            for d in enumerate_terms(k1, scope, ctx_types, tag + "d"):
                for h in enumerate_terms(k2, scope, ctx_types, tag + "h"):
                    for tl in enumerate_terms(k3, scope, ctx_types, tag + "t"):
                        yield Cons(d, h, tl)
    # binding forms: the scrutinee variable counts as one node
    for x in scope:
        ty = ctx_types.get(x)
        if isinstance(ty, Sum):
            l, r = tag + "L", tag + "R"
            for k in range(1, size - 1):
                for b1 in enumerate_terms(k, scope + (l,), ctx_types, l):
                    for b2 in enumerate_terms(size - 2 - k, scope + (r,), ctx_types, r):
                        yield Case(Var(x), l, b1, r, b2)
        if isinstance(ty, Tensor):
            p, q = tag + "P", tag + "Q"
            for b in enumerate_terms(size - 2, scope + (p, q), ctx_types, p):
                yield LetPair(Var(x), p, q, b)
        if isinstance(ty, List):
            dv, hv, tv = tag + "D", tag + "H", tag + "T"
            for k in range(1, size - 2):
                for n1 in enumerate_terms(k, scope, ctx_types, tag + "N"):
                    for n2 in enumerate_terms(size - 2 - k, (dv, hv, tv), ctx_types, tag + "S"):
                        yield Rec(Var(x), n1, dv, hv, tv, n2)
