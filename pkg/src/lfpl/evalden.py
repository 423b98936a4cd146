"""Reference set-theoretic semantics, with the diamond type inhabited.

Typed terms are compiled once into Python closures over dict environments,
so running a large completeness construction does not re-dispatch on syntax
at every step.  Lists and stacks are tuples; cons forgets its diamond.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Callable, Optional, Union

from . import evalop as op
from .syntax import (
    Annot, App, Arrow, Case, Cons, Diamond, Empty, Inj, Lam, Leaf, LetPair,
    List, Nil, Node, Null, Pair, Pop, Prod, Proj, Push, Rec, Record, Stack,
    Sum, Tensor, TRec, Tree, Type, Unit, Var, WILDCARD, is_first_order,
    show_type,
)
from .typecheck import TypedTerm


@dataclass(frozen=True)
class DiamondD:
    pass


@dataclass(frozen=True)
class StarD:
    pass


@dataclass(frozen=True)
class InjD:
    index: int
    value: "DenValue"


@dataclass(frozen=True)
class PairD:
    left: "DenValue"
    right: "DenValue"


@dataclass(frozen=True, eq=False)
class FunD:
    fn: Callable[["DenValue"], "DenValue"]

    def __call__(self, x):
        return self.fn(x)


@dataclass(eq=False)
class RecordD:
    """Pair of memoised thunks; denotationally just a pair."""

    left_thunk: Callable[[], "DenValue"]
    right_thunk: Callable[[], "DenValue"]
    _cache: dict = field(default_factory=dict, repr=False)

    def proj(self, i: int) -> "DenValue":
        if i not in self._cache:
            self._cache[i] = (self.left_thunk if i == 1 else self.right_thunk)()
        return self._cache[i]


@dataclass(frozen=True)
class ListD:
    items: tuple = ()


@dataclass(frozen=True)
class StackD:
    items: tuple = ()


@dataclass(frozen=True)
class TreeD:
    """A leaf when ``node`` is None, else ``(label, left, right)``."""

    node: Optional[tuple] = None


DenValue = Union[DiamondD, StarD, InjD, PairD, FunD, RecordD, ListD, StackD, TreeD]

DIAMOND_D = DiamondD()
STAR = StarD()
NIL_D = ListD(())
EMPTY_D = StackD(())
LEAF_D = TreeD(None)


def unit_list_d(n: int) -> ListD:
    return ListD((STAR,) * n)


# ---------------------------------------------------------------- compiler

_compiled: dict[int, tuple[TypedTerm, Callable]] = {}


def compile_term(tt: TypedTerm) -> Callable[[dict], DenValue]:
    hit = _compiled.get(id(tt))
    if hit is not None and hit[0] is tt:
        return hit[1]
    fn = _compile(tt)
    _compiled[id(tt)] = (tt, fn)
    return fn


def clear_cache():
    _compiled.clear()


def _bind(env: dict, *pairs) -> dict:
    out = dict(env)
    for n, v in pairs:
        if n != WILDCARD:
            out[n] = v
    return out


def _compile(tt: TypedTerm) -> Callable[[dict], DenValue]:
    t = tt.term
    sub = [compile_term(s) for s in tt.subs]

    if isinstance(t, Var):
        name = t.name
        return lambda env: env[name]
    if isinstance(t, Null):
        return lambda env: STAR
    if isinstance(t, Inj):
        i, m = t.index, sub[0]
        return lambda env: InjD(i, m(env))
    if isinstance(t, Case):
        m, n1, n2 = sub
        x1, x2 = t.left_var, t.right_var

        def case(env):
            v = m(env)
            if v.index == 1:
                return n1(_bind(env, (x1, v.value)))
            return n2(_bind(env, (x2, v.value)))
        return case
    if isinstance(t, Pair):
        a, b = sub
        return lambda env: PairD(a(env), b(env))
    if isinstance(t, LetPair):
        m, body = sub
        x1, x2 = t.left_var, t.right_var

        def letp(env):
            v = m(env)
            return body(_bind(env, (x1, v.left), (x2, v.right)))
        return letp
    if isinstance(t, Lam):
        body, x = sub[0], t.var

        def lam(env):
            return FunD(lambda a: body(_bind(env, (x, a))))
        return lam
    if isinstance(t, App):
        f, a = sub
        return lambda env: f(env).fn(a(env))
    if isinstance(t, Nil):
        return lambda env: NIL_D
    if isinstance(t, Cons):
        d, h, tl = sub

        def cons(env):
            d(env)
            return ListD((h(env),) + tl(env).items)
        return cons
    if isinstance(t, Rec):
        m, n1, n2 = sub
        xd, xh, xt = t.d_var, t.h_var, t.t_var

        def rec(env):
            items = m(env).items
            acc = n1(env)
            for h in reversed(items):
                acc = n2(_bind({}, (xd, DIAMOND_D), (xh, h), (xt, acc)))
            return acc
        return rec
    if isinstance(t, Record):
        a, b = sub
        return lambda env: RecordD(lambda: a(env), lambda: b(env))
    if isinstance(t, Proj):
        m, i = sub[0], t.index
        return lambda env: m(env).proj(i)
    if isinstance(t, Empty):
        return lambda env: EMPTY_D
    if isinstance(t, Push):
        h, tl = sub
        return lambda env: StackD((h(env),) + tl(env).items)
    if isinstance(t, Pop):
        m, n1, n2 = sub
        xh, xt = t.h_var, t.t_var

        def pop(env):
            s = m(env).items
            if not s:
                return n1(env)
            return n2(_bind(env, (xh, s[0]), (xt, StackD(s[1:]))))
        return pop
    if isinstance(t, Leaf):
        return lambda env: LEAF_D
    if isinstance(t, Node):
        d, x, l, r = sub

        def node(env):
            d(env)
            return TreeD((x(env), l(env), r(env)))
        return node
    if isinstance(t, TRec):
        m, n1, n2 = sub
        xd, xx, xl, xr = t.d_var, t.x_var, t.l_var, t.r_var

        def fold(tree):
            if tree.node is None:
                return n1({})
            label, left, right = tree.node
            return n2(_bind({}, (xd, DIAMOND_D), (xx, label), (xl, fold(left)), (xr, fold(right))))
        return lambda env: fold(m(env))
    raise TypeError(f"cannot compile {type(t).__name__}")


def den_eval(tt: TypedTerm, denv: dict | None = None) -> DenValue:
    return compile_term(tt)(dict(denv or {}))


def den_apply(f: DenValue, *args: DenValue) -> DenValue:
    for a in args:
        f = f.fn(a)
    return f


# ---------------------------------------------------------------- values


def den_of_value(v: op.Value) -> DenValue:
    if isinstance(v, op.DiamondV):
        return DIAMOND_D
    if isinstance(v, op.NullV):
        return STAR
    if isinstance(v, op.InjV):
        return InjD(v.index, den_of_value(v.value))
    if isinstance(v, op.PairV):
        return PairD(den_of_value(v.left), den_of_value(v.right))
    if isinstance(v, (op.NilV, op.ConsV)):
        return ListD(tuple(den_of_value(x) for x in op.list_items(v)))
    if isinstance(v, (op.EmptyV, op.PushV)):
        items = []
        while isinstance(v, op.PushV):
            items.append(den_of_value(v.head))
            v = v.tail
        return StackD(tuple(items))
    if isinstance(v, op.LeafV):
        return LEAF_D
    if isinstance(v, op.NodeV):
        return TreeD((den_of_value(v.label), den_of_value(v.left), den_of_value(v.right)))
    if isinstance(v, op.LamV):
        env = den_of_env(v.env)
        body = compile_term(v.body)
        x = v.var
        return FunD(lambda a: body(_bind(env, (x, a))))
    if isinstance(v, op.RecordV):
        env = den_of_env(v.env)
        a, b = compile_term(v.left), compile_term(v.right)
        return RecordD(lambda: a(env), lambda: b(env))
    raise TypeError(f"not a value: {v!r}")


def den_of_env(env) -> dict:
    return {n: den_of_value(v) for n, v in op.as_env(env)}


def value_of_den(d: DenValue, a: Type) -> op.Value:
    """Rebuild an operational value of first-order type ``a``."""
    if isinstance(a, Diamond):
        return op.DIAMOND_V
    if isinstance(a, Unit):
        return op.NULL_V
    if isinstance(a, Sum):
        return op.InjV(d.index, value_of_den(d.value, a.left if d.index == 1 else a.right))
    if isinstance(a, Tensor):
        return op.PairV(value_of_den(d.left, a.left), value_of_den(d.right, a.right))
    if isinstance(a, List):
        return op.list_value(value_of_den(x, a.elem) for x in d.items)
    if isinstance(a, Stack):
        return op.stack_value(value_of_den(x, a.elem) for x in d.items)
    if isinstance(a, Tree):
        if d.node is None:
            return op.LEAF_V
        x, l, r = d.node
        return op.NodeV(value_of_den(x, a.elem), value_of_den(l, a), value_of_den(r, a))
    raise ValueError(f"{show_type(a)} is not first-order")


# ---------------------------------------------------------------- coherence


def random_den(a: Type, rng: random.Random, depth: int = 0) -> DenValue:
    """A random element of the denotation of ``a`` (functions are constant)."""
    if isinstance(a, Diamond):
        return DIAMOND_D
    if isinstance(a, Unit):
        return STAR
    if isinstance(a, Sum):
        i = rng.randint(1, 2)
        return InjD(i, random_den(a.left if i == 1 else a.right, rng, depth + 1))
    if isinstance(a, Tensor):
        return PairD(random_den(a.left, rng, depth + 1), random_den(a.right, rng, depth + 1))
    if isinstance(a, (List, Stack)):
        n = rng.randint(0, max(0, 4 - depth))
        items = tuple(random_den(a.elem, rng, depth + 1) for _ in range(n))
        return ListD(items) if isinstance(a, List) else StackD(items)
    if isinstance(a, Tree):
        if depth > 3 or rng.random() < 0.4:
            return LEAF_D
        return TreeD((random_den(a.elem, rng, depth + 1), random_den(a, rng, depth + 1),
                      random_den(a, rng, depth + 1)))
    if isinstance(a, Arrow):
        out = random_den(a.res, rng, depth + 1)
        return FunD(lambda _x: out)
    if isinstance(a, Prod):
        l, r = random_den(a.left, rng, depth + 1), random_den(a.right, rng, depth + 1)
        return RecordD(lambda: l, lambda: r)
    raise TypeError(f"not a type: {a!r}")


def den_equal(x: DenValue, y: DenValue, a: Type, samples: int = 32,
              rng: random.Random | None = None, path: str = "") -> str | None:
    """None when equal at ``a``; otherwise a path to the first difference.

    Exact at first-order types; functions are compared on ``samples`` random
    arguments and records componentwise.
    """
    rng = rng or random.Random(0)
    if isinstance(a, Arrow):
        for i in range(samples):
            arg = random_den(a.arg, rng)
            bad = den_equal(x.fn(arg), y.fn(arg), a.res, samples, rng, f"{path}@arg{i}")
            if bad:
                return bad
        return None
    if isinstance(a, Prod):
        return (den_equal(x.proj(1), y.proj(1), a.left, samples, rng, path + ".1")
                or den_equal(x.proj(2), y.proj(2), a.right, samples, rng, path + ".2"))
    if is_first_order(a):
        return None if x == y else (path or "<root>")
    if isinstance(a, Sum):
        if x.index != y.index:
            return path + f".inj"
        return den_equal(x.value, y.value, a.left if x.index == 1 else a.right,
                         samples, rng, f"{path}.inj{x.index}")
    if isinstance(a, Tensor):
        return (den_equal(x.left, y.left, a.left, samples, rng, path + ".fst")
                or den_equal(x.right, y.right, a.right, samples, rng, path + ".snd"))
    if isinstance(a, (List, Stack)):
        if len(x.items) != len(y.items):
            return path + ".length"
        for i, (p, q) in enumerate(zip(x.items, y.items)):
            bad = den_equal(p, q, a.elem, samples, rng, f"{path}[{i}]")
            if bad:
                return bad
        return None
    if isinstance(a, Tree):
        if (x.node is None) != (y.node is None):
            return path + ".shape"
        if x.node is None:
            return None
        for part, p, q, ty in zip(("label", "left", "right"), x.node, y.node, (a.elem, a, a)):
            bad = den_equal(p, q, ty, samples, rng, f"{path}.{part}")
            if bad:
                return bad
        return None
    return None if x == y else (path or "<root>")


@dataclass
class CoherenceResult:
    ok: bool
    mismatch: str | None
    op_result: op.EvalResult


def coherence_check(tt: TypedTerm, env, cm: op.CostModel | None = None,
                    samples: int = 32, seed: int = 0) -> CoherenceResult:
    """Compare the denotation of the operational result with that of the term."""
    r = op.evaluate(env, tt, cm)
    lhs = den_of_value(r.value)
    rhs = den_eval(tt, den_of_env(env))
    bad = den_equal(lhs, rhs, tt.type, samples, random.Random(seed))
    return CoherenceResult(bad is None, bad, r)
