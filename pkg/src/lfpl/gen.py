"""Random well-typed terms, environments and values for property tests.

Terms are built type-directed with affine bookkeeping: every variable is
consumed at most once, branches share what they leave untouched, and the
step cases of ``rec``/``trec`` see only their own binders.  Diamonds only
ever come from variables, so the generator cannot produce a closed term of
type diamond.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from . import evalop as op
from .evalden import random_den, value_of_den
from .syntax import (
    DIAMOND, UNIT, App, Arrow, Case, Cons, Diamond, Empty, Inj, Lam, Leaf,
    LetPair, List, Nil, Node, Null, Pair, Pop, Prod, Proj, Push, Rec, Record,
    Stack, Sum, Tensor, Term, TRec, Tree, Type, Unit, Var, is_first_order,
)
from .typecheck import TypedTerm, check


class NoTerm(Exception):
    """No term of the requested type can be built from what is available."""


@dataclass
class GenConfig:
    max_depth: int = 6
    type_depth: int = 2
    max_ctx: int = 4
    max_len: int = 4
    p_var: float = 0.3
    p_elim: float = 0.6
    allow_lazy: bool = True
    allow_stacks: bool = True
    allow_trees: bool = True


@dataclass
class Sample:
    ctx: tuple
    term: Term
    typed: TypedTerm
    env: tuple = field(repr=False)


class TermGen:
    def __init__(self, rng: random.Random, cfg: GenConfig | None = None):
        self.rng = rng
        self.cfg = cfg or GenConfig()
        self.fresh = 0

    def name(self, base: str = "v") -> str:
        self.fresh += 1
        return f"{base}{self.fresh}"

    # ---- types
    def type(self, depth: int | None = None, first_order: bool = False) -> Type:
        depth = self.cfg.type_depth if depth is None else depth
        r = self.rng
        leaves = [UNIT, UNIT, DIAMOND]
        if depth <= 0:
            return r.choice(leaves)
        kinds = ["unit", "diamond", "sum", "tensor", "list"]
        if not first_order:
            kinds += ["arrow", "arrow"]
            if self.cfg.allow_lazy:
                kinds.append("prod")
        if self.cfg.allow_stacks:
            kinds.append("stack")
        if self.cfg.allow_trees:
            kinds.append("tree")
        k = r.choice(kinds)
        sub = lambda: self.type(depth - 1, first_order)
        if k == "unit":
            return UNIT
        if k == "diamond":
            return DIAMOND
        if k == "sum":
            return Sum(sub(), sub())
        if k == "tensor":
            return Tensor(sub(), sub())
        if k == "arrow":
            return Arrow(sub(), sub())
        if k == "prod":
            return Prod(sub(), sub())
        elem = self.type(0) if depth <= 1 else sub()
        return {"list": List, "stack": Stack, "tree": Tree}[k](elem)

    # ---- terms
    def term(self, avail: dict, a: Type, depth: int) -> Term:
        r = self.rng
        same = [x for x, t in avail.items() if t == a]
        if same and (r.random() < self.cfg.p_var or isinstance(a, Diamond)):
            return self.use(avail, r.choice(same))
        if depth > 0 and r.random() < self.cfg.p_elim:
            cands = [x for x, t in avail.items() if self.eliminable(t, a)]
            if cands:
                return self.elim(avail, r.choice(cands), a, depth)
        return self.intro(avail, a, depth)

    def use(self, avail: dict, x: str) -> Term:
        del avail[x]
        return Var(x)

    def eliminable(self, t: Type, a: Type) -> bool:
        if isinstance(t, Arrow):
            return t.res == a
        if isinstance(t, Prod):
            return a in (t.left, t.right)
        return isinstance(t, (Tensor, Sum, List, Stack, Tree))

    def scoped(self, avail: dict, binders: dict, a: Type, depth: int) -> tuple[Term, dict]:
        """Generate under ``avail`` extended by ``binders``; returns what survives."""
        inner = dict(avail)
        inner.update(binders)
        body = self.term(inner, a, depth)
        for b in binders:
            inner.pop(b, None)
        return body, inner

    def meet(self, avail: dict, *rests: dict):
        for x in list(avail):
            if any(x not in r for r in rests):
                del avail[x]

    def elim(self, avail: dict, x: str, a: Type, depth: int) -> Term:
        t = avail.pop(x)
        d = depth - 1
        if isinstance(t, Tensor):
            p, q = self.name("p"), self.name("q")
            body, rest = self.scoped(avail, {p: t.left, q: t.right}, a, d)
            self.meet(avail, rest)
            return LetPair(Var(x), p, q, body)
        if isinstance(t, Sum):
            y1, y2 = self.name("l"), self.name("r")
            b1, r1 = self.scoped(avail, {y1: t.left}, a, d)
            b2, r2 = self.scoped(avail, {y2: t.right}, a, d)
            self.meet(avail, r1, r2)
            return Case(Var(x), y1, b1, y2, b2)
        if isinstance(t, List):
            nil_case = self.term(avail, a, d)
            dv, hv, tv = self.name("d"), self.name("h"), self.name("t")
            step = self.term({dv: DIAMOND, hv: t.elem, tv: a}, a, d)
            return Rec(Var(x), nil_case, dv, hv, tv, step)
        if isinstance(t, Stack):
            hv, tv = self.name("h"), self.name("s")
            b1, r1 = self.scoped(avail, {}, a, d)
            b2, r2 = self.scoped(avail, {hv: t.elem, tv: t}, a, d)
            self.meet(avail, r1, r2)
            return Pop(Var(x), b1, hv, tv, b2)
        if isinstance(t, Tree):
            leaf = self.term({}, a, d)
            dv, xv, lv, rv = (self.name(c) for c in "dxlr")
            step = self.term({dv: DIAMOND, xv: t.elem, lv: a, rv: a}, a, d)
            return TRec(Var(x), leaf, dv, xv, lv, rv, step)
        if isinstance(t, Arrow):
            return App(Var(x), self.term(avail, t.arg, d))
        if isinstance(t, Prod):
            sides = [i for i, s in ((1, t.left), (2, t.right)) if s == a]
            return Proj(self.rng.choice(sides), Var(x))
        raise AssertionError(t)

    def diamond_var(self, avail: dict) -> str | None:
        ds = [x for x, t in avail.items() if isinstance(t, Diamond)]
        return self.rng.choice(ds) if ds else None

    def intro(self, avail: dict, a: Type, depth: int) -> Term:
        r = self.rng
        d = max(depth - 1, 0)
        if isinstance(a, Diamond):
            x = self.diamond_var(avail)
            if x is None:
                raise NoTerm("diamond")
            return self.use(avail, x)
        if isinstance(a, Unit):
            return Null()
        if isinstance(a, Sum):
            i = r.randint(1, 2)
            saved = dict(avail)
            try:
                return Inj(i, self.term(avail, a.left if i == 1 else a.right, d))
            except NoTerm:
                avail.clear()
                avail.update(saved)
                return Inj(3 - i, self.term(avail, a.right if i == 1 else a.left, d))
        if isinstance(a, Tensor):
            return Pair(self.term(avail, a.left, d), self.term(avail, a.right, d))
        if isinstance(a, Arrow):
            y = self.name("x")
            body, rest = self.scoped(avail, {y: a.arg}, a.res, d)
            self.meet(avail, rest)
            return Lam(y, body)
        if isinstance(a, Prod):
            b1, r1 = self.scoped(avail, {}, a.left, d)
            b2, r2 = self.scoped(avail, {}, a.right, d)
            self.meet(avail, r1, r2)
            return Record(b1, b2)
        if isinstance(a, List):
            x = self.diamond_var(avail)
            if x is None or depth == 0 or r.random() < 0.3:
                return Nil()
            self.use(avail, x)
            return Cons(Var(x), self.term(avail, a.elem, d), self.term(avail, a, d))
        if isinstance(a, Stack):
            if depth == 0 or r.random() < 0.4:
                return Empty()
            return Push(self.term(avail, a.elem, d), self.term(avail, a, d))
        if isinstance(a, Tree):
            x = self.diamond_var(avail)
            if x is None or depth == 0 or r.random() < 0.3:
                return Leaf()
            self.use(avail, x)
            return Node(Var(x), self.term(avail, a.elem, d), self.term(avail, a, d),
                        self.term(avail, a, d))
        raise AssertionError(a)

    # ---- values
    def value(self, a: Type, depth: int = 2) -> op.Value:
        """A random value of type ``a``; closures come from evaluating random terms."""
        if is_first_order(a):
            return value_of_den(random_den(a, self.rng), a)
        if isinstance(a, Sum):
            i = self.rng.randint(1, 2)
            return op.InjV(i, self.value(a.left if i == 1 else a.right, depth))
        if isinstance(a, Tensor):
            return op.PairV(self.value(a.left, depth), self.value(a.right, depth))
        if isinstance(a, (List, Stack)):
            items = [self.value(a.elem, depth) for _ in range(self.rng.randint(0, 2))]
            return op.list_value(items) if isinstance(a, List) else op.stack_value(items)
        if isinstance(a, Tree):
            if self.rng.random() < 0.6:
                return op.LEAF_V
            return op.NodeV(self.value(a.elem, depth), op.LEAF_V, op.LEAF_V)
        # closures: evaluate a random term under a small first-order environment
        ctx = [(self.name("c"), self.type(1, first_order=True))
               for _ in range(self.rng.randint(0, 2 if depth > 0 else 0))]
        for _ in range(20):
            try:
                t = self.term(dict(ctx), a, self.cfg.max_depth - 1)
            except NoTerm:
                continue
            tt = check(ctx, t, a)
            env = tuple((x, self.value(ty, depth - 1)) for x, ty in ctx)
            return op.evaluate(env, tt).value
        raise NoTerm(f"closure of type {a}")

    # ---- samples
    def sample(self, closed: bool = False) -> Sample:
        for _ in range(100):
            n = 0 if closed else self.rng.randint(0, self.cfg.max_ctx)
            ctx = tuple((self.name("g"), self.type()) for _ in range(n))
            a = self.type()
            try:
                t = self.term(dict(ctx), a, self.cfg.max_depth)
                env = tuple((x, self.value(ty)) for x, ty in ctx)
            except NoTerm:
                continue
            tt = check(ctx, t, a)
            return Sample(ctx, t, tt, env)
        raise NoTerm("gave up after 100 attempts")


def samples(seed: int, count: int, cfg: GenConfig | None = None,
            closed: bool = False) -> list[Sample]:
    g = TermGen(random.Random(seed), cfg)
    return [g.sample(closed) for _ in range(count)]
