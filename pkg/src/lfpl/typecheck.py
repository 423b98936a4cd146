"""Affine type checking with deterministic context splitting.

Premises are checked left to right.  Whatever a premise consumes is removed
from the context seen by the next one, so disjointness of the split holds by
construction.  Branches of ``case``/``pop`` and the two halves of a lazy
record start from the same context and their demands are unioned.

The result is a ``TypedTerm`` tree.  Each node records the context of its own
judgement; the evaluator restricts environments to exactly that context.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .syntax import (
    DIAMOND, UNIT, WILDCARD, Annot, App, Arrow, Case, Cons, Empty, Inj, Lam,
    Leaf, LetPair, List, Nil, Node, Null, Pair, Pop, Prod, Proj, Push, Rec,
    Record, Stack, Sum, Tensor, Term, TRec, Tree, Type, Unit, Var, free_vars,
    is_diamond_free, show_type,
)

Ctx = tuple[tuple[str, Type], ...]

# typed closed ascriptions, keyed by node identity (the node is kept alive)
_CLOSED: dict[int, tuple[Term, "TypedTerm"]] = {}


@dataclass(frozen=True)
class TypedTerm:
    term: Term
    type: Type
    ctx: Ctx
    subs: tuple["TypedTerm", ...] = ()

    def ctx_names(self) -> tuple[str, ...]:
        return tuple(n for n, _ in self.ctx)


class LfplTypeError(Exception):
    KINDS = ("unbound variable", "variable reused", "type mismatch",
             "forbidden capture", "shadowing", "cannot infer")

    def __init__(self, kind: str, detail: str, term: Term | None = None,
                 expected: Type | None = None, actual: Type | None = None):
        super().__init__(f"{kind}: {detail}")
        self.kind = kind
        self.detail = detail
        self.term = term
        self.expected = expected
        self.actual = actual
        self.location: tuple[int, int] | None = None


@dataclass
class _Scope:
    """Variables visible at a program point.

    ``avail`` maps usable names to types in declaration order; ``consumed``
    names were already used by an earlier premise; ``hidden`` names exist
    outside an enclosing recursor body and may not be captured.
    """

    avail: dict[str, Type] = field(default_factory=dict)
    consumed: frozenset[str] = frozenset()
    hidden: frozenset[str] = frozenset()

    def without(self, used: frozenset[str]) -> "_Scope":
        return _Scope({n: t for n, t in self.avail.items() if n not in used},
                      self.consumed | used, self.hidden)

    def sealed(self) -> "_Scope":
        """Scope inside a recursor step: everything outer becomes hidden."""
        return _Scope({}, frozenset(), self.hidden | self.consumed | frozenset(self.avail))

    def bind(self, names: list[tuple[str, Type]], at: Term) -> "_Scope":
        seen = set()
        for n, _ in names:
            if n == WILDCARD:
                continue
            if n in seen:
                raise LfplTypeError("shadowing", f"binder {n} appears twice in one pattern", at)
            seen.add(n)
            if n in self.avail:
                raise LfplTypeError("shadowing", f"binder {n} shadows a variable in scope", at)
        avail = dict(self.avail)
        for n, t in names:
            if n != WILDCARD:
                avail[n] = t
        return _Scope(avail, self.consumed - seen, self.hidden - seen)

    def ctx_of(self, used: frozenset[str]) -> Ctx:
        return tuple((n, t) for n, t in self.avail.items() if n in used)


def _binder_ctx(scope: _Scope, used: frozenset[str], names: list[tuple[str, Type]]) -> Ctx:
    """Context of a binding premise: the outer demand plus all binders."""
    bound = {n for n, _ in names}
    outer = tuple((n, t) for n, t in scope.avail.items() if n in used and n not in bound)
    return outer + tuple((n, t) for n, t in names if n != WILDCARD)


class _Checker:
    def __init__(self):
        self.stack: list[Term] = []

    # ---- entry points
    def go(self, t: Term, scope: _Scope, expected: Type | None) -> tuple[TypedTerm, frozenset[str]]:
        self.stack.append(t)
        tt, used = self._go(t, scope, expected)
        if expected is not None and tt.type != expected:
            raise LfplTypeError(
                "type mismatch",
                f"expected {show_type(expected)}, found {show_type(tt.type)}",
                t, expected, tt.type)
        self.stack.pop()
        return tt, used

    def synth(self, t: Term, scope: _Scope) -> tuple[TypedTerm, frozenset[str]]:
        return self.go(t, scope, None)

    def need(self, expected: Type | None, cls, what: str, t: Term):
        if expected is None:
            raise LfplTypeError("cannot infer", f"{what} needs a type annotation", t)
        if not isinstance(expected, cls):
            raise LfplTypeError("type mismatch",
                                f"{what} cannot have type {show_type(expected)}",
                                t, expected, None)
        return expected

    def scrut_of(self, t: Term, scope: _Scope, cls, what: str):
        tt, used = self.synth(t, scope)
        if not isinstance(tt.type, cls):
            raise LfplTypeError("type mismatch",
                                f"{what} expects a {cls.__name__.lower()} type, found {show_type(tt.type)}",
                                t, None, tt.type)
        return tt, used

    def branches(self, scope: _Scope, expected: Type | None,
                 b1: tuple[Term, list], b2: tuple[Term, list]):
        """Check two alternative premises under one shared residual context."""
        (t1, names1), (t2, names2) = b1, b2
        s1, s2 = scope.bind(names1, t1), scope.bind(names2, t2)
        if expected is None:
            depth = len(self.stack)
            try:
                r1 = self.synth(t1, s1)
            except LfplTypeError as e:
                if e.kind != "cannot infer":
                    raise
                del self.stack[depth:]
                r2 = self.synth(t2, s2)
                r1 = self.go(t1, s1, r2[0].type)
            else:
                r2 = self.go(t2, s2, r1[0].type)
        else:
            r1 = self.go(t1, s1, expected)
            r2 = self.go(t2, s2, expected)
        strip1 = {n for n, _ in names1}
        strip2 = {n for n, _ in names2}
        used = (r1[1] - strip1) | (r2[1] - strip2)
        ctx1 = _binder_ctx(scope, used, names1)
        ctx2 = _binder_ctx(scope, used, names2)
        tt1 = TypedTerm(r1[0].term, r1[0].type, ctx1, r1[0].subs) if r1[0].ctx != ctx1 else r1[0]
        tt2 = TypedTerm(r2[0].term, r2[0].type, ctx2, r2[0].subs) if r2[0].ctx != ctx2 else r2[0]
        return tt1, tt2, frozenset(used), tt1.type

    def binder_body(self, t: Term, scope: _Scope, names: list, expected: Type | None):
        inner = scope.bind(names, t)
        tt, used = self.go(t, inner, expected)
        outer_used = used - {n for n, _ in names}
        ctx = _binder_ctx(scope, outer_used, names)
        if tt.ctx != ctx:
            tt = TypedTerm(tt.term, tt.type, ctx, tt.subs)
        return tt, frozenset(outer_used)

    # ---- rules
    def _go(self, t: Term, scope: _Scope, expected: Type | None):
        if isinstance(t, Var):
            if t.name in scope.avail:
                ty = scope.avail[t.name]
                return TypedTerm(t, ty, ((t.name, ty),)), frozenset([t.name])
            if t.name in scope.consumed:
                raise LfplTypeError("variable reused", f"{t.name} is used more than once", t)
            if t.name in scope.hidden:
                raise LfplTypeError(
                    "forbidden capture",
                    f"{t.name} is bound outside the recursor body and cannot be used inside it", t)
            raise LfplTypeError("unbound variable", f"{t.name} is not in scope", t)

        if isinstance(t, Null):
            return TypedTerm(t, UNIT, ()), frozenset()

        if isinstance(t, Annot):
            if not free_vars(t.body):
                # closed (e.g. an inlined definition): its binders live apart
                hit = _CLOSED.get(id(t))
                if hit is None or hit[0] is not t:
                    tt, _ = self.go(t.body, _Scope(), t.type)
                    hit = _CLOSED[id(t)] = (t, tt)
                return hit[1], frozenset()
            return self.go(t.body, scope, t.type)

        if isinstance(t, Inj):
            s = self.need(expected, Sum, "injection", t)
            comp = s.left if t.index == 1 else s.right
            tt, used = self.go(t.body, scope, comp)
            return TypedTerm(t, s, scope.ctx_of(used), (tt,)), used

        if isinstance(t, Case):
            m, um = self.scrut_of(t.scrut, scope, Sum, "case")
            rest = scope.without(um)
            a, b = m.type.left, m.type.right
            n1, n2, ub, ty = self.branches(rest, expected,
                                           (t.left, [(t.left_var, a)]),
                                           (t.right, [(t.right_var, b)]))
            used = um | ub
            return TypedTerm(t, ty, scope.ctx_of(used), (m, n1, n2)), used

        if isinstance(t, Pair):
            if expected is not None:
                s = self.need(expected, Tensor, "pair", t)
                l, ul = self.go(t.left, scope, s.left)
                r, ur = self.go(t.right, scope.without(ul), s.right)
            else:
                l, ul = self.synth(t.left, scope)
                r, ur = self.synth(t.right, scope.without(ul))
            used = ul | ur
            return TypedTerm(t, Tensor(l.type, r.type), scope.ctx_of(used), (l, r)), used

        if isinstance(t, LetPair):
            m, um = self.scrut_of(t.scrut, scope, Tensor, "letp")
            rest = scope.without(um)
            names = [(t.left_var, m.type.left), (t.right_var, m.type.right)]
            body, ub = self.binder_body(t.body, rest, names, expected)
            used = um | ub
            return TypedTerm(t, body.type, scope.ctx_of(used), (m, body)), used

        if isinstance(t, Lam):
            a = self.need(expected, Arrow, "lambda", t)
            body, ub = self.binder_body(t.body, scope, [(t.var, a.arg)], a.res)
            return TypedTerm(t, a, scope.ctx_of(ub), (body,)), ub

        if isinstance(t, App):
            f, uf = self.scrut_of(t.fn, scope, Arrow, "application")
            x, ux = self.go(t.arg, scope.without(uf), f.type.arg)
            used = uf | ux
            return TypedTerm(t, f.type.res, scope.ctx_of(used), (f, x)), used

        if isinstance(t, (Nil, Empty, Leaf)):
            cls = {Nil: List, Empty: Stack, Leaf: Tree}[type(t)]
            ty = self.need(expected, cls, type(t).__name__.lower(), t)
            return TypedTerm(t, ty, ()), frozenset()

        if isinstance(t, (Cons, Push, Node)):
            return self.constructor(t, scope, expected)

        if isinstance(t, Rec):
            m, um = self.scrut_of(t.scrut, scope, List, "rec")
            rest = scope.without(um)
            if expected is None:
                n1, u1 = self.synth(t.nil_case, rest)
            else:
                n1, u1 = self.go(t.nil_case, rest, expected)
            b = n1.type
            names = [(t.d_var, DIAMOND), (t.h_var, m.type.elem), (t.t_var, b)]
            inner = scope.sealed().bind(names, t)
            n2, _ = self.go(t.cons_case, inner, b)
            n2 = TypedTerm(n2.term, n2.type, tuple((n, ty) for n, ty in names if n != WILDCARD), n2.subs)
            used = um | u1
            return TypedTerm(t, b, scope.ctx_of(used), (m, n1, n2)), used

        if isinstance(t, Record):
            if expected is not None:
                s = self.need(expected, Prod, "record", t)
                l, ul = self.go(t.left, scope, s.left)
                r, ur = self.go(t.right, scope, s.right)
            else:
                l, ul = self.synth(t.left, scope)
                r, ur = self.synth(t.right, scope)
            used = ul | ur
            ctx = scope.ctx_of(used)
            l = TypedTerm(l.term, l.type, ctx, l.subs)
            r = TypedTerm(r.term, r.type, ctx, r.subs)
            return TypedTerm(t, Prod(l.type, r.type), ctx, (l, r)), used

        if isinstance(t, Proj):
            m, um = self.scrut_of(t.body, scope, Prod, "projection")
            ty = m.type.left if t.index == 1 else m.type.right
            return TypedTerm(t, ty, scope.ctx_of(um), (m,)), um

        if isinstance(t, Pop):
            m, um = self.scrut_of(t.scrut, scope, Stack, "pop")
            rest = scope.without(um)
            n1, n2, ub, ty = self.branches(rest, expected, (t.empty_case, []),
                                           (t.push_case, [(t.h_var, m.type.elem), (t.t_var, m.type)]))
            used = um | ub
            return TypedTerm(t, ty, scope.ctx_of(used), (m, n1, n2)), used

        if isinstance(t, TRec):
            m, um = self.scrut_of(t.scrut, scope, Tree, "trec")
            sealed = scope.sealed()
            if expected is None:
                n1, _ = self.synth(t.leaf_case, sealed)
            else:
                n1, _ = self.go(t.leaf_case, sealed, expected)
            b = n1.type
            names = [(t.d_var, DIAMOND), (t.x_var, m.type.elem), (t.l_var, b), (t.r_var, b)]
            n2, _ = self.go(t.node_case, sealed.bind(names, t), b)
            n2 = TypedTerm(n2.term, n2.type, tuple((n, ty) for n, ty in names if n != WILDCARD), n2.subs)
            n1 = TypedTerm(n1.term, n1.type, (), n1.subs)
            return TypedTerm(t, b, scope.ctx_of(um), (m, n1, n2)), um

        raise TypeError(f"not a term: {t!r}")

    def constructor(self, t, scope: _Scope, expected: Type | None):
        """cons / push / node: element fields first, then recursive fields."""
        cls = {Cons: List, Push: Stack, Node: Tree}[type(t)]
        if isinstance(t, Cons):
            fields = [("d", t.diamond), ("e", t.head), ("r", t.tail)]
        elif isinstance(t, Push):
            fields = [("e", t.head), ("r", t.tail)]
        else:
            fields = [("d", t.diamond), ("e", t.label), ("r", t.left), ("r", t.right)]
        ty = expected
        if ty is not None:
            ty = self.need(expected, cls, type(t).__name__.lower(), t)
        subs, used, cur = [], frozenset(), scope
        for role, sub in fields:
            if role == "d":
                want = DIAMOND
            elif role == "e":
                want = ty.elem if ty is not None else None
            else:
                want = ty
            if role == "e" and want is None:
                tt, u = self.synth(sub, cur)
                ty = cls(tt.type)
            elif role == "r" and want is None:
                raise LfplTypeError("cannot infer", f"{type(t).__name__.lower()} needs a type annotation", t)
            else:
                tt, u = self.go(sub, cur, want)
            subs.append(tt)
            used |= u
            cur = cur.without(u)
        return TypedTerm(t, ty, scope.ctx_of(used), tuple(subs)), used


def _locate(err: LfplTypeError, stack: list[Term], positions: dict[int, tuple[int, int]] | None):
    if not positions:
        return
    for t in reversed(stack):
        if id(t) in positions:
            err.location = positions[id(t)]
            return


def _run(ctx, term, expected, positions):
    names = [n for n, _ in ctx]
    if len(set(names)) != len(names):
        raise ValueError("context names must be distinct")
    scope = _Scope(dict(ctx))
    chk = _Checker()
    try:
        return chk.go(term, scope, expected)
    except LfplTypeError as e:
        _locate(e, chk.stack, positions)
        raise


def check(ctx, term: Term, expected: Type | None = None,
          positions: dict[int, tuple[int, int]] | None = None) -> TypedTerm:
    """Check ``term`` under ``ctx`` (pairs of name and type).

    With ``expected=None`` the type is synthesized where possible.  The root
    node's context is the consumed part of ``ctx``.
    """
    tt, _ = _run(tuple(ctx), term, expected, positions)
    return tt


def infer_usage(ctx, term: Term, expected: Type | None = None) -> frozenset[str]:
    """Names from ``ctx`` the term actually consumes."""
    _, used = _run(tuple(ctx), term, expected, None)
    return used


def check_closed(term: Term, expected: Type) -> TypedTerm:
    return check((), term, expected)


# ---------------------------------------------------------------- dup


def gen_dup(a: Type) -> Term:
    """Closed term of type ``a -o a * a`` copying its input (``a`` diamond-free)."""
    if not is_diamond_free(a):
        raise ValueError(f"{show_type(a)} is not diamond-free")
    return Lam("x", _dup_body(a, "x", 0))


def _dup_at(a: Type, x: str, depth: int) -> Term:
    return Annot(_dup_body(a, x, depth), Tensor(a, a))


def _dup_body(a: Type, x: str, depth: int) -> Term:
    if isinstance(a, Unit):
        return Pair(Var(x), Null())
    u, v = f"u{depth}", f"v{depth}"
    if isinstance(a, Sum):
        def branch(i: int, comp: Type) -> Term:
            y = f"y{depth}"
            return LetPair(_dup_at(comp, y, depth + 1), u, v,
                           Pair(Inj(i, Var(u)), Inj(i, Var(v))))
        y = f"y{depth}"
        return Case(Var(x), y, branch(1, a.left), y, branch(2, a.right))
    if isinstance(a, Tensor):
        p, q = f"p{depth}", f"q{depth}"
        p1, p2, q1, q2 = f"p{depth}a", f"p{depth}b", f"q{depth}a", f"q{depth}b"
        return LetPair(
            Var(x), p, q,
            LetPair(_dup_at(a.left, p, depth + 1), p1, p2,
                    LetPair(_dup_at(a.right, q, depth + 1), q1, q2,
                            Pair(Pair(Var(p1), Var(q1)), Pair(Var(p2), Var(q2))))))
    raise ValueError(f"{show_type(a)} is not diamond-free")
