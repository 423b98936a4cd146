"""Polynomial cost bounds for terms, values and environments.

A ``CostPoly`` is a dense tuple of natural coefficients, index ``i`` being
the coefficient of ``n**i``.  ``term_poly`` bounds the evaluation cost of a
term as a function of the environment size; ``value_poly`` and ``env_poly``
bound the cost still latent in closures and lazy records.
"""

from __future__ import annotations

from dataclasses import dataclass

from .evalop import (
    ConsV, CostModel, InjV, LamV, NodeV, PairV, PushV, RecordV, Value,
    as_env, evaluate, restrict, size_env,
)
from .syntax import (
    App, Case, Cons, Empty, Inj, Lam, Leaf, LetPair, Nil, Node, Null, Pair,
    Pop, Proj, Push, Rec, Record, TRec, Var,
)
from .typecheck import TypedTerm


class CostPoly(tuple):
    """Canonical coefficient vector (no trailing zeros)."""

    def __new__(cls, coeffs=()):
        cs = [int(c) for c in coeffs]
        if any(c < 0 for c in cs):
            raise ValueError("coefficients must be natural numbers")
        while cs and cs[-1] == 0:
            cs.pop()
        return super().__new__(cls, cs)

    @classmethod
    def const(cls, c: int) -> "CostPoly":
        return cls([c])

    @property
    def degree(self) -> int:
        return max(len(self) - 1, 0)

    def coeff(self, i: int) -> int:
        return self[i] if i < len(self) else 0

    def __add__(self, other):  # tuple concatenation would be a trap
        return poly_add(self, other)

    def __call__(self, n: int) -> int:
        return poly_eval(self, n)

    def __repr__(self):
        return f"CostPoly({list(self)})"

    def __str__(self):
        return show_poly(self)


ZERO = CostPoly()


def poly_add(p, q) -> CostPoly:
    m = max(len(p), len(q))
    return CostPoly([_c(p, i) + _c(q, i) for i in range(m)])


def poly_max(p, q) -> CostPoly:
    m = max(len(p), len(q))
    return CostPoly([max(_c(p, i), _c(q, i)) for i in range(m)])


def poly_scale(k: int, p) -> CostPoly:
    return CostPoly([k * c for c in p])


def poly_shift_mul_n(p) -> CostPoly:
    """``n * P(n)``."""
    return CostPoly([0, *p]) if len(p) else ZERO


def poly_mul(p, q) -> CostPoly:
    if not len(p) or not len(q):
        return ZERO
    out = [0] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        for j, b in enumerate(q):
            out[i + j] += a * b
    return CostPoly(out)


def poly_compose(p, q) -> CostPoly:
    """``P(Q(n))`` by Horner's rule."""
    out = ZERO
    for c in reversed(list(p)):
        out = poly_add(poly_mul(out, q), CostPoly([c]))
    return out


def poly_eval(p, n: int) -> int:
    acc = 0
    for c in reversed(list(p)):
        acc = acc * n + c
    return acc


def show_poly(p) -> str:
    terms = []
    for i, c in enumerate(p):
        if c == 0:
            continue
        if i == 0:
            terms.append(str(c))
        elif i == 1:
            terms.append(f"{c}*n")
        else:
            terms.append(f"{c}*n^{i}")
    return " + ".join(terms) if terms else "0"


def parse_poly(text: str) -> CostPoly:
    """Inverse of ``show_poly`` (also accepts bare ``n`` and ``n^k``)."""
    coeffs: dict[int, int] = {}
    for part in text.replace(" ", "").split("+"):
        if not part:
            raise ValueError(f"bad polynomial {text!r}")
        if "n" not in part:
            c, k = int(part), 0
        else:
            head, _, tail = part.partition("n")
            c = int(head.rstrip("*")) if head.rstrip("*") else 1
            k = int(tail[1:]) if tail.startswith("^") else 1
            if tail and not tail.startswith("^"):
                raise ValueError(f"bad polynomial {text!r}")
        coeffs[k] = coeffs.get(k, 0) + c
    top = max(coeffs, default=-1)
    return CostPoly([coeffs.get(i, 0) for i in range(top + 1)])


def _c(p, i: int) -> int:
    return p[i] if i < len(p) else 0


N = CostPoly([0, 1])
ONE = CostPoly([1])


# ---------------------------------------------------------------- synthesis


class PolySynth:
    """Computes P_M, P_v and P_eta for one cost model, memoising per node."""

    def __init__(self, cm: CostModel):
        self.cm = cm
        self._memo: dict[int, tuple[TypedTerm, CostPoly]] = {}

    def term(self, tt: TypedTerm) -> CostPoly:
        hit = self._memo.get(id(tt))
        if hit is not None and hit[0] is tt:
            return hit[1]
        p = self._term(tt)
        self._memo[id(tt)] = (tt, p)
        return p

    def _term(self, tt: TypedTerm) -> CostPoly:
        cm, t, s = self.cm, tt.term, tt.subs
        k = CostPoly.const
        if isinstance(t, Var):
            return k(cm.c_var)
        if isinstance(t, (Null, Nil, Empty, Leaf)):
            return k({Null: cm.c_null, Nil: cm.c_nil, Empty: cm.c_empty, Leaf: cm.c_leaf}[type(t)])
        if isinstance(t, Record):
            return k(cm.c_record) + poly_max(self.term(s[0]), self.term(s[1]))
        if isinstance(t, Proj):
            return k(cm.c_proj1 if t.index == 1 else cm.c_proj2) + self.term(s[0])
        if isinstance(t, Lam):
            return k(cm.c_lam) + self.term(s[0])
        if isinstance(t, (Case, Pop)):
            c = cm.c_case if isinstance(t, Case) else cm.c_pop
            return k(c) + self.term(s[0]) + poly_max(self.term(s[1]), self.term(s[2]))
        if isinstance(t, Rec):
            base = k(cm.c_rec) + self.term(s[1])
            step = k(cm.c_var + cm.c_rec) + self.term(s[2])
            return self.term(s[0]) + base + poly_shift_mul_n(step)
        if isinstance(t, TRec):
            base = k(cm.c_trec) + self.term(s[1])
            step = k(2 * cm.c_var + cm.c_trec) + self.term(s[2])
            return self.term(s[0]) + poly_mul(N + ONE, base) + poly_shift_mul_n(step)
        const = {Inj: cm.c_inj, Pair: cm.c_pair, LetPair: cm.c_letp, App: cm.c_app,
                 Cons: cm.c_cons, Push: cm.c_push, Node: cm.c_node}
        if type(t) in const:
            out = k(const[type(t)])
            for sub in s:
                out = out + self.term(sub)
            return out
        raise TypeError(f"no polynomial clause for {type(t).__name__}")

    def value(self, v: Value) -> CostPoly:
        if isinstance(v, LamV):
            return self.env(v.env) + self.term(v.body)
        if isinstance(v, RecordV):
            return self.env(v.env) + poly_max(self.term(v.left), self.term(v.right))
        if isinstance(v, InjV):
            return self.value(v.value)
        if isinstance(v, PairV):
            return self.value(v.left) + self.value(v.right)
        if isinstance(v, (PushV, ConsV)):
            out = ZERO
            while isinstance(v, (PushV, ConsV)):
                out = out + self.value(v.head)
                v = v.tail
            return out
        if isinstance(v, NodeV):
            return self.value(v.label) + self.value(v.left) + self.value(v.right)
        return ZERO

    def env(self, env) -> CostPoly:
        out = ZERO
        for _, v in as_env(env):
            out = out + self.value(v)
        return out


def term_poly(tt: TypedTerm, cm: CostModel | None = None) -> CostPoly:
    return PolySynth(cm or CostModel()).term(tt)


def value_poly(v: Value, cm: CostModel | None = None) -> CostPoly:
    return PolySynth(cm or CostModel()).value(v)


def env_poly(env, cm: CostModel | None = None) -> CostPoly:
    return PolySynth(cm or CostModel()).env(env)


# ---------------------------------------------------------------- verification


@dataclass(frozen=True)
class BoundRow:
    n: int
    cost: int
    value_poly: int
    term_poly: int
    env_poly: int

    @property
    def lhs(self) -> int:
        return self.cost + self.value_poly

    @property
    def rhs(self) -> int:
        return self.term_poly + self.env_poly

    @property
    def slack(self) -> int:
        return self.rhs - self.lhs

    @property
    def ok(self) -> bool:
        return self.slack >= 0


@dataclass(frozen=True)
class BoundReport:
    env_size: int
    term_poly: CostPoly
    value_poly: CostPoly
    env_poly: CostPoly
    rows: tuple[BoundRow, ...]

    @property
    def ok(self) -> bool:
        return all(r.ok for r in self.rows)

    def violations(self) -> list[BoundRow]:
        return [r for r in self.rows if not r.ok]

    def tsv(self) -> str:
        lines = ["n\tcost\tvalue_poly\tterm_poly\tenv_poly\tslack"]
        for r in self.rows:
            lines.append(f"{r.n}\t{r.cost}\t{r.value_poly}\t{r.term_poly}\t{r.env_poly}\t{r.slack}")
        return "\n".join(lines)


def verify_bound(env, tt: TypedTerm, cm: CostModel | None = None,
                 n_range=None, result=None) -> BoundReport:
    """Evaluate once and test ``c + P_v(n) <= P_M(n) + P_eta(n)`` over ``n_range``.

    The environment is first cut down to the judgement's own context;
    ``n_range`` defaults to ``|eta| .. |eta| + 5``.
    """
    cm = cm or CostModel()
    eta = restrict(env, tt)
    size = size_env(eta)
    if n_range is None:
        n_range = range(size, size + 6)
    if any(n < size for n in n_range):
        raise ValueError(f"n must be at least the environment size {size}")
    r = result if result is not None else evaluate(eta, tt, cm)
    ps = PolySynth(cm)
    pm, pv, pe = ps.term(tt), ps.value(r.value), ps.env(eta)
    rows = tuple(BoundRow(n, r.cost, poly_eval(pv, n), poly_eval(pm, n), poly_eval(pe, n))
                 for n in n_range)
    return BoundReport(size, pm, pv, pe, rows)
