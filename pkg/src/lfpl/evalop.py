"""Big-step cost semantics over runtime values and environments.

``evaluate`` follows the evaluation rules one by one and returns the value,
the accumulated cost and how often each cost constant was charged.  Each
sub-judgement sees only the part of the environment named by its
``TypedTerm.ctx``.
"""

from __future__ import annotations

import os
from collections import Counter
from dataclasses import dataclass, field, fields, replace
from typing import Union

from .syntax import (
    Annot, App, Arrow, Case, Cons, Diamond, Empty, Inj, Lam, Leaf, LetPair,
    List, Nil, Node, Null, Pair, Pop, Prod, Proj, Push, Rec, Record, Stack,
    Sum, Tensor, TRec, Tree, Type, Unit, Var, WILDCARD,
)
from .typecheck import TypedTerm

# ---------------------------------------------------------------- values


@dataclass(frozen=True)
class DiamondV:
    pass


@dataclass(frozen=True)
class NullV:
    pass


@dataclass(frozen=True)
class InjV:
    index: int
    value: "Value"


@dataclass(frozen=True)
class PairV:
    left: "Value"
    right: "Value"


@dataclass(frozen=True)
class LamV:
    env: "Env"
    var: str
    body: TypedTerm


@dataclass(frozen=True)
class RecordV:
    env: "Env"
    left: TypedTerm
    right: TypedTerm


@dataclass(frozen=True)
class NilV:
    pass


@dataclass(frozen=True)
class ConsV:
    head: "Value"
    tail: "Value"


@dataclass(frozen=True)
class EmptyV:
    pass


@dataclass(frozen=True)
class PushV:
    head: "Value"
    tail: "Value"


@dataclass(frozen=True)
class LeafV:
    pass


@dataclass(frozen=True)
class NodeV:
    label: "Value"
    left: "Value"
    right: "Value"


Value = Union[DiamondV, NullV, InjV, PairV, LamV, RecordV, NilV, ConsV,
              EmptyV, PushV, LeafV, NodeV]

# An environment is a tuple of (name, value) pairs; lookup is right to left.
Env = tuple[tuple[str, Value], ...]

DIAMOND_V = DiamondV()
NULL_V = NullV()
NIL_V = NilV()
EMPTY_V = EmptyV()
LEAF_V = LeafV()


def list_value(items) -> Value:
    out: Value = NIL_V
    for v in reversed(list(items)):
        out = ConsV(v, out)
    return out


def list_items(v: Value) -> list[Value]:
    out = []
    while isinstance(v, ConsV):
        out.append(v.head)
        v = v.tail
    return out


def stack_value(items) -> Value:
    out: Value = EMPTY_V
    for v in reversed(list(items)):
        out = PushV(v, out)
    return out


def unit_list(n: int) -> Value:
    return list_value([NULL_V] * n)


def env_lookup(env: Env, name: str) -> Value:
    for n, v in reversed(env):
        if n == name:
            return v
    raise KeyError(name)


# ---------------------------------------------------------------- costs


@dataclass(frozen=True)
class CostModel:
    c_var: int = 1
    c_null: int = 1
    c_inj: int = 1
    c_case: int = 1
    c_pair: int = 1
    c_letp: int = 1
    c_lam: int = 1
    c_app: int = 1
    c_nil: int = 1
    c_cons: int = 1
    c_rec: int = 1
    c_record: int = 1
    c_proj1: int = 1
    c_proj2: int = 1
    c_empty: int = 1
    c_push: int = 1
    c_pop: int = 1
    c_leaf: int = 1
    c_node: int = 1
    c_trec: int = 1

    def __post_init__(self):
        for f in fields(self):
            v = getattr(self, f.name)
            if not isinstance(v, int) or v < 0:
                raise ValueError(f"{f.name} must be a natural number, got {v!r}")

    @classmethod
    def names(cls) -> list[str]:
        return [f.name for f in fields(cls)]

    @classmethod
    def uniform(cls, k: int) -> "CostModel":
        return cls(**{n: k for n in cls.names()})

    @classmethod
    def example_costs(cls) -> "CostModel":
        return replace(cls.uniform(0), c_rec=1, c_app=1)

    @classmethod
    def preset(cls, name: str) -> "CostModel":
        if name == "default":
            return cls()
        if name == "paper-example":
            return cls.example_costs()
        if name == "zero":
            return cls.uniform(0)
        raise ValueError(f"unknown cost preset {name!r}")

    @classmethod
    def from_text(cls, text: str) -> "CostModel":
        """Parse ``name = natural`` lines; unspecified constants keep their default."""
        vals = {}
        for i, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#")[0].split("--")[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"line {i}: expected 'name = natural'")
            k, v = (x.strip() for x in line.split("=", 1))
            if not k.startswith("c_"):
                k = "c_" + k
            if k not in cls.names():
                raise ValueError(f"line {i}: unknown cost constant {k!r}")
            if not v.isdigit():
                raise ValueError(f"line {i}: {v!r} is not a natural number")
            vals[k] = int(v)
        return cls(**vals)


# ---------------------------------------------------------------- evaluation


class FuelExhausted(Exception):
    """Evaluation exceeded its rule budget; on typed input this is a bug."""


class EvalInvariantError(Exception):
    """A runtime shape that type checking should have ruled out."""


DEFAULT_FUEL = 10_000_000


def default_fuel() -> int:
    return int(os.environ.get("LFPL_FUEL", DEFAULT_FUEL))


@dataclass
class EvalResult:
    value: Value
    cost: int
    step_count: int
    charges: Counter = field(default_factory=Counter)


class _Evaluator:
    def __init__(self, cm: CostModel, fuel: int):
        self.cm = cm
        self.fuel = fuel
        self.steps = 0
        self.charges: Counter = Counter()

    def charge(self, name: str, times: int = 1) -> int:
        self.charges[name] += times
        return getattr(self.cm, name) * times

    def tick(self):
        self.steps += 1
        if self.steps > self.fuel:
            raise FuelExhausted(f"evaluation exceeded {self.fuel} rule applications")

    def ev(self, tt: TypedTerm, env: dict) -> tuple[Value, int]:
        self.tick()
        try:
            local = {n: env[n] for n, _ in tt.ctx}
        except KeyError as e:
            raise EvalInvariantError(f"environment does not bind {e.args[0]}") from None
        return _RULES[type(tt.term)](self, tt, local)

    # -- rules; each gets its restricted environment
    def r_var(self, tt, env):
        return env[tt.term.name], self.charge("c_var")

    def r_null(self, tt, env):
        return NULL_V, self.charge("c_null")

    def r_inj(self, tt, env):
        v, c = self.ev(tt.subs[0], env)
        return InjV(tt.term.index, v), c + self.charge("c_inj")

    def r_case(self, tt, env):
        m, n1, n2 = tt.subs
        v, c = self.ev(m, env)
        if not isinstance(v, InjV):
            raise EvalInvariantError("case on a non-injection")
        branch, x = (n1, tt.term.left_var) if v.index == 1 else (n2, tt.term.right_var)
        inner = _extend(env, [(x, v.value)])
        v2, c2 = self.ev(branch, inner)
        return v2, c + c2 + self.charge("c_case")

    def r_pair(self, tt, env):
        v1, c1 = self.ev(tt.subs[0], env)
        v2, c2 = self.ev(tt.subs[1], env)
        return PairV(v1, v2), c1 + c2 + self.charge("c_pair")

    def r_letp(self, tt, env):
        m, body = tt.subs
        v, c = self.ev(m, env)
        if not isinstance(v, PairV):
            raise EvalInvariantError("letp on a non-pair")
        inner = _extend(env, [(tt.term.left_var, v.left), (tt.term.right_var, v.right)])
        v2, c2 = self.ev(body, inner)
        return v2, c + c2 + self.charge("c_letp")

    def r_lam(self, tt, env):
        return LamV(_freeze(tt.ctx, env), tt.term.var, tt.subs[0]), self.charge("c_lam")

    def r_app(self, tt, env):
        f, c1 = self.ev(tt.subs[0], env)
        x, c2 = self.ev(tt.subs[1], env)
        v, c3 = self.apply(f, x)
        return v, c1 + c2 + c3 + self.charge("c_app")

    def apply(self, f: Value, x: Value) -> tuple[Value, int]:
        if not isinstance(f, LamV):
            raise EvalInvariantError("application of a non-closure")
        inner = _extend(dict(f.env), [(f.var, x)])
        return self.ev(f.body, inner)

    def r_nil(self, tt, env):
        return NIL_V, self.charge("c_nil")

    def r_cons(self, tt, env):
        d, cd = self.ev(tt.subs[0], env)
        if not isinstance(d, DiamondV):
            raise EvalInvariantError("cons without a diamond")
        h, ch = self.ev(tt.subs[1], env)
        t, ct = self.ev(tt.subs[2], env)
        return ConsV(h, t), cd + ch + ct + self.charge("c_cons")

    def r_rec(self, tt, env):
        m, n1, n2 = tt.subs
        v, c = self.ev(m, env)
        items = []
        while isinstance(v, ConsV):
            items.append(v.head)
            v = v.tail
        if not isinstance(v, NilV):
            raise EvalInvariantError("rec on a non-list")
        term = tt.term
        # innermost first: rec y ... with y bound to the last tail is the nil case
        acc, total = self.ev(n1, env)
        total += c + self.charge("c_rec")
        for h in reversed(items):
            # the unrolled recursive call: Eval:Var on y plus one more Eval:ListE
            self.tick()
            total += self.charge("c_var") + self.charge("c_rec")
            step_env = _extend({}, [(term.d_var, DIAMOND_V), (term.h_var, h), (term.t_var, acc)])
            acc, c2 = self.ev(n2, step_env)
            total += c2
        return acc, total

    def r_record(self, tt, env):
        return RecordV(_freeze(tt.ctx, env), tt.subs[0], tt.subs[1]), self.charge("c_record")

    def r_proj(self, tt, env):
        r, c = self.ev(tt.subs[0], env)
        if not isinstance(r, RecordV):
            raise EvalInvariantError("projection from a non-record")
        comp = r.left if tt.term.index == 1 else r.right
        v, c2 = self.ev(comp, dict(r.env))
        return v, c + c2 + self.charge(f"c_proj{tt.term.index}")

    def r_empty(self, tt, env):
        return EMPTY_V, self.charge("c_empty")

    def r_push(self, tt, env):
        h, ch = self.ev(tt.subs[0], env)
        t, ct = self.ev(tt.subs[1], env)
        return PushV(h, t), ch + ct + self.charge("c_push")

    def r_pop(self, tt, env):
        m, n1, n2 = tt.subs
        v, c = self.ev(m, env)
        if isinstance(v, EmptyV):
            v2, c2 = self.ev(n1, env)
        elif isinstance(v, PushV):
            inner = _extend(env, [(tt.term.h_var, v.head), (tt.term.t_var, v.tail)])
            v2, c2 = self.ev(n2, inner)
        else:
            raise EvalInvariantError("pop on a non-stack")
        return v2, c + c2 + self.charge("c_pop")

    def r_leaf(self, tt, env):
        return LEAF_V, self.charge("c_leaf")

    def r_node(self, tt, env):
        d, cd = self.ev(tt.subs[0], env)
        if not isinstance(d, DiamondV):
            raise EvalInvariantError("node without a diamond")
        x, cx = self.ev(tt.subs[1], env)
        l, cl = self.ev(tt.subs[2], env)
        r, cr = self.ev(tt.subs[3], env)
        return NodeV(x, l, r), cd + cx + cl + cr + self.charge("c_node")

    def r_trec(self, tt, env):
        m, n1, n2 = tt.subs
        v, c = self.ev(m, env)
        out, c2 = self.fold_tree(tt, v)
        return out, c + c2

    def fold_tree(self, tt, v) -> tuple[Value, int]:
        """Cost of ``trec y ...`` on ``v`` excluding the scrutinee itself."""
        _, n1, n2 = tt.subs
        term = tt.term
        if isinstance(v, LeafV):
            out, c = self.ev(n1, {})
            return out, c + self.charge("c_trec")
        if not isinstance(v, NodeV):
            raise EvalInvariantError("trec on a non-tree")
        self.tick()
        self.tick()
        vl, cl = self.fold_tree(tt, v.left)
        vr, cr = self.fold_tree(tt, v.right)
        step_env = _extend({}, [(term.d_var, DIAMOND_V), (term.x_var, v.label),
                                (term.l_var, vl), (term.r_var, vr)])
        out, c = self.ev(n2, step_env)
        return out, cl + cr + c + self.charge("c_var", 2) + self.charge("c_trec")


def _extend(env: dict, pairs) -> dict:
    out = dict(env)
    for n, v in pairs:
        if n != WILDCARD:
            out[n] = v
    return out


def _freeze(ctx, env: dict) -> Env:
    return tuple((n, env[n]) for n, _ in ctx)


_RULES = {
    Var: _Evaluator.r_var, Null: _Evaluator.r_null, Inj: _Evaluator.r_inj,
    Case: _Evaluator.r_case, Pair: _Evaluator.r_pair, LetPair: _Evaluator.r_letp,
    Lam: _Evaluator.r_lam, App: _Evaluator.r_app, Nil: _Evaluator.r_nil,
    Cons: _Evaluator.r_cons, Rec: _Evaluator.r_rec, Record: _Evaluator.r_record,
    Proj: _Evaluator.r_proj, Empty: _Evaluator.r_empty, Push: _Evaluator.r_push,
    Pop: _Evaluator.r_pop, Leaf: _Evaluator.r_leaf, Node: _Evaluator.r_node,
    TRec: _Evaluator.r_trec,
}


def as_env(env) -> Env:
    if isinstance(env, dict):
        return tuple(env.items())
    return tuple(env)


def evaluate(env, tt: TypedTerm, cm: CostModel | None = None,
             fuel: int | None = None) -> EvalResult:
    """Evaluate ``tt`` under ``env`` (pairs or a dict); lookup is right to left."""
    cm = cm or CostModel()
    ev = _Evaluator(cm, default_fuel() if fuel is None else fuel)
    table = dict(as_env(env))
    v, c = ev.ev(tt, table)
    return EvalResult(v, c, ev.steps, ev.charges)


def apply_value(f: Value, x: Value, cm: CostModel | None = None,
                fuel: int | None = None) -> EvalResult:
    """Run a closure value on an argument (cost excludes C_app)."""
    ev = _Evaluator(cm or CostModel(), default_fuel() if fuel is None else fuel)
    v, c = ev.apply(f, x)
    return EvalResult(v, c, ev.steps, ev.charges)


def restrict(env, tt: TypedTerm) -> Env:
    """The part of ``env`` the judgement for ``tt`` actually uses."""
    table = dict(as_env(env))
    return tuple((n, table[n]) for n, _ in tt.ctx)


# ---------------------------------------------------------------- size


def size(v: Value) -> int:
    if isinstance(v, DiamondV):
        return 1
    if isinstance(v, (NullV, NilV, EmptyV, LeafV)):
        return 0
    if isinstance(v, (LamV, RecordV)):
        return size_env(v.env)
    if isinstance(v, InjV):
        return size(v.value)
    if isinstance(v, (PairV, PushV)):
        return size(v.left if isinstance(v, PairV) else v.head) + \
            size(v.right if isinstance(v, PairV) else v.tail)
    if isinstance(v, ConsV):
        n = 0
        while isinstance(v, ConsV):
            n += 1 + size(v.head)
            v = v.tail
        return n
    if isinstance(v, NodeV):
        return 1 + size(v.label) + size(v.left) + size(v.right)
    raise TypeError(f"not a value: {v!r}")


def size_env(env) -> int:
    return sum(size(v) for _, v in as_env(env))


def check_nsi(env, tt: TypedTerm, cm: CostModel | None = None) -> bool:
    """Evaluate and compare result size with the judgement's own environment."""
    r = evaluate(env, tt, cm)
    return size(r.value) <= size_env(restrict(env, tt))


# ---------------------------------------------------------------- value typing


def has_type(v: Value, a: Type) -> bool:
    if isinstance(a, Diamond):
        return isinstance(v, DiamondV)
    if isinstance(a, Unit):
        return isinstance(v, NullV)
    if isinstance(a, Sum):
        return isinstance(v, InjV) and has_type(v.value, a.left if v.index == 1 else a.right)
    if isinstance(a, Tensor):
        return isinstance(v, PairV) and has_type(v.left, a.left) and has_type(v.right, a.right)
    if isinstance(a, List):
        while isinstance(v, ConsV):
            if not has_type(v.head, a.elem):
                return False
            v = v.tail
        return isinstance(v, NilV)
    if isinstance(a, Stack):
        while isinstance(v, PushV):
            if not has_type(v.head, a.elem):
                return False
            v = v.tail
        return isinstance(v, EmptyV)
    if isinstance(a, Tree):
        if isinstance(v, LeafV):
            return True
        return (isinstance(v, NodeV) and has_type(v.label, a.elem)
                and has_type(v.left, a) and has_type(v.right, a))
    if isinstance(a, Arrow):
        if not isinstance(v, LamV):
            return False
        types = dict(v.body.ctx)
        if v.var != WILDCARD and types.get(v.var) != a.arg:
            return False
        types.pop(v.var, None)
        return v.body.type == a.res and env_has_types(v.env, types)
    if isinstance(a, Prod):
        if not isinstance(v, RecordV):
            return False
        return (v.left.type == a.left and v.right.type == a.right
                and env_has_types(v.env, dict(v.left.ctx)))
    return False


def env_has_types(env, types: dict) -> bool:
    """Every name in ``types`` is bound to a value of that type; extra
    (weakened) bindings are allowed."""
    table = dict(as_env(env))
    return all(n in table and has_type(table[n], t) for n, t in types.items())


# ---------------------------------------------------------------- printing


def show_value(v: Value) -> str:
    """Render in the value-literal syntax (closures are shown opaquely)."""
    if isinstance(v, NullV):
        return "<>"
    if isinstance(v, DiamondV):
        return "diamond"
    if isinstance(v, InjV):
        inner = show_value(v.value)
        if isinstance(v.value, InjV):
            inner = f"({inner})"
        return f"inj{v.index} {inner}"
    if isinstance(v, PairV):
        return f"({show_value(v.left)}, {show_value(v.right)})"
    if isinstance(v, (NilV, ConsV)):
        return "[" + ", ".join(show_value(x) for x in list_items(v)) + "]"
    if isinstance(v, (EmptyV, PushV)):
        items = []
        while isinstance(v, PushV):
            items.append(show_value(v.head))
            v = v.tail
        return "stack[" + ", ".join(items) + "]"
    if isinstance(v, LeafV):
        return "leaf"
    if isinstance(v, NodeV):
        return f"node({show_value(v.label)}, {show_value(v.left)}, {show_value(v.right)})"
    if isinstance(v, LamV):
        return f"<closure {v.var}>"
    if isinstance(v, RecordV):
        return "<record>"
    raise TypeError(f"not a value: {v!r}")


# ---------------------------------------------------------------- value literals


class ValueSyntaxError(ValueError):
    pass


def parse_value(text: str) -> Value:
    """Read a value literal: ``<>``, ``inj1 v``, ``(v, v)``, ``[v, ...]``,
    ``stack[v, ...]``, ``leaf``, ``node(v, t, t)``.  ``diamond`` is only
    accepted somewhere inside a list, stack or tree."""
    from .syntax import LfplSyntaxError, tokenize

    try:
        toks = tokenize(text)
    except LfplSyntaxError as e:
        raise ValueSyntaxError(str(e)) from None
    pos = 0

    def peek() -> str:
        return toks[pos].text if toks[pos].kind != "eof" else "<end>"

    def expect(s: str):
        nonlocal pos
        if peek() != s:
            t = toks[pos]
            raise ValueSyntaxError(f"{t.line}:{t.col}: expected {s!r}, found {peek()!r}")
        pos += 1

    def items(close: str, nested: bool) -> list[Value]:
        nonlocal pos
        out = []
        if peek() == close:
            pos += 1
            return out
        while True:
            out.append(value(nested))
            if peek() == ",":
                pos += 1
                continue
            expect(close)
            return out

    def value(nested: bool) -> Value:
        nonlocal pos
        t = toks[pos]
        s = peek()
        pos += 1
        if s == "<>":
            return NULL_V
        if s in ("inj1", "inj2"):
            return InjV(int(s[-1]), value(nested))
        if s == "(":
            first = value(nested)
            if peek() == ")":
                pos += 1
                return first
            expect(",")
            rest = items(")", nested)
            out = first
            if rest:
                out = rest[-1]
                for v in reversed([first] + rest[:-1]):
                    out = PairV(v, out)
            return out
        if s == "[":
            return list_value(items("]", True))
        if s == "stack":
            expect("[")
            return stack_value(items("]", True))
        if s == "leaf":
            return LEAF_V
        if s == "node":
            expect("(")
            label = value(True)
            expect(",")
            left = value(True)
            expect(",")
            right = value(True)
            expect(")")
            if not isinstance(left, (LeafV, NodeV)) or not isinstance(right, (LeafV, NodeV)):
                raise ValueSyntaxError(f"{t.line}:{t.col}: node children must be trees")
            return NodeV(label, left, right)
        if s in ("diamond", "diam"):
            if not nested:
                raise ValueSyntaxError(
                    f"{t.line}:{t.col}: a diamond is only allowed inside a list, stack or tree")
            return DIAMOND_V
        raise ValueSyntaxError(f"{t.line}:{t.col}: unexpected {s!r}")

    v = value(False)
    if toks[pos].kind != "eof":
        t = toks[pos]
        raise ValueSyntaxError(f"{t.line}:{t.col}: trailing input {t.text!r}")
    return v
